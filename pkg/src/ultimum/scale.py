"""Scale functions of the three families and the killed-potential identities.

Each family's scale function W is an exponential mixture
``W(x) = sum_i c_i * exp(r_i x)`` on x >= 0 (and 0 below), normalized so
that ``int_0^inf exp(-beta x) W(x) dx = 1 / psi(beta)`` for beta > Phi(0):

* Brownian drift:          W(x) = (1/mu) (1 - exp(-2 mu x / sigma^2)),
* jump diffusion:          W(x) = C1 e^{beta1 x} + C2 + C3 e^{beta3 x},
* compound Poisson drift:  W(x) = lam/(mu(lam - mu eta)) e^{Phi(0) x}
                                  - eta/(lam - mu eta).

``invert_laplace_scale`` inverts 1/psi numerically along a fixed Talbot
contour and serves as an independent oracle for the closed forms. The
killed potential of the reflected process on [0, a] has density
``u_a(y, x) = W(a-y) W'(x) / W'(a) - W(x-y)`` plus, for bounded variation
only, an atom ``W(a-y) W(0) / W'(a)`` at zero.
"""

import math
from dataclasses import dataclass, replace

import mpmath as mp

from .families import BrownianDrift, CompoundPoissonDrift, JumpDiffusion, phi

__all__ = [
    "ScaleModel",
    "scale_model",
    "rescale",
    "jump_diffusion_roots",
    "scale_w",
    "scale_w_prime",
    "scale_w_prime_at_zero",
    "invert_laplace_scale",
    "potential_density",
    "potential_atom",
]

TALBOT_NODES = 64

# Negative potential-density values in [-CLAMP_NEGATIVE, 0) are rounding and
# clamp to 0; anything below is a genuine inconsistency and raises.
CLAMP_NEGATIVE = 1e-9


@dataclass(frozen=True)
class ScaleModel:
    """Closed-form scale function of one family, as an exponential mixture.

    ``rates``/``amplitudes`` hold the exponents r_i and coefficients c_i of
    W(x) = prefactor * sum_i c_i exp(r_i x) on x > 0. ``w_at_zero`` is the
    structural value of W(0): exactly 0 for unbounded variation (where the
    amplitudes cancel only up to rounding), 1/drift for the compound
    Poisson family. ``prefactor`` is a positive overall scaling (1.0 for
    the Laplace normalization); threshold solutions must not depend on it.
    """

    family: object
    phi0: float
    rates: tuple
    amplitudes: tuple
    w_at_zero: float
    prefactor: float = 1.0

    @property
    def w0(self):
        return self.prefactor * self.w_at_zero


def jump_diffusion_roots(sigma, mu, lam, eta):
    """Nonzero roots (beta1, beta3) of the jump-diffusion Laplace exponent.

    beta1 < -eta < 0 < beta3; both solve the quadratic
    sigma^2 b^2 / 2 + (mu + sigma^2 eta / 2) b + (mu eta - lam) = 0 obtained
    by clearing the denominator of psi.
    """
    family = JumpDiffusion(sigma=sigma, mu=mu, lam=lam, eta=eta)  # validates
    half = eta / 2.0 + mu / sigma**2
    disc = math.sqrt(half * half - 2.0 * (mu * eta - lam) / sigma**2)
    return -half - disc, -half + disc


def scale_model(family):
    """Build the closed-form ScaleModel for a validated family."""
    phi0 = phi(family, 0.0)
    w_at_zero = 0.0
    if isinstance(family, BrownianDrift):
        rates = (0.0, phi0)
        amps = (1.0 / family.mu, -1.0 / family.mu)
    elif isinstance(family, JumpDiffusion):
        s2 = family.sigma**2
        b1, b3 = jump_diffusion_roots(family.sigma, family.mu, family.lam, family.eta)
        c1 = 2.0 * (family.eta + b1) / (s2 * b1 * (b1 - b3))
        c2 = 2.0 * family.eta / (s2 * b1 * b3)
        c3 = 2.0 * (family.eta + b3) / (s2 * b3 * (b3 - b1))
        rates = (b1, 0.0, b3)
        amps = (c1, c2, c3)
    elif isinstance(family, CompoundPoissonDrift):
        denom = family.lam - family.mu * family.eta
        rates = (0.0, phi0)
        amps = (-family.eta / denom, family.lam / (family.mu * denom))
        w_at_zero = 1.0 / family.mu
    else:
        raise TypeError(f"unsupported family: {family!r}")
    return ScaleModel(family=family, phi0=phi0, rates=rates, amplitudes=amps, w_at_zero=w_at_zero)


def rescale(model, factor):
    """The same model with W multiplied by a positive constant."""
    if not factor > 0.0:
        raise ValueError(f"scale factor must be > 0, got {factor}")
    return replace(model, prefactor=model.prefactor * factor)


def scale_w(model, x):
    """W(x); identically 0 on x < 0 and exactly W(0) at x = 0."""
    if x < 0.0:
        return 0.0
    if x == 0.0:
        return model.w0
    acc = 0.0
    for r, c in zip(model.rates, model.amplitudes):
        acc += c * math.exp(r * x)
    return model.prefactor * acc


def scale_w_prime(model, x):
    """W'(x) for x > 0; strictly positive."""
    if x <= 0.0:
        raise ValueError(f"x must be > 0, got {x}")
    return _w_prime(model, x)


def scale_w_prime_at_zero(model):
    """Right limit W'(0+), from the closed form (finite for these families)."""
    return _w_prime(model, 0.0)


def _w_prime(model, x):
    acc = 0.0
    for r, c in zip(model.rates, model.amplitudes):
        if r != 0.0:
            acc += c * r * math.exp(r * x)
    return model.prefactor * acc


def _psi_mp(family, s):
    if isinstance(family, BrownianDrift):
        return mp.mpf(family.sigma) ** 2 * s * s / 2 + mp.mpf(family.mu) * s
    if isinstance(family, JumpDiffusion):
        return (
            mp.mpf(family.sigma) ** 2 * s * s / 2
            + mp.mpf(family.mu) * s
            - mp.mpf(family.lam) * s / (mp.mpf(family.eta) + s)
        )
    return mp.mpf(family.mu) * s - mp.mpf(family.lam) * s / (mp.mpf(family.eta) + s)


def invert_laplace_scale(family, x, nodes=TALBOT_NODES):
    """W(x) by numeric inversion of 1/psi along a fixed Talbot contour.

    Independent of the closed forms in scale_model: only psi is evaluated.
    The contour crosses the real axis at r = 2*nodes/(5x) and must enclose
    the rightmost pole of 1/psi at Phi(0), which bounds the usable x range
    for a given node count. The node sum is evaluated in extended precision
    (the alternating terms grow like exp(2*nodes/5), which double precision
    cannot cancel to the accuracy the oracle is held to) and rounded to a
    float on return.
    """
    if x <= 0.0:
        raise ValueError(f"x must be > 0, got {x}")
    phi0 = phi(family, 0.0)
    r_cross = 2.0 * nodes / (5.0 * x)
    if r_cross <= 1.5 * phi0:
        raise ValueError(
            f"x = {x} too large for {nodes} Talbot nodes: contour crossing "
            f"{r_cross:.4g} must clear the pole at Phi(0) = {phi0:.4g}"
        )
    with mp.workdps(max(30, int(1.8 * nodes))):
        t = mp.mpf(x)
        r = mp.mpf(2 * nodes) / (5 * t)
        total = mp.exp(r * t) / _psi_mp(family, r) / 2
        for k in range(1, nodes):
            theta = mp.pi * k / nodes
            cot = mp.cot(theta)
            s = r * theta * (cot + 1j)
            weight = 1 + 1j * theta * (1 + cot * cot) - 1j * cot
            total += mp.exp(t * s) * weight / _psi_mp(family, s)
        return float(mp.re(total) * 2 / (5 * t))


def potential_density(model, y, x, a):
    """Occupation density u_a(y, x) of the reflected process killed at a.

    Expected time the reflection (started from y) spends at level x in (0, a)
    before first passage over a.
    """
    if not a > 0.0:
        raise ValueError(f"a must be > 0, got {a}")
    if not 0.0 <= y < a:
        raise ValueError(f"y must lie in [0, a), got y = {y}, a = {a}")
    if not 0.0 < x < a:
        raise ValueError(f"x must lie in (0, a), got x = {x}")
    u = scale_w(model, a - y) * _w_prime(model, x) / _w_prime(model, a) - scale_w(model, x - y)
    if u < 0.0:
        if u < -CLAMP_NEGATIVE * max(1.0, model.prefactor):
            raise RuntimeError(
                f"internal consistency: u_a({y}, {x}) = {u} below the rounding band"
            )
        u = 0.0
    return u


def potential_atom(model, y, a):
    """Occupation mass at 0 before first passage over a; nonzero only for
    bounded variation (W(0) > 0) and y < a."""
    if not a > 0.0:
        raise ValueError(f"a must be > 0, got {a}")
    if y < 0.0:
        raise ValueError(f"y must be >= 0, got {y}")
    if y >= a:
        return 0.0
    w0 = model.w0
    if w0 == 0.0:
        return 0.0
    return scale_w(model, a - y) * w0 / _w_prime(model, a)
