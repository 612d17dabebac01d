"""Spectrally negative Levy process families with exponential jump structure.

Three parametric families, each constrained at construction to drift to
-infinity so the all-time supremum is finite:

* ``BrownianDrift``         -- sigma * B_t + mu * t with mu < 0,
* ``JumpDiffusion``         -- sigma * B_t + mu * t minus compound Poisson
                               Exp(eta) jumps at rate lambda,
* ``CompoundPoissonDrift``  -- mu * t minus the same jump structure, with
                               0 < mu < lambda / eta (no Gaussian part).

The Laplace exponent ``psi(z) = log E[exp(z X_1)]``, its right inverse
``Phi``, and the exponential law of the ultimate supremum (rate ``Phi(0)``)
are exposed as plain functions of the family.
"""

import math
from dataclasses import dataclass

from .numerics import bracketed_root, expand_bracket

__all__ = [
    "BrownianDrift",
    "JumpDiffusion",
    "CompoundPoissonDrift",
    "DegenerateDriftError",
    "SupremumLaw",
    "laplace_exponent",
    "psi_derivative",
    "phi",
    "drifts_to_minus_infinity",
    "supremum_law",
    "supremum_cdf",
    "median",
    "expected_theta",
]

PHI_RTOL = 1e-12


class DegenerateDriftError(ValueError):
    """The mean slope psi'(0+) is >= 0, so the supremum is a.s. infinite."""


def _require_positive(name, value):
    if not value > 0.0:
        raise ValueError(f"{name} must be > 0, got {value}")


@dataclass(frozen=True)
class BrownianDrift:
    """Brownian motion with drift: X_t = sigma * B_t + mu * t."""

    sigma: float
    mu: float

    def __post_init__(self):
        _require_positive("sigma", self.sigma)
        if not self.mu < 0.0:
            raise DegenerateDriftError(
                f"degenerate drift: psi'(0+) = mu = {self.mu} >= 0 "
                "(process does not drift to -infinity)"
            )

    def psi(self, z):
        return 0.5 * self.sigma**2 * z * z + self.mu * z

    def psi_prime(self, z):
        return self.sigma**2 * z + self.mu

    def drift_slope(self):
        return self.mu


@dataclass(frozen=True)
class JumpDiffusion:
    """Diffusion minus compound Poisson jumps: X_t = sigma*B_t + mu*t - sum Y_i.

    Jumps arrive at rate lam and are Exp(eta) distributed.
    """

    sigma: float
    mu: float
    lam: float
    eta: float

    def __post_init__(self):
        _require_positive("sigma", self.sigma)
        _require_positive("lam", self.lam)
        _require_positive("eta", self.eta)
        slope = self.mu - self.lam / self.eta
        if not slope < 0.0:
            raise DegenerateDriftError(
                f"degenerate drift: psi'(0+) = mu - lam/eta = {slope} >= 0 "
                "(process does not drift to -infinity)"
            )

    def psi(self, z):
        return 0.5 * self.sigma**2 * z * z + self.mu * z - self.lam * z / (self.eta + z)

    def psi_prime(self, z):
        return self.sigma**2 * z + self.mu - self.lam * self.eta / (self.eta + z) ** 2

    def drift_slope(self):
        return self.mu - self.lam / self.eta


@dataclass(frozen=True)
class CompoundPoissonDrift:
    """Pure drift minus compound Poisson jumps: X_t = mu*t - sum Y_i, mu > 0.

    Bounded variation with positive drift; the only family here that is
    irregular downwards.
    """

    mu: float
    lam: float
    eta: float

    def __post_init__(self):
        _require_positive("mu", self.mu)
        _require_positive("lam", self.lam)
        _require_positive("eta", self.eta)
        slope = self.mu - self.lam / self.eta
        if not slope < 0.0:
            raise DegenerateDriftError(
                f"degenerate drift: psi'(0+) = mu - lam/eta = {slope} >= 0 "
                "(requires 0 < mu < lam/eta)"
            )

    def psi(self, z):
        return self.mu * z - self.lam * z / (self.eta + z)

    def psi_prime(self, z):
        return self.mu - self.lam * self.eta / (self.eta + z) ** 2

    def drift_slope(self):
        return self.mu - self.lam / self.eta


@dataclass(frozen=True)
class SupremumLaw:
    """Law of the ultimate supremum: Exp(phi0), no atom for these families."""

    phi0: float
    median: float
    atom_at_zero: float = 0.0


def laplace_exponent(family, z):
    """psi(z) for z >= 0; psi(0) = 0 and psi is strictly convex."""
    if z < 0.0:
        raise ValueError(f"z must be >= 0, got {z}")
    return family.psi(z)


def psi_derivative(family, z):
    """psi'(z) for z >= 0."""
    if z < 0.0:
        raise ValueError(f"z must be >= 0, got {z}")
    return family.psi_prime(z)


def drifts_to_minus_infinity(family):
    """True iff psi'(0+) < 0, i.e. the supremum is a.s. finite."""
    return family.drift_slope() < 0.0


def phi(family, q):
    """Largest nonnegative root of psi(z) = q.

    Closed form for the quadratic families; for the jump diffusion with
    q > 0 the root is isolated by doubling an upper bound past Phi(0) and
    polished to relative tolerance PHI_RTOL.
    """
    if q < 0.0:
        raise ValueError(f"q must be >= 0, got {q}")
    if isinstance(family, BrownianDrift):
        return (-family.mu + math.sqrt(family.mu**2 + 2.0 * family.sigma**2 * q)) / family.sigma**2
    if isinstance(family, CompoundPoissonDrift):
        b = family.mu * family.eta - family.lam - q
        disc = b * b + 4.0 * family.mu * q * family.eta
        return (-b + math.sqrt(disc)) / (2.0 * family.mu)
    phi0 = _jump_diffusion_phi0(family)
    if q == 0.0:
        return phi0
    f = lambda z: family.psi(z) - q
    hi = expand_bracket(f, phi0, 1.0)
    return bracketed_root(f, phi0, hi, rtol=PHI_RTOL, df=family.psi_prime)


def _jump_diffusion_phi0(family):
    # Largest root of the quadratic sigma^2 z^2 / 2 + (mu + sigma^2 eta / 2) z + (mu eta - lam).
    half = family.eta / 2.0 + family.mu / family.sigma**2
    disc = half * half - 2.0 * (family.mu * family.eta - family.lam) / family.sigma**2
    return -half + math.sqrt(disc)


def supremum_law(family):
    p0 = phi(family, 0.0)
    return SupremumLaw(phi0=p0, median=math.log(2.0) / p0)


def supremum_cdf(family, x):
    """P(sup_t X_t <= x) = 1 - exp(-Phi(0) x) for x >= 0, 0 below."""
    if x < 0.0:
        return 0.0
    return -math.expm1(-phi(family, 0.0) * x)


def median(family):
    """Median of the ultimate supremum, log(2) / Phi(0)."""
    return math.log(2.0) / phi(family, 0.0)


def expected_theta(family):
    """Mean of the time at which the ultimate supremum is attained.

    Equals 1 / (Phi(0) * psi'(Phi(0))): the occupation time of [0, infinity)
    has Laplace transform Phi'(q) / Phi(q), and Phi'(0+) = 1 / psi'(Phi(0)).
    """
    p0 = phi(family, 0.0)
    return 1.0 / (p0 * family.psi_prime(p0))
