"""Numba path kernels for the three families.

Every kernel consumes a dedicated np.random.Generator (one substream per
path) and releases the GIL, so estimators parallelize over paths with
results independent of thread count. Jump epochs are inserted as exact
event times between grid points, never binned into grid cells; the
compound Poisson family is simulated event-by-event with no grid at all.

Paths terminate when the drawdown (running supremum minus current value)
first reaches ``cutoff``; conditional on that, the supremum increases
again with probability exp(-Phi(0) * cutoff), which the caller sizes to
be negligible. Hitting ``horizon`` first marks the path as not cleanly
truncated.

The sweep kernels record, for an ascending array of thresholds, the first
passage time of the drawdown over each threshold and the running value of
the payoff integral int (1 - 2 exp(-phi0 * drawdown)) dt at that passage
(exactly for compound Poisson, left-endpoint rule on the grid otherwise).

Store kernels replay the identical draw sequence while recording every
epoch; their summaries must agree bit-for-bit with the sweep kernels.
"""

import math

import numpy as np
from numba import njit

__all__ = [
    "bm_sweep",
    "jd_sweep",
    "cp_sweep",
    "bm_store",
    "jd_store",
    "cp_store",
    "bm_occupation",
    "jd_occupation",
    "cp_occupation",
    "bm_never_positive",
    "jd_never_positive",
]


@njit(nogil=True, cache=True)
def bm_sweep(gen, mu, sigma, dt, cutoff, horizon, phi0, ys, want_l, taus, ls):
    sqdt = math.sqrt(dt)
    nys = ys.shape[0]
    x = 0.0
    sup = 0.0
    theta = 0.0
    t = 0.0
    acc = 0.0
    k = 0
    while k < nys and ys[k] <= 0.0:
        taus[k] = 0.0
        ls[k] = 0.0
        k += 1
    while t < horizon:
        if want_l:
            acc += (1.0 - 2.0 * math.exp(-phi0 * (sup - x))) * dt
        t += dt
        x += mu * dt + sigma * sqdt * gen.standard_normal()
        if x > sup:
            sup = x
            theta = t
        else:
            d = sup - x
            while k < nys and d >= ys[k]:
                taus[k] = t
                ls[k] = acc
                k += 1
            if d >= cutoff and k >= nys:
                return theta, sup, t, True
    return theta, sup, t, False


@njit(nogil=True, cache=True)
def jd_sweep(gen, mu, sigma, lam, eta, dt, cutoff, horizon, phi0, ys, want_l, taus, ls):
    nys = ys.shape[0]
    x = 0.0
    sup = 0.0
    theta = 0.0
    t = 0.0
    acc = 0.0
    k = 0
    while k < nys and ys[k] <= 0.0:
        taus[k] = 0.0
        ls[k] = 0.0
        k += 1
    next_grid = dt
    next_jump = gen.exponential(1.0 / lam)
    while t < horizon:
        is_jump = next_jump < next_grid
        te = next_jump if is_jump else next_grid
        delta = te - t
        if want_l:
            acc += (1.0 - 2.0 * math.exp(-phi0 * (sup - x))) * delta
        if delta > 0.0:
            x += mu * delta + sigma * math.sqrt(delta) * gen.standard_normal()
        t = te
        # The diffusion value at a jump epoch is the left limit; it enters
        # the supremum before the jump lands.
        if x > sup:
            sup = x
            theta = t
        if is_jump:
            x -= gen.exponential(1.0 / eta)
            next_jump = t + gen.exponential(1.0 / lam)
        else:
            next_grid += dt
        d = sup - x
        while k < nys and d >= ys[k]:
            taus[k] = t
            ls[k] = acc
            k += 1
        if d >= cutoff and k >= nys:
            return theta, sup, t, True
    return theta, sup, t, False


@njit(nogil=True, cache=True)
def cp_sweep(gen, mu, lam, eta, cutoff, horizon, phi0, ys, want_l, taus, ls):
    nys = ys.shape[0]
    x = 0.0
    sup = 0.0
    theta = 0.0
    t = 0.0
    acc = 0.0
    k = 0
    while k < nys and ys[k] <= 0.0:
        taus[k] = 0.0
        ls[k] = 0.0
        k += 1
    while True:
        gap = gen.exponential(1.0 / lam)
        if t + gap > horizon:
            gap = horizon - t
            x += mu * gap
            if x > sup:
                sup = x
                theta = horizon
            return theta, sup, horizon, False
        if want_l:
            # Exact integral over the segment: drawdown falls linearly at
            # rate mu from d0, then sits at zero where the integrand is -1.
            d0 = sup - x
            fall = d0 / mu
            seg = gap if gap < fall else fall
            acc += seg - 2.0 * math.exp(-phi0 * d0) * (math.exp(phi0 * mu * seg) - 1.0) / (phi0 * mu)
            if gap > fall:
                acc -= gap - fall
        t += gap
        x += mu * gap
        if x > sup:
            sup = x
            theta = t
        x -= gen.exponential(1.0 / eta)
        d = sup - x
        while k < nys and d >= ys[k]:
            taus[k] = t
            ls[k] = acc
            k += 1
        if d >= cutoff and k >= nys:
            return theta, sup, t, True


@njit(nogil=True, cache=True)
def bm_store(gen, mu, sigma, dt, cutoff, horizon, times, values, sups):
    cap = times.shape[0]
    sqdt = math.sqrt(dt)
    x = 0.0
    sup = 0.0
    theta = 0.0
    t = 0.0
    times[0] = 0.0
    values[0] = 0.0
    sups[0] = 0.0
    i = 1
    while t < horizon:
        if i >= cap:
            return theta, sup, t, False, -1
        t += dt
        x += mu * dt + sigma * sqdt * gen.standard_normal()
        if x > sup:
            sup = x
            theta = t
        times[i] = t
        values[i] = x
        sups[i] = sup
        i += 1
        if sup - x >= cutoff:
            return theta, sup, t, True, i
    return theta, sup, t, False, i


@njit(nogil=True, cache=True)
def jd_store(gen, mu, sigma, lam, eta, dt, cutoff, horizon, times, values, sups):
    cap = times.shape[0]
    x = 0.0
    sup = 0.0
    theta = 0.0
    t = 0.0
    times[0] = 0.0
    values[0] = 0.0
    sups[0] = 0.0
    i = 1
    next_grid = dt
    next_jump = gen.exponential(1.0 / lam)
    while t < horizon:
        if i + 1 >= cap:
            return theta, sup, t, False, -1
        is_jump = next_jump < next_grid
        te = next_jump if is_jump else next_grid
        delta = te - t
        if delta > 0.0:
            x += mu * delta + sigma * math.sqrt(delta) * gen.standard_normal()
        t = te
        if x > sup:
            sup = x
            theta = t
        if is_jump:
            # record the left limit, then the post-jump value, same epoch
            times[i] = t
            values[i] = x
            sups[i] = sup
            i += 1
            x -= gen.exponential(1.0 / eta)
            next_jump = t + gen.exponential(1.0 / lam)
        else:
            next_grid += dt
        times[i] = t
        values[i] = x
        sups[i] = sup
        i += 1
        if sup - x >= cutoff:
            return theta, sup, t, True, i
    return theta, sup, t, False, i


@njit(nogil=True, cache=True)
def cp_store(gen, mu, lam, eta, cutoff, horizon, times, values, sups):
    cap = times.shape[0]
    x = 0.0
    sup = 0.0
    theta = 0.0
    t = 0.0
    times[0] = 0.0
    values[0] = 0.0
    sups[0] = 0.0
    i = 1
    while True:
        if i + 1 >= cap:
            return theta, sup, t, False, -1
        gap = gen.exponential(1.0 / lam)
        if t + gap > horizon:
            gap = horizon - t
            x += mu * gap
            if x > sup:
                sup = x
                theta = horizon
            times[i] = horizon
            values[i] = x
            sups[i] = sup
            return theta, sup, horizon, False, i + 1
        t += gap
        x += mu * gap
        if x > sup:
            sup = x
            theta = t
        times[i] = t
        values[i] = x
        sups[i] = sup
        i += 1
        x -= gen.exponential(1.0 / eta)
        times[i] = t
        values[i] = x
        sups[i] = sup
        i += 1
        if sup - x >= cutoff:
            return theta, sup, t, True, i


@njit(nogil=True, cache=True)
def bm_occupation(gen, mu, sigma, dt, y0, a, width, nbins, horizon, occ):
    sqdt = math.sqrt(dt)
    x = 0.0
    sup = 0.0
    t = 0.0
    while t < horizon:
        m_eff = y0 if sup < y0 else sup
        y = m_eff - x
        idx = int(y / width)
        if idx >= nbins:
            idx = nbins - 1
        occ[idx] += dt
        t += dt
        x += mu * dt + sigma * sqdt * gen.standard_normal()
        if x > sup:
            sup = x
        m_eff = y0 if sup < y0 else sup
        if m_eff - x >= a:
            return t, True
    return t, False


@njit(nogil=True, cache=True)
def jd_occupation(gen, mu, sigma, lam, eta, dt, y0, a, width, nbins, horizon, occ):
    x = 0.0
    sup = 0.0
    t = 0.0
    next_grid = dt
    next_jump = gen.exponential(1.0 / lam)
    while t < horizon:
        is_jump = next_jump < next_grid
        te = next_jump if is_jump else next_grid
        delta = te - t
        m_eff = y0 if sup < y0 else sup
        y = m_eff - x
        idx = int(y / width)
        if idx >= nbins:
            idx = nbins - 1
        occ[idx] += delta
        if delta > 0.0:
            x += mu * delta + sigma * math.sqrt(delta) * gen.standard_normal()
        t = te
        if x > sup:
            sup = x
        if is_jump:
            x -= gen.exponential(1.0 / eta)
            next_jump = t + gen.exponential(1.0 / lam)
        else:
            next_grid += dt
        m_eff = y0 if sup < y0 else sup
        if m_eff - x >= a:
            return t, True
    return t, False


@njit(nogil=True, cache=True)
def cp_occupation(gen, mu, lam, eta, y0, a, width, nbins, horizon, occ):
    """Exact segment-by-segment occupation; returns (passage, atom_time, clean)."""
    y = y0
    t = 0.0
    atom = 0.0
    while True:
        gap = gen.exponential(1.0 / lam)
        if t + gap > horizon:
            gap = horizon - t
        fall = y / mu
        seg = gap if gap < fall else fall
        if seg > 0.0:
            y_end = y - mu * seg
            i_lo = int(y_end / width)
            i_hi = int(y / width)
            if i_hi >= nbins:
                i_hi = nbins - 1
            if i_lo == i_hi:
                occ[i_lo] += seg
            else:
                for i in range(i_lo, i_hi + 1):
                    lo_lvl = i * width
                    if y_end > lo_lvl:
                        lo_lvl = y_end
                    hi_lvl = (i + 1) * width
                    if y < hi_lvl:
                        hi_lvl = y
                    if hi_lvl > lo_lvl:
                        occ[i] += (hi_lvl - lo_lvl) / mu
        if gap > fall:
            atom += gap - fall
            y = 0.0
        else:
            y -= mu * gap
        t += gap
        if t >= horizon:
            return t, atom, False
        y += gen.exponential(1.0 / eta)
        if y >= a:
            return t, atom, True


@njit(nogil=True, cache=True)
def bm_never_positive(gen, mu, sigma, dt, g, horizon):
    """(never_positive, clean): stop at first positive value or at drawdown g."""
    sqdt = math.sqrt(dt)
    x = 0.0
    t = 0.0
    while t < horizon:
        t += dt
        x += mu * dt + sigma * sqdt * gen.standard_normal()
        if x > 0.0:
            return False, True
        if x <= -g:
            return True, True
    return True, False


@njit(nogil=True, cache=True)
def jd_never_positive(gen, mu, sigma, lam, eta, dt, g, horizon):
    x = 0.0
    t = 0.0
    next_grid = dt
    next_jump = gen.exponential(1.0 / lam)
    while t < horizon:
        is_jump = next_jump < next_grid
        te = next_jump if is_jump else next_grid
        delta = te - t
        if delta > 0.0:
            x += mu * delta + sigma * math.sqrt(delta) * gen.standard_normal()
        t = te
        if x > 0.0:
            return False, True
        if is_jump:
            x -= gen.exponential(1.0 / eta)
            next_jump = t + gen.exponential(1.0 / lam)
        else:
            next_grid += dt
        if x <= -g:
            return True, True
    return True, False
