"""Quadrature and bracketed root finding used by the analytic solvers."""

__all__ = ["adaptive_simpson", "bisect_root", "bracketed_root", "expand_bracket"]


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f, a, b, tol, max_depth=40):
    """Integrate f over [a, b] by adaptive Simpson to absolute tolerance tol.

    Recursion is capped at max_depth halvings; the cap existing is a guard,
    smooth integrands converge long before reaching it.
    """
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    return _simpson_rec(f, a, fa, m, fm, b, fb, whole, tol, max_depth)


def _simpson_rec(f, a, fa, m, fm, b, fb, whole, tol, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _simpson_rec(f, a, fa, lm, flm, m, fm, left, tol / 2.0, depth - 1) + _simpson_rec(
        f, m, fm, rm, frm, b, fb, right, tol / 2.0, depth - 1
    )


def bisect_root(f, lo, hi, xtol=1e-10, max_iter=200):
    """Root of f on [lo, hi] by plain bisection to absolute tolerance xtol.

    Requires f(lo) <= 0 <= f(hi).
    """
    flo, fhi = f(lo), f(hi)
    if flo > 0.0 or fhi < 0.0:
        raise ValueError(f"root not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol:
            return mid
        fmid = f(mid)
        if fmid <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bracketed_root(f, lo, hi, rtol=1e-12, df=None, max_iter=200):
    """Root of f on [lo, hi] to relative tolerance rtol.

    Bisection carries the bracket most of the way; when a derivative is
    supplied, Newton steps (clipped to the bracket) polish the result.
    Requires f(lo) <= 0 <= f(hi).
    """
    flo, fhi = f(lo), f(hi)
    if flo > 0.0 or fhi < 0.0:
        raise ValueError(f"root not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    coarse = rtol if df is None else 1e-6
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= coarse * max(abs(mid), 1e-300):
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if fmid < 0.0:
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    if df is not None:
        for _ in range(8):
            fz, dfz = f(z), df(z)
            if dfz == 0.0:
                break
            step = fz / dfz
            z_new = min(max(z - step, lo), hi)
            if abs(z_new - z) <= rtol * max(abs(z_new), 1e-300):
                return z_new
            z = z_new
    return z


def expand_bracket(f, lo, width, max_doublings=60):
    """Smallest hi = lo + width * 2**k with f(hi) > 0, assuming f(lo) <= 0."""
    hi = lo + width
    for _ in range(max_doublings):
        if f(hi) > 0.0:
            return hi
        width *= 2.0
        hi = lo + width
    raise RuntimeError(f"failed to bracket a sign change above {lo} within {max_doublings} doublings")
