"""Independent reference implementations used as test oracles.

Each one is written directly from the definition with plain Python loops
and shares no code with the library beyond the input containers.
"""
import itertools
import math

import mpmath


def tail(atoms, x):
    """Pr(|X| > x) by direct summation."""
    return math.fsum(p for v, p in atoms if abs(v) > x)


def right_inverse(f, x, candidates):
    """sup{y : f(y) > x} for a right-continuous step f with jumps in candidates."""
    best = 0.0
    for y in sorted(set(candidates) | {0.0}):
        if f(y) > x:
            # f is constant on [y, next breakpoint), so the sup is the next breakpoint
            later = [c for c in candidates if c > y]
            best = max(best, min(later) if later else math.inf)
    return best


def ell(components, t):
    """Least x with sum_n Pr(|X_n| > x) <= t, scanning the candidate magnitudes."""
    if t > 1:
        return 0.0
    mags = sorted({0.0} | {abs(v) for comp in components for v, _ in comp})
    for x in mags:
        if math.fsum(tail(c, x) for c in components) <= t:
            return x
    return mags[-1]


def max_tail(components, x):
    prod = 1.0
    for c in components:
        prod *= 1.0 - tail(c, x)
    return 1.0 - prod


def joint(components):
    """All joint outcomes as (prob, S, U, M, nonzero count, partial sums)."""
    out = []
    for combo in itertools.product(*components):
        prob = 1.0
        s, u, m, nz, partial = 0.0, 0.0, 0.0, 0, []
        for v, p in combo:
            prob *= p
            s += v
            u = max(u, abs(s))
            m = max(m, abs(v))
            nz += v != 0
            partial.append(s)
        out.append((prob, s, u, m, nz, partial))
    return out


def joint_tail(outcomes, key, x):
    return math.fsum(o[0] for o in outcomes if key(o) > x)


def rademacher_sum_F(t, n):
    """ln(1/t) / arccosh(t^(-1/n)) at 50 digits."""
    with mpmath.workdps(50):
        t = mpmath.mpf(t)
        return float(mpmath.log(1 / t) / mpmath.acosh(t ** (-mpmath.mpf(1) / n)))


def orlicz_norm(atoms, t, tol=1e-13):
    """inf{lam : E Phi_t(|X|/lam) <= 1} by mpmath bisection on the raw definition."""
    with mpmath.workdps(40):
        t = mpmath.mpf(t)

        def ephi(lam):
            return mpmath.fsum(p * (t ** (-abs(v) / lam) - 1) for v, p in atoms) / (1 / t - 1)

        big = max(abs(v) for v, _ in atoms)
        if big == 0:
            return 0.0
        lo, hi = mpmath.mpf(big) / 1e6, mpmath.mpf(big) * 4
        while ephi(hi) > 1:
            hi *= 2
        while hi - lo > tol * hi:
            mid = (lo + hi) / 2
            if ephi(mid) <= 1:
                hi = mid
            else:
                lo = mid
        return float(hi)
