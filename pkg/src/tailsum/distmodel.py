"""Finite signed atomic distributions for individual summands.

Every analytic quantity in the package is computed on finite atomic laws;
continuous families only enter through :func:`discretize`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import special, stats

from .errors import InvalidParameters, NegativeProb, TotalMassExceedsOne
from .stepcurve import RIGHT, StepCurve

MASS_TOL = 1e-12

LE = "le"
GT = "gt"


@dataclass(frozen=True, eq=False)
class ComponentDistribution:
    """Law of one independent summand: atoms ``values`` with masses ``probs``.

    Values are sorted and distinct (bit-identical values are merged by
    :func:`make_atomic`), masses are positive and sum to 1 within 1e-12.
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        p = np.ascontiguousarray(self.probs, dtype=np.float64)
        if v.ndim != 1 or v.shape != p.shape or v.size == 0:
            raise InvalidParameters("values and probs must be nonempty 1-D arrays of equal length")
        if not np.all(np.isfinite(v)):
            raise InvalidParameters("atom values must be finite")
        if np.any(np.diff(v) <= 0):
            raise InvalidParameters("atom values must be strictly increasing")
        if np.any(p <= 0):
            raise NegativeProb("atom probabilities must be positive")
        if abs(p.sum() - 1.0) > MASS_TOL:
            raise InvalidParameters(f"atom probabilities sum to {p.sum()!r}, not 1")
        v.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    @cached_property
    def tail_curve(self) -> StepCurve:
        """``x -> Pr(|X| > x)``."""
        return StepCurve.from_masses(self.values, self.probs)

    @cached_property
    def _cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    def is_positive(self) -> bool:
        return bool(self.values[0] >= 0.0)

    def is_symmetric(self, tol: float = MASS_TOL) -> bool:
        """True when the atom multiset is closed under negation with equal masses."""
        if not np.array_equal(-self.values[::-1], self.values):
            return False
        return bool(np.all(np.abs(self.probs - self.probs[::-1]) <= tol))

    def tail_at(self, x: float) -> float:
        return tail_at(self, x)

    def quantile_at(self, u: float) -> float:
        return quantile_at(self, u)

    def log_exp_moment(self, a: float) -> float:
        return log_exp_moment(self, a)

    def truncate(self, s: float, side: str = LE) -> "ComponentDistribution":
        return truncate(self, s, side)

    def scaled(self, c: float) -> "ComponentDistribution":
        """Law of ``c * X``."""
        return make_atomic(list(zip((c * self.values).tolist(), self.probs.tolist())))

    def abs(self) -> "ComponentDistribution":
        """Law of ``|X|``."""
        return make_atomic(list(zip(np.abs(self.values).tolist(), self.probs.tolist())))

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF draw(s); one uniform per returned value."""
        u = rng.random(size)
        idx = np.searchsorted(self._cdf, u, side="right")
        idx = np.minimum(idx, self.values.size - 1)
        out = self.values[idx]
        return float(out) if np.ndim(out) == 0 else out

    def __eq__(self, other):
        if not isinstance(other, ComponentDistribution):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.values.tobytes(), self.probs.tobytes()))

    def __repr__(self):
        if self.values.size <= 6:
            return f"ComponentDistribution({self.atoms})"
        return f"ComponentDistribution(<{self.values.size} atoms in [{self.values[0]:g}, {self.values[-1]:g}]>)"


def make_atomic(atoms) -> ComponentDistribution:
    """Build a distribution from ``(value, prob)`` pairs.

    Equal values are merged, atoms sorted, and any mass deficit is put on the
    value 0 (the same place truncation sends discarded mass).

    >>> make_atomic([(5, 0.3)]).atoms
    [(0.0, 0.7), (5.0, 0.3)]
    """
    pairs = [(float(v), float(p)) for v, p in atoms]
    if not pairs:
        raise InvalidParameters("at least one atom is required")
    for v, p in pairs:
        if not (p > 0):
            raise NegativeProb(f"probability {p!r} for value {v!r} is not positive")
        if not math.isfinite(v):
            raise InvalidParameters(f"atom value {v!r} is not finite")
    total = math.fsum(p for _, p in pairs)
    if total > 1.0 + MASS_TOL:
        raise TotalMassExceedsOne(f"total probability {total!r} exceeds 1")
    merged: dict[float, float] = {}
    for v, p in pairs:
        v = v + 0.0  # fold -0.0 into 0.0
        merged[v] = merged.get(v, 0.0) + p
    deficit = 1.0 - total
    if deficit > MASS_TOL:
        merged[0.0] = merged.get(0.0, 0.0) + deficit
    values = np.array(sorted(merged))
    probs = np.array([merged[v] for v in values.tolist()])
    return ComponentDistribution(values, probs)


def point_mass(c: float) -> ComponentDistribution:
    return make_atomic([(c, 1.0)])


def rademacher(weight: float = 1.0) -> ComponentDistribution:
    return make_atomic([(-weight, 0.5), (weight, 0.5)])


def truncate(d: ComponentDistribution, s: float, side: str = LE) -> ComponentDistribution:
    """``X * 1{|X| <= s}`` (``LE``) or ``X * 1{|X| > s}`` (``GT``); removed mass goes to 0."""
    if s < 0:
        raise InvalidParameters("truncation level must be nonnegative")
    mags = np.abs(d.values)
    if side == LE:
        keep = mags <= s
    elif side == GT:
        keep = mags > s
    else:
        raise InvalidParameters(f"side must be {LE!r} or {GT!r}")
    if keep.all():
        return d
    keep &= d.values != 0
    atoms = list(zip(d.values[keep].tolist(), d.probs[keep].tolist()))
    # the atom at 0 takes the complement, so rounding never pushes the total past 1
    zero = 1.0 - math.fsum(d.probs[keep])
    if zero > 0:
        atoms.append((0.0, zero))
    return make_atomic(atoms)


def tail_at(d: ComponentDistribution, x: float) -> float:
    """``Pr(|X| > x)``."""
    if x < 0:
        raise InvalidParameters("x must be nonnegative")
    return d.tail_curve(x)


def quantile_at(d: ComponentDistribution, u: float) -> float:
    """Decreasing rearrangement ``X*(u) = sup{y : Pr(|X| > y) > u}`` (0 if empty)."""
    if not 0.0 <= u <= 1.0:
        raise InvalidParameters("u must lie in [0, 1]")
    return d.tail_curve.inverse(u, RIGHT)


def log_exp_moment(d: ComponentDistribution, a: float) -> float:
    """``ln E exp(a X)`` evaluated with log-sum-exp."""
    if a == 0:
        return 0.0
    return float(special.logsumexp(a * d.values, b=d.probs))


def sample(d: ComponentDistribution, rng_state: np.random.Generator) -> float:
    return d.sample(rng_state)


# ---------------------------------------------------------------------------
# continuous families
# ---------------------------------------------------------------------------

FAMILIES = ("gaussian", "exponential", "pareto", "uniform", "weibull")


MAX_EPS_MASS = 0.5
MAX_ATOMS = 200_000


@dataclass(frozen=True)
class ContinuousFamilySpec:
    """A continuous law plus the tolerances used to discretize it.

    Parameters per family: gaussian ``(mean, sd)``, exponential ``(rate,)``,
    pareto ``(alpha, x_min)``, uniform ``(low, high)``, weibull
    ``(shape, scale)``.
    """

    family: str
    params: tuple
    eps_mass: float = 1e-3
    eps_value: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        if not 0 < self.eps_mass <= MAX_EPS_MASS:
            raise InvalidParameters(f"eps_mass must lie in (0, {MAX_EPS_MASS}]")
        if not self.eps_value > 0:
            raise InvalidParameters("eps_value must be positive")
        _family_law(self.family, self.params)

    @cached_property
    def law(self):
        """Frozen scipy distribution."""
        return _family_law(self.family, self.params)

    def exact_tail(self, x):
        """``Pr(|X| > x)`` of the continuous law."""
        x = np.asarray(x, dtype=np.float64)
        return self.law.sf(x) + self.law.cdf(-x)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params),
                "eps_mass": self.eps_mass, "eps_value": self.eps_value}


def _family_law(family: str, params: tuple):
    try:
        if family == "gaussian":
            mu, sd = params
            if not sd > 0:
                raise InvalidParameters("gaussian sd must be positive")
            return stats.norm(loc=mu, scale=sd)
        if family == "exponential":
            (rate,) = params
            if not rate > 0:
                raise InvalidParameters("exponential rate must be positive")
            return stats.expon(scale=1.0 / rate)
        if family == "pareto":
            alpha, xm = params
            if not (alpha > 0 and xm > 0):
                raise InvalidParameters("pareto alpha and x_min must be positive")
            return stats.pareto(alpha, scale=xm)
        if family == "uniform":
            lo, hi = params
            if not hi >= lo:
                raise InvalidParameters("uniform needs low <= high")
            return stats.uniform(loc=lo, scale=hi - lo)
        if family == "weibull":
            k, lam = params
            if not (k > 0 and lam > 0):
                raise InvalidParameters("weibull shape and scale must be positive")
            return stats.weibull_min(k, scale=lam)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidParameters):
            raise
        raise InvalidParameters(f"bad parameters {params!r} for {family}") from exc
    raise InvalidParameters(f"unknown family {family!r}; expected one of {FAMILIES}")


def _partial_mean(spec: ContinuousFamilySpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``E[X ; a < X <= b]`` in closed form."""
    fam, prm = spec.family, spec.params
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if fam == "gaussian":
            mu, sd = prm
            za, zb = (a - mu) / sd, (b - mu) / sd
            mass = np.where(zb <= 0, special.ndtr(zb) - special.ndtr(za),
                            special.ndtr(-za) - special.ndtr(-zb))
            phi_a = np.where(np.isinf(za), 0.0, stats.norm.pdf(za))
            phi_b = np.where(np.isinf(zb), 0.0, stats.norm.pdf(zb))
            return mu * mass + sd * (phi_a - phi_b)
        if fam == "exponential":
            (rate,) = prm
            inv = 1.0 / rate

            def g(x):
                return np.where(np.isinf(x), 0.0, (x + inv) * np.exp(-rate * x))

            return g(a) - g(b)
        if fam == "pareto":
            alpha, xm = prm
            if alpha == 1.0:
                return np.where(np.isinf(b), np.inf, alpha * xm * np.log(b / a))
            coef = alpha * xm**alpha / (alpha - 1.0)
            pa = a ** (1.0 - alpha)
            pb = np.where(np.isinf(b), 0.0 if alpha > 1 else np.inf, b ** (1.0 - alpha))
            return coef * (pa - pb)
        if fam == "uniform":
            lo, hi = prm
            return (b * b - a * a) / (2.0 * (hi - lo))
        if fam == "weibull":
            k, lam = prm
            s = 1.0 + 1.0 / k

            def g(x):
                z = np.where(np.isinf(x), np.inf, (x / lam) ** k)
                return np.where(np.isinf(z), 1.0, special.gammainc(s, z))

            return lam * special.gamma(s) * (g(b) - g(a))
    raise InvalidParameters(fam)


def discretize(spec: ContinuousFamilySpec) -> ComponentDistribution:
    """Atomic approximation of a continuous family on a quantile grid.

    Cells have probability at most ``eps_mass`` (half of it when the support
    straddles 0, since ``|X|`` then collects errors from both sides) and value
    width at most ``eps_value``, except the two extreme cells.  Each cell is
    collapsed to its conditional mean, so ``sup_x |Pr(|X_disc| > x) -
    Pr(|X| > x)| <= eps_mass``.
    """
    if spec.family == "uniform" and spec.params[0] == spec.params[1]:
        return point_mass(spec.params[0])
    law = spec.law
    lo, hi = law.support()
    one_sided = lo >= 0 or hi <= 0
    cap = spec.eps_mass if one_sided else spec.eps_mass / 2.0
    m = max(1, math.ceil(1.0 / cap - 1e-9))
    u = np.arange(m + 1) / m
    q = law.ppf(u)
    q[0], q[-1] = lo, hi

    widths = np.diff(q)[1:-1]
    n_atoms = 2 + np.sum(np.maximum(1, np.ceil(widths / spec.eps_value))) if m > 2 else m
    if n_atoms > MAX_ATOMS:
        raise InvalidParameters(
            f"discretizing {spec.family}{spec.params} needs ~{int(n_atoms)} atoms "
            f"(limit {MAX_ATOMS}); increase eps_value or eps_mass")

    lefts, rights, masses = [], [], []
    for i in range(m):
        a, b = q[i], q[i + 1]
        cell_mass = u[i + 1] - u[i]
        interior = 0 < i < m - 1
        width = b - a
        if interior and width > spec.eps_value:
            k = math.ceil(width / spec.eps_value)
            edges = np.linspace(a, b, k + 1)
            edges[0], edges[-1] = a, b
            cdf = law.cdf(edges)
            sub = np.diff(cdf)
            if sub.sum() <= 0:
                sub = np.full(k, 1.0 / k)
            sub = sub / sub.sum() * cell_mass
            for j in range(k):
                if sub[j] > 0:
                    lefts.append(edges[j])
                    rights.append(edges[j + 1])
                    masses.append(sub[j])
        else:
            lefts.append(a)
            rights.append(b)
            masses.append(cell_mass)

    a = np.array(lefts)
    b = np.array(rights)
    w = np.array(masses)
    exact_mass = law.cdf(b) - law.cdf(a)
    upper = a >= law.median()
    exact_mass = np.where(upper, law.sf(a) - law.sf(b), exact_mass)
    means = _partial_mean(spec, a, b) / exact_mass
    mid = law.ppf(np.clip(law.cdf(a) + 0.5 * w, 0.0, 1.0))
    # heavy tails (pareto alpha <= 1) or vanishing exact mass: fall back to the cell's median
    bad = ~np.isfinite(means) | ~(exact_mass > 0)
    means = np.where(bad, mid, means)
    means = np.clip(means, a, b)
    means = np.where(np.isfinite(means), means, mid)
    w = w / w.sum()
    return make_atomic(list(zip(means.tolist(), w.tolist())))
