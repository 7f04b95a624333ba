"""Verification suites: one per inequality, exact where the inequality is exact.

Exact suites compare step functions.  Both sides of every comparison are
right-continuous step functions of the level, so checking each breakpoint and
each midpoint between consecutive breakpoints covers every level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..bounds import KNBoundInput, kn_rhs, large_part_lp_bound, vk_argument, vk_tail_bound
from ..distmodel import GT, LE
from ..errors import InvalidParameters, NoFit, QuantileUnavailable
from ..momentest import F2PROXY, MC, u_lp_estimate
from ..rearrange import IndependentSequence, check_ell_max_chain, ell, max_star
from ..stepcurve import StepCurve
from ..tailest import ELL, MSTAR, tail_estimate
from .exact import enumerate_exact, enumerate_outcomes
from .fitting import fit_constants, geometric_grid
from .montecarlo import DEFAULT_CHUNK, DEFAULT_DELTA, simulate

SUITES = ("ELLMAX", "KN", "LEVY_OTT", "LEVY_L3", "TAIL", "LP", "DISJOINT")
EXACT_SUITES = ("KN", "LEVY_OTT", "LEVY_L3", "DISJOINT")
MC_SUITES = ("TAIL", "LP")


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    delta: float = DEFAULT_DELTA
    n: int | None = None            # None: 10**6 for TAIL/LP, 10**5 otherwise
    chunk: int = DEFAULT_CHUNK
    workers: int | None = None
    slack: float = 1e-12
    chain_grid: tuple = tuple(np.geomspace(1e-4, 0.99, 40).tolist())
    tail_grid: tuple = tuple(geometric_grid(1e-3, 0.5, 40).tolist())
    tail_budget: float = 50.0
    p_list: tuple = (1.0, 2.0, 4.0, 8.0, 12.0)
    lp_budget: float = 10.0
    lp_growth: float = 1.5
    kn_ks: tuple = (1, 2, 3)
    disjoint_rs: tuple = (0.1, 0.5, 0.9)
    disjoint_ps: tuple = (1.0, 2.0, 4.0)

    def samples(self, suite: str) -> int:
        if self.n is not None:
            return int(self.n)
        return 10**6 if suite in MC_SUITES else 10**5

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    margin: float               # min(rhs - lhs) for exact checks; budget - c for fits
    value: float = math.nan     # fitted constant or count of evaluated points
    informational: bool = False
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "margin": self.margin,
                "value": self.value, "informational": self.informational, "detail": self.detail}


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    sequence: str
    checks: tuple
    config: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed and not c.informational]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "sequence": self.sequence, "passed": self.passed,
                "version": __version__, "config": self.config,
                "checks": [c.to_dict() for c in self.checks]}


# -- candidate levels -------------------------------------------------------

def _with_midpoints(points, lo: float, hi: float, open_lo: bool = True) -> np.ndarray:
    """Sorted points in the range plus midpoints between neighbours (and the ends)."""
    p = np.asarray(points, dtype=np.float64)
    p = p[np.isfinite(p)]
    p = p[(p > lo) & (p <= hi)] if open_lo else p[(p >= lo) & (p <= hi)]
    p = np.unique(np.concatenate([p, [hi]]))
    edges = np.concatenate([[lo], p])
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.unique(np.concatenate([p, mids]))
    return out[out > lo] if open_lo else out


def _scaled_up(points: np.ndarray, factor: float) -> np.ndarray:
    """``points / factor`` rounded up until ``factor * x >= point``."""
    x = points / factor
    low = factor * x < points
    x[low] = np.nextafter(x[low], np.inf)
    return x


def _exact_check(name: str, lhs: np.ndarray, rhs: np.ndarray, where: np.ndarray,
                 slack: float, informational: bool = False) -> Check:
    diff = rhs + slack - lhs
    bad = np.flatnonzero(diff < 0)
    margin = float(np.min(rhs - lhs)) if diff.size else math.inf
    detail = {"points": int(diff.size)}
    if bad.size:
        i = int(bad[0])
        detail.update(first_violation=float(where[i]), lhs=float(lhs[i]), rhs=float(rhs[i]),
                      violations=int(bad.size))
    return Check(name, bad.size == 0, margin, float(diff.size), informational, detail)


# -- exact suites -----------------------------------------------------------

def _suite_ellmax(seq, config):
    st, mt = seq.sum_tail, seq.max_tail
    pts = np.concatenate([config.chain_grid, st.vals, mt.vals, st.vals / 2,
                          st.vals / (1 + st.vals)])
    grid = _with_midpoints(pts, 0.0, 1.0)
    grid = grid[grid < 1.0]
    rows = check_ell_max_chain(seq, grid, slack=config.slack)
    arr = np.array([[r.ell_2t, r.ell_ratio, r.mstar, r.ell_t] for r in rows])
    t = np.array([r.t for r in rows])
    return [
        _exact_check("ell(2t) <= ell(t/(1-t))", arr[:, 0], arr[:, 1], t, config.slack),
        _exact_check("ell(t/(1-t)) <= M*(t)", arr[:, 1], arr[:, 2], t, config.slack),
        _exact_check("M*(t) <= ell(t)", arr[:, 2], arr[:, 3], t, config.slack),
    ]


def _suite_kn(seq, config):
    ex = enumerate_exact(seq)
    u, m = ex.u_tail, ex.m_tail
    checks = []
    for K in config.kn_ks:
        f = 3 * K - 1
        pts = np.concatenate([u.xs, m.xs, _scaled_up(u.xs[1:], f)])
        x = _with_midpoints(pts, 0.0, u.xs[-1] + 1.0, open_lo=False)
        lhs = u(f * x)
        # enumerated masses can sum to 1 + ulp
        pus, pms = np.minimum(u(x), 1.0), np.minimum(m(x), 1.0)
        rhs = np.array([kn_rhs(KNBoundInput(float(pu), float(pm), K)) for pu, pm in zip(pus, pms)])
        checks.append(_exact_check(f"Pr(U > {f}x) <= KN(K={K})", lhs, rhs, x, config.slack))
    checks.append(_kn_decreasing_form_constant(u, m))
    return checks


def _kn_decreasing_form_constant(u: StepCurve, m: StepCurve) -> Check:
    """Smallest c1 of the decreasing-rearrangement form on a level grid (informational)."""
    levels = np.geomspace(1e-4, 0.5, 30)
    need = 0.0
    for i, t in enumerate(levels):
        ut = u.rearrangement(t)
        if ut == 0:
            continue
        for s in levels[i:]:
            mass = u.rearrangement(s) + m.rearrangement(t / 2)
            factor = math.log(1 / t) / max(math.log(1 / s), math.log(math.log(4 / t)))
            need = max(need, math.inf if mass == 0 else ut / (factor * mass))
    return Check("KN decreasing-rearrangement c1 (empirical)", True, math.nan, need, True)


def _suite_levy_ott(seq, config):
    ex = enumerate_exact(seq)
    u = ex.u_tail
    partial = ex.partial_tails
    pts = np.concatenate([u.xs, _scaled_up(u.xs[1:], 3.0)] + [c.xs for c in partial])
    x = _with_midpoints(pts, 0.0, u.xs[-1] + 1.0, open_lo=False)
    lhs = u(3 * x)
    sup_k = np.max(np.vstack([c(x) for c in partial]), axis=0)
    checks = [_exact_check("Pr(U > 3x) <= 3 max_k Pr(|S_k| > x)", lhs, 3 * sup_k, x,
                           config.slack)]
    if seq.levy_constants is not None:
        c1, c2 = seq.levy_constants
        s = ex.s_tail
        pts = np.concatenate([s.xs] + [_scaled_up(c.xs[1:], c1) for c in partial])
        x = _with_midpoints(pts, 0.0, u.xs[-1] + 1.0, open_lo=False)
        lhs = np.max(np.vstack([c(c1 * x) for c in partial]), axis=0)
        checks.append(_exact_check(f"Levy ({c1:g},{c2:g}) on initial segments", lhs,
                                   c2 * s(x), x, config.slack, informational=True))
    return checks


def _suite_levy_l3(seq, config):
    s_tail = enumerate_exact(seq).s_tail
    mt = seq.max_tail
    trunc_tails: dict[float, StepCurve] = {}

    def truncated_tail(level):
        if level not in trunc_tails:
            trunc_tails[level] = enumerate_exact(seq.truncated(level, LE)).s_tail
        return trunc_tails[level]

    checks = []
    for div in (2.0, 4.0):
        frac = 1.0 - 1.0 / div      # t - s = frac * t
        levels = {max_star(seq, float(v)) for v in np.concatenate([mt.vals, [0.0]]) if v <= 1}
        pts = [s_tail.vals, s_tail.vals / frac, mt.vals * div]
        for L in levels:
            w = truncated_tail(L).vals
            pts += [w, w / frac]
        t = _with_midpoints(np.concatenate(pts), 0.0, 1.0)
        a_l, a_r, b_l, b_r = [], [], [], []
        for tt in t:
            s = tt / div
            tr = truncated_tail(max_star(seq, s))
            rest = tt - s
            # left sides are read a probability slack further right: ties between
            # masses summed along different routes must not flip a comparison
            a_l.append(s_tail.rearrangement(tt + config.slack))
            a_r.append(tr.rearrangement(rest))
            b_l.append(tr.rearrangement(tt + config.slack))
            b_r.append(s_tail.rearrangement(rest))
        checks.append(_exact_check(f"S*(t) <= (S^(<=M*(t/{div:g})))*(t - t/{div:g})",
                                   np.array(a_l), np.array(a_r), t, 0.0))
        checks.append(_exact_check(f"(S^(<=M*(t/{div:g})))*(t) <= S*(t - t/{div:g})",
                                   np.array(b_l), np.array(b_r), t, 0.0))
    return checks


def _suite_disjoint(seq, config):
    st = seq.sum_tail
    checks = []
    for r in config.disjoint_rs:
        big = seq.truncated(ell(seq, r), GT)
        out = enumerate_outcomes(big)
        u_big = StepCurve.from_masses(out.U, out.prob)
        lhs_v, rhs_v, where = [], [], []
        for k in range(1, len(seq) + 1):
            vk = StepCurve.from_masses(np.where(out.nonzero == k, out.U, 0.0), out.prob)
            shift = vk_argument(1.0, r, k)
            t = _with_midpoints(np.concatenate([vk.vals, st.vals / shift]), 0.0, 1.0)
            lhs_v.append(vk.rearrangement(t + config.slack))
            rhs_v.append(np.array([vk_tail_bound(seq, r, k, float(x)) for x in t]))
            where.append(t)
        checks.append(_exact_check(f"V_k*(t) <= k ell(t(k-1)!/r^(k-1)), r={r:g}",
                                   np.concatenate(lhs_v), np.concatenate(rhs_v),
                                   np.concatenate(where), 0.0))
        for p in config.disjoint_ps:
            lhs = u_big.lp_norm(p)
            rhs = large_part_lp_bound(seq, r, p)
            checks.append(_exact_check(f"||U^(>ell({r:g}))||_{p:g} <= 2e^(2^p r/p)||ell||_p",
                                       np.array([lhs]), np.array([rhs]), np.array([p]),
                                       config.slack * max(1.0, rhs)))
    return checks


# -- Monte Carlo suites -----------------------------------------------------

def _mc(seq, config, suite, cache):
    n = config.samples(suite)
    key = (seq, n, config.seed, config.chunk, config.delta)
    if cache is not None and key in cache:
        return cache[key]
    mc = simulate(seq, n, config.seed, delta=config.delta, chunk=config.chunk,
                  workers=config.workers)
    if cache is not None:
        cache[key] = mc
    return mc


def _fit_check(name, f, g, grid, budget, informational):
    try:
        fit = fit_constants(f, g, grid)
    except NoFit as exc:
        return Check(name, False, -math.inf, math.inf, informational, {"error": str(exc)})
    return Check(name, fit.c <= budget, budget - fit.c, fit.c, informational,
                 {"witness_t": fit.witness_t, "c_grid": fit.c_grid})


def _suite_tail(seq, config, cache):
    mc = _mc(seq, config, "TAIL", cache)
    grid = np.array([t for t in config.tail_grid if mc.resolution <= t <= 0.5])
    if grid.size == 0:
        raise InvalidParameters("tail grid is empty above the Monte Carlo resolution")
    # the equivalence needs the strong Levy property; without a flag it is informational
    info = seq.levy_constants is None
    memo = {}

    def F(mode):
        def f(t):
            key = (mode, t)
            if key not in memo:
                memo[key] = tail_estimate(seq, t, mode).lam
            return memo[key]
        return f

    return [
        _fit_check("S*_MC ~ F1", mc.s_tail, F(ELL), grid, config.tail_budget, info),
        _fit_check("S*_MC ~ F2", mc.s_tail, F(MSTAR), grid, config.tail_budget, info),
        _fit_check("F1 ~ F2", F(ELL), F(MSTAR), grid, config.tail_budget, True),
    ]


def lp_ratios(seq, mc, p_list) -> list[dict]:
    """``||U||_p`` from the Monte Carlo tail against the two-term estimate, per ``p``."""
    rows = []
    for p in p_list:
        try:
            est = u_lp_estimate(seq, p, MC, mc=mc)
        except QuantileUnavailable:
            est = u_lp_estimate(seq, p, F2PROXY)
        up = mc.u_tail.lp_norm(p)
        ratio = up / est.estimate if est.estimate > 0 else (1.0 if up == 0 else math.inf)
        rows.append({"p": p, "u_lp_mc": up, "estimate": est.estimate,
                     "source": est.quantile_source, "ratio": ratio,
                     "c": max(ratio, 1.0 / ratio) if ratio > 0 else math.inf})
    return rows


def _suite_lp(seq, config, cache):
    mc = _mc(seq, config, "LP", cache)
    rows = lp_ratios(seq, mc, config.p_list)
    checks = [Check(f"||U||_{r['p']:g} / estimate within [1/c, c]", r["c"] <= config.lp_budget,
                    config.lp_budget - r["c"], r["c"], False, r) for r in rows]
    c = max(r["c"] for r in rows)
    checks.append(Check("single c across p", c <= config.lp_budget, config.lp_budget - c, c))
    growth = rows[-1]["c"] / rows[0]["c"]
    checks.append(Check(f"c(p={rows[-1]['p']:g}) / c(p={rows[0]['p']:g})",
                        growth < config.lp_growth, config.lp_growth - growth, growth))
    return checks


def verify_suite(seq: IndependentSequence, suite_id: str, config: VerifyConfig | None = None,
                 cache: dict | None = None) -> VerificationReport:
    """Run one suite on one sequence.  ``cache`` shares Monte Carlo summaries between suites."""
    config = config or VerifyConfig()
    suite = suite_id.upper()
    if suite == "ELLMAX":
        checks = _suite_ellmax(seq, config)
    elif suite == "KN":
        checks = _suite_kn(seq, config)
    elif suite == "LEVY_OTT":
        checks = _suite_levy_ott(seq, config)
    elif suite == "LEVY_L3":
        checks = _suite_levy_l3(seq, config)
    elif suite == "DISJOINT":
        checks = _suite_disjoint(seq, config)
    elif suite == "TAIL":
        checks = _suite_tail(seq, config, cache)
    elif suite == "LP":
        checks = _suite_lp(seq, config, cache)
    else:
        raise InvalidParameters(f"suite must be one of {SUITES}")
    cfg = config.to_dict()
    if suite in MC_SUITES:
        cfg["n"] = config.samples(suite)
    return VerificationReport(suite, repr(seq), tuple(checks), cfg)
