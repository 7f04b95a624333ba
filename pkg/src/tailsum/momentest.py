"""L_p size of the maximal function ``U = sup_k |S_k|`` and the p-to-q growth forms.

The estimate is ``U*(e^{-p}/4) + ||ell||_p`` with the quantile read from an
exact enumeration, a Monte Carlo summary, or the F2 tail estimate as a proxy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InvalidParameters, QuantileUnavailable
from .rearrange import IndependentSequence, ell_lp_norm
from .tailest import MSTAR, tail_estimate

MC = "mc"
ENUM = "enum"
F2PROXY = "f2proxy"
SOURCES = (MC, ENUM, F2PROXY)

FIRST = "first"
SECOND = "second"

DEFAULT_P0 = 0.5


@dataclass(frozen=True)
class MomentEstimate:
    p: float
    estimate: float
    parts: tuple  # (U quantile term, ||ell||_p term)
    quantile_source: str

    def to_dict(self) -> dict:
        return {"p": self.p, "estimate": self.estimate, "u_quantile_term": self.parts[0],
                "ell_norm_term": self.parts[1], "quantile_source": self.quantile_source}


def quantile_level(p: float) -> float:
    return math.exp(-p) / 4.0


def u_quantile(seq: IndependentSequence, p: float, source: str, mc=None, mc_config=None) -> float:
    """``U*(e^{-p}/4)`` from the chosen oracle."""
    t = quantile_level(p)
    if source == ENUM:
        from .mcengine.exact import enumerate_exact
        return enumerate_exact(seq).u_tail.rearrangement(t)
    if source == MC:
        if mc is None:
            if mc_config is None:
                raise InvalidParameters("the mc source needs a summary or a config")
            from .mcengine.montecarlo import simulate
            mc = simulate(seq, **mc_config)
        if t < mc.resolution:
            raise QuantileUnavailable(
                f"level {t:.3g} is below the Monte Carlo resolution {mc.resolution:.3g}")
        return mc.u_tail.rearrangement(t)
    if source == F2PROXY:
        return tail_estimate(seq, t, MSTAR).lam
    raise InvalidParameters(f"source must be one of {SOURCES}")


def u_lp_estimate(seq: IndependentSequence, p: float, source: str = MC, mc=None,
                  mc_config: dict | None = None, p0: float = DEFAULT_P0) -> MomentEstimate:
    """Two-term estimate of ``||U||_p`` valid up to constants depending on ``p0``.

    ``mc`` is an existing :class:`MCSummary`; otherwise ``mc_config`` holds
    keyword arguments for ``simulate``.
    """
    if not p0 > 0:
        raise InvalidParameters("p0 must be positive")
    if p < p0:
        raise DomainError(f"p must be at least p0={p0}")
    q = u_quantile(seq, p, source, mc=mc, mc_config=mc_config)
    norm = ell_lp_norm(seq, p)
    return MomentEstimate(float(p), q + norm, (q, norm), source)


def moment_growth_bound(q: float, p: float, u_p: float, m_star: float, m_q: float,
                        c: float = 1.0, form: str = FIRST) -> float:
    """Upper form for ``||U||_q`` from ``||U||_p``.

    ``first``:  ``c (q / max(p, ln(e+q))) (u_p + m_star) + c m_q``
    ``second``: ``c (q / max(p, ln(e+q))) (u_p + m_q)``

    ``m_star`` is the caller's value of ``M*`` at the level the first form asks for.
    """
    if q < p:
        raise DomainError("need q >= p")
    if not p > 0:
        raise DomainError("p must be positive")
    if not c > 0:
        raise InvalidParameters("c must be positive")
    factor = q / max(p, math.log(math.e + q))
    if form == FIRST:
        return c * factor * (u_p + m_star) + c * m_q
    if form == SECOND:
        return c * factor * (u_p + m_q)
    raise InvalidParameters("form must be 'first' or 'second'")
