"""Command-line front end: JSON sequence specs in, JSON (and CSV) reports out.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from .bounds import KNBoundInput, kn_rhs, large_part_lp_bound, vk_tail_bound
from .distmodel import ContinuousFamilySpec, ComponentDistribution, discretize, make_atomic
from .errors import EnumTooLarge, ParseError, TailsumError
from .momentest import ENUM, MC, SOURCES, u_lp_estimate
from .rearrange import FLAG_NAMES, IndependentSequence
from .tailest import ELL, MODES, tail_estimate

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


# -- spec files ---------------------------------------------------------------

def _parse_variable(var, where: str) -> list[ComponentDistribution]:
    if not isinstance(var, dict) or "type" not in var:
        raise ParseError(f"{where}: each variable needs a 'type'")
    kind = var["type"]
    try:
        if kind == "atomic":
            atoms = var["atoms"]
            if not isinstance(atoms, list) or not all(
                    isinstance(a, (list, tuple)) and len(a) == 2 for a in atoms):
                raise ParseError(f"{where}: atoms must be a list of [value, prob] pairs")
            return [make_atomic(atoms)]
        if kind == "family":
            spec = ContinuousFamilySpec(
                var["family"], tuple(var["params"]),
                eps_mass=var.get("eps_mass", 1e-3), eps_value=var.get("eps_value", 0.1))
            return [discretize(spec)]
        if kind == "iid-block":
            count = var["count"]
            if not isinstance(count, int) or count < 1:
                raise ParseError(f"{where}: iid-block count must be a positive integer")
            inner = _parse_variable(var["variable"], f"{where}.variable")
            return inner * count
    except TailsumError:
        raise
    except KeyError as exc:
        raise ParseError(f"{where}: missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from None
    raise ParseError(f"{where}: unknown variable type {kind!r}")


def spec_from_dict(doc) -> IndependentSequence:
    if not isinstance(doc, dict):
        raise ParseError("spec must be a JSON object")
    variables = doc.get("variables")
    if not isinstance(variables, list):
        raise ParseError("spec needs a 'variables' list")
    comps = []
    for i, var in enumerate(variables):
        comps += _parse_variable(var, f"variables[{i}]")
    flags = doc.get("flags", {})
    if not isinstance(flags, dict) or not all(isinstance(v, bool) for v in flags.values()):
        raise ParseError("flags must map names to booleans")
    unknown = set(flags) - set(FLAG_NAMES)
    if unknown:
        raise ParseError(f"unknown flags {sorted(unknown)}")
    levy = doc.get("levy_constants")
    if levy is not None and (not isinstance(levy, list) or len(levy) != 2):
        raise ParseError("levy_constants must be a [c1, c2] pair")
    return IndependentSequence.build(comps, flags=flags, levy_constants=levy)


def parse_spec(path: str) -> IndependentSequence:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None
    return spec_from_dict(doc)


def serialize_spec(seq: IndependentSequence) -> dict:
    """Exact JSON form: runs of equal components become iid blocks, flags are explicit."""
    variables = []
    comps = seq.components
    i = 0
    while i < len(comps):
        j = i
        while j + 1 < len(comps) and comps[j + 1] == comps[i]:
            j += 1
        atomic = {"type": "atomic", "atoms": [[v, p] for v, p in comps[i].atoms]}
        count = j - i + 1
        variables.append(atomic if count == 1 else
                         {"type": "iid-block", "count": count, "variable": atomic})
        i = j + 1
    doc = {"variables": variables, "flags": seq.flags}
    if seq.levy_constants is not None:
        doc["levy_constants"] = list(seq.levy_constants)
    return doc


# -- argument helpers -----------------------------------------------------------

def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _grid(text: str) -> list[float]:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be LO:HI:N")
    if not (0 < lo < hi and n >= 2):
        raise argparse.ArgumentTypeError("grid needs 0 < LO < HI and N >= 2")
    return np.geomspace(lo, hi, n).tolist()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for t, v in rows:
            w.writerow([repr(float(t)), repr(float(v))])


def _base(command: str, seq: IndependentSequence, config: dict) -> dict:
    return {"command": command, "version": __version__, "spec": serialize_spec(seq),
            "config": config}


# -- commands -------------------------------------------------------------------

def cmd_estimate_tail(args, seq):
    ts = args.t if args.t is not None else args.t_grid
    rows = [tail_estimate(seq, t, args.mode) for t in ts]
    report = _base("estimate-tail", seq, {"t": ts, "mode": args.mode,
                                          "rel_tol": 1e-9})
    report["results"] = [r.to_dict() for r in rows]
    _emit(report, args.out)
    if args.csv:
        _write_csv(args.csv, [(r.t, r.lam) for r in rows])
    return EXIT_OK


def _mc_config(args) -> dict:
    return {"n": args.samples, "seed": args.seed, "delta": args.delta, "chunk": args.chunk}


def cmd_estimate_moment(args, seq):
    config = {"p": args.p, "source": args.source, "p0": args.p0}
    mc = None
    if args.source == MC:
        from .mcengine.montecarlo import simulate
        config.update(_mc_config(args))
        mc = simulate(seq, **_mc_config(args))
    results = []
    for p in args.p:
        est = u_lp_estimate(seq, p, args.source, mc=mc, p0=args.p0)
        row = est.to_dict()
        if mc is not None:
            row["u_lp_mc"] = mc.u_tail.lp_norm(p)
        results.append(row)
    report = _base("estimate-moment", seq, config)
    report["results"] = results
    _emit(report, args.out)
    return EXIT_OK


def cmd_bound(args, seq):
    kind = args.kind
    config = {"kind": kind}
    if kind == "kn":
        if args.t is None or args.K is None:
            raise _Usage("--kind kn needs --t and --K")
        try:
            from .mcengine.exact import enumerate_exact
            oracle = enumerate_exact(seq)
            config["oracle"] = ENUM
        except EnumTooLarge:
            from .mcengine.montecarlo import simulate
            oracle = simulate(seq, **_mc_config(args))
            config.update(oracle=MC, **_mc_config(args))
        config.update(t=args.t, K=args.K)
        pu = min(float(oracle.u_tail(args.t)), 1.0)
        pm = min(float(oracle.m_tail(args.t)), 1.0)
        rhs = kn_rhs(KNBoundInput(pu, pm, args.K))
        result = {"level": (3 * args.K - 1) * args.t, "pU": pu, "pM": pm, "bound": rhs,
                  "observed": float(oracle.u_tail((3 * args.K - 1) * args.t))}
    elif kind == "vk":
        if args.r is None or args.k is None or args.t is None:
            raise _Usage("--kind vk needs --r, --k and --t")
        config.update(r=args.r, k=args.k, t=args.t)
        result = {"bound": vk_tail_bound(seq, args.r, args.k, args.t)}
    else:
        if args.r is None or args.p is None:
            raise _Usage("--kind large-lp needs --r and --p")
        config.update(r=args.r, p=args.p)
        result = {"bound": large_part_lp_bound(seq, args.r, args.p)}
    report = _base("bound", seq, config)
    report["results"] = result
    _emit(report, args.out)
    return EXIT_OK


def cmd_verify(args, seq):
    from .mcengine.verify import SUITES, VerifyConfig, verify_suite
    suites = [s.strip().upper() for s in args.suite.split(",") if s.strip()]
    bad = [s for s in suites if s not in SUITES]
    if bad or not suites:
        raise _Usage(f"unknown suites {bad}; choose from {', '.join(SUITES)}")
    config = VerifyConfig(seed=args.seed, delta=args.delta, n=args.samples, chunk=args.chunk)
    cache: dict = {}
    reports = [verify_suite(seq, s, config, cache) for s in suites]
    report = _base("verify", seq, {"suites": suites, **config.to_dict()})
    report["results"] = [r.to_dict() for r in reports]
    report["passed"] = all(r.passed for r in reports)
    _emit(report, args.out)
    for r in reports:
        for c in r.failures():
            print(f"FAIL {r.suite}: {c.name} {c.detail}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_enumerate(args, seq):
    from .mcengine.exact import enumerate_exact
    ex = enumerate_exact(seq)
    report = _base("enumerate", seq, {})
    report["results"] = ex.to_dict()
    _emit(report, args.out)
    return EXIT_OK


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tailsum", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--spec", required=True, help="JSON sequence spec")
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    def mc_opts(p, samples):
        p.add_argument("--samples", type=int, default=samples)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--delta", type=float, default=1e-3)
        p.add_argument("--chunk", type=int, default=1 << 16)

    p = sub.add_parser("estimate-tail", help="F1/F2 tail quantile estimates")
    common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--t", type=_float_list)
    g.add_argument("--t-grid", type=_grid, help="geometric grid LO:HI:N")
    p.add_argument("--mode", choices=MODES, default=ELL)
    p.add_argument("--csv", help="also write a t,value table")
    p.set_defaults(func=cmd_estimate_tail)

    p = sub.add_parser("estimate-moment", help="two-term estimate of ||U||_p")
    common(p)
    p.add_argument("--p", type=_float_list, required=True)
    p.add_argument("--source", choices=SOURCES, default=MC)
    p.add_argument("--p0", type=float, default=0.5)
    mc_opts(p, 10**5)
    p.set_defaults(func=cmd_estimate_moment)

    p = sub.add_parser("bound", help="evaluate an explicit bound")
    common(p)
    p.add_argument("--kind", choices=("kn", "vk", "large-lp"), required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--K", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--p", type=float)
    mc_opts(p, 10**5)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="run verification suites")
    common(p)
    p.add_argument("--suite", required=True, help="comma-separated suite names")
    p.add_argument("--samples", type=int, default=None,
                   help="Monte Carlo samples (default 10^6 for TAIL/LP, 10^5 otherwise)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--chunk", type=int, default=1 << 16)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="exact joint tails by enumeration")
    common(p)
    p.set_defaults(func=cmd_enumerate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        seq = parse_spec(args.spec)
        return args.func(args, seq)
    except (_Usage, TailsumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
