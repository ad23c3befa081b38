"""``diamcrit`` command line.

Exit codes: 0 success / property holds, 1 usage or I/O error, 2 the
property fails on the input (not critical, bound violated), 3 an internal
invariant failed (a bug).

With ``--json`` every command prints one JSON object
``{"config": {...}, "result": {...}}`` with sorted keys; ``config`` holds
every option, so identical configs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exceptions import BadParams, DiamCritError, InvariantViolation, UsageError, VerdictError

log = logging.getLogger("diamcrit")

EXIT_OK, EXIT_USAGE, EXIT_VERDICT, EXIT_BUG = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Verdict(Exception):
    """Carries a finished payload whose verdict is negative."""

    def __init__(self, payload):
        super().__init__("verdict")
        self.payload = payload


def _read_graph(path):
    from .graph import from_graph6, from_json

    if path == "-":
        data = sys.stdin.buffer.read()
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if path.endswith(".json") or data.lstrip().startswith(b"{"):
        return from_json(data.decode("utf-8", errors="replace"))
    lines = [line for line in data.splitlines() if line.strip()]
    if not lines:
        raise UsageError(f"{path} is empty")
    return from_graph6(lines[0])


def _write_graph(g, path):
    from .graph import to_graph6, to_json

    text = to_json(g).encode() if path.endswith(".json") else to_graph6(g) + b"\n"
    try:
        Path(path).write_bytes(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _parse_params(items):
    out = {}
    for item in items or []:
        for part in item.split(","):
            if not part:
                continue
            if "=" not in part:
                raise BadParams(f"parameter {part!r} is not key=value")
            key, value = part.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get("DIAMCRIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"DIAMCRIT_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, tuple):
        return list(obj)
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_schema(name):
    """The checked-in JSON schema for a subcommand's output (or "trace", "critical_structure")."""
    from importlib.resources import files

    return json.loads(files("diamcrit").joinpath("schemas", f"{name}.json").read_text())


# -- commands ---------------------------------------------------------------

def cmd_construct(args, params):
    from .constructions import construct
    from .graph import Graph

    if args.implicit:
        params.setdefault("n_explicit", "0")
    obj, info = construct(args.variant, params, seed=args.seed)
    result = {"variant": args.variant, "params": params, "seed": args.seed, "info": info}
    if isinstance(obj, Graph):
        result.update(n=obj.n, m=obj.m, explicit=True)
        if args.out:
            _write_graph(obj, args.out)
    else:
        result.update(n=obj.n, m=obj.m, explicit=False, sum_d2=obj.sum_d2)
        if args.out:
            raise BadParams("implicit results have no graph to write; drop --out or raise n_explicit")
    return result


def cmd_verify(args, params):
    from .criticality import is_diameter_k_critical

    g = _read_graph(args.input)
    verdict = is_diameter_k_critical(g, args.k) if g.n >= 2 else None
    result = {"n": g.n, "m": g.m}
    if verdict is None:
        result.update(critical=False, k=args.k, diameter=0 if g.n == 1 else None, witness_edge=None, reason="diameter")
    else:
        result.update(verdict.to_dict())
    if not result["critical"]:
        raise _Verdict(result)
    return result


def cmd_stats(args, params):
    from .criticality import is_diameter_k_critical
    from .stats import stats_report

    g = _read_graph(args.input)
    critical = None
    if args.k is not None and g.n >= 2 and not args.no_verify:
        critical = bool(is_diameter_k_critical(g, args.k))
    rep = stats_report(g, args.k, diameter_two_extras=bool(critical), critical=bool(critical))
    result = rep.to_dict()
    result["critical"] = critical
    if rep.degree_bounds is not None and not rep.degree_bounds.conjecture_holds:
        raise _Verdict(result)
    return result


def _cover_pipeline(g, t, seed):
    from .cover import build_g0, default_t, extract_p_t, run_cover, verify_s_bound
    from .hypergraph import hypergraph_chain

    t = default_t(g.n) if t is None else t
    trace = run_cover(g)
    ctx = trace.context
    g0, g0rep = build_g0(g, t, context=ctx)
    p_t = extract_p_t(g, t, context=ctx)
    sb = verify_s_bound(trace, g0, p_t)
    chain = hypergraph_chain(p_t, t, seed=seed, n=g.n)
    return t, trace, g0rep, p_t, sb, chain


def cmd_cover(args, params):
    g = _read_graph(args.input)
    t, trace, g0rep, p_t, sb, chain = _cover_pipeline(g, args.t, args.seed)
    if args.trace:
        try:
            Path(args.trace).write_text(json.dumps(trace.to_dict(), sort_keys=True) + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {args.trace}: {exc.strerror}") from None
    return {
        "n": g.n, "m": g.m, "t": t, "s": trace.s,
        "histogram": trace.histogram(),
        "g0": g0rep.to_dict(),
        "s_bound": sb.to_dict(),
        "p_t": [list(p) for p in p_t],
    }


def cmd_hyper(args, params):
    g = _read_graph(args.input)
    t, trace, _, p_t, _, chain = _cover_pipeline(g, args.t, args.seed)
    h1, h2, h3, h4, rep = chain
    out = rep.to_dict()
    out.update(n=g.n, m=g.m, p_t=len(p_t), h4_edges=[list(e) for e in h4.edges])
    return out


def cmd_search(args, params):
    from .search import enumerate_critical, local_search

    if args.mode == "exhaustive":
        res = enumerate_critical(args.n, args.k)
    else:
        res = local_search(args.n, args.k, args.objective, seed=args.seed, budget=args.budget)
    result = res.to_dict()
    if args.out:
        try:
            Path(args.out).write_text(json.dumps(result, sort_keys=True, default=_jsonable) + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    return result


def cmd_report(args, params):
    """Everything applicable to one graph: verification, stats, counting, cover."""
    from .criticality import is_diameter_k_critical, matched_counts, verify_triangle_charging
    from .metric import INF, diameter
    from .stats import stats_report

    g = _read_graph(args.input)
    d = diameter(g) if g.n else INF
    k = args.k if args.k is not None else (None if d == INF else int(d))
    result = {"n": g.n, "m": g.m, "diameter": None if d == INF else int(d), "k": k}
    critical = bool(k is not None and g.n >= 2 and is_diameter_k_critical(g, k))
    result["critical"] = critical
    rep = stats_report(g, k, diameter_two_extras=critical, critical=critical)
    result["stats"] = rep.to_dict()
    if critical and k >= 3:
        result["matched"] = matched_counts(g, k).to_dict(g)
        result["charging"] = verify_triangle_charging(g, k).to_dict()
        t, trace, g0rep, p_t, sb, chain = _cover_pipeline(g, args.t, args.seed)
        result["cover"] = {"t": t, "s": trace.s, "histogram": trace.histogram(), "s_bound": sb.to_dict(), "p_t": len(p_t)}
        result["hyper"] = chain[4].to_dict()
    if not critical:
        raise _Verdict(result)
    return result


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "stats": cmd_stats,
    "cover": cmd_cover,
    "hyper": cmd_hyper,
    "search": cmd_search,
    "report": cmd_report,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print one JSON object")
    common.add_argument("--threads", type=int, default=None, help="worker cap (default: DIAMCRIT_THREADS or all cores)")
    common.add_argument("--params", action="append", default=[], metavar="K=V[,K=V]", help="extra key=value parameters")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = _Parser(prog="diamcrit", description="Diameter-critical graph toolkit.")
    p.add_argument("--version", action="version", version=f"diamcrit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", parents=[common], help="build a graph family")
    c.add_argument("--variant", required=True,
                   choices=["d2bip", "d2trip", "dk", "clique-matching", "gnp", "counterexample"])
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=None, help="output file (.g6 or .json)")
    c.add_argument("--implicit", action="store_true", help="counterexample: never materialize the graph")

    v = sub.add_parser("verify", parents=[common], help="exhaustive criticality check")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--k", type=int, required=True)

    s = sub.add_parser("stats", parents=[common], help="exact statistics and bound verdicts")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--no-verify", action="store_true", help="skip the criticality check")

    for name, helptext in (("cover", "run the covering algorithm"), ("hyper", "hypergraph chain report")):
        h = sub.add_parser(name, parents=[common], help=helptext)
        h.add_argument("--in", dest="input", required=True)
        h.add_argument("--t", type=int, default=None, help="threshold (default ceil(n^(2/3)))")
        h.add_argument("--seed", type=int, default=0)
        if name == "cover":
            h.add_argument("--trace", default=None, help="write the full trace JSON here")

    se = sub.add_parser("search", parents=[common], help="exhaustive or local search")
    se.add_argument("--n", type=int, required=True)
    se.add_argument("--k", type=int, required=True)
    se.add_argument("--mode", choices=["exhaustive", "local"], default="exhaustive")
    se.add_argument("--objective", choices=["edges", "ratio"], default="edges")
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--budget", type=int, default=100)
    se.add_argument("--out", default=None)

    r = sub.add_parser("report", parents=[common], help="everything applicable to one graph")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--k", type=int, default=None)
    r.add_argument("--t", type=int, default=None)
    r.add_argument("--seed", type=int, default=0)
    return p


def _config(args, params):
    cfg = {key: value for key, value in vars(args).items() if key not in ("params", "verbose", "json")}
    cfg["params"] = params
    cfg["version"] = __version__
    return cfg


def _emit(args, params, result, out):
    if args.json:
        payload = {"config": _config(args, params), "result": result}
        out.write(json.dumps(payload, sort_keys=True, default=_jsonable) + "\n")
    else:
        for key in sorted(result):
            value = result[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True, default=_jsonable)
            out.write(f"{key}: {value}\n")


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"diamcrit: {exc}\n")
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        params = _parse_params(args.params)
        args.threads = _threads(args)
        if args.threads < 1:
            raise BadParams("--threads must be positive")
        result = COMMANDS[args.command](args, params)
        _emit(args, params, result, out)
        return EXIT_OK
    except _Verdict as v:
        _emit(args, params, v.payload, out)
        return EXIT_VERDICT
    except UsageError as exc:
        sys.stderr.write(f"diamcrit: {exc}\n")
        return EXIT_USAGE
    except VerdictError as exc:
        sys.stderr.write(f"diamcrit: {type(exc).__name__}: {exc}\n")
        return EXIT_VERDICT
    except InvariantViolation as exc:
        sys.stderr.write(f"diamcrit: internal invariant failed: {type(exc).__name__}: {exc}\n")
        return EXIT_BUG
    except DiamCritError as exc:
        sys.stderr.write(f"diamcrit: {exc}\n")
        return EXIT_BUG


if __name__ == "__main__":
    sys.exit(main())
