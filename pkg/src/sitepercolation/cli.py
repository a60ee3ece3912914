"""Command-line entry point: ``sitepercolation <command> [options]``.

Exit codes: 0 success, 1 input error, 2 numerical error, 3 a checked verdict failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import analysis
from .exploration import run_dfs_percolation
from .generators import GenerationError, GeneratorSpec
from .graph import GraphInputError, read_edge_list, write_edge_list
from .harness import SweepConfig, run_sweep
from .spectral import NumericalError, spectral_report

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_CHECK = 0, 1, 2, 3


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _graph_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph")
    g.add_argument("--graph", help="edge-list file")
    g.add_argument("--family", choices=["random-regular", "hypercube", "cycle", "complete",
                                        "circulant", "disjoint-cliques"])
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--offsets", type=int, nargs="*", default=[])
    g.add_argument("--graph-seed", type=int, default=0)
    g.add_argument("--method", default="auto", choices=["auto", "rejection", "repair"])


def _load_graph(args, seed_attr: str = "graph_seed"):
    if args.graph:
        return read_edge_list(args.graph)
    if not args.family:
        raise GraphInputError("give --graph FILE or --family with its parameters")
    spec = {"family": args.family, "offsets": args.offsets, "seed": getattr(args, seed_attr) or 0,
            "method": args.method}
    if args.n is not None:
        spec["n"] = args.n
    if args.d is not None:
        spec["d"] = args.d
    if args.family == "hypercube" and args.d is None:
        raise GraphInputError("hypercube needs --d (the dimension)")
    return GeneratorSpec.from_dict(spec).build()


def cmd_generate(args) -> int:
    if args.config:
        with open(args.config) as fh:
            g = GeneratorSpec.from_json(fh.read()).build()
    else:
        g = _load_graph(args, seed_attr="seed")
    write_edge_list(g, args.out if args.out else sys.stdout)
    return EXIT_OK


def cmd_spectral(args) -> int:
    g = _load_graph(args)
    rep = spectral_report(g, tolerance=args.tolerance)
    out = rep.to_dict()
    out["delta"] = args.delta
    out["certified"] = rep.certifies(args.delta)
    _emit(out, args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    g = _load_graph(args)
    if args.p is not None:
        p = analysis.exact(args.p)
    elif args.epsilon is not None:
        p = analysis.percolation_p(args.epsilon, g.degree_bound, args.side)
    else:
        raise GraphInputError("give --p or --epsilon with --side")
    rep = run_dfs_percolation(g, p, args.seed or 0, sigma_mode=args.sigma)
    _emit(rep.to_dict(), args.out)
    if args.witness:
        with open(args.witness, "w") as fh:
            fh.write("".join(f"{v}\n" for v in rep.witness_path))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not args.config:
        raise GraphInputError("sweep needs --config <json>")
    with open(args.config) as fh:
        obj = json.load(fh)
    if args.workers:
        obj["workers"] = args.workers
    if args.seed is not None:
        obj["base_seed"] = args.seed
    if args.out:
        obj["csv_path"] = args.out + ".csv"
        obj["json_path"] = args.out + ".json"
    cfg = SweepConfig.from_dict(obj)
    _, summary = run_sweep(cfg)
    if not cfg.json_path:
        _emit(summary, None)
    return EXIT_OK if summary["all_verdicts_pass"] else EXIT_CHECK


def verdict(report: dict, epsilon: float, side: str | None = None) -> dict:
    """Theorem-size verdict for a serialized run report."""
    n, d, p = report["n"], report["d"], report["p"]
    if side is None:
        side = analysis.SUBCRITICAL if p * d < 1 else analysis.SUPERCRITICAL
    out = {"side": side, "epsilon": epsilon, "n": n, "d": d, "p": p}
    if side == analysis.SUBCRITICAL:
        k = analysis.subcritical_component_bound(n, epsilon)
        out.update(bound=k, largest_component=report["largest_component"],
                   passed=report["largest_component"] < k)
    else:
        t = analysis.supercritical_targets(n, d, epsilon)
        giant = report["largest_component"] >= t["giant_min"]
        path = report["max_stack_global"] >= t["path_min"]
        out.update(t, largest_component=report["largest_component"],
                   max_stack_global=report["max_stack_global"], giant=giant, path=path,
                   passed=giant and path)
    return out


def cmd_check(args) -> int:
    with open(args.report) as fh:
        report = json.load(fh)
    out = verdict(report, args.epsilon, args.side)
    _emit(out, args.out)
    return EXIT_OK if out["passed"] else EXIT_CHECK


def cmd_enumerate(args) -> int:
    g = _load_graph(args)
    out = analysis.enumerate_non_expanding(g, args.m, args.alpha0)
    out.update(n=g.n, d=g.degree_bound, m=args.m, alpha0=args.alpha0)
    _emit(out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (stdout if omitted)")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sitepercolation",
                                     description="Site percolation on d-regular graphs via DFS exposure.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a generated graph as an edge list")
    _graph_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("spectral", parents=[common], help="second-eigenvalue report")
    _graph_args(p)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--delta", type=float, default=0.25, help="certification bound on lambda/d")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("run", parents=[common], help="one percolation run")
    _graph_args(p)
    p.add_argument("--p", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--side", choices=[analysis.SUBCRITICAL, analysis.SUPERCRITICAL],
                   default=analysis.SUPERCRITICAL)
    p.add_argument("--sigma", choices=["identity", "seeded-permutation"], default="identity")
    p.add_argument("--witness", help="write the witness path here, one vertex per line")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="grid of p x trials")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", parents=[common], help="verdict for a run report")
    p.add_argument("--report", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--side", choices=[analysis.SUBCRITICAL, analysis.SUPERCRITICAL])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", parents=[common], help="count non-expanding m-sets")
    _graph_args(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha0", type=float, required=True)
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (GraphInputError, GenerationError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
