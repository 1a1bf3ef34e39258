"""Command-line entry point.

Exit status: 0 success, 1 I/O error, 2 precondition violation, 3 exact-oracle
size limit. Summaries are single ``key=value`` lines on standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .causal import Scm, random_scm, recover_ancestral, recover_directions
from .errors import OracleLimitError, PreconditionError
from .graph import (
    CostGraph,
    SeparationMode,
    dumps_graph,
    dumps_matrix,
    format_cost,
    loads_graph,
    loads_matrix,
    matrix_cost,
    unseparated_edges,
)
from .harness import ALGORITHMS, ExperimentSpec, design_mode, rows_to_csv, rows_to_json, run_design, run_experiment
from .nearmis import DEFAULT_BUDGET
from .sepmatrix import exact_min_separating

EXIT_OK, EXIT_IO, EXIT_PRECONDITION, EXIT_ORACLE_LIMIT = 0, 1, 2, 3


def _read(path: str) -> str:
    return Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _summary(**fields) -> None:
    print(" ".join(f"{k}={v}" for k, v in fields.items()))


def _probability(text: str) -> float:
    x = float(text)
    if not 0 <= x <= 1:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return x


def cmd_design(args: argparse.Namespace) -> int:
    g = loads_graph(_read(args.graph))
    mode = design_mode(args.algo, args.mode)
    L, hist = run_design(g, args.algo, args.m, args.eps, args.delta, args.seed, mode, args.oracle_mode, args.k, args.budget)
    _write(args.out, dumps_matrix(L))
    if args.history and hist is not None:
        _write(args.history, hist.to_json() + "\n")
    _summary(cost=format_cost(matrix_cost(L, g)), unseparated=len(unseparated_edges(g, L, mode)), mode=mode.value)
    return EXIT_OK


def cmd_recover(args: argparse.Namespace) -> int:
    g = loads_graph(_read(args.graph))
    L = loads_matrix(_read(args.matrix))
    scm = Scm.from_json(_read(args.scm))
    mode = SeparationMode.parse(args.mode)
    if mode is SeparationMode.SEPARATING:
        report = recover_directions(g, scm, L)
    else:
        report = recover_ancestral(g, scm, L)
    if args.out:
        _write(args.out, report.to_json() + "\n")
    _summary(
        oriented=len(report.oriented),
        unresolved=len(report.unresolved),
        errors=report.error_count,
        ancestral=len(report.ancestral),
        queries=report.query_count,
    )
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    scm = random_scm(args.n, args.edge_prob, args.latent_prob, args.seed)
    _write(args.out, scm.to_json() + "\n")
    if args.graph_out:
        g = scm.skeleton()
        if args.extra_edges:
            rng = np.random.default_rng([args.seed, 1])
            present = set(g.edges)
            missing = [(u, v) for u in range(g.node_count) for v in range(u + 1, g.node_count) if (u, v) not in present]
            if args.extra_edges > len(missing):
                raise PreconditionError(f"only {len(missing)} non-edges available, asked for {args.extra_edges}")
            picks = rng.choice(len(missing), size=args.extra_edges, replace=False)
            g = CostGraph.from_edges(g.node_count, list(g.edges) + [missing[int(i)] for i in picks])
        _write(args.graph_out, dumps_graph(g))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    g = loads_graph(_read(args.graph))
    mode = SeparationMode.parse(args.mode)
    L, cost = exact_min_separating(g, args.m, mode)
    if args.out:
        _write(args.out, dumps_matrix(L))
    _summary(cost=format_cost(cost), mode=mode.value)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    data = json.loads(_read(args.spec))
    specs = [ExperimentSpec.from_dict(d) for d in (data if isinstance(data, list) else [data])]
    rows = [row for spec in specs for row in run_experiment(spec)]
    _write(args.out, rows_to_json(rows) + "\n" if args.format == "json" else rows_to_csv(rows))
    failed = sum(r.error is not None for r in rows)
    for r in rows:
        if r.error:
            print(f"warning: {r.algo} seed={r.seed}: {r.error}", file=sys.stderr)
    if args.out:
        _summary(rows=len(rows), failed=failed)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sepsys", description="Minimum-cost intervention design for causal discovery.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="build an intervention matrix for a cost graph")
    d.add_argument("--algo", choices=ALGORITHMS, required=True)
    d.add_argument("--graph", required=True)
    d.add_argument("--m", type=int, required=True)
    d.add_argument("--eps", type=float, default=0.5)
    d.add_argument("--delta", type=float, default=0.1)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--mode", default=None, help="sep or strong (only used by --algo hyper)")
    d.add_argument("--oracle-mode", action="store_true", help="peel exact maximum-cost independent sets")
    d.add_argument("--k", type=int, default=None, help="part size for the hyperfinite partitioner")
    d.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    d.add_argument("--out", help="matrix file (default: stdout)")
    d.add_argument("--history", help="peel history JSON file")
    d.set_defaults(func=cmd_design)

    r = sub.add_parser("recover", help="recover directions or ancestral pairs with an exact CI oracle")
    r.add_argument("--matrix", required=True)
    r.add_argument("--graph", required=True, help="skeleton (sep) or supergraph (strong)")
    r.add_argument("--scm", required=True)
    r.add_argument("--mode", default="sep")
    r.add_argument("--out", help="RecoveryReport JSON file")
    r.set_defaults(func=cmd_recover)

    gsub = sub.add_parser("gen", help="generate a random semi-Markovian model")
    gsub.add_argument("--n", type=int, required=True)
    gsub.add_argument("--edge-prob", type=_probability, required=True)
    gsub.add_argument("--latent-prob", type=_probability, default=0.0)
    gsub.add_argument("--seed", type=int, default=0)
    gsub.add_argument("--out", help="scm JSON file (default: stdout)")
    gsub.add_argument("--graph-out", help="also write the skeleton as a unit-cost graph file")
    gsub.add_argument("--extra-edges", type=int, default=0, help="random non-edges added to --graph-out")
    gsub.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", help="exact minimum-cost (strongly) separating matrix")
    o.add_argument("--graph", required=True)
    o.add_argument("--m", type=int, required=True)
    o.add_argument("--mode", default="sep")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="run experiment specs from a JSON file")
    b.add_argument("--spec", required=True)
    b.add_argument("--out", help="output file (default: stdout)")
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE_LIMIT
    except ValueError as exc:
        # PreconditionError and malformed JSON input alike
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
