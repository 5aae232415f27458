"""Command line: ``gen``, ``run``, ``verify`` and ``bench``.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 internal error
(bandwidth or round cap exceeded, or a search with no free element).
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from typing import List, Optional, Sequence

from .bench import ALGOS, DISTANCE2_ONLY, HEADER, SUITES, BenchConfigError, parse_config, rows_to_csv, run_algo, run_bench
from .engine import BandwidthExceeded, RoundCapReached, bandwidth_mode
from .graph import MODELS, Graph, GraphFormatError, gen_graph, load_graph, save_graph
from .oracle import check_arbdefect, check_mis_k, check_proper_k
from .search import NoFreeElement

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

SHORTHAND = {"p": "path", "c": "cycle", "s": "star"}


class UsageError(Exception):
    pass


def _complete(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def read_graph(spec: str) -> Graph:
    """A graph file, or a shorthand such as ``p5`` (path), ``c6``, ``s5`` (star), ``k4`` (clique)."""
    if os.path.exists(spec):
        with open(spec) as fh:
            try:
                return load_graph(fh.read())
            except GraphFormatError as exc:
                raise UsageError(f"{spec}: {exc}") from None
    m = re.fullmatch(r"([pcsk])(\d+)", spec)
    if not m:
        raise UsageError(f"graph {spec!r} is neither a file nor a shorthand like p5")
    n = int(m.group(2))
    if n < 1:
        raise UsageError("shorthand graphs need at least one vertex")
    if m.group(1) == "k":
        return _complete(n)
    return gen_graph(SHORTHAND[m.group(1)], n, 0)


def _read_pairs(path: str, what: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise UsageError(f"{path}:{lineno}: expected 'vertex {what}'")
            try:
                out[int(parts[0])] = int(parts[1])
            except ValueError:
                raise UsageError(f"{path}:{lineno}: non-integer field") from None
    return out


def _read_ids(path: str) -> List[int]:
    with open(path) as fh:
        try:
            return [int(line) for line in fh if line.strip()]
        except ValueError:
            raise UsageError(f"{path}: expected one vertex id per line") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_gen(args) -> int:
    if args.model in ("gnp", "random_regularish", "tree") and args.deg is None:
        raise UsageError(f"model {args.model} needs --deg")
    try:
        g = gen_graph(args.model, args.n, args.deg or 0, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, save_graph(g))
    return EXIT_OK


def cmd_run(args) -> int:
    k = args.k if args.k is not None else 2
    if args.algo in DISTANCE2_ONLY and k != 2:
        raise UsageError(f"--algo {args.algo} runs on G^2 only; drop --k or pass --k 2")
    g = read_graph(args.graph)
    try:
        out = run_algo(args.algo, g, k, args.bandwidth)
    except BenchConfigError as exc:
        raise UsageError(str(exc)) from None
    if out.members is not None:
        text = "".join(f"{v}\n" for v in out.members)
    else:
        text = "".join(f"{v} {c}\n" for v, c in enumerate(out.colors))
    if args.out:
        _write(args.out, text)
    if args.trace and out.network is not None:
        _write(args.trace, out.network.trace.to_csv())
    row = rows_to_csv([out.row()])
    if args.csv:
        fresh = not os.path.exists(args.csv) or os.path.getsize(args.csv) == 0
        with open(args.csv, "a") as fh:
            fh.write(row if fresh else row.split("\n", 1)[1])
    sys.stdout.write(row)
    return EXIT_OK if out.valid else EXIT_INVALID


def cmd_verify(args) -> int:
    g = read_graph(args.graph)
    if (args.colors is None) == (args.mis is None):
        raise UsageError("pass exactly one of --colors and --mis")
    if args.mis is not None:
        verdict = check_mis_k(g, args.k, _read_ids(args.mis))
    else:
        colors = _read_pairs(args.colors, "color")
        if sorted(colors) != list(g.vertices):
            raise UsageError("coloring file must list every vertex exactly once")
        if (args.maxdefect is None) != (args.order is None):
            raise UsageError("--maxdefect and --order go together")
        if args.order is not None:
            rounds = _read_pairs(args.order, "finalize_round")
            if sorted(rounds) != list(g.vertices):
                raise UsageError("order file must list every vertex exactly once")
            order = [(rounds[v], v) for v in g.vertices]
            verdict = check_arbdefect(g, args.k, colors, order, args.maxdefect)
        else:
            verdict = check_proper_k(g, args.k, colors)
    if verdict.ok:
        print("ok")
        return EXIT_OK
    print(f"violation: {verdict.message} (witness {verdict.witness})")
    return EXIT_INVALID


def cmd_bench(args) -> int:
    if (args.suite is None) == (args.config is None):
        raise UsageError("pass exactly one of --suite and --config")
    if args.suite is not None:
        if args.suite not in SUITES:
            raise UsageError(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
        text = SUITES[args.suite]
    else:
        with open(args.config) as fh:
            text = fh.read()
    try:
        rows = run_bench(parse_config(text))
    except BenchConfigError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, rows_to_csv(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="powercolor", description="CONGEST coloring and MIS on graph powers")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph file")
    gen.add_argument("--model", choices=MODELS, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--deg", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="run one algorithm and print its CSV row")
    run.add_argument("--algo", choices=ALGOS, required=True)
    run.add_argument("--graph", required=True, help="graph file or shorthand (p5, c6, s5, k4)")
    run.add_argument("--k", type=int)
    run.add_argument("--bandwidth", help="one_bit, congest or B:<int>")
    run.add_argument("--out", help="coloring file ('v color' lines) or MIS file (one id per line)")
    run.add_argument("--csv", help="append the summary row to this CSV")
    run.add_argument("--trace", help="write the per-round trace CSV here")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="check a coloring, arbdefective coloring or MIS")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--k", type=int, default=2)
    ver.add_argument("--colors")
    ver.add_argument("--mis")
    ver.add_argument("--maxdefect", type=int)
    ver.add_argument("--order", help="'v finalize_round' lines; ties break by vertex id")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="sweep a grid and write one CSV row per cell")
    bench.add_argument("--suite", help=f"built-in grid: {', '.join(SUITES)}")
    bench.add_argument("--config", help="key=value grid file")
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "bandwidth", None):
            try:
                bandwidth_mode(args.bandwidth, 2)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        return args.func(args)
    except UsageError as exc:
        print(f"powercolor {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BandwidthExceeded, RoundCapReached, NoFreeElement) as exc:
        print(f"powercolor {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"powercolor {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


__all__ = ["HEADER", "main"]
