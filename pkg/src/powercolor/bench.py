"""Run any algorithm on a graph and summarize it as one CSV row; sweep grids of cells."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ag2 import ag2_reduce
from .engine import Network, bandwidth_mode
from .fastcolor2 import fastcolor2_pipeline
from .graph import Graph, gen_graph, smallest_prime_above
from .linial2 import linial2_full
from .oracle import check_mis_k, check_proper_k
from .powerk.aggregation import or_spec
from .powerk.coloring import agk_reduce, dp_bound, fastcolor_k_run, linialk_overcount_run
from .powerk.mis import mis_k_run
from .powerk.transform import PowerContext, naive_transform_round, transform_round

HEADER = (
    "algo", "k", "n", "m", "delta", "d_p", "q",
    "rounds_setup", "rounds_main", "bits_total", "palette_or_mis_size", "valid",
)

RUN_ALGOS = ("linial2", "ag2", "fast2", "linialk", "agk", "fastk", "misk", "naive-baseline")
# single simulated G^k rounds, for the transform-versus-naive comparison
ROUND_ALGOS = ("transform-round", "naive-round")
ALGOS = RUN_ALGOS + ROUND_ALGOS
DISTANCE2_ONLY = ("linial2", "ag2", "fast2")


class BenchConfigError(ValueError):
    pass


@dataclass
class Outcome:
    algo: str
    k: int
    graph: Graph
    q: int
    rounds_setup: int
    rounds_main: int
    bits_total: int
    size: int
    valid: bool
    colors: Optional[List[int]] = None
    members: Optional[List[int]] = None
    network: Optional[Network] = None

    def row(self) -> Tuple:
        g = self.graph
        return (self.algo, self.k, g.n, g.m, g.max_degree, dp_bound(g, self.k), self.q,
                self.rounds_setup, self.rounds_main, self.bits_total, self.size, int(self.valid))


def _net(g: Graph, bandwidth: Optional[str]) -> Network:
    return Network(g, bandwidth_mode(bandwidth or "congest", max(g.n, 2)))


def _coloring(algo, k, g, q, net, colors, palette, setup) -> Outcome:
    return Outcome(algo, k, g, q, setup, net.rounds - setup, net.trace.total_bits_sent, palette,
                   check_proper_k(g, k, colors).ok, colors=list(colors), network=net)


def run_algo(algo: str, g: Graph, k: int = 2, bandwidth: Optional[str] = None) -> Outcome:
    """Run ``algo`` end to end on one network and verify the output with the oracle."""
    if algo not in ALGOS:
        raise BenchConfigError(f"unknown algo {algo!r}; expected one of {', '.join(ALGOS)}")
    if algo in DISTANCE2_ONLY and k != 2:
        raise BenchConfigError(f"{algo} works on G^2 only (got k={k})")
    if k < 1:
        raise BenchConfigError("k must be >= 1")

    if algo == "linial2":
        net = _net(g, bandwidth)
        res = linial2_full(g, net=net)
        q = res.stages[-1].params.q if res.stages else 0
        return _coloring(algo, k, g, q, net, res.colors, res.palette, 0)
    if algo == "ag2":
        net = _net(g, bandwidth or "one_bit")
        # the starting coloring is not part of the reduction; it runs on a congest network
        lin = linial2_full(g)
        res = ag2_reduce(g, lin.colors, lin.palette, net=net)
        out = _coloring(algo, k, g, res.palette, net, res.colors, res.palette, res.setup_rounds)
        out.rounds_setup += lin.network.rounds
        out.bits_total += lin.network.trace.total_bits_sent
        return out
    if algo == "fast2":
        res = fastcolor2_pipeline(g, bandwidth=bandwidth_mode(bandwidth or "congest", max(g.n, 2)))
        setup = res.stage_rounds.get("linial2", 0) + res.proxy.rounds
        return _coloring(algo, k, g, res.iterative.q, res.network, res.colors, res.palette, setup)
    if algo == "linialk":
        net = _net(g, bandwidth)
        res = linialk_overcount_run(g, k, net=net)
        return _coloring(algo, k, g, res.q, net, res.colors, res.palette, 0)
    if algo in ("agk", "naive-baseline"):
        net = _net(g, bandwidth)
        ctx = PowerContext(g, k)
        lin = linialk_overcount_run(g, k, net=net, ctx=ctx)
        setup = net.rounds
        res = agk_reduce(g, k, lin.colors, lin.palette, net=net, ctx=ctx, naive=algo == "naive-baseline")
        return _coloring(algo, k, g, res.q, net, res.colors, res.palette, setup)
    if algo == "fastk":
        net = _net(g, bandwidth)
        res = fastcolor_k_run(g, k, net=net)
        setup = res.stage_rounds.get("linialk", 0) + res.preprocess_rounds
        return _coloring(algo, k, g, res.iterative_q, net, res.colors, res.palette, setup)
    if algo == "misk":
        res = mis_k_run(g, k, bandwidth=bandwidth_mode(bandwidth or "congest", max(g.n, 2)))
        net = res.network
        return Outcome(algo, k, g, res.palette, res.coloring_rounds, res.broadcast_rounds,
                       net.trace.total_bits_sent, len(res.members), check_mis_k(g, k, res.members).ok,
                       members=res.members, network=net)
    return _one_round(algo, g, k, bandwidth)


def _one_round(algo: str, g: Graph, k: int, bandwidth: Optional[str]) -> Outcome:
    """One G^k round of the b-conflict OR over a proper G^k coloring, either way."""
    ctx = PowerContext(g, k)
    lin = linialk_overcount_run(g, k, ctx=ctx)
    q = smallest_prime_above(2 * dp_bound(g, k))
    states = [c % q for c in lin.colors]
    state_bits = 2 * max(1, (q - 1).bit_length())
    net = _net(g, bandwidth)
    if algo == "transform-round":
        res = transform_round(ctx, net, or_spec(lambda a, b: a == b), states, state_bits)
        valid = all(bool(val) == any(states[u] == states[v] for u in ctx.nk[v]) for v, val in res.values.items())
    else:
        res = naive_transform_round(ctx, net, states, state_bits)
        valid = all(set(res.values[v]) == set(ctx.nk[v]) for v in g.vertices)
    return Outcome(algo, k, g, q, 0, res.rounds, net.trace.total_bits_sent, q, valid, network=net)


# -- sweeps -------------------------------------------------------------------------------

LIST_KEYS = ("models", "n", "delta", "k", "algos", "seeds")


@dataclass
class BenchConfig:
    models: List[str] = field(default_factory=lambda: ["gnp"])
    n: List[int] = field(default_factory=lambda: [64])
    delta: List[int] = field(default_factory=lambda: [4])
    k: List[int] = field(default_factory=lambda: [2])
    algos: List[str] = field(default_factory=lambda: ["ag2"])
    seeds: List[int] = field(default_factory=lambda: [0])
    bandwidth: Optional[str] = None

    def cells(self) -> Iterable[Tuple[str, int, int, int, str, int]]:
        return product(self.models, self.n, self.delta, self.k, self.algos, self.seeds)


def parse_config(text: str) -> BenchConfig:
    """``key=value`` lines; list values are comma-separated and may be empty."""
    cfg = BenchConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BenchConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "bandwidth":
            cfg.bandwidth = value or None
            continue
        if key not in LIST_KEYS:
            raise BenchConfigError(f"line {lineno}: unknown key {key!r}")
        items = [s.strip() for s in value.split(",") if s.strip()]
        if key not in ("models", "algos"):
            try:
                items = [int(s) for s in items]
            except ValueError:
                raise BenchConfigError(f"line {lineno}: {key} needs integers, got {value!r}") from None
        setattr(cfg, key, items)
    return cfg


SUITES: Dict[str, str] = {
    "k4-compare": "models=random_regularish\nn=200\ndelta=3,4,5,6\nk=4\nalgos=transform-round,naive-round\nseeds=0\n",
    "smoke": "models=gnp\nn=40\ndelta=3\nk=2\nalgos=linial2,ag2,fast2,linialk,agk,misk\nseeds=0\n",
    "powerk": "models=gnp,tree\nn=48\ndelta=3\nk=2,3,4\nalgos=linialk,agk,fastk,misk,naive-baseline\nseeds=0\n",
}


def run_bench(cfg: BenchConfig) -> List[Tuple]:
    """Rows in grid order; any bad cell is reported with its coordinates."""
    cells = list(cfg.cells())
    for model, n, delta, k, algo, seed in cells:
        name = f"model={model} n={n} delta={delta} k={k} algo={algo} seed={seed}"
        if algo not in ALGOS:
            raise BenchConfigError(f"cell ({name}): unknown algo {algo!r}")
        if algo in DISTANCE2_ONLY and k != 2:
            raise BenchConfigError(f"cell ({name}): {algo} needs k=2")
    rows = []
    for model, n, delta, k, algo, seed in cells:
        try:
            g = gen_graph(model, n, delta, seed)
        except ValueError as exc:
            raise BenchConfigError(f"cell (model={model} n={n} delta={delta} seed={seed}): {exc}") from None
        rows.append(run_algo(algo, g, k, cfg.bandwidth).row())
    return rows


def rows_to_csv(rows: Sequence[Tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    w.writerows(rows)
    return buf.getvalue()
