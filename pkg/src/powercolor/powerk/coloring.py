"""Colorings of G^k built from simulated G^k rounds.

Every phase is one :func:`transform_round`: states travel ``ceil(k/2)`` hops,
middles fold, results come back.  Searches reuse the fixed-schedule binary
search of the distance-2 algorithms through :class:`PowerTransport`; the
range a vertex is searching rides in its broadcast state, so no separate
announce step is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..ag2 import ColorPair, ag_params, encode_pair, next_color
from ..engine import Bandwidth, Network, RoundCapReached, bandwidth_mode
from ..fastcolor2 import ArbColorRecord, arb_field, defective_field, family_coeffs, iterative_field
from ..graph import Graph, bits_for, path_count_bound, smallest_prime_above
from ..linial2 import SetSystemParams, choose_params, poly_coeffs, poly_eval, poly_table
from ..search import PhaseRecord, Transport, binary_search, search_schedule
from .aggregation import count_spec, or_spec
from .transform import PowerContext, naive_transform_round, transform_round


def dp_bound(g: Graph, k: int) -> int:
    """``sum(delta**i, i=1..k)``; zero for an edgeless graph."""
    return path_count_bound(g.max_degree, k) if g.max_degree else 0


class PowerTransport(Transport):
    """Range queries answered by one G^k round each.

    ``vectors[v]`` holds what the convergecast delivers to ``v`` at each
    position (already weighted by how often each pair is applied); half
    totals saturate at ``count_cap`` like the counting domain does.
    """

    def __init__(self, ctx: PowerContext, net: Network, vectors: Mapping[int, np.ndarray], count_cap: int, state_bits: int):
        self.ctx, self.net = ctx, net
        self.cap = count_cap
        self.count_bits = bits_for(count_cap)
        self.state_bits = state_bits
        self.vectors = vectors
        self.prefix = {v: np.concatenate(([0], np.cumsum(vec, dtype=np.int64))) for v, vec in vectors.items()}

    def query(self, half_q, mask_q):
        self.ctx.charge_broadcast(self.net, self.state_bits)
        answers_h, answers_m, value_bits = {}, {}, {}
        for v, (lo, hi) in half_q.items():
            mid = (lo + hi) // 2
            pre = self.prefix[v]
            answers_h[v] = (min(self.cap, int(pre[mid] - pre[lo - 1])), min(self.cap, int(pre[hi] - pre[mid])))
            value_bits[v] = 2 * self.count_bits
        for v, (lo, hi) in mask_q.items():
            answers_m[v] = [int(x > 0) for x in self.vectors[v][lo - 1:hi]]
            value_bits[v] = hi - lo + 1
        self.ctx.charge_convergecast(self.net, sorted(value_bits), value_bits.__getitem__)
        return answers_h, answers_m

    def announce(self, choosers):
        pass


@dataclass
class PowerColoring:
    colors: List[int]
    palette: int
    network: Network
    k: int
    d_p: int
    q: int = 0
    phases: int = 0
    setup_rounds: int = 0
    main_rounds: int = 0
    stages: List[Tuple[SetSystemParams, int]] = field(default_factory=list)  # linialk: (params, phases)
    pass_log: List[Tuple[int, int]] = field(default_factory=list)  # agk: (q, phases)
    records: List[PhaseRecord] = field(default_factory=list)
    finalize_phase: List[int] = field(default_factory=list)

    @property
    def trace(self):
        return self.network.trace


def _setup(g: Graph, k: int, bandwidth: Optional[Bandwidth], net: Optional[Network], ctx: Optional[PowerContext]):
    if net is None:
        net = Network(g, bandwidth or bandwidth_mode("congest", g.n))
    if ctx is None:
        ctx = PowerContext(g, k)
    elif ctx.k != k or ctx.g is not g:
        raise ValueError("context was built for another graph or k")
    return net, ctx


# -- Linial with over-counting ---------------------------------------------------------

def linialk_params(m: int, d_p: int) -> SetSystemParams:
    return choose_params(m, 1, conflict_budget=3 * max(d_p, 1))


def overcount_vectors(ctx: PowerContext, colors: Sequence[int], params: SetSystemParams) -> Dict[int, np.ndarray]:
    """Per-position collisions each vertex receives, every pair weighted by its application count."""
    q, d = params.q, params.d
    tables = {c: poly_table(c, q, d) for c in set(colors)}
    out = {}
    for v in ctx.g.vertices:
        nbrs = list(ctx.nk[v])
        if not nbrs:
            out[v] = np.zeros(q, dtype=np.int64)
            continue
        weights = np.array([ctx.mult[(v, u)] for u in nbrs], dtype=np.int64)
        mat = np.stack([tables[colors[u]] for u in nbrs]) == tables[colors[v]]
        out[v] = weights @ mat
    return out


def linialk_overcount_run(
    g: Graph,
    k: int,
    bandwidth: Optional[Bandwidth] = None,
    initial: Optional[Sequence[int]] = None,
    palette: Optional[int] = None,
    net: Optional[Network] = None,
    ctx: Optional[PowerContext] = None,
    record: bool = False,
) -> PowerColoring:
    """Linial stages on G^k; neighbors' collision counts arrive over-counted by path multiplicity.

    A vertex receives at most ``d_p`` applications in total, each worth at
    most ``d`` collisions, and the conflict budget is ``3 * d_p``; every
    search still ends on a collision-free position.
    """
    net, ctx = _setup(g, k, bandwidth, net, ctx)
    d_p = dp_bound(g, k)
    colors = list(initial) if initial is not None else list(g.vertices)
    m = palette if palette is not None else max(g.n, 1)
    res = PowerColoring(colors, m, net, k, d_p)
    records = res.records if record else None
    if d_p == 0:
        res.colors, res.palette = [0] * g.n, 1
        return res
    start = net.rounds
    stage = 0
    with net.stage("linialk"):
        while m >= 2:
            params = linialk_params(m, d_p)
            if params.palette >= m:
                break
            stage += 1
            q = params.q
            transport = PowerTransport(
                ctx, net, overcount_vectors(ctx, colors, params), q, bits_for(m - 1) + 2 * bits_for(q)
            )
            chosen = binary_search(transport, g.vertices, q, shortcut=net.B, records=records, stage_index=stage)
            colors = [
                (chosen[v] - 1) * q + poly_eval(poly_coeffs(colors[v], q, params.d), chosen[v] - 1, q)
                for v in g.vertices
            ]
            phases = search_schedule(q, net.B)
            res.stages.append((params, phases))
            res.phases += phases
            res.q, m = q, params.palette
    res.colors, res.palette = colors, m
    res.main_rounds = net.rounds - start
    return res


# -- additive-group reduction ------------------------------------------------------------

def agk_coloring_run(
    g: Graph,
    k: int,
    colors: Sequence[int],
    palette: int,
    bandwidth: Optional[Bandwidth] = None,
    net: Optional[Network] = None,
    ctx: Optional[PowerContext] = None,
    q: Optional[int] = None,
    naive: bool = False,
    record: bool = False,
) -> PowerColoring:
    """AG shifting on G^k: one OR-aggregated round per phase; ``naive`` floods k hops instead."""
    net, ctx = _setup(g, k, bandwidth, net, ctx)
    d_p = dp_bound(g, k)
    q = q or ag_params(palette, 0, budget=2 * d_p).q
    if palette > q * q:
        raise ValueError(f"palette {palette} exceeds q^2 = {q * q}")
    pair: List[ColorPair] = [encode_pair(c, q) for c in colors]
    spec = or_spec(lambda pv, pu: pv.b == pu.b, name="b-conflict")
    state_bits = 2 * bits_for(q - 1)
    finalize_phase = [0 if p.finalized else -1 for p in pair]
    history: List[List[ColorPair]] = []
    phase = 0
    start = net.rounds
    with net.stage("agk-naive" if naive else "agk"):
        while any(not p.finalized for p in pair):
            phase += 1
            if phase > q:
                net.trace.cap_reached = True
                raise RoundCapReached(f"agk did not finish within q={q} phases")
            active = [v for v in g.vertices if not pair[v].finalized]
            if naive:
                known = naive_transform_round(ctx, net, pair, state_bits).values
                verdict = {v: any(s.b == pair[v].b for s in known[v].values()) for v in active}
            else:
                verdict = transform_round(ctx, net, spec, pair, state_bits, targets=active).values
            for v in active:
                pair[v], _ = next_color(pair[v], [bool(verdict[v])], q)
                if pair[v].finalized:
                    finalize_phase[v] = phase
            if record:
                history.append(list(pair))
    res = PowerColoring([p.b for p in pair], q, net, k, d_p, q=q, phases=phase,
                        main_rounds=net.rounds - start, finalize_phase=finalize_phase)
    res.pass_log.append((q, phase))
    return res


def agk_reduce(
    g: Graph,
    k: int,
    colors: Sequence[int],
    palette: int,
    bandwidth: Optional[Bandwidth] = None,
    net: Optional[Network] = None,
    ctx: Optional[PowerContext] = None,
    naive: bool = False,
) -> PowerColoring:
    """Chain agk passes until the palette is the smallest prime above ``2 * d_p``."""
    net, ctx = _setup(g, k, bandwidth, net, ctx)
    target = smallest_prime_above(2 * dp_bound(g, k))
    total: Optional[PowerColoring] = None
    while True:
        res = agk_coloring_run(g, k, colors, palette, net=net, ctx=ctx, naive=naive)
        if total is None:
            total = res
        else:
            total.colors, total.palette, total.q = res.colors, res.palette, res.q
            total.phases += res.phases
            total.main_rounds += res.main_rounds
            total.finalize_phase = res.finalize_phase
            total.pass_log += res.pass_log
        colors, palette = res.colors, res.palette
        if palette <= target:
            return total


# -- fast coloring with exact counts -------------------------------------------------------

@dataclass
class FastKResult:
    colors: List[int]
    palette: int
    network: Network
    k: int
    d_p: int
    max_defect: int
    base_palette: int
    defective_colors: List[int]
    defective_q: int
    arb_colors: List[int]
    arb_q: int
    arb_phases: int
    arb_records: List[ArbColorRecord]
    iterative_q: int
    preprocess_rounds: int
    stage_rounds: Dict[str, int]

    @property
    def trace(self):
        return self.network.trace

    @property
    def arb_order(self) -> List[Tuple[int, int]]:
        return [r.key for r in self.arb_records]


def _stack_eq(rows: Sequence[np.ndarray], mine: np.ndarray, size: int) -> np.ndarray:
    if not rows:
        return np.zeros(size, dtype=np.int64)
    return (np.stack(rows) == mine).sum(axis=0)


def fastcolor_k_run(
    g: Graph,
    k: int,
    bandwidth: Optional[Bandwidth] = None,
    net: Optional[Network] = None,
    ctx: Optional[PowerContext] = None,
) -> FastKResult:
    """Defective, arbdefective, then class-by-class proper coloring of G^k, all with exact counts.

    ``s = ceil(sqrt(d_p))`` plays the role the degree plays at distance 2:
    the defect target, the arbdefect bound and the field sizes scale with it.
    """
    net, ctx = _setup(g, k, bandwidth, net, ctx)
    d_p = dp_bound(g, k)
    s = isqrt(d_p - 1) + 1 if d_p > 1 else 1
    lin = linialk_overcount_run(g, k, net=net, ctx=ctx)
    base, m0 = lin.colors, lin.palette
    pre_start = net.rounds
    ctx.preprocess_exact(net)
    preprocess_rounds = net.rounds - pre_start
    nk = ctx.nk

    # defective: cubic polynomials, halving only
    qd = defective_field(m0, s)
    with net.stage("defectivek"):
        tables = {c: poly_table(c, qd, 3) for c in set(base)}
        vectors = {v: _stack_eq([tables[base[u]] for u in nk[v]], tables[base[v]], qd) for v in g.vertices}
        transport = PowerTransport(ctx, net, vectors, 3 * max(d_p, 1), bits_for(m0 - 1) + 2 * bits_for(qd))
        chosen = binary_search(transport, g.vertices, qd, need_zero=False)
    dcol = [(chosen[v] - 1) * qd + poly_eval(poly_coeffs(base[v], qd, 3), chosen[v] - 1, qd) for v in g.vertices]

    # arbdefective: shift b until at most s same-b vertices remain in the k-ball
    qa = arb_field(qd * qd)
    pair = [encode_pair(c, qa) for c in dcol]
    finalized_at = [0 if p.finalized else -1 for p in pair]
    spec = count_spec(lambda pv, pu: pv.b == pu.b, max(d_p, 1), name="same-b")
    phase = 0
    with net.stage("arbdefectivek"):
        while any(not p.finalized for p in pair):
            phase += 1
            if phase > qa:
                net.trace.cap_reached = True
                raise RoundCapReached(f"arbdefective on G^{k} did not finish within {qa} phases")
            active = [v for v in g.vertices if not pair[v].finalized]
            counts = transform_round(ctx, net, spec, pair, 2 * bits_for(qa - 1), targets=active).values
            for v in active:
                done = counts[v] <= s
                pair[v], _ = next_color(pair[v], [not done], qa)
                if done:
                    finalized_at[v] = phase
    arb_records = [ArbColorRecord(pair[v], finalized_at[v], v) for v in g.vertices]
    cls = [p.b for p in pair]
    key = [r.key for r in arb_records]

    # iterative: one arbdefective class at a time
    qc, D = iterative_field(s, s, m0)
    xs = np.arange(qc, dtype=np.int64)
    polys = []
    for v in g.vertices:
        vals = np.zeros(qc, dtype=np.int64)
        for a in reversed(family_coeffs(base[v], qc, D)):
            vals = (vals * xs + a) % qc
        polys.append(vals)
    final: List[Optional[Tuple[int, int]]] = [None] * g.n
    j_of: List[Optional[int]] = [None] * g.n
    state_bits = bits_for(qa - 1) + bits_for(max(phase, 1)) + bits_for(m0 - 1) + 3 * bits_for(qc)
    cap = (D + 1) * max(d_p, 1)
    with net.stage("iterativek"):
        for i in range(qa):
            members = [v for v in g.vertices if cls[v] == i]
            vectors = {}
            for v in members:
                vec = np.zeros(qc, dtype=np.int64)
                for u in nk[v]:
                    if final[u] is not None:
                        t, c = final[u]
                        vec[(c - polys[v][t]) % qc] += 1
                vectors[v] = vec
            pick = binary_search(PowerTransport(ctx, net, vectors, cap, state_bits), members, qc, need_zero=False)
            for v in members:
                j_of[v] = pick[v] - 1
            vectors = {}
            for v in members:
                mine = (polys[v] + j_of[v]) % qc
                vec = np.zeros(qc, dtype=np.int64)
                for u in nk[v]:
                    if final[u] is not None:
                        t, c = final[u]
                        vec[t] += int(mine[t] == c)
                    elif cls[u] == i and key[u] < key[v]:
                        vec += (polys[u] + j_of[u]) % qc == mine
                vectors[v] = vec
            pick = binary_search(PowerTransport(ctx, net, vectors, cap, state_bits), members, qc, shortcut=net.B)
            for v in members:
                t = pick[v] - 1
                final[v] = (t, int((polys[v][t] + j_of[v]) % qc))
    return FastKResult(
        colors=[t * qc + c for t, c in final],
        palette=qc * qc,
        network=net,
        k=k,
        d_p=d_p,
        max_defect=s,
        base_palette=m0,
        defective_colors=dcol,
        defective_q=qd,
        arb_colors=cls,
        arb_q=qa,
        arb_phases=phase,
        arb_records=arb_records,
        iterative_q=qc,
        preprocess_rounds=preprocess_rounds,
        stage_rounds=dict(net.trace.stage_rounds),
    )
