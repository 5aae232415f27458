"""Fast distance-2 coloring: defective, then arbdefective, then class-by-class proper.

Every count a vertex receives here is exact.  A 2-hop neighbor ``w`` of ``v``
is reported only by the single common neighbor chosen as proxy for the pair
``{v, w}`` (the smallest common neighbor); direct neighbors report themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ag2 import ColorPair, encode_pair, next_color
from .engine import Bandwidth, Message, Network, RoundCapReached, bandwidth_mode
from .graph import Graph, ProxyAssignment, bits_for, id_bits, is_prime, smallest_prime_above
from .linial2 import linial2_full, poly_coeffs, poly_eval, poly_table
from .search import NeighborTransport, PhaseRecord, binary_search, search_schedule


# -- proxies --------------------------------------------------------------------

@dataclass
class ProxySetup:
    proxies: List[ProxyAssignment]
    # relay[(u, v)]: 2-hop neighbors of v for which u is the proxy
    relay: Dict[Tuple[int, int], Tuple[int, ...]]
    rounds: int

    def reporters(self, u: int, v: int) -> Tuple[int, ...]:
        """Everything ``u`` speaks for when answering ``v``: itself and its relayed vertices."""
        return (u,) + self.relay[(u, v)]


def proxy_setup(net: Network) -> ProxySetup:
    """Neighbor lists are streamed once; every proxy decision is then local."""
    g = net.graph
    start = net.rounds
    with net.stage("proxy-setup"):
        inbox = net.exchange(
            {v: {u: Message(g.adj[v], g.degree(v) * id_bits(g.n)) for u in g.adj[v]} for v in g.vertices}
        )
    proxies = []
    for v in g.vertices:
        view = {u: inbox[v][u].payload for u in g.adj[v]}
        near = set(g.adj[v]) | {v}
        proxy_of: Dict[int, int] = {}
        for u in g.adj[v]:  # ascending, so the first claim is the smallest
            for w in view[u]:
                if w not in near and w not in proxy_of:
                    proxy_of[w] = u
        proxies.append(ProxyAssignment(v, dict(sorted(proxy_of.items()))))
    relay: Dict[Tuple[int, int], List[int]] = {(u, v): [] for v in g.vertices for u in g.adj[v]}
    for v in g.vertices:
        for w, u in proxies[v].proxy_of.items():
            relay[(u, v)].append(w)
    return ProxySetup(proxies, {k: tuple(sorted(ws)) for k, ws in relay.items()}, net.rounds - start)


# -- defective coloring -----------------------------------------------------------

def defective_field(m: int, delta: int) -> int:
    q = smallest_prime_above(12 * max(delta, 1))
    while q**4 < m:
        q = smallest_prime_above(q)
    return q


def defect_bound(delta: int, q: int) -> int:
    """The looser documented bound ``2 * ceil(3 delta^2 / q) + 2``."""
    return 2 * -(-3 * delta * delta // q) + 2


def tight_defect_bound(delta: int, q: int) -> int:
    # halving keeps conflicts <= C0 * (width + 1) / (q + 1) with C0 <= 3 delta^2
    return (6 * delta * delta) // (q + 1)


@dataclass
class DefectiveResult:
    colors: List[int]
    palette: int
    q: int
    phases: int
    rounds: int
    records: List[PhaseRecord] = field(default_factory=list)


def defective_vectors(g: Graph, colors: Sequence[int], q: int, setup: ProxySetup) -> Dict[Tuple[int, int], np.ndarray]:
    """Per-position collisions neighbor ``u`` reports to ``v`` (cubic polynomials over F_q)."""
    tables = {c: poly_table(c, q, 3) for c in set(colors)}
    vectors = {}
    for v in g.vertices:
        mine = tables[colors[v]]
        for u in g.adj[v]:
            vec = np.zeros(q, dtype=np.int64)
            for w in setup.reporters(u, v):
                vec += tables[colors[w]] == mine
            vectors[(u, v)] = vec
    return vectors


def defective2_run(
    net: Network,
    colors: Sequence[int],
    palette: int,
    setup: ProxySetup,
    record: bool = False,
) -> DefectiveResult:
    """Pick ``t`` with few 2-hop collisions of cubic polynomials; color ``<t, p(t)>``."""
    g = net.graph
    q = defective_field(palette, g.max_degree)
    start = net.rounds
    records: List[PhaseRecord] = []
    with net.stage("defective2"):
        net.exchange({v: {u: Message(colors[v], bits_for(palette - 1)) for u in g.adj[v]} for v in g.vertices})
        vectors = defective_vectors(g, colors, q, setup)
        transport = NeighborTransport(net, vectors, bits_for(3 * max(g.max_degree, 1)))
        chosen = binary_search(transport, g.vertices, q, need_zero=False, records=records if record else None)
    out = []
    for v in g.vertices:
        t = chosen[v] - 1
        out.append(t * q + poly_eval(poly_coeffs(colors[v], q, 3), t, q))
    return DefectiveResult(out, q * q, q, search_schedule(q), net.rounds - start, records)


# -- arbdefective coloring ----------------------------------------------------------

def number_of_conflicts(own: ColorPair, others: Sequence[ColorPair]) -> int:
    return sum(1 for o in others if o.b == own.b)


@dataclass(frozen=True)
class ArbColorRecord:
    pair: ColorPair
    finalize_round: int
    id: int

    @property
    def key(self) -> Tuple[int, int]:
        return (self.finalize_round, self.id)


def parent_relation(rec_u: ArbColorRecord, rec_v: ArbColorRecord) -> int:
    """ID of the parent: the earlier finisher, or the lower ID on a tie."""
    if rec_u.id == rec_v.id:
        raise ValueError("a vertex is not its own parent")
    return min(rec_u, rec_v, key=lambda r: r.key).id


def arb_field(palette: int) -> int:
    q = 2
    while q * q < palette or not is_prime(q):
        q += 1
    return q


@dataclass
class ArbResult:
    colors: List[int]
    palette: int
    q: int
    records: List[ArbColorRecord]
    phases: int
    setup_rounds: int
    main_rounds: int
    max_defect: int
    finalize_counts: List[int] = field(default_factory=list)

    @property
    def order(self) -> List[Tuple[int, int]]:
        return [r.key for r in self.records]


def arbdefective2_run(
    net: Network,
    colors: Sequence[int],
    palette: int,
    max_defect: int,
    setup: ProxySetup,
    max_phases: Optional[int] = None,
) -> ArbResult:
    """AG-style shifting where a vertex stops once it sees at most ``max_defect`` same-b 2-hop neighbors."""
    if max_defect < 1:
        raise ValueError("max_defect must be >= 1")
    g = net.graph
    q = arb_field(palette)
    cap = q if max_phases is None else max_phases
    pair = [encode_pair(c, q) for c in colors]
    start = net.rounds
    with net.stage("arbdefective2-setup"):
        inbox = net.exchange({v: {u: Message(pair[v], 2 * bits_for(q - 1)) for u in g.adj[v]} for v in g.vertices})
    mirror = [{v: inbox[u][v].payload for v in g.adj[u]} for u in g.vertices]
    setup_rounds = net.rounds - start

    finalized_at = [0 if p.finalized else -1 for p in pair]
    counts = [0] * g.n
    count_bits = bits_for(max(g.max_degree, 1))
    phase = 0
    start = net.rounds
    with net.stage("arbdefective2"):
        while any(not p.finalized for p in pair):
            phase += 1
            if phase > cap:
                net.trace.cap_reached = True
                raise RoundCapReached(f"arbdefective2 did not finish within {cap} phases")
            reports: Dict[int, Dict[int, Message]] = {}
            for u in g.vertices:
                for v in g.adj[u]:
                    mv = mirror[u][v]
                    if mv.finalized:
                        continue
                    seen = [pair[u]] + [mirror[u][w] for w in setup.relay[(u, v)]]
                    reports.setdefault(u, {})[v] = Message(number_of_conflicts(mv, seen), count_bits)
            inbox = net.exchange(reports)

            status: Dict[int, Dict[int, Message]] = {}
            for v in g.vertices:
                if pair[v].finalized:
                    continue
                total = sum(inbox[v][u].payload for u in g.adj[v])
                done = total <= max_defect
                pair[v], _ = next_color(pair[v], [not done], q)
                if done:
                    finalized_at[v], counts[v] = phase, total
                status[v] = {u: Message(done, 1) for u in g.adj[v]}
            inbox = net.exchange(status)
            for u in g.vertices:
                for v, msg in inbox[u].items():
                    mirror[u][v], _ = next_color(mirror[u][v], [not msg.payload], q)
    records = [ArbColorRecord(pair[v], finalized_at[v], v) for v in g.vertices]
    return ArbResult(
        colors=[p.b for p in pair],
        palette=q,
        q=q,
        records=records,
        phases=phase,
        setup_rounds=setup_rounds,
        main_rounds=net.rounds - start,
        max_defect=max_defect,
        finalize_counts=counts,
    )


# -- iterative proper coloring ---------------------------------------------------------

def iterative_field(delta: int, max_defect: int, base_palette: int) -> Tuple[int, int]:
    """``(q_c, D)``: prime above ``16 * max(delta, max_defect)`` meeting the availability inequality.

    Each vertex's polynomial family is ``P_v(x) + j`` with ``P_v`` of degree
    ``D`` and zero constant term.  Search 2 must find a free position among
    ``q_c`` after losing at most ``floor(2 delta^2 / (q_c + 1))`` to finalized
    colors and ``D`` to each of at most ``max_defect`` parents.
    """
    q = smallest_prime_above(16 * max(delta, max_defect, 1))
    while True:
        D = 1
        while q**D < base_palette:
            D += 1
        if D * max_defect + (2 * delta * delta) // (q + 1) < q:
            return q, D
        q = smallest_prime_above(q)


def family_coeffs(base_color: int, q: int, D: int) -> List[int]:
    """Coefficients of ``P_v``: zero constant term, then the base-q digits of the color."""
    return [0] + poly_coeffs(base_color, q, D - 1)


@dataclass
class IterativeResult:
    colors: List[int]
    palette: int
    q: int
    D: int
    classes: int
    rounds: int
    snapshots: List[List[Optional[int]]] = field(default_factory=list)
    records: List[PhaseRecord] = field(default_factory=list)
    hits: List[int] = field(default_factory=list)  # finalized collisions of the chosen j


def iterative_proper2_run(
    net: Network,
    arb: ArbResult,
    base_colors: Sequence[int],
    base_palette: int,
    setup: ProxySetup,
    record: bool = False,
) -> IterativeResult:
    """Color one arbdefective class per iteration, against finalized colors and parents."""
    g = net.graph
    q, D = iterative_field(g.max_degree, arb.max_defect, base_palette)
    xs = np.arange(q, dtype=np.int64)
    polys = []
    for v in g.vertices:
        coeffs = family_coeffs(base_colors[v], q, D)
        vals = np.zeros(q, dtype=np.int64)
        for a in reversed(coeffs):
            vals = (vals * xs + a) % q
        polys.append(vals)
    cls = arb.colors
    key = [r.key for r in arb.records]

    def is_parent(p: int, v: int) -> bool:
        return cls[p] == cls[v] and key[p] < key[v]

    start = net.rounds
    records: List[PhaseRecord] = []
    snapshots: List[List[Optional[int]]] = []
    final: List[Optional[Tuple[int, int]]] = [None] * g.n
    j_of: List[Optional[int]] = [None] * g.n
    hits = [0] * g.n
    color_bits = 2 * bits_for(q - 1)
    with net.stage("iterative2"):
        rec_bits = bits_for(arb.q - 1) + bits_for(max(arb.phases, 1)) + bits_for(base_palette - 1)
        net.exchange(
            {v: {u: Message((cls[v], key[v], base_colors[v]), rec_bits) for u in g.adj[v]} for v in g.vertices}
        )
        for i in range(arb.q):
            members = [v for v in g.vertices if cls[v] == i]

            # search 1: the shift j; a finalized <t, c> hits exactly j = c - P_v(t)
            vectors = {}
            for v in members:
                for u in g.adj[v]:
                    vec = np.zeros(q, dtype=np.int64)
                    for w in setup.reporters(u, v):
                        if final[w] is not None:
                            t, c = final[w]
                            vec[(c - polys[v][t]) % q] += 1
                    vectors[(u, v)] = vec
            transport = NeighborTransport(net, vectors, bits_for(max(g.max_degree, 1)))
            pick = binary_search(transport, members, q, need_zero=False,
                                 records=records if record else None, stage_index=2 * i + 1)
            for v in members:
                j_of[v] = pick[v] - 1
                hits[v] = int(sum(transport.prefix[(u, v)][pick[v]] - transport.prefix[(u, v)][pick[v] - 1]
                                  for u in g.adj[v]))
            net.exchange({v: {u: Message(j_of[v], bits_for(q - 1)) for u in g.adj[v]} for v in members})

            # search 2: the point t, avoiding finalized colors and every point of each parent's polynomial
            vectors = {}
            for v in members:
                mine = (polys[v] + j_of[v]) % q
                for u in g.adj[v]:
                    vec = np.zeros(q, dtype=np.int64)
                    for w in setup.reporters(u, v):
                        if final[w] is not None:
                            t, c = final[w]
                            vec[t] += int(mine[t] == c)
                        elif is_parent(w, v):
                            vec += (polys[w] + j_of[w]) % q == mine
                    vectors[(u, v)] = vec
            transport = NeighborTransport(net, vectors, bits_for((D + 1) * max(g.max_degree, 1)))
            pick = binary_search(transport, members, q, shortcut=net.B,
                                 records=records if record else None, stage_index=2 * i + 2)
            for v in members:
                t = pick[v] - 1
                final[v] = (t, int((polys[v][t] + j_of[v]) % q))
            net.exchange({v: {u: Message(final[v], color_bits) for u in g.adj[v]} for v in members})
            if record:
                snapshots.append([None if f is None else f[0] * q + f[1] for f in final])
    return IterativeResult(
        colors=[t * q + c for t, c in final],
        palette=q * q,
        q=q,
        D=D,
        classes=arb.q,
        rounds=net.rounds - start,
        snapshots=snapshots,
        records=records,
        hits=hits,
    )


# -- pipeline -----------------------------------------------------------------------

@dataclass
class PipelineResult:
    colors: List[int]
    palette: int
    network: Network
    base_palette: int
    proxy: ProxySetup
    defective: DefectiveResult
    arb: ArbResult
    iterative: IterativeResult
    stage_rounds: Dict[str, int]

    @property
    def trace(self):
        return self.network.trace


def fastcolor2_pipeline(g: Graph, bandwidth: Optional[Bandwidth] = None, record: bool = False) -> PipelineResult:
    net = Network(g, bandwidth or bandwidth_mode("congest", g.n))
    lin = linial2_full(g, net=net)
    setup = proxy_setup(net)
    dfc = defective2_run(net, lin.colors, lin.palette, setup, record=record)
    max_defect = max(g.max_degree, 1)
    arb = arbdefective2_run(net, dfc.colors, dfc.palette, max_defect, setup)
    it = iterative_proper2_run(net, arb, lin.colors, lin.palette, setup, record=record)
    return PipelineResult(
        colors=it.colors,
        palette=it.palette,
        network=net,
        base_palette=lin.palette,
        proxy=setup,
        defective=dfc,
        arb=arb,
        iterative=it,
        stage_rounds=dict(net.trace.stage_rounds),
    )
