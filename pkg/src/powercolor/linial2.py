"""Distance-2 Linial color reduction driven by neighbor-assisted binary search.

Each color ``c`` owns the ordered set ``[(x, p_c(x)) for x in 0..q-1]`` where
the coefficients of ``p_c`` (degree <= d) are the base-q digits of ``c``.  Two
distinct colors share at most ``d`` elements.  A vertex never learns its 2-hop
neighbors' sets; its neighbors report how many of its elements collide in each
half of its current search range, and it keeps the half with fewer collisions.
Once the range fits in one message the neighbors send a conflict bitmask
instead and the vertex takes the first clear position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .engine import Bandwidth, Message, Network, bandwidth_mode
from .graph import Graph, bits_for, log_star, smallest_prime_above
from .search import NeighborTransport, NoFreeElement, PhaseRecord, binary_search, halves, search_schedule


__all__ = [
    "Linial2Result",
    "NoFreeElement",
    "PhaseRecord",
    "SetSystemParams",
    "StageLog",
    "choose_params",
    "count_intersections",
    "halves",
    "linial2_full",
    "linial2_stage",
    "ordered_set",
]


@dataclass(frozen=True)
class SetSystemParams:
    q: int
    d: int
    m: int

    @property
    def palette(self) -> int:
        return self.q * self.q


def choose_params(m: int, delta: int, conflict_budget: Optional[int] = None) -> SetSystemParams:
    """Smallest degree ``d`` and then smallest prime ``q > d * budget`` with ``q**(d+1) >= m``.

    ``budget`` defaults to ``2 * delta**2``, twice the number of sets a vertex
    is compared against, so collisions stay below half the search range.
    """
    if m < 2:
        raise ValueError("palette must have at least 2 colors")
    budget = conflict_budget if conflict_budget is not None else 2 * max(delta, 1) ** 2
    d = 1
    while (d * budget + 1) ** (d + 1) < m:
        d += 1
    q = smallest_prime_above(d * budget)
    while q ** (d + 1) < m:
        q = smallest_prime_above(q)
    return SetSystemParams(q, d, m)


def poly_coeffs(c: int, q: int, d: int) -> List[int]:
    coeffs = []
    for _ in range(d + 1):
        coeffs.append(c % q)
        c //= q
    if c:
        raise ValueError("color does not fit the set system")
    return coeffs


def poly_eval(coeffs: Sequence[int], x: int, q: int) -> int:
    acc = 0
    for a in reversed(coeffs):
        acc = (acc * x + a) % q
    return acc


def poly_table(c: int, q: int, d: int) -> np.ndarray:
    xs = np.arange(q, dtype=np.int64)
    acc = np.zeros(q, dtype=np.int64)
    for a in reversed(poly_coeffs(c, q, d)):
        acc = (acc * xs + a) % q
    return acc


def ordered_set(params: SetSystemParams, c: int) -> List[Tuple[int, int]]:
    if not 0 <= c < params.m:
        raise ValueError(f"color {c} outside palette of {params.m}")
    coeffs = poly_coeffs(c, params.q, params.d)
    return [(x, poly_eval(coeffs, x, params.q)) for x in range(params.q)]


def count_intersections(params: SetSystemParams, c_v: int, c_u: int, left: int, right: int) -> int:
    """Elements ``left..right`` (1-based, inclusive) of S(c_v) that also lie in S(c_u)."""
    if not 1 <= left <= right <= params.q:
        raise ValueError("invalid range")
    pv = poly_coeffs(c_v, params.q, params.d)
    pu = poly_coeffs(c_u, params.q, params.d)
    return sum(
        1 for x in range(left - 1, right) if poly_eval(pv, x, params.q) == poly_eval(pu, x, params.q)
    )


@dataclass
class StageLog:
    params: SetSystemParams
    phases: int
    rounds: int


@dataclass
class Linial2Result:
    colors: List[int]
    palette: int
    network: Network
    stages: List[StageLog] = field(default_factory=list)
    records: List[PhaseRecord] = field(default_factory=list)

    @property
    def trace(self):
        return self.network.trace


def conflict_vectors(g: Graph, colors: Sequence[int], params: SetSystemParams) -> Dict[Tuple[int, int], np.ndarray]:
    """What neighbor ``u`` counts for ``v`` at each position of S(v).

    Collisions with S(w) for every w in N[u] other than v; a 2-hop neighbor
    reachable through several middles is counted once per middle.
    """
    q, d = params.q, params.d
    tables = {}
    for v in g.vertices:
        if colors[v] not in tables:
            tables[colors[v]] = poly_table(colors[v], q, d)
    out = {}
    for u in g.vertices:
        closed = (u,) + g.adj[u]
        mat = np.stack([tables[colors[w]] for w in closed])
        for v in g.adj[u]:
            out[(u, v)] = (mat == tables[colors[v]]).sum(axis=0) - 1  # drop v's own row
    return out


def linial2_stage(
    net: Network,
    colors: Sequence[int],
    params: SetSystemParams,
    stage_index: int = 1,
    records: Optional[List[PhaseRecord]] = None,
) -> Tuple[List[int], int]:
    """One color-reduction stage on G^2; returns ``(new_colors, phases)``.

    Colors must be proper on G^2 and lie in ``[0, params.m)``.
    """
    g = net.graph
    q = params.q
    # every vertex tells its neighbors its current color
    net.exchange({v: {u: Message(colors[v], bits_for(params.m - 1)) for u in g.adj[v]} for v in g.vertices})
    transport = NeighborTransport(net, conflict_vectors(g, colors, params), bits_for(params.d * max(g.max_degree, 1)))
    chosen = binary_search(transport, g.vertices, q, shortcut=net.B, records=records, stage_index=stage_index)
    new_colors = []
    for v in g.vertices:
        x = chosen[v] - 1
        new_colors.append(x * q + poly_eval(poly_coeffs(colors[v], q, params.d), x, q))
    return new_colors, search_schedule(q, net.B)


def linial2_full(
    g: Graph,
    bandwidth: Optional[Bandwidth] = None,
    initial: Optional[Sequence[int]] = None,
    palette: Optional[int] = None,
    net: Optional[Network] = None,
    record: bool = False,
) -> Linial2Result:
    """Reduce unique IDs (or a given proper G^2 coloring) to the fixed-point palette."""
    if net is None:
        net = Network(g, bandwidth or bandwidth_mode("congest", g.n))
    colors = list(initial) if initial is not None else list(g.vertices)
    m = palette if palette is not None else max(g.n, 1)
    result = Linial2Result(colors, m, net)
    records = result.records if record else None
    delta = g.max_degree
    if delta == 0:
        # isolated vertices conflict with nobody
        result.colors, result.palette = [0] * g.n, 1
        return result
    stage = 0
    while m >= 2:
        params = choose_params(m, delta)
        if params.palette >= m:
            break
        stage += 1
        start = net.rounds
        with net.stage("linial2"):
            colors, phases = linial2_stage(net, colors, params, stage, records)
        result.stages.append(StageLog(params, phases, net.rounds - start))
        m = params.palette
    result.colors = colors
    result.palette = m
    return result


def fixed_point_field(delta: int) -> int:
    """Field size of the last stage with cubic polynomials: smallest prime above 6*delta^2."""
    return smallest_prime_above(6 * max(delta, 1) ** 2)


def stage_limit(n: int) -> int:
    return log_star(n) + 2
