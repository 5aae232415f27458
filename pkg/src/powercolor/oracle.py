"""Centralized brute-force checkers.

Nothing here imports the distributed implementations or the graph-core BFS:
distances are recomputed from the raw adjacency with a plain all-pairs BFS so
that the checks stay independent of the code they judge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: Any = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


OK = Verdict(True)


def _distances_from(adj: Sequence[Sequence[int]], s: int, limit: int) -> Dict[int, int]:
    dist = {s: 0}
    layer = [s]
    d = 0
    while layer and d < limit:
        d += 1
        nxt = []
        for x in layer:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        layer = nxt
    return dist


def _as_list(values: Mapping[int, Any] | Sequence[Any], n: int) -> List[Any]:
    if isinstance(values, Mapping):
        missing = [v for v in range(n) if v not in values]
        if missing:
            raise ValueError(f"missing color for vertex {missing[0]}")
        return [values[v] for v in range(n)]
    if len(values) != n:
        raise ValueError(f"expected {n} colors, got {len(values)}")
    return list(values)


def check_proper_k(g, k: int, coloring) -> Verdict:
    """No two vertices at distance 1..k share a color; witness is the smallest bad pair."""
    colors = _as_list(coloring, g.n)
    for v in range(g.n):
        dist = _distances_from(g.adj, v, k)
        for u in sorted(dist):
            if u > v and colors[u] == colors[v]:
                return Verdict(False, (v, u, dist[u]), f"vertices {v} and {u} at distance {dist[u]} share color {colors[v]}")
    return OK


def check_defect_k(g, k: int, coloring) -> int:
    colors = _as_list(coloring, g.n)
    worst = 0
    for v in range(g.n):
        dist = _distances_from(g.adj, v, k)
        same = sum(1 for u in dist if u != v and colors[u] == colors[v])
        worst = max(worst, same)
    return worst


class _DisjointSet:
    def __init__(self):
        self.parent: Dict[int, int] = {}

    def find(self, x: int) -> int:
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def check_arbdefect(g, k: int, coloring, order, max_defect: int) -> Verdict:
    """Orientation witness for a ``max_defect``-arbdefective coloring of G^k.

    ``order`` maps each vertex to a sortable key (e.g. ``(finalize_round, id)``);
    every class-internal edge points at its earlier endpoint.  Besides the
    out-degree bound, the out-edges are labelled ``1..outdeg`` per vertex and
    every label class is checked to be a forest.
    """
    colors = _as_list(coloring, g.n)
    keys = _as_list(order, g.n)
    if len(set(map(repr, keys))) != g.n:
        return Verdict(False, None, "order is not total")
    labelled: Dict[int, List[Tuple[int, int]]] = {}
    for v in range(g.n):
        dist = _distances_from(g.adj, v, k)
        outs = sorted(u for u in dist if u != v and colors[u] == colors[v] and keys[u] < keys[v])
        if len(outs) > max_defect:
            return Verdict(False, v, f"vertex {v} has {len(outs)} out-edges in its class (limit {max_defect})")
        for label, u in enumerate(outs, start=1):
            labelled.setdefault(label, []).append((v, u))
    for label, edges in sorted(labelled.items()):
        ds = _DisjointSet()
        for a, b in edges:
            if not ds.union(a, b):
                return Verdict(False, (label, a, b), f"label {label} edges contain a cycle through {a}-{b}")
    return OK


def check_mis_k(g, k: int, members: Iterable[int]) -> Verdict:
    s = set(members)
    for v in s:
        if not 0 <= v < g.n:
            return Verdict(False, v, f"vertex {v} out of range")
    dominated = set()
    for v in sorted(s):
        dist = _distances_from(g.adj, v, k)
        for u in sorted(dist):
            if u != v and u in s:
                return Verdict(False, (min(u, v), max(u, v), dist[u]), f"members {v} and {u} are at distance {dist[u]} <= {k}")
        dominated.update(dist)
    for v in range(g.n):
        if v not in dominated:
            return Verdict(False, v, f"vertex {v} is farther than {k} from every member")
    return OK


def check_round_budget(trace, bound: float) -> Verdict:
    """``trace`` may be a RoundTrace or a plain round count."""
    rounds_elapsed = getattr(trace, "rounds_elapsed", trace)
    if rounds_elapsed <= bound:
        return OK
    return Verdict(False, (rounds_elapsed, bound), f"exceeded: measured {rounds_elapsed} > bound {bound}")


def greedy_mis_k(g, k: int) -> List[int]:
    """Reference MIS of G^k by smallest-ID-first greedy."""
    chosen: List[int] = []
    blocked = set()
    for v in range(g.n):
        if v in blocked:
            continue
        chosen.append(v)
        blocked.update(_distances_from(g.adj, v, k))
    return chosen


def count_value_khop(g, k: int, values: Sequence[Any], v: int, x: Any) -> int:
    dist = _distances_from(g.adj, v, k)
    return sum(1 for u in dist if u != v and values[u] == x)


def all_pairs_within(g, k: int) -> Dict[int, Dict[int, int]]:
    return {v: _distances_from(g.adj, v, k) for v in range(g.n)}
