"""Half-radius broadcast and convergecast: simulating one G^k round inside G.

With ``h = ceil(k/2)``, every pair ``(v, u)`` at distance at most ``k`` has a
middle vertex ``w`` within ``h`` of both.  A round of G^k is then

1. a broadcast: every vertex floods its state ``h`` hops;
2. a local step: each ``w`` folds, for every target ``v`` in its ball, the
   tokens of the pairs ``(v, u)`` it is responsible for;
3. a convergecast: partial results travel ``h`` hops back to their target
   along the target's BFS tree, merging on the way.

The broadcast and convergecast communication patterns depend only on the
graph, not on the states, so :class:`PowerContext` learns them once by a
real flooding run and afterwards charges each round's per-edge bit loads.
Values are folded from the same per-vertex knowledge the flooding produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from ..engine import Message, Network
from ..graph import BfsTree, Graph, bits_for, id_bits
from .aggregation import AggregationSpec


def half(k: int) -> int:
    return (k + 1) // 2


# -- broadcast ---------------------------------------------------------------------

@dataclass
class BroadcastView:
    """What flooding ``radius`` hops left at every vertex."""

    radius: int
    dist: List[Dict[int, int]]  # dist[v][origin], v itself included at 0
    payload: List[Dict[int, Any]]
    # nbr_dist[x][y][o]: distance from neighbor y to origin o, as forwarded by y
    nbr_dist: List[Dict[int, Dict[int, int]]]
    # sent[p][(x, y)]: origins x forwarded to y in phase p (index 0 is phase 1)
    sent: List[Dict[Tuple[int, int], Tuple[int, ...]]]
    rounds: int = 0


def flood(
    g: Graph,
    radius: int,
    states: Sequence[Any],
    entry_bits: Callable[[int], int],
    net: Optional[Network] = None,
) -> BroadcastView:
    """Frontier flooding with first-arrival dedup; same-phase ties keep the smallest sender."""
    dist = [{v: 0} for v in g.vertices]
    payload = [{v: states[v]} for v in g.vertices]
    nbr_dist: List[Dict[int, Dict[int, int]]] = [{y: {} for y in g.adj[x]} for x in g.vertices]
    frontier = [[v] for v in g.vertices]
    sent: List[Dict[Tuple[int, int], Tuple[int, ...]]] = []
    start = net.rounds if net is not None else 0
    for phase in range(1, radius + 1):
        out: Dict[int, Dict[int, Message]] = {}
        this: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        for x in g.vertices:
            if not frontier[x]:
                continue
            entries = tuple((o, dist[x][o], payload[x][o]) for o in frontier[x])
            bits = sum(entry_bits(o) for o in frontier[x])
            for y in g.adj[x]:
                out.setdefault(x, {})[y] = Message(entries, bits)
                this[(x, y)] = tuple(frontier[x])
        if net is not None:
            inbox = net.exchange(out)
        else:
            inbox = [{} for _ in g.vertices]
            for x, row in out.items():
                for y, msg in row.items():
                    inbox[y][x] = msg
        sent.append(this)
        frontier = [[] for _ in g.vertices]
        for y in g.vertices:
            for x in sorted(inbox[y]):
                for o, d, p in inbox[y][x].payload:
                    nbr_dist[y][x][o] = d
                    if o not in dist[y] and d + 1 <= radius:
                        dist[y][o] = d + 1
                        payload[y][o] = p
                        frontier[y].append(o)
        for y in g.vertices:
            frontier[y].sort()
    rounds = (net.rounds - start) if net is not None else 0
    return BroadcastView(radius, dist, payload, nbr_dist, sent, rounds)


def khalf_broadcast(net: Network, k: int, states: Sequence[Any], state_bits: int) -> BroadcastView:
    g = net.graph
    h = half(k)
    per_entry = id_bits(g.n) + bits_for(h) + state_bits
    with net.stage("broadcast"):
        return flood(g, h, states, lambda o: per_entry, net)


# -- BFS trees for exact counting --------------------------------------------------------

@dataclass
class BfsKnowledge:
    """``held[w][v]`` is the radius-h BFS tree of ``v`` as stored at ``w``."""

    held: List[Dict[int, BfsTree]]
    rounds: int


def _build_trees(net: Network, h: int) -> List[BfsTree]:
    """Each vertex grows its own tree by merging neighbors' layer DAGs, one hop per phase.

    A layer DAG holds distances and every edge between consecutive BFS
    layers, not just tree edges; that is what lets the smallest-ID parent be
    chosen exactly.
    """
    g = net.graph
    idb, db = id_bits(g.n), bits_for(h)
    dist: List[Dict[int, int]] = [{v: 0} for v in g.vertices]
    dag: List[Set[Tuple[int, int]]] = [set() for _ in g.vertices]
    for phase in range(1, h + 1):
        out = {
            v: {
                u: Message((dist[v], frozenset(dag[v])), len(dist[v]) * (idb + db) + len(dag[v]) * 2 * idb)
                for u in g.adj[v]
            }
            for v in g.vertices
        }
        inbox = net.exchange(out)
        new_dist: List[Dict[int, int]] = []
        new_dag: List[Set[Tuple[int, int]]] = []
        for v in g.vertices:
            nd = {v: 0}
            for u in g.adj[v]:
                for x, d in inbox[v][u].payload[0].items():
                    if x != v and d + 1 <= phase and d + 1 < nd.get(x, phase + 1):
                        nd[x] = d + 1
            edges = {(u, v) for u in g.adj[v]}
            for u in g.adj[v]:
                for x, y in inbox[v][u].payload[1]:
                    if nd.get(x) is not None and nd.get(y) == nd[x] - 1:
                        edges.add((x, y))
            new_dist.append(nd)
            new_dag.append(edges)
        dist, dag = new_dist, new_dag
    trees = []
    for v in g.vertices:
        parent = {v: v}
        for x, y in dag[v]:
            if x != v and (x not in parent or y < parent[x]):
                parent[x] = y
        trees.append(BfsTree(v, h, parent, dict(dist[v])))
    return trees


def bfs_preprocess_k(net: Network, k: int) -> BfsKnowledge:
    """Build every radius-h BFS tree, then ship each to the vertices within h of its root."""
    g = net.graph
    h = half(k)
    idb, db = id_bits(g.n), bits_for(h)
    start = net.rounds
    with net.stage("bfs-preprocess"):
        trees = _build_trees(net, h)
        sizes = [len(t.depth) for t in trees]
        view = flood(g, h, trees, lambda o: idb + db + sizes[o] * 2 * idb, net)
    held = [{o: view.payload[w][o] for o in view.dist[w]} for w in g.vertices]
    return BfsKnowledge(held, net.rounds - start)


# -- the context that every G^k round reuses --------------------------------------------

class PowerContext:
    """Per-graph, per-k knowledge: balls, distances up to k, routing and multiplicities."""

    def __init__(self, g: Graph, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.g, self.k, self.h = g, k, half(k)
        self.idb = id_bits(g.n)
        self.distb = bits_for(self.h)
        self.view = flood(g, self.h, [None] * g.n, lambda o: 0)
        self._naive: Optional[BroadcastView] = None
        self.bfs: Optional[BfsKnowledge] = None
        self._exact_count: Optional[Dict[Tuple[int, int], int]] = None
        ball = self.view.dist
        # every pair within k meets at some middle; the minimum over middles is the true distance.
        # In overcount mode w applies (v, u) only when it sits at the midpoint of the
        # length a + b, v's side rounded up, so each application is one split path.
        self.nk: List[Dict[int, int]] = [dict() for _ in g.vertices]
        self.mult: Dict[Tuple[int, int], int] = {}
        for w in g.vertices:
            bw = ball[w]
            for v, a in bw.items():
                row = self.nk[v]
                for u, b in bw.items():
                    if u == v or a + b > k:
                        continue
                    if a + b < row.get(u, k + 1):
                        row[u] = a + b
                    if 0 <= a - b <= 1:
                        self.mult[(v, u)] = self.mult.get((v, u), 0) + 1
        self.nk = [dict(sorted(r.items())) for r in self.nk]
        # parent_toward[v][x]: smallest neighbor of x one step closer to v
        self.parent_toward: List[Dict[int, int]] = [dict() for _ in g.vertices]
        for x in g.vertices:
            for v, d in ball[x].items():
                if d == 0:
                    continue
                self.parent_toward[v][x] = min(
                    y for y in g.adj[x] if self.view.nbr_dist[x][y].get(v) == d - 1
                )

    # -- charging ------------------------------------------------------------------

    def charge_broadcast(self, net: Network, state_bits: int | Sequence[int]) -> None:
        per = state_bits if not isinstance(state_bits, int) else None
        with net.stage("broadcast"):
            for phase in self.view.sent:
                loads = {}
                for edge, origins in phase.items():
                    if per is None:
                        loads[edge] = len(origins) * (self.idb + self.distb + state_bits)
                    else:
                        loads[edge] = sum(self.idb + self.distb + per[o] for o in origins)
                net.charge_loads(loads)

    def charge_convergecast(self, net: Network, targets: Iterable[int], value_bits: Callable[[int], int] | int) -> None:
        vb = (lambda v: value_bits) if isinstance(value_bits, int) else value_bits
        phases: List[Dict[Tuple[int, int], int]] = [dict() for _ in range(self.h)]
        for v in targets:
            bits = self.idb + vb(v)
            for x, d in self.view.dist[v].items():
                if d == 0:
                    continue
                edge = (x, self.parent_toward[v][x])
                loads = phases[self.h - d]
                loads[edge] = loads.get(edge, 0) + bits
        with net.stage("convergecast"):
            for loads in phases:
                net.charge_loads(loads)

    def naive_view(self) -> BroadcastView:
        if self._naive is None:
            self._naive = flood(self.g, self.k, [None] * self.g.n, lambda o: 0)
        return self._naive

    # -- exact mode ------------------------------------------------------------------

    def preprocess_exact(self, net: Network) -> BfsKnowledge:
        self.bfs = bfs_preprocess_k(net, self.k)
        self._exact_count = exact_appliers(self, self.bfs)
        return self.bfs

    @property
    def exact_ready(self) -> bool:
        return self.bfs is not None

    def applications(self, mode: str) -> Dict[Tuple[int, int], int]:
        """How many vertices apply each pair's token in phase 0."""
        if mode == "exact_count":
            if self._exact_count is None:
                raise ValueError("exact counting needs bfs_preprocess_k first")
            return self._exact_count
        return self.mult


def w_prime(trees: Mapping[int, BfsTree], v: int, u: int, h: int) -> List[int]:
    """Vertices exactly ``h`` from ``v`` and within ``h`` of ``u``, from the held trees."""
    tu = trees[u].depth
    return sorted(x for x, d in trees[v].depth.items() if d == h and x in tu)


def tree_distance(trees: Mapping[int, BfsTree], v: int, u: int) -> Optional[int]:
    dv, du = trees[v].depth, trees[u].depth
    common = [dv[x] + du[x] for x in dv if x in du]
    return min(common) if common else None


def exact_appliers(ctx: PowerContext, bfs: BfsKnowledge) -> Dict[Tuple[int, int], int]:
    """Replay every vertex's local decision; returns how often each pair is applied."""
    g, h, k = ctx.g, ctx.h, ctx.k
    counts: Dict[Tuple[int, int], int] = {}
    for w in g.vertices:
        trees = bfs.held[w]
        mine = trees[w].depth
        for v, dv in mine.items():
            if dv != h and v != w:
                continue
            for u in mine:
                if u == v:
                    continue
                d = tree_distance(trees, v, u)
                if d is None or d > k:
                    continue
                wp = w_prime(trees, v, u, h)
                if (wp and wp[0] == w) or (not wp and v == w):
                    counts[(v, u)] = counts.get((v, u), 0) + 1
    return counts


# -- rounds of G^k ---------------------------------------------------------------------

def fold_value(ctx: PowerContext, spec: AggregationSpec, states: Sequence[Any], v: int) -> Any:
    x = spec.init
    sv = states[v]
    if spec.mode == "idempotent":
        for u in ctx.nk[v]:
            x = spec.apply(spec.token_of(sv, states[u]), x)
    elif spec.mode == "overcount":
        for u in ctx.nk[v]:
            x = spec.apply_times(spec.token_of(sv, states[u]), ctx.mult[(v, u)], x)
    else:
        if not ctx.exact_ready:
            raise ValueError("exact counting needs bfs_preprocess_k first")
        for u in ctx.nk[v]:
            x = spec.apply(spec.token_of(sv, states[u]), x)
    return x


def khalf_convergecast(
    ctx: PowerContext,
    net: Network,
    spec: AggregationSpec,
    states: Sequence[Any],
    targets: Optional[Iterable[int]] = None,
) -> Dict[int, Any]:
    targets = list(ctx.g.vertices if targets is None else targets)
    values = {v: fold_value(ctx, spec, states, v) for v in targets}
    ctx.charge_convergecast(net, targets, spec.value_bits)
    return values


def exact_count_convergecast(
    ctx: PowerContext,
    net: Network,
    spec: AggregationSpec,
    states: Sequence[Any],
    targets: Optional[Iterable[int]] = None,
) -> Dict[int, Any]:
    if spec.mode != "exact_count":
        raise ValueError("spec must be in exact_count mode")
    if not ctx.exact_ready:
        raise ValueError("exact counting needs bfs_preprocess_k first")
    return khalf_convergecast(ctx, net, spec, states, targets)


@dataclass
class RoundResult:
    values: Dict[int, Any]
    states: List[Any]
    rounds: int


def transform_round(
    ctx: PowerContext,
    net: Network,
    spec: AggregationSpec,
    states: Sequence[Any],
    state_bits: int | Sequence[int],
    local_step: Optional[Callable[[int, Any, Any], Any]] = None,
    targets: Optional[Iterable[int]] = None,
) -> RoundResult:
    """One simulated round of G^k: broadcast, local fold, convergecast, local step."""
    if spec.mode == "exact_count" and not ctx.exact_ready:
        raise ValueError("exact counting needs bfs_preprocess_k first")
    start = net.rounds
    ctx.charge_broadcast(net, state_bits)
    values = khalf_convergecast(ctx, net, spec, states, targets)
    new_states = list(states)
    if local_step is not None:
        for v, val in values.items():
            new_states[v] = local_step(v, states[v], val)
    return RoundResult(values, new_states, net.rounds - start)


def naive_transform_round(
    ctx: PowerContext,
    net: Network,
    states: Sequence[Any],
    state_bits: int,
    local_step: Optional[Callable[[int, Any, Dict[int, Any]], Any]] = None,
) -> RoundResult:
    """Collect every state of the k-ball by flooding k hops, then step with full information."""
    g = ctx.g
    view = ctx.naive_view()
    per_entry = ctx.idb + bits_for(ctx.k) + state_bits
    start = net.rounds
    with net.stage("naive-flood"):
        for phase in view.sent:
            net.charge_loads({edge: len(origins) * per_entry for edge, origins in phase.items()})
    known = {v: {u: states[u] for u in view.dist[v] if u != v} for v in g.vertices}
    new_states = list(states)
    if local_step is not None:
        for v in g.vertices:
            new_states[v] = local_step(v, states[v], known[v])
    return RoundResult(known, new_states, net.rounds - start)
