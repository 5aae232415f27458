"""Graph representation, generators and centralized BFS / power-graph helpers.

Vertices are dense integers ``0..n-1``.  Algorithms use these helpers only as
local computations on data a vertex already holds; the oracles use them (or
their own brute force) as ground truth.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Set, Tuple

MODELS = ("gnp", "random_regularish", "path", "cycle", "star", "tree")

# path_count_bound refuses results that do not fit a signed 64-bit word
PATH_COUNT_LIMIT = 2**63 - 1


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    adj: Tuple[Tuple[int, ...], ...]
    max_degree: int = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 0 or len(self.adj) != self.n:
            raise ValueError("adjacency length must equal n")
        for v, row in enumerate(self.adj):
            if list(row) != sorted(set(row)):
                raise ValueError(f"neighbor list of {v} must be sorted and duplicate-free")
            for u in row:
                if u == v:
                    raise ValueError(f"self-loop at {v}")
                if not 0 <= u < self.n:
                    raise ValueError(f"neighbor {u} of {v} out of range")
                if v not in self.adj[u]:
                    raise ValueError(f"edge {v}-{u} is not symmetric")
        object.__setattr__(self, "max_degree", max((len(r) for r in self.adj), default=0))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        nbrs: List[Set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def vertices(self) -> range:
        return range(self.n)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @property
    def m(self) -> int:
        return sum(len(r) for r in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        row = self.adj[u]
        # rows are short; linear scan beats bisect overhead here
        return v in row


# -- generators ---------------------------------------------------------------

def gen_graph(model: str, n: int, deg: int, seed: int = 0) -> Graph:
    """Generate a graph deterministically from ``(model, n, deg, seed)``.

    ``deg`` caps the maximum degree for the random models; path, cycle and star
    ignore it beyond validation.
    """
    if model not in MODELS:
        raise ValueError(f"unknown graph model {model!r}; expected one of {', '.join(MODELS)}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if deg < 0 or deg >= n:
        raise ValueError(f"deg must satisfy 0 <= deg < n (got deg={deg}, n={n})")
    rng = random.Random(f"{model}:{n}:{deg}:{seed}")

    if model == "path":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if model == "cycle":
        if n < 3:
            return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if model == "star":
        return Graph.from_edges(n, [(0, i) for i in range(1, n)])
    if model == "tree":
        return _random_tree(n, deg, rng)
    if model == "gnp":
        return _gnp_capped(n, deg, rng)
    return _regularish(n, deg, rng)


def _random_tree(n: int, deg: int, rng: random.Random) -> Graph:
    if n > 2 and deg < 2:
        raise ValueError("a tree on more than 2 vertices needs deg >= 2")
    degree = [0] * n
    edges = []
    for v in range(1, n):
        candidates = [u for u in range(v) if degree[u] < deg]
        u = rng.choice(candidates)
        edges.append((u, v))
        degree[u] += 1
        degree[v] += 1
    return Graph.from_edges(n, edges)


def _gnp_capped(n: int, deg: int, rng: random.Random) -> Graph:
    # expected degree about deg/2; edges that would push a vertex past deg are rejected
    p = deg / (2 * (n - 1)) if n > 1 else 0.0
    degree = [0] * n
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p and degree[u] < deg and degree[v] < deg:
                edges.append((u, v))
                degree[u] += 1
                degree[v] += 1
    return Graph.from_edges(n, edges)


def _regularish(n: int, deg: int, rng: random.Random) -> Graph:
    degree = [0] * n
    present: Set[Tuple[int, int]] = set()
    attempts = 0
    limit = 50 * n * max(deg, 1)
    while attempts < limit:
        attempts += 1
        open_vertices = [v for v in range(n) if degree[v] < deg]
        if len(open_vertices) < 2:
            break
        u, v = rng.sample(open_vertices, 2)
        e = (min(u, v), max(u, v))
        if e in present:
            continue
        present.add(e)
        degree[u] += 1
        degree[v] += 1
    return Graph.from_edges(n, sorted(present))


# -- text format ----------------------------------------------------------------

def load_graph(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty graph text")
    try:
        n = int(lines[0])
    except ValueError:
        raise GraphFormatError(f"line 1: expected vertex count, got {lines[0]!r}") from None
    if n < 0:
        raise GraphFormatError("line 1: negative vertex count")
    seen: Set[Tuple[int, int]] = set()
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex in {ln!r}") from None
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {lineno}: vertex out of range 0..{n - 1}")
        e = (min(u, v), max(u, v))
        if e in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {e[0]} {e[1]}")
        seen.add(e)
    return Graph.from_edges(n, seen)


def save_graph(g: Graph) -> str:
    out = [str(g.n)]
    out.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(out) + "\n"


# -- centralized distance utilities ---------------------------------------------

def bfs_distances(g: Graph, source: int, radius: int | None = None) -> Dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        if radius is not None and dist[x] >= radius:
            continue
        for y in g.adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def khop_neighborhood(g: Graph, v: int, k: int) -> Set[int]:
    if k < 0:
        raise ValueError("k must be >= 0")
    ball = bfs_distances(g, v, k)
    ball.pop(v)
    return set(ball)


def power_graph(g: Graph, k: int) -> Graph:
    if k < 1:
        raise ValueError("k must be >= 1")
    rows = []
    for v in g.vertices:
        rows.append(tuple(sorted(khop_neighborhood(g, v, k))))
    return Graph(g.n, tuple(rows))


@dataclass(frozen=True)
class BfsTree:
    root: int
    radius: int
    parent: Dict[int, int]
    depth: Dict[int, int]

    def children(self, v: int) -> List[int]:
        return sorted(x for x, p in self.parent.items() if p == v and x != v)


def bfs_tree(g: Graph, root: int, radius: int) -> BfsTree:
    """Radius-bounded BFS tree; each vertex's parent is its smallest-ID neighbor one layer up."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    depth = bfs_distances(g, root, radius)
    parent = {root: root}
    for x, d in depth.items():
        if d > 0:
            parent[x] = min(y for y in g.adj[x] if depth.get(y) == d - 1)
    return BfsTree(root, radius, parent, depth)


@dataclass(frozen=True)
class ProxyAssignment:
    owner: int
    proxy_of: Dict[int, int]


def select_proxies(g: Graph, v: int) -> ProxyAssignment:
    dist = bfs_distances(g, v, 2)
    nbrs = set(g.adj[v])
    proxy_of = {}
    for w, d in dist.items():
        if d == 2:
            proxy_of[w] = min(nbrs.intersection(g.adj[w]))
    return ProxyAssignment(v, dict(sorted(proxy_of.items())))


# -- arithmetic helpers ---------------------------------------------------------

def path_count_bound(delta: int, k: int, limit: int = PATH_COUNT_LIMIT) -> int:
    """Sum of ``delta**i`` for ``i = 1..k``; raises OverflowError past ``limit``."""
    if delta < 1 or k < 1:
        raise ValueError("delta and k must be >= 1")
    total, term = 0, 1
    for _ in range(k):
        term *= delta
        total += term
        if total > limit:
            raise OverflowError(f"path count bound for delta={delta}, k={k} exceeds {limit}")
    return total


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x % 2 == 0:
        return x == 2
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def smallest_prime_above(x: int) -> int:
    q = x + 1
    while not is_prime(q):
        q += 1
    return q


def bits_for(max_value: int) -> int:
    """Bits needed to encode any integer in ``[0, max_value]`` (at least 1)."""
    return max(1, int(max_value).bit_length())


def id_bits(n: int) -> int:
    return bits_for(max(n - 1, 1))


def log_star(n: float) -> int:
    import math

    count = 0
    while n > 1:
        n = math.log2(n)
        count += 1
    return count


def sphere(dist: Dict[int, int], d: int) -> List[int]:
    return sorted(x for x, dx in dist.items() if dx == d)


def ball_sizes(g: Graph, k: int) -> Sequence[int]:
    return [len(khop_neighborhood(g, v, k)) for v in g.vertices]
