import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powercolor.graph import (
    Graph,
    GraphFormatError,
    bfs_tree,
    gen_graph,
    khop_neighborhood,
    load_graph,
    path_count_bound,
    power_graph,
    save_graph,
    select_proxies,
    smallest_prime_above,
)
from conftest import complete, cycle, path, star


def floyd_warshall(g):
    inf = float("inf")
    d = [[0 if i == j else inf for j in range(g.n)] for i in range(g.n)]
    for u, v in g.edges():
        d[u][v] = d[v][u] = 1
    for m in range(g.n):
        for i in range(g.n):
            for j in range(g.n):
                if d[i][m] + d[m][j] < d[i][j]:
                    d[i][j] = d[i][m] + d[m][j]
    return d


def test_path_and_star_generators():
    assert gen_graph("path", 5, 2, 3).edges() == [(0, 1), (1, 2), (2, 3), (3, 4)]
    s = gen_graph("star", 5, 4, 9)
    assert s.edges() == [(0, 1), (0, 2), (0, 3), (0, 4)]
    assert s.max_degree == 4


def test_gnp_deterministic_and_capped():
    a = gen_graph("gnp", 64, 6, 7)
    b = gen_graph("gnp", 64, 6, 7)
    assert a == b
    assert a.max_degree <= 6


@pytest.mark.parametrize("model", ["gnp", "random_regularish", "tree"])
@pytest.mark.parametrize("deg", [2, 3, 5, 8])
def test_random_models_respect_cap(model, deg):
    for seed in range(3):
        assert gen_graph(model, 60, deg, seed).max_degree <= deg


def test_gen_rejects_bad_args():
    with pytest.raises(ValueError):
        gen_graph("hypercube", 5, 2)
    with pytest.raises(ValueError):
        gen_graph("gnp", 10, 10)
    with pytest.raises(ValueError):
        gen_graph("gnp", 0, 0)


def test_load_save_roundtrip():
    text = "5\n0 1\n1 2\n2 3\n3 4\n"
    g = load_graph(text)
    assert g == path(5)
    assert save_graph(g) == text


@pytest.mark.parametrize(
    "text",
    ["2\n0 0\n", "3\n0 1\n1 0\n", "3\n0 5\n", "3\n0 x\n", "3\n0 1 2\n", "", "abc\n"],
)
def test_load_rejects_malformed(text):
    with pytest.raises(GraphFormatError):
        load_graph(text)


@given(st.integers(1, 30), st.integers(0, 6), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_roundtrip_random(n, deg, seed):
    deg = min(deg, n - 1)
    g = gen_graph("gnp", n, deg, seed)
    assert load_graph(save_graph(g)) == g


def test_power_graph_examples():
    assert power_graph(path(5), 2).edges() == sorted([(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (1, 3), (2, 4)])
    assert power_graph(path(5), 1) == path(5)
    assert power_graph(cycle(6), 3) == complete(6)


def test_khop_examples():
    assert khop_neighborhood(path(5), 2, 2) == {0, 1, 3, 4}
    assert khop_neighborhood(path(5), 2, 0) == set()
    assert khop_neighborhood(star(5), 1, 2) == {0, 2, 3, 4}


@pytest.mark.parametrize("seed", range(4))
def test_power_graph_matches_floyd_warshall(seed):
    g = gen_graph("gnp", 40, 4, seed)
    d = floyd_warshall(g)
    for k in (1, 2, 3, 4):
        pk = power_graph(g, k)
        for v in g.vertices:
            expect = {u for u in g.vertices if 1 <= d[v][u] <= k}
            assert set(pk.adj[v]) == expect == khop_neighborhood(g, v, k)
            assert len(expect) <= path_count_bound(max(g.max_degree, 1), k)


def test_bfs_tree_examples():
    t = bfs_tree(path(5), 0, 2)
    assert t.parent == {0: 0, 1: 0, 2: 1}
    assert t.depth == {0: 0, 1: 1, 2: 2}
    assert bfs_tree(cycle(4), 0, 1).children(0) == [1, 3]
    t = bfs_tree(complete(4), 2, 2)
    assert all(t.parent[v] == 2 for v in range(4))
    assert max(t.depth.values()) == 1


@pytest.mark.parametrize("seed", range(3))
def test_bfs_tree_invariants(seed):
    g = gen_graph("random_regularish", 40, 4, seed)
    d = floyd_warshall(g)
    for r in g.vertices:
        t = bfs_tree(g, r, 3)
        for v, dv in t.depth.items():
            assert dv == d[r][v] <= 3
            if v != r:
                p = t.parent[v]
                assert g.has_edge(v, p) and t.depth[p] == dv - 1
                assert p == min(u for u in g.adj[v] if d[r][u] == dv - 1)


def test_select_proxies_examples():
    assert select_proxies(cycle(4), 0).proxy_of == {2: 1}
    assert select_proxies(path(5), 0).proxy_of == {2: 1}
    assert select_proxies(star(5), 1).proxy_of == {2: 0, 3: 0, 4: 0}


def test_select_proxies_covers_distance_two_only():
    g = gen_graph("gnp", 50, 5, 1)
    d = floyd_warshall(g)
    for v in g.vertices:
        pa = select_proxies(g, v)
        assert set(pa.proxy_of) == {w for w in g.vertices if d[v][w] == 2}
        for w, p in pa.proxy_of.items():
            assert g.has_edge(v, p) and g.has_edge(p, w)


def test_path_count_bound():
    assert path_count_bound(3, 2) == 12
    assert path_count_bound(1, 5) == 5
    assert path_count_bound(4, 3) == 84
    with pytest.raises(OverflowError):
        path_count_bound(10**6, 4)


def test_smallest_prime_above():
    assert smallest_prime_above(32) == 37
    assert smallest_prime_above(2) == 3
    assert smallest_prime_above(18) == 19
    for x in range(1, 300):
        q = smallest_prime_above(x)
        assert q > x and all(q % f for f in range(2, q))
        assert not any(all(y % f for f in range(2, y)) for y in range(x + 1, q))


def test_graph_rejects_asymmetric():
    with pytest.raises(ValueError):
        Graph(2, ((1,), ()))
