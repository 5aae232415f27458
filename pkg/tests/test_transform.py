import random

import pytest

from conftest import cycle, path, small_suite, star
from powercolor import Network, bandwidth_mode, gen_graph
from powercolor.graph import bfs_tree, path_count_bound
from powercolor.oracle import all_pairs_within, count_value_khop
from powercolor.powerk.aggregation import count_spec, max_spec, or_spec
from powercolor.powerk.transform import (
    PowerContext,
    bfs_preprocess_k,
    exact_count_convergecast,
    flood,
    half,
    khalf_broadcast,
    naive_transform_round,
    transform_round,
)


def net_for(g):
    return Network(g, bandwidth_mode("congest", max(g.n, 2)))


def test_half():
    assert [half(k) for k in (1, 2, 3, 4)] == [1, 1, 2, 2]


def test_k1_is_one_neighbor_exchange():
    g = path(4)
    net = Network(g, bandwidth_mode("B:64"))
    view = khalf_broadcast(net, 1, list("abcd"), 8)
    assert net.rounds == 1
    assert view.payload[1] == {0: "a", 1: "b", 2: "c"}


def test_p5_k4_every_vertex_learns_everything():
    g = path(5)
    view = khalf_broadcast(net_for(g), 4, list(range(5)), 3)
    assert view.payload[0] == {0: 0, 1: 1, 2: 2}
    # radius 2 each way: middle vertex covers the whole path
    assert sorted(view.payload[2]) == [0, 1, 2, 3, 4]
    ctx = PowerContext(g, 4)
    for v in g.vertices:
        assert sorted(ctx.nk[v]) == [u for u in range(5) if u != v]


def test_p5_k4_max_over_others():
    g = path(5)
    ctx = PowerContext(g, 4)
    res = transform_round(ctx, net_for(g), max_spec(5, lambda s: s), list(range(5)), 3)
    assert res.values == {0: 4, 1: 4, 2: 4, 3: 4, 4: 3}


def test_c4_duplicates_collapse_in_idempotent_mode():
    g = cycle(4)
    ctx = PowerContext(g, 2)
    # vertex 2 reaches 0 through both 1 and 3
    assert ctx.mult[(0, 2)] == 2
    states = [0, 1, 1, 1]
    res = transform_round(ctx, net_for(g), or_spec(lambda a, b: a == b), states, 1)
    assert res.values[0] == 0 and res.values[2] == 1


def test_flood_records_both_arrivals_but_keeps_one():
    g = cycle(4)
    view = flood(g, 2, list("abcd"), lambda o: 1)
    # 2 reaches 0 through 1 and through 3 in the same phase
    assert view.nbr_dist[0][1][2] == 1 and view.nbr_dist[0][3][2] == 1
    assert view.dist[0] == {0: 0, 1: 1, 3: 1, 2: 2}
    assert view.payload[0][2] == "c"
    # nothing is forwarded past the radius
    assert len(view.sent) == 2


@pytest.mark.parametrize("k", [2, 3, 4])
def test_distances_match_oracle(k):
    for g in small_suite():
        ctx = PowerContext(g, k)
        ap = all_pairs_within(g, k)
        for v in g.vertices:
            assert ctx.nk[v] == {u: d for u, d in sorted(ap[v].items()) if u != v}


@pytest.mark.parametrize("k", [2, 3, 4])
def test_overcount_multiplicities_in_range(k):
    for g in small_suite():
        if not g.max_degree:
            continue
        ctx = PowerContext(g, k)
        d_p = path_count_bound(g.max_degree, k)
        for v in g.vertices:
            total = 0
            for u in ctx.nk[v]:
                assert 1 <= ctx.mult[(v, u)] <= d_p
                total += ctx.mult[(v, u)]
            assert total <= d_p


def test_parent_toward_is_bfs_parent():
    g = gen_graph("gnp", 48, 4, 2)
    ctx = PowerContext(g, 4)
    for v in g.vertices:
        tree = bfs_tree(g, v, 2)
        for x, p in ctx.parent_toward[v].items():
            assert tree.parent[x] == p


def test_bfs_preprocess_trees_match_oracle():
    g = gen_graph("gnp", 48, 4, 0)
    ctx = PowerContext(g, 4)
    bfs = bfs_preprocess_k(net_for(g), 4)
    assert bfs.rounds > 0
    for w in g.vertices:
        assert set(bfs.held[w]) == set(ctx.view.dist[w])
        for v, tree in bfs.held[w].items():
            want = bfs_tree(g, v, 2)
            assert tree.parent == want.parent and tree.depth == want.depth


def test_p5_k4_v0_holds_three_trees():
    g = path(5)
    bfs = bfs_preprocess_k(net_for(g), 4)
    assert sorted(bfs.held[0]) == [0, 1, 2]
    assert all(max(t.depth.values()) <= 2 for t in bfs.held[0].values())


@pytest.mark.parametrize("k", [2, 3, 4])
def test_every_pair_has_exactly_one_applier(k):
    for g in small_suite():
        ctx = PowerContext(g, k)
        ctx.preprocess_exact(net_for(g))
        apps = ctx.applications("exact_count")
        pairs = {(v, u) for v in g.vertices for u in ctx.nk[v]}
        assert set(apps) == pairs
        assert all(c == 1 for c in apps.values())


def test_exact_needs_preprocessing():
    g = star(5)
    ctx = PowerContext(g, 2)
    spec = count_spec(lambda a, b: a == b, 10)
    with pytest.raises(ValueError):
        exact_count_convergecast(ctx, net_for(g), spec, [0] * 5)
    with pytest.raises(ValueError):
        transform_round(ctx, net_for(g), spec, [0] * 5, 1)


def test_star_exact_count():
    g = star(5)
    ctx = PowerContext(g, 2)
    net = net_for(g)
    ctx.preprocess_exact(net)
    values = [9, 7, 7, 0, 0]
    spec = count_spec(lambda sv, su: su == 7, 10)
    res = exact_count_convergecast(ctx, net, spec, values)
    assert res[3] == 2
    nobody = exact_count_convergecast(ctx, net, count_spec(lambda sv, su: su == 5, 10), values)
    assert set(nobody.values()) == {0}


@pytest.mark.parametrize("k", [2, 3, 4])
def test_exact_counts_match_oracle(k):
    rng = random.Random(k)
    g = gen_graph("gnp", 48, 4, 1)
    ctx = PowerContext(g, k)
    net = net_for(g)
    ctx.preprocess_exact(net)
    values = [rng.randrange(4) for _ in g.vertices]
    for x in range(4):
        res = exact_count_convergecast(ctx, net, count_spec(lambda sv, su, x=x: su == x, g.n), values)
        assert all(res[v] == count_value_khop(g, k, values, v, x) for v in g.vertices)


def test_overcount_lies_between_true_count_and_dp_times_it():
    g = gen_graph("gnp", 40, 4, 3)
    k = 4
    ctx = PowerContext(g, k)
    d_p = path_count_bound(g.max_degree, k)
    values = [v % 3 for v in g.vertices]
    spec = count_spec(lambda sv, su: sv == su, 10**6, mode="overcount")
    res = transform_round(ctx, net_for(g), spec, values, 2).values
    for v in g.vertices:
        true = count_value_khop(g, k, values, v, values[v])
        assert true <= res[v] <= d_p * true


def test_local_step_applied():
    g = path(3)
    ctx = PowerContext(g, 2)
    res = transform_round(ctx, net_for(g), max_spec(3, lambda s: s), [0, 1, 2], 2,
                          local_step=lambda v, s, val: (s, val))
    assert res.states == [(0, 2), (1, 2), (2, 1)]


def test_naive_round_collects_k_ball():
    g = path(6)
    ctx = PowerContext(g, 3)
    res = naive_transform_round(ctx, net_for(g), list(range(6)), 3,
                                local_step=lambda v, s, known: sorted(known))
    assert res.states[0] == [1, 2, 3]
    assert res.values[5] == {2: 2, 3: 3, 4: 4}


def test_transform_beats_naive_at_degree_4():
    g = gen_graph("random_regularish", 200, 4, 0)
    ctx = PowerContext(g, 4)
    states = [v % 5 for v in g.vertices]
    t = transform_round(ctx, net_for(g), or_spec(lambda a, b: a == b), states, 3).rounds
    n = naive_transform_round(ctx, net_for(g), states, 3).rounds
    assert t < n
