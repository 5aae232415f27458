import pytest

from powercolor.graph import Graph, gen_graph


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(n):
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def complete(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def small_suite():
    """A few structured graphs plus seeded random ones; cheap enough for per-module tests."""
    graphs = [path(1), path(2), path(5), cycle(6), star(6), complete(4)]
    graphs += [gen_graph("gnp", 40, 4, s) for s in range(3)]
    graphs += [gen_graph("random_regularish", 30, 3, s) for s in range(2)]
    graphs.append(gen_graph("tree", 30, 3, 0))
    return graphs


@pytest.fixture
def p5():
    return path(5)
