import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from dendrodyn.dendrite import Dendrite


@pytest.fixture(scope="session")
def star3():
    return Dendrite(["c", "l1", "l2", "l3"],
                    [("e1", "c", "l1"), ("e2", "c", "l2"), ("e3", "c", "l3")],
                    [1, 1, 1])


@pytest.fixture(scope="session")
def interval():
    from dendrodyn.zoo import unit_interval_dendrite
    return unit_interval_dendrite()


@pytest.fixture(scope="session")
def thompson():
    from dendrodyn.zoo import thompson_system
    return thompson_system()


@pytest.fixture(scope="session")
def odo3():
    from dendrodyn.zoo import odometer_system
    return odometer_system(3)


@pytest.fixture(scope="session")
def odo4():
    from dendrodyn.zoo import odometer_system
    return odometer_system(4)


# -- hypothesis strategies ---------------------------------------------------


@st.composite
def random_trees(draw, max_edges=7):
    """A random connected weighted tree with chained edge enumeration."""
    n = draw(st.integers(min_value=1, max_value=max_edges))
    edges = []
    weights = []
    for i in range(1, n + 1):
        parent = draw(st.integers(min_value=0, max_value=i - 1))
        edges.append((f"e{i}", f"v{parent}", f"v{i}"))
        num = draw(st.integers(min_value=1, max_value=8))
        den = draw(st.sampled_from([1, 2, 4, 8]))
        weights.append(Fraction(num, den))
    vertices = [f"v{k}" for k in range(n + 1)]
    return Dendrite(vertices, edges, weights)


@st.composite
def tree_points(draw, dendrite):
    """A random exact point of the given dendrite."""
    use_vertex = draw(st.booleans())
    if use_vertex or not dendrite.edges:
        vid = draw(st.sampled_from(sorted(dendrite.vertices, key=str)))
        return dendrite.vertex_point(vid)
    e = draw(st.sampled_from([e.eid for e in dendrite.edges]))
    t = Fraction(draw(st.integers(min_value=0, max_value=16)), 16)
    return dendrite.point(e, t)


@st.composite
def trees_with_points(draw, count=3, max_edges=7):
    dendrite = draw(random_trees(max_edges=max_edges))
    pts = [draw(tree_points(dendrite)) for _ in range(count)]
    return dendrite, pts


@st.composite
def pl_maps(draw, max_breaks=4):
    """A random increasing PL bijection of [0, 1] with dyadic breakpoints."""
    k = draw(st.integers(min_value=0, max_value=max_breaks))
    denom = 32
    xs_mid = sorted(draw(st.sets(st.integers(min_value=1, max_value=denom - 1),
                                 min_size=k, max_size=k)))
    ys_mid = sorted(draw(st.sets(st.integers(min_value=1, max_value=denom - 1),
                                 min_size=k, max_size=k)))
    xs = [Fraction(0)] + [Fraction(x, denom) for x in xs_mid] + [Fraction(1)]
    ys = [Fraction(0)] + [Fraction(y, denom) for y in ys_mid] + [Fraction(1)]
    from dendrodyn.homeo import PLMap
    return PLMap(xs, ys)


def nx_metric_oracle(dendrite, a, b):
    """Independent distance oracle: Dijkstra on a graph with split edges."""
    import networkx as nx

    if a == b:
        return Fraction(0)
    g = nx.Graph()
    for e in dendrite.edges:
        g.add_edge(("v", e.u), ("v", e.v), weight=e.weight)

    def attach(p, tag):
        t = getattr(p, "t", None)
        if t is None:
            return ("v", p.vertex)
        node = (tag,)
        e = dendrite.edge(p.edge)
        g.add_edge(node, ("v", e.u), weight=t * e.weight)
        g.add_edge(node, ("v", e.v), weight=(1 - t) * e.weight)
        return node

    na = attach(a, "a")
    nb = attach(b, "b")
    if getattr(a, "edge", None) is not None and getattr(a, "edge", None) == getattr(b, "edge", None):
        # same-edge shortcut so the split graph stays exact
        g.add_edge(na, nb, weight=abs(a.t - b.t) * dendrite.edge(a.edge).weight)
    return nx.dijkstra_path_length(g, na, nb, weight="weight")
