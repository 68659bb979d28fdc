import pytest

from rrgather import generators as G
from rrgather.canon import automorphism_orbits, is_isomorphic, is_vertex_transitive
from rrgather.graph import GraphError, is_connected, universal_vertices
from rrgather.orbits import has_terminal_orbit, terminal_report


def test_butterfly_counts():
    assert is_isomorphic(G.butterfly(1), G.cycle(4))
    bf2 = G.butterfly(2)
    assert (bf2.n, bf2.m) == (12, 16)
    assert G.butterfly(3).n == 32
    for d in (2, 3):
        g = G.butterfly(d)
        for v in range(g.n):
            layer = G.butterfly_layer(d, v)
            assert g.degree(v) == (2 if layer in (0, d) else 4)


@pytest.mark.parametrize("d", [2, 3])
def test_butterfly_orbits_pair_complementary_layers(d):
    g = G.butterfly(d)
    for orbit in automorphism_orbits(g).orbits:
        layers = {G.butterfly_layer(d, v) for v in orbit}
        assert layers == {min(layers), d - min(layers)}


def test_h_family():
    g = G.h_family(G.named_graph("2K1"), G.complete(1), 3)
    assert (g.n, g.m) == (9, 12)
    assert sorted({g.degree(v) for v in range(g.n)}) == [2, 4]
    k2 = G.h_family(G.complete(2), G.complete(1), 4)
    assert k2.n == 12 and len(automorphism_orbits(k2)) == 2 and not has_terminal_orbit(k2)
    with pytest.raises(GraphError):
        G.h_family(G.complete(2), G.complete(2), 3)
    with pytest.raises(GraphError):
        G.h_family(G.path(3), G.complete(1), 3)
    with pytest.raises(GraphError):
        G.h_family(G.complete(2), G.complete(1), 2)


def test_windmill():
    g = G.windmill(3, 2)
    assert g.n == 5 and g.degree(0) == 4
    assert is_isomorphic(G.windmill(2, 3), G.star(3))
    assert 0 in universal_vertices(G.windmill(4, 3))
    with pytest.raises(GraphError):
        G.windmill(1, 3)


def test_join_threshold_bipartite():
    joined = G.join(G.path(4), G.named_graph("2K1"))
    report = terminal_report(joined)
    twins = frozenset({4, 5})
    assert twins in report.orbits.orbits
    assert report.terminal[report.orbits.orbits.index(twins)]
    assert universal_vertices(G.threshold(["d", "i", "d"])) == {3}
    assert G.complete_bipartite(3, 2).m == 6
    assert is_vertex_transitive(G.named_graph("3K2")) and not is_connected(G.named_graph("3K2"))


def test_random_constructors_are_deterministic():
    makers = [
        lambda s: G.random_tree(12, s),
        lambda s: G.random_connected(10, 0.3, s),
        lambda s: G.random_cactus(5, s),
        lambda s: G.random_block_graph(5, s),
        lambda s: G.random_threshold(9, s),
        lambda s: G.random_trivially_perfect(9, s),
    ]
    for make in makers:
        assert make(3) == make(3)
        assert is_connected(make(3))
    assert G.random_tree(12, 3).m == 11
    assert any(G.random_connected(10, 0.3, 1) != G.random_connected(10, 0.3, s) for s in range(2, 6))


def test_random_families_have_terminal_orbits():
    for s in range(5):
        for g in (G.random_cactus(4, s), G.random_block_graph(4, s), G.random_threshold(8, s),
                  G.random_trivially_perfect(8, s)):
            report = terminal_report(g)
            assert report.vertex_transitive or report.has_terminal


def test_build_family_dispatch():
    assert G.build_family("h_family", ["2K1", "K1", "3"]) == G.h_family(G.named_graph("2K1"), G.complete(1), 3)
    assert G.build_family("random_tree", ["7"], seed=2) == G.random_tree(7, 2)
    assert G.build_family("threshold", ["did"]) == G.threshold("did")
    with pytest.raises(GraphError):
        G.build_family("nope", [])
