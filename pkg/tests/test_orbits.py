import pytest
from hypothesis import given, settings

from rrgather import generators as G
from rrgather.canon import automorphism_orbits, is_isomorphic
from rrgather.graph import GraphError, is_connected
from rrgather.orbits import (
    OrbitConsistencyError,
    build_gprime,
    has_terminal_orbit,
    is_terminal,
    o2_components,
    select_o1_o2,
    smallest_terminal_orbit,
    terminal_report,
    terminal_witness,
    thm2_holds,
    thm3_predicates,
)
from strategies import connected_graphs


def test_k32_both_sides_terminal(k32):
    assert is_terminal(k32, {0, 1, 2}) and is_terminal(k32, {3, 4})
    assert terminal_report(k32).terminal == (True, True)
    orbits = automorphism_orbits(k32)
    assert smallest_terminal_orbit(k32) == orbits.orbits[0]


def test_h213_no_terminal(h213):
    report = terminal_report(h213)
    assert len(report.orbits) == 2 and report.terminal == (False, False)
    for i, orbit in enumerate(report.orbits.orbits):
        u, v, _ = report.witnesses[i]
        assert u not in orbit and v in orbit
        assert terminal_witness(h213, orbit) == (u, v)


def test_butterfly_and_star(bf2):
    outer = frozenset(v for v in range(bf2.n) if G.butterfly_layer(2, v) in (0, 2))
    assert not is_terminal(bf2, outer)
    assert smallest_terminal_orbit(bf2) is None
    assert is_terminal(G.star(4), {0})
    assert has_terminal_orbit(G.windmill(3, 2))


def test_is_terminal_rejects_non_orbits():
    with pytest.raises(OrbitConsistencyError):
        is_terminal(G.path(4), {0, 1})
    with pytest.raises(GraphError):
        is_terminal(G.path(3), set())


def test_connected_orbit_subset(k32, h213):
    assert thm2_holds(G.star(4))
    assert not thm2_holds(k32)
    assert not thm2_holds(h213)


def test_structural_predicates():
    assert thm3_predicates(G.threshold(list("didid")))["has_universal"]
    wd = thm3_predicates(G.windmill(3, 2))
    assert wd["has_universal"] and wd["has_cut_vertex"]
    assert thm3_predicates(G.join(G.path(4), G.named_graph("2K1")))["has_twin_orbit"]
    # P3 + 2K1 is the wheel W4: its rim orbit mixes two twin pairs
    wheel = G.join(G.path(3), G.named_graph("2K1"))
    assert is_isomorphic(wheel, G.wheel(4))
    assert not thm3_predicates(wheel)["has_twin_orbit"]
    assert thm3_predicates(wheel)["has_universal"]


def test_vertex_transitive_report():
    report = terminal_report(G.cycle(6))
    assert report.vertex_transitive and not report.has_terminal
    with pytest.raises(GraphError):
        smallest_terminal_orbit(G.cycle(6))


def test_select_o1_o2(h213, bf2):
    o1, o2 = select_o1_o2(h213)
    orbits = automorphism_orbits(h213).orbits
    assert (o1, o2) == (orbits[0], orbits[1])
    o1, o2 = select_o1_o2(bf2)
    assert {len(o1), len(o2)} == {8, 4}
    assert any(bf2.neighbors(v) & o2 for v in o1)


def test_build_gprime(h213, bf2):
    for g in (h213, bf2):
        o1, o2 = select_o1_o2(g)
        for cc in o2_components(g, o2):
            sub, ids = build_gprime(g, o1, o2, cc)
            assert is_connected(sub)
            assert set(ids) >= cc
            assert has_terminal_orbit(sub)
            assert sorted(set(sub.colors)) == [0, 1]


def test_gprime_single_vertex_is_a_star(h213):
    o1, o2 = select_o1_o2(h213)
    cc = next(iter(o2_components(h213, o2)))
    assert len(cc) == 1
    sub, ids = build_gprime(h213, o1, o2, cc)
    centre = ids.index(next(iter(cc)))
    assert sub.degree(centre) == sub.n - 1 and sub.m == sub.n - 1


@settings(max_examples=60, deadline=None)
@given(connected_graphs(min_n=2, max_n=9))
def test_terminality_agrees_with_removal(g):
    report = terminal_report(g)
    if report.vertex_transitive:
        return
    everything = set(range(g.n))
    for orbit, flag in zip(report.orbits.orbits, report.terminal):
        for v in orbit:
            assert is_connected(g, (everything - orbit) | {v}) == flag
    if any(report.predicates.values()):
        assert report.has_terminal
