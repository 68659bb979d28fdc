import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rrgather import generators as G
from rrgather.algorithms import TerminalOrbitGathering, pick_algorithm
from rrgather.graph import GraphError
from rrgather.sim import (
    Adversary,
    Configuration,
    ExecutionTrace,
    IllegalMoveError,
    StabilityError,
    View,
    delta,
    lower_bound_epochs,
    make_view,
    occ,
    run,
    snapshot,
)


class Teleport:
    name = "teleport"

    def decide(self, view: View):
        return next(v for v in range(view.graph.n) if v != view.position and not view.graph.has_edge(v, view.position))

    def classify(self, g, occupied):
        return "X"


class Idle:
    name = "idle"

    def decide(self, view: View):
        return None

    def classify(self, g, occupied):
        return "X"


class Restless:
    """Walks forever, even once gathered."""

    name = "restless"

    def decide(self, view: View):
        return min(view.graph.neighbors(view.position))

    def classify(self, g, occupied):
        return "X"


def test_snapshot_erases_multiplicity():
    c = snapshot([2, 2, 5], G.path(6))
    assert c.occupied == {2, 5} and occ(c) == 2
    final = snapshot([0], G.path(4))
    assert (delta(final), occ(final), final.is_final) == (0, 1, True)
    assert delta(snapshot([0, 3], G.path(4))) == 3
    assert (delta(snapshot([0, 1, 3], G.path(4))), occ(snapshot([0, 1, 3], G.path(4)))) == (3, 3)
    assert delta(snapshot([0, 3], G.complete_bipartite(3, 2))) == 1
    with pytest.raises(GraphError):
        snapshot([9], G.path(4))
    with pytest.raises(GraphError):
        snapshot([], G.path(4))


def test_make_view():
    g = G.path(4)
    c = snapshot([0, 2], g)
    ident = make_view(c, 2, [0, 1, 2, 3])
    assert (ident.graph, ident.occupied, ident.position) == (g, c.occupied, 2)
    v = make_view(c, 2, [3, 2, 1, 0])
    assert v.occupied == {3, 1} and v.position == 1
    assert sum(Configuration(v.graph, v.occupied).lam) == sum(c.lam)


@given(st.integers(0, 10**6), st.sampled_from(["fixed", "per-epoch"]), st.integers(1, 9))
def test_adversary_orders_are_permutations(seed, mode, k):
    adv = Adversary(seed, mode)
    orders = [adv.order(e, k) for e in range(1, 5)]
    for o in orders:
        assert sorted(o) == list(range(k))
    if mode == "fixed":
        assert all(o == orders[0] for o in orders)


def test_epoch_structure_and_single_hop():
    g = G.windmill(3, 3)
    for mode in ("fixed", "per-epoch"):
        tr = run(g, [1, 1, 3, 5, 6], pick_algorithm(g), Adversary(4, mode))
        assert tr.gathered
        for epoch, recs in itertools.groupby(tr.records, key=lambda r: r.epoch):
            robots = [r.robot for r in recs]
            assert len(robots) == len(set(robots))
            if epoch < tr.epochs:
                assert sorted(robots) == list(range(tr.k))
        for r in tr.records:
            assert r.move_to == r.move_from or g.has_edge(r.move_from, r.move_to)


def test_colocated_start_is_final_and_stable():
    g = G.star(4)
    tr = run(g, [2, 2, 2], pick_algorithm(g))
    assert tr.gathered and tr.epochs == 0 and tr.rounds == 0
    assert len(tr.stability) == 3 and all(r.move_to == r.move_from for r in tr.stability)


def test_star_two_leaves_within_two_epochs():
    g = G.star(3)
    for seed, mode in itertools.product(range(6), ("fixed", "per-epoch")):
        tr = run(g, [1, 2], pick_algorithm(g), Adversary(seed, mode))
        assert tr.gathered and tr.epochs <= 2


def test_lower_bound_holds():
    g = G.path(9)
    tr = run(g, [0, 8], TerminalOrbitGathering(), Adversary(1))
    assert tr.gathered and tr.epochs >= lower_bound_epochs(8) == 4


def test_illegal_and_unstable_algorithms_are_caught():
    with pytest.raises(IllegalMoveError):
        run(G.path(4), [0, 3], Teleport())
    with pytest.raises(StabilityError):
        run(G.path(3), [0, 0], Restless())


def test_epoch_cap():
    g = G.path(3)
    tr = run(g, [0, 2], Idle(), max_epochs=3)
    assert tr.outcome == "epoch-cap-exceeded" and tr.epochs == 3 and tr.rounds == 6
    with pytest.raises(ValueError):
        run(g, [0, 2], Idle(), max_epochs=0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 1000), st.sampled_from(["fixed", "per-epoch"]))
def test_runs_are_deterministic(seed, mode):
    g = G.h_family(G.named_graph("2K1"), G.complete(1), 3)
    a = run(g, [0, 0, 3, 7], pick_algorithm(g), Adversary(seed, mode))
    b = run(g, [0, 0, 3, 7], pick_algorithm(g), Adversary(seed, mode))
    assert a == b


def test_trace_roundtrip():
    g = G.butterfly(2)
    tr = run(g, [0, 0, 5, 10], pick_algorithm(g), Adversary(2), check_equivariance=True)
    doc = json.loads(json.dumps(tr.to_dict(g)))
    assert ExecutionTrace.from_dict(doc) == tr
    with pytest.raises(ValueError):
        ExecutionTrace.from_dict({**doc, "schema": "other/1"})
