"""Gathering algorithms as pure functions from a robot's view to a move.

``TerminalOrbitGathering`` works on graphs with a terminal orbit.
``NoTerminalOrbitGathering`` works on non-vertex-transitive graphs without
one: it steers robots into the colored subgraph G' (one component CC of
G[O2] plus its O1 neighbors) and then runs the terminal-orbit algorithm there.

Ties are broken by the canonical labeling of the view colored by occupancy
and own position, so every decision is a function of the view only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .canon import canonical_form
from .graph import Graph, distances_to_set, first_hop_toward, shortest_path_avoiding
from .orbits import build_gprime, gprime_vertices, o2_components, select_o1_o2, terminal_report
from .sim import View

FINAL = "FINAL"
AT_T1, AT_T2, AT_T3 = "AT.T1", "AT.T2", "AT.T3"
T1 = "T1"
T2_I, T2_II, T2_III, T2_IV = "T2.i", "T2.ii", "T2.iii", "T2.iv"
T3_I, T3_II, T3_III = "T3.i", "T3.ii", "T3.iii"
T4 = "T4"


class PreconditionError(RuntimeError):
    """The view does not satisfy the algorithm's structural precondition."""


class ClassificationError(RuntimeError):
    """No consistent task could be derived for a configuration."""


def view_ranks(g: Graph, occupied: frozenset[int], me: int | None = None) -> tuple[int, ...]:
    """Canonical labels of ``g`` colored by its own colors, occupancy and ``me``."""
    colors = [c * 4 + (2 if v in occupied else 0) + (1 if v == me else 0) for v, c in enumerate(g.colors)]
    return canonical_form(g.with_colors(colors)).labeling


# ---------------------------------------------------------------------------
# terminal-orbit algorithm


def terminal_target_orbit(g: Graph) -> frozenset[int]:
    report = terminal_report(g)
    orbit = None if report.vertex_transitive else report.smallest_terminal()
    if orbit is None:
        raise PreconditionError("graph has no terminal orbit")
    return orbit


def classify_terminal(g: Graph, occupied: frozenset[int]) -> str:
    if len(occupied) == 1:
        return FINAL
    inside = len(occupied & terminal_target_orbit(g))
    if inside >= 2:
        return AT_T1
    return AT_T2 if inside == 1 else AT_T3


def decide_terminal(g: Graph, occupied: frozenset[int], me: int, orbit: frozenset[int] | None = None) -> int | None:
    """Move of the robot on ``me`` under the terminal-orbit algorithm.

    ``orbit`` overrides the target (default: the first terminal orbit in
    canonical order); it must be a terminal orbit of ``g``.
    """
    if len(occupied) == 1:
        return None
    orbit = terminal_target_orbit(g) if orbit is None else frozenset(orbit)
    ranks = view_ranks(g, occupied, me)
    hit = occupied & orbit
    if len(hit) >= 2:
        if me not in orbit:
            return None
        out = [w for w in g.neighbors(me) if w not in orbit]
        return min(out, key=lambda w: ranks[w])
    if len(hit) == 1:
        (v,) = hit
        if me in orbit:
            return None
        p = shortest_path_avoiding(g, me, v, orbit - {v}, ranks)
        if p is None:
            raise PreconditionError(f"no orbit-avoiding path from {me} to {v}")
        return p[1]
    dist = distances_to_set(g, [me])
    nearest = min(dist[v] for v in orbit)
    target = min((v for v in orbit if dist[v] == nearest), key=lambda v: ranks[v])
    return first_hop_toward(g, me, [target], ranks)


class TerminalOrbitGathering:
    name = "terminal"

    def decide(self, view: View) -> int | None:
        return decide_terminal(view.graph, view.occupied, view.position)

    def classify(self, g: Graph, occupied: frozenset[int]) -> str:
        return classify_terminal(g, occupied)


# ---------------------------------------------------------------------------
# no-terminal-orbit algorithm


@dataclass
class NotTContext:
    """Classified configuration plus the sets the moves refer to."""

    task: str
    o1: frozenset[int]
    o2: frozenset[int]
    F: frozenset[int] = frozenset()
    U: frozenset[int] = frozenset()
    cc: frozenset[int] | None = None
    front: int | None = None
    rear: int | None = None
    # T3: per side, (component, head, rear or None)
    sides: list[tuple[frozenset[int], int, int | None]] = field(default_factory=list)
    gprime: frozenset[int] | None = None
    ambiguous: int = 0


def _min_dist(dist: dict[int, int], vs: frozenset[int]) -> float:
    return min((dist.get(v, math.inf) for v in vs), default=math.inf)


def _pair(g: Graph, vs: frozenset[int], dist: dict[int, int]) -> tuple[int, int] | None:
    """``(rear, front)`` when the two vertices are adjacent and the front is one step closer."""
    a, b = sorted(vs)
    if not g.has_edge(a, b):
        return None
    if dist.get(a) == dist.get(b, -9) + 1:
        return a, b
    if dist.get(b) == dist.get(a, -9) + 1:
        return b, a
    return None


def _t3_side(g: Graph, occ_side: frozenset[int], dist_other: dict[int, int], dF: float):
    if len(occ_side) == 1:
        (head,) = occ_side
        return (head, None) if dist_other[head] < dF else None
    if len(occ_side) == 2:
        pr = _pair(g, occ_side, dist_other)
        if pr is not None and dist_other[pr[1]] < dF:
            return pr[1], pr[0]
    return None


def _t2_interpretation(g: Graph, occupied: frozenset[int], F: frozenset[int], cc: frozenset[int],
                       ranks: Sequence[int]):
    """Task, front and rear if ``cc`` is taken as the gathering component, else ``None``."""
    U = occupied & cc
    X = occupied - F - U
    dist = distances_to_set(g, cc)
    dF = _min_dist(dist, F)
    if not X:
        return (T2_II, None, None) if F else None
    if len(X) == 1:
        (w,) = X
        if dist[w] < dF:
            return T2_III, w, None
        # a rear left behind when its front stepped onto O1: the front is
        # then one of the closest F vertices
        ahead = [f for f in g.neighbors(w) & F if dist[f] == dF == dist[w] - 1]
        if ahead:
            return T2_IV, min(ahead, key=lambda f: ranks[f]), w
        return None
    if len(X) == 2:
        pr = _pair(g, X, dist)
        if pr is not None and dist[pr[1]] < dF:
            return T2_IV, pr[1], pr[0]
    return None


def classify_not_terminal(
    g: Graph,
    occupied: frozenset[int],
    o1: frozenset[int] | None = None,
    o2: frozenset[int] | None = None,
    ranks: tuple[int, ...] | None = None,
) -> NotTContext:
    """Evaluate the preconditions from T4 down to T2; T1 when none holds.

    Ties between candidate components are broken by ``ranks``, by default the
    canonical labeling of the graph colored by occupancy, so every robot and
    the engine resolve them the same way up to automorphism.
    """
    if o1 is None or o2 is None:
        o1, o2 = select_o1_o2(g)
    ranks = ranks if ranks is not None else view_ranks(g, occupied)
    F = occupied & o1
    if len(occupied) == 1:
        return NotTContext(FINAL, o1, o2, F)
    comps = o2_components(g, o2)
    busy = [c for c in comps if c & occupied]

    # T4: everything inside one G'
    if len(busy) == 1:
        candidates = [busy[0]] if occupied <= gprime_vertices(g, o1, busy[0]) else []
    elif not busy and occupied <= o1:
        candidates = [c for c in comps if all(g.neighbors(v) & c for v in occupied)]
    else:
        candidates = []
    if candidates:
        cc = min(candidates, key=lambda c: min(ranks[v] for v in c))
        return NotTContext(T4, o1, o2, F, occupied & cc, cc, gprime=gprime_vertices(g, o1, cc),
                           ambiguous=len(candidates) - 1)

    # T3: two occupied components, each side a head (plus rear) closer than F
    if len(busy) == 2 and occupied <= (F | busy[0] | busy[1]):
        sides = []
        for mine, other in ((busy[0], busy[1]), (busy[1], busy[0])):
            dist = distances_to_set(g, other)
            side = _t3_side(g, occupied & mine, dist, _min_dist(dist, F))
            if side is None:
                break
            sides.append((mine, side[0], side[1]))
        if len(sides) == 2:
            rears = sum(1 for s in sides if s[2] is not None)
            task = (T3_I, T3_II, T3_III)[rears]
            return NotTContext(task, o1, o2, F, sides=sides)

    # T2
    if not busy:
        if occupied <= o1:
            return NotTContext(T2_I, o1, o2, F)
        return NotTContext(T1, o1, o2, F)
    found = []
    for cc in busy:
        interp = _t2_interpretation(g, occupied, F, cc, ranks)
        if interp is not None:
            found.append((cc, interp))
    if found:
        found.sort(key=lambda item: (-len(item[0] & occupied), min(ranks[v] for v in item[0])))
        cc, (task, front, rear) = found[0]
        top = len(cc & occupied)
        ties = sum(1 for c, _ in found if len(c & occupied) == top) - 1
        return NotTContext(task, o1, o2, F, occupied & cc, cc, front, rear, ambiguous=ties)
    return NotTContext(T1, o1, o2, F)


def decide_not_terminal(g: Graph, occupied: frozenset[int], me: int) -> int | None:
    if len(occupied) == 1:
        return None
    # tie-breaks must be fixed by every symmetry that fixes this robot
    ranks = view_ranks(g, occupied, me)
    ctx = classify_not_terminal(g, occupied, ranks=ranks)
    task = ctx.task
    if task == T1:
        return None if me in ctx.o1 else first_hop_toward(g, me, ctx.o1, ranks)
    if task == T2_I:
        return min((w for w in g.neighbors(me) if w in ctx.o2), key=lambda w: ranks[w])
    if task == T2_II:
        if me not in ctx.F:
            return None
        dist = distances_to_set(g, ctx.cc)
        if dist[me] != _min_dist(dist, ctx.F):
            return None
        return first_hop_toward(g, me, ctx.cc, ranks)
    if task == T2_III:
        return first_hop_toward(g, me, ctx.cc, ranks) if me == ctx.front else None
    if task == T2_IV:
        return ctx.front if me == ctx.rear else None
    if task in (T3_I, T3_II, T3_III):
        for i, (comp, head, rear) in enumerate(ctx.sides):
            other = ctx.sides[1 - i][0]
            if task == T3_I and me == head:
                return first_hop_toward(g, me, other, ranks)
            if task != T3_I and rear is not None and me == rear:
                return head
        return None
    if task == T4:
        return _decide_in_gprime(g, occupied, me, ctx)
    raise ClassificationError(f"unknown task {task}")


def _decide_in_gprime(g: Graph, occupied: frozenset[int], me: int, ctx: NotTContext) -> int | None:
    assert ctx.cc is not None
    sub, ids = build_gprime(g, ctx.o1, ctx.o2, ctx.cc)
    local = {v: i for i, v in enumerate(ids)}
    if me not in local:
        raise ClassificationError(f"robot on {me} is outside G' in task T4")
    choice = decide_terminal(sub, frozenset(local[v] for v in occupied), local[me])
    return None if choice is None else ids[choice]


class NoTerminalOrbitGathering:
    name = "nonterminal"

    def decide(self, view: View) -> int | None:
        return decide_not_terminal(view.graph, view.occupied, view.position)

    def classify(self, g: Graph, occupied: frozenset[int]) -> str:
        return classify_not_terminal(g, occupied).task

    def context(self, g: Graph, occupied: frozenset[int]) -> NotTContext:
        return classify_not_terminal(g, occupied)


def pick_algorithm(g: Graph, choice: str = "auto"):
    """``auto`` selects the terminal-orbit algorithm iff a terminal orbit exists."""
    if choice == "terminal":
        return TerminalOrbitGathering()
    if choice == "nonterminal":
        return NoTerminalOrbitGathering()
    if choice != "auto":
        raise ValueError(f"unknown algorithm {choice!r}")
    report = terminal_report(g)
    if report.vertex_transitive:
        raise PreconditionError("vertex-transitive graphs are outside both algorithms")
    return TerminalOrbitGathering() if report.has_terminal else NoTerminalOrbitGathering()
