"""Terminal orbits, the structural predicates that force them, and the
O1/O2/G' selection used when a graph has none."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .canon import OrbitPartition, automorphism_orbits
from .graph import (
    Graph,
    GraphError,
    connected_components,
    cut_vertices,
    false_twin_classes,
    is_connected,
    true_twin_classes,
    universal_vertices,
)

MAX_SUBSET_ORBITS = 20

O1_COLOR = 0
O2_COLOR = 1


class OrbitConsistencyError(GraphError):
    """A set passed as an orbit behaves differently at two of its vertices."""


class NoTerminalOrbitError(AssertionError):
    """G' was expected to have a terminal orbit and does not."""


def _terminal_at(g: Graph, orbit: frozenset[int], v: int) -> bool:
    return is_connected(g, (set(range(g.n)) - orbit) | {v})


def is_terminal(g: Graph, orbit: frozenset[int] | set[int]) -> bool:
    """Whether every vertex of ``orbit`` is reachable from outside without
    crossing the rest of the orbit.

    All vertices are checked, and they must agree: orbit symmetry forces it,
    so a disagreement means ``orbit`` is not an orbit.
    """
    orbit = frozenset(orbit)
    if not orbit or len(orbit) == g.n:
        raise GraphError("terminality needs a nonempty proper vertex subset")
    answers = {v: _terminal_at(g, orbit, v) for v in sorted(orbit)}
    if len(set(answers.values())) != 1:
        raise OrbitConsistencyError(f"vertices of {sorted(orbit)} disagree on terminality: {answers}")
    return next(iter(answers.values()))


def terminal_witness(g: Graph, orbit: frozenset[int]) -> tuple[int, int] | None:
    """A pair ``(u, v)``, ``u`` outside, ``v`` in ``orbit``, with no path meeting
    the orbit only at ``v``; ``None`` when the orbit is terminal."""
    for v in sorted(orbit):
        allowed = (set(range(g.n)) - orbit) | {v}
        comps = connected_components(g, allowed)
        if len(comps) > 1:
            home = next(c for c in comps if v in c)
            u = min(x for c in comps if c is not home for x in c)
            return u, v
    return None


@dataclass(frozen=True)
class TerminalReport:
    orbits: OrbitPartition
    terminal: tuple[bool, ...]
    witnesses: dict[int, tuple[int, int, int]] = field(default_factory=dict)
    predicates: dict[str, bool] = field(default_factory=dict)
    vertex_transitive: bool = False

    @property
    def has_terminal(self) -> bool:
        return any(self.terminal)

    def smallest_terminal(self) -> frozenset[int] | None:
        for orbit, flag in zip(self.orbits.orbits, self.terminal):
            if flag:
                return orbit
        return None


@lru_cache(maxsize=4096)
def terminal_report(g: Graph) -> TerminalReport:
    """Terminal flags per orbit (canonical order), witnesses, and predicates.

    For a vertex-transitive graph the flags are all false and the terminal
    question is left void.
    """
    orbits = automorphism_orbits(g)
    if len(orbits) == 1:
        return TerminalReport(orbits, (False,), {}, thm3_predicates(g), True)
    flags = []
    witnesses = {}
    for i, orbit in enumerate(orbits.orbits):
        flag = is_terminal(g, orbit)
        flags.append(flag)
        if not flag:
            u, v = terminal_witness(g, orbit)  # type: ignore[misc]
            witnesses[i] = (u, v, i)
    report = TerminalReport(orbits, tuple(flags), witnesses, thm3_predicates(g, orbits), False)
    if not g.is_colored() and any(report.predicates.values()) and not report.has_terminal:
        raise AssertionError(f"structural predicate {report.predicates} holds but no orbit is terminal")
    return report


def smallest_terminal_orbit(g: Graph) -> frozenset[int] | None:
    report = terminal_report(g)
    if report.vertex_transitive:
        raise GraphError("vertex-transitive graph: no orbit order to pick a terminal orbit from")
    return report.smallest_terminal()


def has_terminal_orbit(g: Graph) -> bool:
    report = terminal_report(g)
    return not report.vertex_transitive and report.has_terminal


def thm2_holds(g: Graph) -> bool:
    """Whether some proper nonempty set of orbits induces a connected subgraph."""
    orbits = automorphism_orbits(g).orbits
    if len(orbits) > MAX_SUBSET_ORBITS:
        raise GraphError(f"{len(orbits)} orbits is too many for subset enumeration")
    for size in range(1, len(orbits)):
        for combo in combinations(orbits, size):
            if is_connected(g, frozenset().union(*combo)):
                return True
    return False


def thm3_predicates(g: Graph, orbits: OrbitPartition | None = None) -> dict[str, bool]:
    """Universal vertex, cut vertex, twin orbit, connected proper orbit subset."""
    orbits = orbits if orbits is not None else automorphism_orbits(g)
    false_classes = false_twin_classes(g)
    true_classes = true_twin_classes(g)
    twin_orbit = False
    if len(orbits) > 1:
        for orbit in orbits.orbits:
            if len(orbit) < 2:
                continue
            if any(orbit <= c for c in false_classes) or any(orbit <= c for c in true_classes):
                twin_orbit = True
                break
    connected_subset = len(orbits) > 1 and len(orbits) <= MAX_SUBSET_ORBITS and thm2_holds(g)
    return {
        "has_universal": bool(universal_vertices(g)),
        "has_cut_vertex": bool(cut_vertices(g)),
        "has_twin_orbit": twin_orbit,
        "has_connected_proper_orbit_subset": connected_subset,
    }


# ---------------------------------------------------------------------------
# no-terminal-orbit structure


def select_o1_o2(g: Graph) -> tuple[frozenset[int], frozenset[int]]:
    """First orbit in canonical order, and the first orbit adjacent to it."""
    orbits = automorphism_orbits(g)
    if len(orbits) == 1:
        raise GraphError("vertex-transitive graph has no orbit order")
    o1 = orbits.orbits[0]
    touching = set().union(*(g.neighbors(v) for v in o1))
    for orbit in orbits.orbits[1:]:
        if orbit & touching:
            return o1, orbit
    raise GraphError("first orbit has no adjacent orbit (graph disconnected?)")


def o2_components(g: Graph, o2: frozenset[int]) -> list[frozenset[int]]:
    return connected_components(g, o2)


def gprime_vertices(g: Graph, o1: frozenset[int], cc: frozenset[int]) -> frozenset[int]:
    return cc | frozenset(v for v in o1 if g.neighbors(v) & cc)


def build_gprime(g: Graph, o1: frozenset[int], o2: frozenset[int], cc: frozenset[int]) -> tuple[Graph, list[int]]:
    """Colored G' on ``cc`` plus its O1 neighbors, and the local->global id map.

    O1 vertices get color ``O1_COLOR``, ``cc`` vertices ``O2_COLOR``. Raises
    :class:`NoTerminalOrbitError` when the colored G' has no terminal orbit.
    """
    if not cc <= o2 or not is_connected(g, cc):
        raise GraphError("cc must be a connected subset of O2")
    sub, ids = g.induced(gprime_vertices(g, o1, cc))
    colored = sub.with_colors([O1_COLOR if v in o1 else O2_COLOR for v in ids])
    report = terminal_report(colored)
    if report.vertex_transitive or not report.has_terminal:
        raise NoTerminalOrbitError(f"G' on {sorted(ids)} has no terminal orbit")
    return colored, ids
