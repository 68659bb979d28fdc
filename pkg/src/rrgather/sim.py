"""Round-Robin execution of oblivious robots on a graph.

Robots see only an anonymized view: the graph under a fresh relabeling, which
vertices are occupied (never how many robots sit there), and their own
position. The engine keeps the real placement, the adversary's activation
order and the inverse relabeling needed to apply a decision.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from typing import Protocol, Sequence

from .canon import automorphism_orbits
from .graph import Graph, GraphError, check_vertex, is_connected, set_diameter

TRACE_SCHEMA = "rrgather.trace/1"


class IllegalMoveError(RuntimeError):
    """An algorithm asked for a destination that is neither its vertex nor a neighbor."""

    def __init__(self, round_no: int, robot: int, src: int, dst: int) -> None:
        super().__init__(f"round {round_no}: robot {robot} tried to move {src} -> {dst}, not adjacent")
        self.round_no = round_no


class StabilityError(RuntimeError):
    """A robot moved although the configuration was already final."""


class EquivarianceError(AssertionError):
    """Two relabelings of the same state led to non-equivalent concrete moves."""


@dataclass(frozen=True)
class Configuration:
    """What robots can perceive: the graph and the set of occupied vertices."""

    graph: Graph
    occupied: frozenset[int]

    @property
    def occ(self) -> int:
        return len(self.occupied)

    @property
    def delta(self) -> int:
        return set_diameter(self.graph, self.occupied)

    @property
    def is_final(self) -> bool:
        return len(self.occupied) == 1

    @property
    def lam(self) -> tuple[int, ...]:
        return tuple(int(v in self.occupied) for v in range(self.graph.n))


@dataclass(frozen=True)
class View:
    """A robot's Look snapshot; carries no identities, counts, or history."""

    graph: Graph
    occupied: frozenset[int]
    position: int


class Algorithm(Protocol):
    name: str

    def decide(self, view: View) -> int | None: ...

    def classify(self, g: Graph, occupied: frozenset[int]) -> str: ...


def snapshot(positions: Sequence[int], g: Graph) -> Configuration:
    if not positions:
        raise GraphError("a placement needs at least one robot")
    for p in positions:
        check_vertex(g, p)
    return Configuration(g, frozenset(positions))


def occ(c: Configuration) -> int:
    return c.occ


def delta(c: Configuration) -> int:
    return c.delta


def make_view(c: Configuration, pos: int, relabeling: Sequence[int]) -> View:
    """Transport the configuration and ``pos`` through ``relabeling`` (old -> new)."""
    return View(
        c.graph.relabel(relabeling),
        frozenset(relabeling[v] for v in c.occupied),
        relabeling[pos],
    )


def _inverse(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for v, p in enumerate(perm):
        inv[p] = v
    return inv


@dataclass(frozen=True)
class Adversary:
    """Activation order: one permutation for the whole run, or a new one per epoch."""

    seed: int = 0
    mode: str = "fixed"

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "per-epoch"):
            raise ValueError(f"unknown adversary mode {self.mode!r}")

    def order(self, epoch: int, k: int) -> list[int]:
        salt = 0 if self.mode == "fixed" else epoch
        ids = list(range(k))
        random.Random(self.seed * 1_000_003 + salt).shuffle(ids)
        return ids


@dataclass
class RoundRecord:
    epoch: int
    round: int
    robot: int
    occupied: list[int]
    task: str
    move_from: int
    move_to: int
    positions: list[int]


@dataclass
class EquivarianceStats:
    checks: int = 0
    identical: int = 0
    equivalent: int = 0
    failures: list[dict] = field(default_factory=list)


@dataclass
class ExecutionTrace:
    algorithm: str
    seed: int
    adversary: str
    max_epochs: int
    initial_positions: list[int]
    initial_occ: int
    initial_delta: int
    records: list[RoundRecord] = field(default_factory=list)
    outcome: str = "running"
    epochs: int = 0
    rounds: int = 0
    final_task: str = ""
    stability: list[RoundRecord] = field(default_factory=list)
    equivariance: EquivarianceStats | None = None

    @property
    def k(self) -> int:
        return len(self.initial_positions)

    @property
    def gathered(self) -> bool:
        return self.outcome == "gathered"

    def labels(self) -> list[str]:
        out = [r.task for r in self.records]
        if self.final_task:
            out.append(self.final_task)
        return out

    def to_dict(self, g: Graph | None = None) -> dict:
        data = asdict(self)
        data = {"schema": TRACE_SCHEMA, **data}
        if g is not None:
            data["graph"] = {"n": g.n, "edges": [list(e) for e in g.edges], "colors": list(g.colors)}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExecutionTrace":
        if data.get("schema") != TRACE_SCHEMA:
            raise ValueError(f"unsupported trace schema {data.get('schema')!r}")
        fields = {k: v for k, v in data.items() if k not in ("schema", "graph", "manifest")}
        fields["records"] = [RoundRecord(**r) for r in fields.get("records", [])]
        fields["stability"] = [RoundRecord(**r) for r in fields.get("stability", [])]
        if fields.get("equivariance") is not None:
            fields["equivariance"] = EquivarianceStats(**fields["equivariance"])
        return cls(**fields)


def default_epoch_cap(g: Graph, positions: Sequence[int]) -> int:
    c = snapshot(positions, g)
    return 10 * (c.occ * c.delta + g.n)


def lower_bound_epochs(initial_delta: int) -> int:
    return math.ceil(initial_delta / 2)


def _equivalent_moves(view_graph: Graph, occupied: frozenset[int], pos: int, a: int, b: int) -> bool:
    """Same orbit under automorphisms of the graph fixing occupancy and ``pos``."""
    colors = [
        c * 4 + (2 if v in occupied else 0) + (1 if v == pos else 0) for v, c in enumerate(view_graph.colors)
    ]
    orbits = automorphism_orbits(view_graph.with_colors(colors))
    return orbits.index_of(a) == orbits.index_of(b)


class Simulator:
    """Runs one execution; see :func:`run` for the functional entry point."""

    def __init__(
        self,
        g: Graph,
        positions: Sequence[int],
        algorithm: Algorithm,
        adversary: Adversary,
        max_epochs: int | None = None,
        *,
        check_equivariance: bool = False,
    ) -> None:
        if not is_connected(g):
            raise GraphError("simulation needs a connected graph")
        self.g = g
        self.positions = [check_vertex(g, p) for p in positions]
        if not self.positions:
            raise GraphError("a placement needs at least one robot")
        self.algorithm = algorithm
        self.adversary = adversary
        self.max_epochs = max_epochs if max_epochs is not None else default_epoch_cap(g, positions)
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        self.check_equivariance = check_equivariance
        self._views = random.Random(f"views:{adversary.seed}:{adversary.mode}")

    def _relabeling(self) -> list[int]:
        perm = list(range(self.g.n))
        self._views.shuffle(perm)
        return perm

    def _decide(self, config: Configuration, pos: int) -> int:
        perm = self._relabeling()
        choice = self.algorithm.decide(make_view(config, pos, perm))
        return pos if choice is None else _inverse(perm)[choice]

    def run(self) -> ExecutionTrace:
        c0 = snapshot(self.positions, self.g)
        trace = ExecutionTrace(
            algorithm=self.algorithm.name,
            seed=self.adversary.seed,
            adversary=self.adversary.mode,
            max_epochs=self.max_epochs,
            initial_positions=list(self.positions),
            initial_occ=c0.occ,
            initial_delta=c0.delta,
            equivariance=EquivarianceStats() if self.check_equivariance else None,
        )
        k = len(self.positions)
        pos = self.positions
        round_no = 0
        epoch = 0
        final = c0.is_final
        while not final and epoch < self.max_epochs:
            epoch += 1
            for robot in self.adversary.order(epoch, k):
                round_no += 1
                config = Configuration(self.g, frozenset(pos))
                task = self.algorithm.classify(self.g, config.occupied)
                src = pos[robot]
                dst = self._decide(config, src)
                if dst != src and not self.g.has_edge(src, dst):
                    raise IllegalMoveError(round_no, robot, src, dst)
                if trace.equivariance is not None:
                    self._double_check(trace.equivariance, config, src, dst, round_no)
                trace.records.append(
                    RoundRecord(epoch, round_no, robot, sorted(config.occupied), task, src, dst, list(pos))
                )
                pos[robot] = dst
                if len(set(pos)) == 1:
                    final = True
                    break
        trace.rounds = round_no
        trace.epochs = epoch
        if final:
            trace.outcome = "gathered"
            trace.final_task = self.algorithm.classify(self.g, frozenset(pos))
            self._stability_epoch(trace, epoch + 1)
        else:
            trace.outcome = "epoch-cap-exceeded"
        return trace

    def _double_check(self, stats: EquivarianceStats, config: Configuration, src: int, dst: int, round_no: int) -> None:
        other = self._decide(config, src)
        stats.checks += 1
        if other == dst:
            stats.identical += 1
            stats.equivalent += 1
            return
        if dst != src and other != src and _equivalent_moves(self.g, config.occupied, src, dst, other):
            stats.equivalent += 1
            return
        stats.failures.append({"round": round_no, "from": src, "first": dst, "second": other})

    def _stability_epoch(self, trace: ExecutionTrace, epoch: int) -> None:
        pos = self.positions
        config = Configuration(self.g, frozenset(pos))
        for robot in self.adversary.order(epoch, len(pos)):
            src = pos[robot]
            dst = self._decide(config, src)
            trace.stability.append(
                RoundRecord(epoch, trace.rounds + len(trace.stability) + 1, robot, sorted(config.occupied),
                            self.algorithm.classify(self.g, config.occupied), src, dst, list(pos))
            )
            if dst != src:
                raise StabilityError(f"robot {robot} moved {src} -> {dst} after gathering")


def run(
    g: Graph,
    positions: Sequence[int],
    algorithm: Algorithm,
    adversary: Adversary | None = None,
    max_epochs: int | None = None,
    *,
    check_equivariance: bool = False,
) -> ExecutionTrace:
    """Execute ``algorithm`` under Round-Robin until gathered or ``max_epochs``.

    Each activation builds a view under a fresh relabeling drawn from a
    generator seeded by the adversary seed, so a run is a deterministic
    function of (graph, placement, algorithm, seed, mode).
    """
    return Simulator(
        g, positions, algorithm, adversary or Adversary(), max_epochs, check_equivariance=check_equivariance
    ).run()
