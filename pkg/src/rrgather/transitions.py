"""Conformance checks over execution traces.

The checks recompute task contexts from the ground-truth positions stored in
each record, so they catch classifier and move bugs independently of the
labels the engine attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import algorithms as A
from .graph import Graph, distances_to_set
from .sim import ExecutionTrace, RoundRecord

T2_ANY = frozenset({A.T2_I, A.T2_II, A.T2_III, A.T2_IV})
T3_ANY = frozenset({A.T3_I, A.T3_II, A.T3_III})

NOT_T_TABLE: dict[str, frozenset[str]] = {
    A.T1: T2_ANY | T3_ANY | {A.T4},
    A.T2_I: frozenset({A.T2_II}),
    A.T2_II: frozenset({A.T2_II, A.T2_III, A.T2_IV}) | T3_ANY,
    A.T2_III: frozenset({A.T2_II, A.T2_III, A.T2_IV, A.T4}) | T3_ANY,
    A.T2_IV: frozenset({A.T2_III, A.T2_IV, A.T3_I, A.T3_II, A.T4}),
    A.T3_I: frozenset({A.T2_III, A.T2_IV, A.T3_I, A.T3_II, A.T4}),
    A.T3_II: frozenset({A.T3_I, A.T3_II}),
    A.T3_III: frozenset({A.T3_II, A.T3_III}),
    A.T4: frozenset({A.FINAL}),
}

TERMINAL_TABLE: dict[str, frozenset[str]] = {
    A.AT_T1: frozenset({A.AT_T2}),
    A.AT_T2: frozenset({A.FINAL}),
    A.AT_T3: frozenset({A.AT_T2, A.FINAL}),
}

TRICKLE_TASKS = frozenset({A.T2_IV, A.T3_II, A.T3_III})
GROWTH_TASKS = frozenset({A.T2_II, A.T2_III, A.T2_IV})


@dataclass
class Violation:
    kind: str
    round: int
    detail: str


@dataclass
class ConformanceReport:
    transitions: list[Violation] = field(default_factory=list)
    monotone_b: list[Violation] = field(default_factory=list)
    trickle: list[Violation] = field(default_factory=list)
    progress: list[Violation] = field(default_factory=list)
    classification: list[Violation] = field(default_factory=list)
    trickle_episodes: int = 0
    growth_runs: int = 0
    ambiguous_rounds: int = 0
    edges_seen: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not (self.transitions or self.monotone_b or self.trickle or self.progress or self.classification)

    def all_violations(self) -> list[Violation]:
        return self.transitions + self.monotone_b + self.trickle + self.progress + self.classification

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "transitions": [v.__dict__ for v in self.transitions],
            "monotone_b": [v.__dict__ for v in self.monotone_b],
            "trickle": [v.__dict__ for v in self.trickle],
            "progress": [v.__dict__ for v in self.progress],
            "classification": [v.__dict__ for v in self.classification],
            "trickle_episodes": self.trickle_episodes,
            "growth_runs": self.growth_runs,
            "ambiguous_rounds": self.ambiguous_rounds,
            "edges_seen": dict(sorted(self.edges_seen.items())),
        }


def check_labels(labels: list[str], table: dict[str, frozenset[str]], rounds: list[int] | None = None) -> list[Violation]:
    """Consecutive distinct labels must be edges of ``table``; the sink must be reached legally."""
    rounds = rounds if rounds is not None else list(range(1, len(labels) + 1))
    out = []
    for (a, b), r in zip(zip(labels, labels[1:]), rounds[1:]):
        if a == b:
            continue
        if a not in table:
            out.append(Violation("unknown-label", r, a))
        elif b not in table[a]:
            out.append(Violation("transition", r, f"{a} -> {b}"))
    if labels and labels[-1] == A.FINAL and len(labels) > 1:
        sink_parents = {src for src, dsts in table.items() if A.FINAL in dsts}
        if not any(lab in sink_parents for lab in labels[:-1]):
            out.append(Violation("sink", rounds[-1], f"FINAL reached without passing {sorted(sink_parents)}"))
    return out


def _after(rec: RoundRecord) -> list[int]:
    pos = list(rec.positions)
    pos[rec.robot] = rec.move_to
    return pos


def _edge_counts(labels: list[str]) -> dict[str, int]:
    seen: dict[str, int] = {}
    for a, b in zip(labels, labels[1:]):
        if a != b:
            seen[f"{a}->{b}"] = seen.get(f"{a}->{b}", 0) + 1
    return seen


def check_trace(g: Graph, trace: ExecutionTrace) -> ConformanceReport:
    """Run every check that applies to the algorithm that produced ``trace``."""
    report = ConformanceReport()
    labels = trace.labels()
    rounds = [r.round for r in trace.records] + ([trace.rounds + 1] if trace.final_task else [])
    if trace.algorithm == "terminal":
        report.transitions = check_labels(labels, TERMINAL_TABLE, rounds)
        report.progress = _terminal_progress(g, trace)
    else:
        report.transitions = check_labels(labels, NOT_T_TABLE, rounds)
        contexts = _contexts(g, trace, report)
        if contexts is not None:
            _monotone_b(trace, contexts, report)
            _trickle(trace, contexts, report)
    report.edges_seen = _edge_counts(labels)
    return report


def _contexts(g: Graph, trace: ExecutionTrace, report: ConformanceReport):
    o1, o2 = A.select_o1_o2(g)
    out = []
    for rec in trace.records:
        try:
            ctx = A.classify_not_terminal(g, frozenset(rec.occupied), o1, o2)
        except Exception as exc:  # diagnostic, reported as content
            report.classification.append(Violation("classification", rec.round, repr(exc)))
            return None
        if ctx.task != rec.task:
            report.classification.append(Violation("label-mismatch", rec.round, f"{rec.task} vs {ctx.task}"))
        out.append(ctx)
    return out


def _monotone_b(trace: ExecutionTrace, contexts: list, report: ConformanceReport) -> None:
    """Robots inside CC never decrease while the same CC stays the recognizable T2 target.

    Rounds whose configuration admits several equally good components are
    skipped (and counted): no component is singled out there.
    """
    def tracked(c) -> bool:
        return c.task in GROWTH_TASKS and c.ambiguous == 0

    i = 0
    recs = trace.records
    report.ambiguous_rounds += sum(1 for c in contexts if c.task in GROWTH_TASKS and c.ambiguous)
    while i < len(recs):
        ctx = contexts[i]
        if not tracked(ctx):
            i += 1
            continue
        cc = ctx.cc
        j = i
        while j < len(recs) and tracked(contexts[j]) and contexts[j].cc == cc:
            j += 1
        report.growth_runs += 1
        counts = [sum(p in cc for p in recs[t].positions) for t in range(i, j)]
        counts.append(sum(p in cc for p in _after(recs[j - 1])))
        for t in range(1, len(counts)):
            if counts[t] < counts[t - 1]:
                report.monotone_b.append(
                    Violation("monotone-B", recs[i + t - 1].round, f"robots in CC dropped {counts[t - 1]} -> {counts[t]}")
                )
        i = j


def _is_trickle(ctx) -> bool:
    return ctx.task in TRICKLE_TASKS and not ctx.ambiguous


def _rears(ctx) -> frozenset[int]:
    if ctx.task == A.T2_IV:
        return frozenset({ctx.rear})
    return frozenset(rear for _, _, rear in ctx.sides if rear is not None)


def _trickle(trace: ExecutionTrace, contexts: list, report: ConformanceReport) -> None:
    """Rear multiplicities drain monotonically and within one epoch of the episode start.

    An episode is a maximal run of rounds classified as a trickle task on
    overlapping rear vertices. With a fixed activation order every robot acts
    within ``k`` rounds; with a per-epoch order the last rear robot may act as
    late as the end of the epoch after the one the episode started in.
    """
    recs = trace.records
    k = trace.k
    i = 0
    while i < len(recs):
        if not _is_trickle(contexts[i]):
            i += 1
            continue
        rears = _rears(contexts[i])
        j = i + 1
        while j < len(recs) and _is_trickle(contexts[j]) and _rears(contexts[j]) & rears:
            rears = rears | _rears(contexts[j])
            j += 1
        start = recs[i]
        deadline = start.round + k - 1 if trace.adversary == "fixed" else (start.epoch + 1) * k
        report.trickle_episodes += 1
        counts = [sum(p in rears for p in recs[t].positions) for t in range(i, j)]
        counts.append(sum(p in rears for p in _after(recs[j - 1])))
        if any(b > a for a, b in zip(counts, counts[1:])):
            report.trickle.append(Violation("trickle-monotone", start.round, f"rear counts {counts}"))
        if counts[-1]:
            report.trickle.append(
                Violation("trickle-undrained", start.round, f"episode ended with {counts[-1]} robots on {sorted(rears)}")
            )
        elif recs[j - 1].round > deadline:
            report.trickle.append(
                Violation("trickle-deadline", start.round, f"rears {sorted(rears)} drained at {recs[j - 1].round}, deadline {deadline}")
            )
        i = j


def avoiding_distances(g: Graph, orbit: frozenset[int], v: int) -> dict[int, int]:
    """Hop distance to ``v`` on paths that meet ``orbit`` only at ``v``."""
    allowed = (set(range(g.n)) - orbit) | {v}
    return distances_to_set(g, [v], allowed)


def _terminal_progress(g: Graph, trace: ExecutionTrace) -> list[Violation]:
    """In AT.T2 each robot off the target must step strictly closer to it (O-avoiding)."""
    out = []
    orbit = A.terminal_target_orbit(g)
    for rec in trace.records:
        if rec.task != A.AT_T2:
            continue
        (v,) = frozenset(rec.occupied) & orbit
        if rec.move_from == v:
            if rec.move_to != v:
                out.append(Violation("progress", rec.round, f"robot left the gathering vertex {v}"))
            continue
        dist = avoiding_distances(g, orbit, v)
        if dist.get(rec.move_to, 10**9) >= dist.get(rec.move_from, 10**9):
            out.append(Violation("progress", rec.round, f"{rec.move_from}->{rec.move_to} does not approach {v}"))
    return out


def b_bound(g: Graph, orbit: frozenset[int]) -> int:
    """max over v in ``orbit`` and all u of the O-avoiding distance from u to v."""
    best = 0
    for v in orbit:
        dist = avoiding_distances(g, orbit, v)
        if len(dist) != g.n - len(orbit) + 1:
            raise ValueError(f"orbit is not terminal at {v}")
        best = max(best, max(dist.values()))
    return best
