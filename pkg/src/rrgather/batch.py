"""Suite runner: analysis expectations and simulation sweeps with invariant checks.

A suite is a JSON document::

    {"schema": "rrgather.suite/1", "master_seed": 7, "cases": [...]}

Each case names a graph (``family`` + ``params`` [+ ``seeds`` for random
families], or ``graph_file``) and a ``kind``:

``analyze``
    checks ``expect`` keys against the terminal-orbit report.
``simulate``
    runs every (placement, seed, adversary) combination and applies the
    invariant checks that fit the chosen algorithm.
"""

from __future__ import annotations

import json
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable

from . import __version__
from .algorithms import PreconditionError, pick_algorithm, terminal_target_orbit
from .generators import RNG_NAME, build_family
from .graph import Graph, diameter, read_graph
from .orbits import terminal_report
from .sim import Adversary, default_epoch_cap, lower_bound_epochs, run, snapshot
from .transitions import b_bound, check_trace

SUITE_SCHEMA = "rrgather.suite/1"
REPORT_SCHEMA = "rrgather.report/1"

ALL_CHECKS = ("gathered", "lower_bound", "b_bound", "table", "monotone_b", "trickle", "progress", "equivariance")


class SuiteError(ValueError):
    """Malformed suite document."""


@dataclass(frozen=True)
class GraphSource:
    label: str
    family: str | None = None
    params: tuple = ()
    seed: int | None = None
    path: str | None = None

    def build(self) -> Graph:
        if self.path is not None:
            return read_graph(self.path)
        assert self.family is not None
        return build_family(self.family, [str(p) for p in self.params], self.seed)

    def to_dict(self) -> dict:
        if self.path is not None:
            return {"graph_file": self.path}
        out: dict[str, Any] = {"family": self.family, "params": list(self.params)}
        if self.seed is not None:
            out["seed"] = self.seed
            out["rng"] = RNG_NAME
        return out


def _sources(case: dict) -> list[GraphSource]:
    if "graph_file" in case:
        return [GraphSource(case["graph_file"], path=case["graph_file"])]
    if "family" not in case:
        raise SuiteError("case needs 'family' or 'graph_file'")
    fam, params = case["family"], tuple(case.get("params", []))
    seeds = case.get("seeds")
    base = f"{fam}({','.join(map(str, params))})"
    if fam.startswith("random"):
        return [GraphSource(f"{base}#{s}", fam, params, s) for s in (seeds or [0])]
    return [GraphSource(base, fam, params)]


def random_placement(g: Graph, k: int, seed: int, multiplicity: bool) -> list[int]:
    """``k`` robots on at least two vertices; with ``multiplicity`` robot 1 shares robot 0's vertex."""
    if k < 2 or g.n < 2:
        raise SuiteError("placements need k >= 2 robots and n >= 2 vertices")
    rng = random.Random(seed)
    while True:
        pos = [rng.randrange(g.n) for _ in range(k)]
        if multiplicity and k >= 3:
            pos[1] = pos[0]
        if len(set(pos)) >= 2:
            return pos


# ---------------------------------------------------------------------------
# analysis cases


def analyze_graph(g: Graph) -> dict:
    report = terminal_report(g)
    orbits = report.orbits
    return {
        "n": g.n,
        "m": g.m,
        "vertex_transitive": report.vertex_transitive,
        "orbits": [sorted(o) for o in orbits.orbits],
        "terminal": None if report.vertex_transitive else list(report.terminal),
        "predicates": dict(report.predicates),
    }


def _check_expect(info: dict, expect: dict) -> list[str]:
    bad = []
    for key, want in expect.items():
        if key == "orbit_count":
            got = len(info["orbits"])
        elif key == "terminal_count":
            got = sum(info["terminal"] or [])
        elif key == "has_terminal":
            got = bool(info["terminal"] and any(info["terminal"]))
        elif key == "orbit_sizes":
            got = sorted(len(o) for o in info["orbits"])
            want = sorted(want)
        elif key == "predicates_imply_terminal":
            # vacuous on vertex-transitive graphs, which have no terminal question
            got = (info["vertex_transitive"] or not any(info["predicates"].values())
                   or bool(info["terminal"] and any(info["terminal"])))
        elif key in info:
            got = info[key]
        else:
            bad.append(f"unknown expectation {key!r}")
            continue
        if got != want:
            bad.append(f"{key}: expected {want!r}, got {got!r}")
    return bad


def run_analysis_case(index: int, case: dict) -> list[dict]:
    out = []
    for src in _sources(case):
        info = analyze_graph(src.build())
        bad = _check_expect(info, case.get("expect", {}))
        out.append({"case": index, "kind": "analyze", "graph": src.label, "source": src.to_dict(),
                    "result": info, "failures": bad, "pass": not bad})
    return out


# ---------------------------------------------------------------------------
# simulation cases


@dataclass(frozen=True)
class RunSpec:
    case: int
    source: GraphSource
    placement: tuple[int, ...]
    seed: int
    adversary: str
    algo: str
    max_epochs: int | None
    checks: tuple[str, ...]


def _run_specs(index: int, case: dict, master: random.Random) -> list[RunSpec]:
    seeds = case.get("seeds_adversary") or [master.randrange(2**31) for _ in range(case.get("n_seeds", 5))]
    modes = case.get("adversaries", ["fixed", "per-epoch"])
    checks = tuple(case.get("checks", ALL_CHECKS))
    unknown = set(checks) - set(ALL_CHECKS)
    if unknown:
        raise SuiteError(f"unknown checks {sorted(unknown)}")
    specs = []
    for src in _sources(case):
        g = src.build()
        placements = [tuple(p) for p in case.get("placements", [])]
        for ps in case.get("placement_seeds", []):
            placements.append(tuple(random_placement(g, case.get("robots", 4), ps, case.get("multiplicity", True))))
        if not placements:
            raise SuiteError(f"case {index} has no placements")
        for p in placements:
            for s in seeds:
                for mode in modes:
                    specs.append(RunSpec(index, src, p, s, mode, case.get("algo", "auto"),
                                         case.get("max_epochs"), checks))
    return specs


def execute(spec: RunSpec) -> dict:
    """One simulation with every requested check; never raises on algorithm failure."""
    g = spec.source.build()
    pos = list(spec.placement)
    c0 = snapshot(pos, g)
    row: dict[str, Any] = {
        "case": spec.case, "kind": "simulate", "graph": spec.source.label, "source": spec.source.to_dict(),
        "n": g.n, "diam": diameter(g), "placement": pos, "seed": spec.seed, "adversary": spec.adversary,
        "initial_occ": c0.occ, "initial_delta": c0.delta,
        "cap": spec.max_epochs or default_epoch_cap(g, pos),
    }
    checks: dict[str, bool] = {}
    failures: list[str] = []
    try:
        alg = pick_algorithm(g, spec.algo)
        trace = run(g, pos, alg, Adversary(spec.seed, spec.adversary), spec.max_epochs,
                    check_equivariance="equivariance" in spec.checks)
    except (PreconditionError, RuntimeError, AssertionError) as exc:
        row.update(algorithm=spec.algo, outcome="error", epochs=None, checks={"run": False},
                   failures=[f"{type(exc).__name__}: {exc}"], **{"pass": False})
        return row
    row.update(algorithm=trace.algorithm, outcome=trace.outcome, epochs=trace.epochs, rounds=trace.rounds)

    if "gathered" in spec.checks:
        checks["gathered"] = trace.gathered
    if "lower_bound" in spec.checks and trace.gathered and c0.delta > 0:
        checks["lower_bound"] = trace.epochs >= lower_bound_epochs(c0.delta)
    if "b_bound" in spec.checks and trace.algorithm == "terminal":
        bound = b_bound(g, terminal_target_orbit(g))
        row["b_bound"] = bound
        checks["b_bound"] = trace.epochs <= 2 + bound
    conf = check_trace(g, trace)
    if "table" in spec.checks:
        checks["table"] = not conf.transitions and not conf.classification
    if trace.algorithm == "nonterminal":
        if "monotone_b" in spec.checks:
            checks["monotone_b"] = not conf.monotone_b
        if "trickle" in spec.checks:
            checks["trickle"] = not conf.trickle
        row["trickle_episodes"] = conf.trickle_episodes
        row["ambiguous_rounds"] = conf.ambiguous_rounds
    elif "progress" in spec.checks:
        checks["progress"] = not conf.progress
    row["edges_seen"] = conf.edges_seen
    failures.extend(f"{v.kind}@{v.round}: {v.detail}" for v in conf.all_violations())
    if trace.equivariance is not None:
        eq = trace.equivariance
        row["equivariance"] = {"checks": eq.checks, "identical": eq.identical, "equivalent": eq.equivalent,
                               "failures": len(eq.failures)}
        checks["equivariance"] = not eq.failures
    row["checks"] = checks
    row["failures"] = failures
    row["pass"] = all(checks.values())
    return row


# ---------------------------------------------------------------------------
# aggregation


def scaling_fit(points: Iterable[tuple[float, float]]) -> dict | None:
    """Least-squares line of epochs against occ*Delta + |V|."""
    pts = list(points)
    xs = [x for x, _ in pts]
    if len(set(xs)) < 2:
        return None
    slope, intercept = statistics.linear_regression(xs, [y for _, y in pts])
    return {"points": len(pts), "slope": slope, "intercept": intercept,
            "max_ratio": max(y / x for x, y in pts if x > 0)}


def summarize(rows: list[dict]) -> dict:
    sims = [r for r in rows if r["kind"] == "simulate"]
    check_totals: dict[str, dict[str, int]] = {}
    for r in sims:
        for name, ok in r.get("checks", {}).items():
            slot = check_totals.setdefault(name, {"pass": 0, "fail": 0})
            slot["pass" if ok else "fail"] += 1
    eq_checks = sum(r.get("equivariance", {}).get("checks", 0) for r in sims)
    eq_ident = sum(r.get("equivariance", {}).get("identical", 0) for r in sims)
    eq_equiv = sum(r.get("equivariance", {}).get("equivalent", 0) for r in sims)
    gathered = [r for r in sims if r.get("outcome") == "gathered"]
    points = [(r["initial_occ"] * r["initial_delta"] + r["n"], r["epochs"]) for r in gathered]
    by_algo: dict[str, list[int]] = {}
    for r in gathered:
        by_algo.setdefault(r["algorithm"], []).append(r["epochs"])
    return {
        "cases": len({r["case"] for r in rows}),
        "rows": len(rows),
        "passed": sum(1 for r in rows if r["pass"]),
        "failed": sum(1 for r in rows if not r["pass"]),
        "analyses": sum(1 for r in rows if r["kind"] == "analyze"),
        "simulations": len(sims),
        "checks": check_totals,
        "equivariance": {"checks": eq_checks, "identical": eq_ident, "equivalent": eq_equiv},
        "epochs": {a: {"runs": len(v), "mean": statistics.fmean(v), "max": max(v)} for a, v in sorted(by_algo.items())},
        "scaling": scaling_fit(points),
    }


def load_suite(path: str) -> dict:
    with open(path) as fh:
        suite = json.load(fh)
    if suite.get("schema") != SUITE_SCHEMA:
        raise SuiteError(f"expected schema {SUITE_SCHEMA!r}, got {suite.get('schema')!r}")
    if not isinstance(suite.get("cases"), list):
        raise SuiteError("suite needs a 'cases' list")
    return suite


def run_suite(suite: dict, jobs: int = 1) -> dict:
    """Run all cases; ``jobs > 1`` fans simulations out to worker processes.

    Adversary seeds not given explicitly come from ``master_seed`` in case
    order, so the report does not depend on ``jobs``.
    """
    master = random.Random(suite.get("master_seed", 0))
    rows: list[dict] = []
    specs: list[RunSpec] = []
    for i, case in enumerate(suite["cases"]):
        kind = case.get("kind", "simulate")
        if kind == "analyze":
            rows.extend(run_analysis_case(i, case))
        elif kind == "simulate":
            specs.extend(_run_specs(i, case, master))
        else:
            raise SuiteError(f"unknown case kind {kind!r}")
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows.extend(pool.map(execute, specs, chunksize=max(1, len(specs) // (4 * jobs))))
    else:
        rows.extend(execute(s) for s in specs)
    return {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "suite": suite.get("name", ""),
        "master_seed": suite.get("master_seed", 0),
        "summary": summarize(rows),
        "runs": rows,
    }
