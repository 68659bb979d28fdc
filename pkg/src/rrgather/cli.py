"""``rrgather`` command line: analyze, generate, simulate, batch, check-trace.

Exit codes: 0 everything passed, 1 an invariant or run failed, 2 bad input.
Relative output paths resolve against ``$RRGATHER_OUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .algorithms import PreconditionError, pick_algorithm
from .batch import SuiteError, load_suite, run_suite
from .canon import canonical_form
from .generators import build_family
from .graph import Graph, GraphError, format_graph, read_graph
from .orbits import terminal_report
from .sim import TRACE_SCHEMA, Adversary, ExecutionTrace, Simulator, lower_bound_epochs
from .transitions import check_trace

OUT_DIR_ENV = "RRGATHER_OUT_DIR"
ANALYZE_SCHEMA = "rrgather.analyze/1"
CHECK_SCHEMA = "rrgather.check/1"

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _out_path(name: str) -> Path:
    p = Path(name)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(doc: dict, dest: str | None) -> None:
    text = _dump(doc)
    if dest:
        _out_path(dest).write_text(text)
    else:
        sys.stdout.write(text)


def _load_graph(path: str) -> Graph:
    try:
        return read_graph(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    report = terminal_report(g)
    form = canonical_form(g)
    orbits = []
    for i, orbit in enumerate(report.orbits.orbits):
        entry = {"index": i, "vertices": sorted(orbit), "min_label": report.orbits.min_label(i)}
        if not report.vertex_transitive:
            entry["terminal"] = report.terminal[i]
            if i in report.witnesses:
                u, v, _ = report.witnesses[i]
                entry["witness"] = {"u": u, "v": v}
        orbits.append(entry)
    doc = {
        "schema": ANALYZE_SCHEMA,
        "graph": args.graph,
        "n": g.n,
        "m": g.m,
        "certificate": form.hex(),
        "vertex_transitive": report.vertex_transitive,
        "has_terminal": None if report.vertex_transitive else report.has_terminal,
        "orbits": orbits,
        "predicates": report.predicates,
    }
    _emit(doc, args.output)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        g = build_family(args.family, args.params, args.seed)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad parameters for {args.family}: {exc}") from None
    text = format_graph(g)
    if args.output:
        _out_path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_robots(spec: str, g: Graph) -> list[int]:
    try:
        pos = [int(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--robots expects comma-separated vertex ids, got {spec!r}") from None
    if not pos:
        raise InputError("--robots needs at least one vertex")
    bad = [v for v in pos if not 0 <= v < g.n]
    if bad:
        raise InputError(f"robot vertices {bad} outside 0..{g.n - 1}")
    return pos


def cmd_simulate(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    pos = _parse_robots(args.robots, g)
    try:
        alg = pick_algorithm(g, args.algo)
    except PreconditionError as exc:
        raise InputError(str(exc)) from None
    if args.max_epochs is not None and args.max_epochs < 1:
        raise InputError("--max-epochs must be >= 1")
    sim = Simulator(g, pos, alg, Adversary(args.seed, args.adversary), args.max_epochs,
                    check_equivariance=args.check_equivariance)
    trace = sim.run()
    conf = check_trace(g, trace) if trace.gathered else None
    lb_ok = not trace.gathered or trace.initial_delta == 0 or trace.epochs >= lower_bound_epochs(trace.initial_delta)
    doc = trace.to_dict(g)
    doc["manifest"] = {
        "graph_file": args.graph,
        "robots": pos,
        "algo": args.algo,
        "seed": args.seed,
        "adversary": args.adversary,
        "max_epochs": sim.max_epochs,
        "tool_version": __version__,
    }
    if args.trace:
        _out_path(args.trace).write_text(_dump(doc))
    eq = ""
    if trace.equivariance is not None:
        e = trace.equivariance
        eq = f" equivariance={e.equivalent}/{e.checks} identical={e.identical}"
    table = "n/a" if conf is None else ("ok" if not conf.transitions else f"{len(conf.transitions)} violations")
    print(
        f"outcome={trace.outcome} algorithm={trace.algorithm} epochs={trace.epochs} rounds={trace.rounds} "
        f"occ0={trace.initial_occ} delta0={trace.initial_delta} cap={sim.max_epochs} "
        f"lower_bound={'ok' if lb_ok else 'VIOLATED'} table={table}{eq}"
    )
    failed = not trace.gathered or not lb_ok or (trace.equivariance is not None and trace.equivariance.failures)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_batch(args: argparse.Namespace) -> int:
    try:
        suite = load_suite(args.suite)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot load suite {args.suite}: {exc}") from None
    report = run_suite(suite, jobs=args.jobs)
    if args.output:
        _emit(report, args.output)
    s = report["summary"]
    for name, tally in sorted(s["checks"].items()):
        print(f"check {name}: {tally['pass']} pass, {tally['fail']} fail")
    if s["scaling"]:
        sc = s["scaling"]
        print(f"scaling: slope={sc['slope']:.4f} intercept={sc['intercept']:.3f} over {sc['points']} runs")
    print(f"suite {suite.get('name', args.suite)}: {s['passed']}/{s['rows']} passed")
    return EXIT_OK if s["failed"] == 0 else EXIT_FAIL


def cmd_check_trace(args: argparse.Namespace) -> int:
    try:
        data = json.loads(Path(args.trace).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot load trace {args.trace}: {exc}") from None
    if data.get("schema") != TRACE_SCHEMA:
        raise InputError(f"{args.trace} is not a {TRACE_SCHEMA} document")
    if args.graph:
        g = _load_graph(args.graph)
    elif "graph" in data:
        gd = data["graph"]
        g = Graph.from_edges(gd["n"], [tuple(e) for e in gd["edges"]], gd.get("colors"))
    else:
        raise InputError("trace has no embedded graph; pass --graph")
    trace = ExecutionTrace.from_dict(data)
    report = check_trace(g, trace)
    doc = {"schema": CHECK_SCHEMA, "trace": args.trace, "algorithm": trace.algorithm, **report.to_dict()}
    _emit(doc, args.output)
    return EXIT_OK if report.ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rrgather", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="orbits, terminal flags and structural predicates of a graph")
    a.add_argument("graph")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("generate", help="write a graph family instance in the edge-list format")
    g.add_argument("family")
    g.add_argument("params", nargs="*")
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("simulate", help="run a gathering algorithm under Round-Robin")
    s.add_argument("graph")
    s.add_argument("--robots", required=True, help="comma-separated start vertices, repeats allowed")
    s.add_argument("--algo", choices=("auto", "terminal", "nonterminal"), default="auto")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--adversary", choices=("fixed", "per-epoch"), default="fixed")
    s.add_argument("--max-epochs", type=int)
    s.add_argument("--trace")
    s.add_argument("--check-equivariance", action="store_true")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("batch", help="run a suite file and aggregate the results")
    b.add_argument("suite")
    b.add_argument("-o", "--output")
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_batch)

    c = sub.add_parser("check-trace", help="transition and invariant checks on a saved trace")
    c.add_argument("trace")
    c.add_argument("--graph")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_check_trace)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GraphError, SuiteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
