"""``netident`` command line: validate, analyze, patterns, witness, simulate, export."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import engine
from .engine import Status, WitnessKind
from .errors import (
    CycleDetected,
    EvaluationOverflow,
    InvalidGraph,
    InversionUnsupported,
    NetidentError,
    PatternRejected,
    PatternSpaceTooLarge,
    UnknownNode,
    WitnessRefused,
)
from .funclib import DegreeTooHigh, NotSurjective, PurelyLinear, ZeroViolation, random_function_set, validate_class
from .io import Network, NetfileError, dump_network, load_network, to_dot
from .patterns import check_necessary, enumerate_valid_patterns
from .simkit import ExcitationSchedule, impulse_schedule, random_schedule, simulate

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_CYCLE = 4
EXIT_GRAPH = 5
EXIT_COVERAGE = 6
EXIT_ZERO = 7
EXIT_LINEAR = 8
EXIT_SURJECTIVE = 9
EXIT_UNIDENTIFIABLE = 10
EXIT_DEGREE = 11
EXIT_PATTERN = 12
EXIT_REFUSED = 13
EXIT_UNVERIFIED = 14
EXIT_TOO_LARGE = 15
EXIT_OVERFLOW = 16
EXIT_INCONCLUSIVE = 20

SUMMARY_EXIT = {
    Status.IDENTIFIABLE: EXIT_OK,
    Status.UNIDENTIFIABLE: EXIT_UNIDENTIFIABLE,
    Status.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}
VIOLATION_EXIT = {
    ZeroViolation: EXIT_ZERO,
    PurelyLinear: EXIT_LINEAR,
    NotSurjective: EXIT_SURJECTIVE,
    DegreeTooHigh: EXIT_DEGREE,
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def default_seed() -> int:
    raw = os.environ.get("NETIDENT_SEED")
    if raw is None:
        return engine.DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"NETIDENT_SEED must be an integer, got {raw!r}", 2) from None


def _edge_name(net: Network, edge) -> str:
    head, tail = edge
    return f"{net.names[tail - 1]}->{net.names[head - 1]}"


def class_diagnostics(net: Network) -> list[tuple[int, str]]:
    """``(exit code, line-anchored message)`` for each edge function outside the class."""
    out = []
    if net.funcs is None:
        return out
    for edge in sorted(net.funcs):
        violation = validate_class(net.funcs[edge])
        if violation is not None:
            line = net.edge_lines.get(edge)
            where = f"line {line}: " if line else ""
            out.append((VIOLATION_EXIT[type(violation)], f"{where}edge {_edge_name(net, edge)}: {violation}"))
    return out


def coverage_diagnostics(net: Network) -> list[tuple[int, str]]:
    if net.pattern is None:
        return []
    where = f"line {net.pattern_line}: " if net.pattern_line else ""
    label = net.label
    return [
        (EXIT_COVERAGE, f"{where}{v.kind.value}: node {label[v.node]}")
        for v in check_necessary(net.dag, net.pattern).violations
    ]


def _require_class(net: Network) -> None:
    diags = class_diagnostics(net)
    if diags:
        raise CliError("\n".join(m for _, m in diags), diags[0][0])


def _require_pattern(net: Network):
    if net.pattern is None:
        raise CliError("the network file has no pattern section", EXIT_PATTERN)
    return net.pattern


def _funcs(net: Network, seed: int):
    return net.funcs if net.funcs is not None else random_function_set(net.dag, seed)


# -- commands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    net = load_network(args.file)
    diags = class_diagnostics(net) + coverage_diagnostics(net)
    for _, message in diags:
        print(f"{args.file}: {message}", file=sys.stderr)
    if diags:
        return diags[0][0]
    print(f"ok: {net.dag.n} nodes, {len(net.dag.edges)} edges")
    return EXIT_OK


def _print_report(net: Network, report) -> None:
    label = net.label
    print(f"seed: {report.seed}  draws: {report.draws}  functions: {report.functions_source}")
    print(f"summary: {report.summary.value}")
    rows = [(_edge_name(net, e), v.status.value, v.reason) for e, v in sorted(report.per_edge.items())]
    width = max([len(r[0]) for r in rows] + [4])
    vwidth = max([len(r[1]) for r in rows] + [7])
    print(f"{'edge':<{width}}  {'verdict':<{vwidth}}  reason")
    for name, status, reason in rows:
        print(f"{name:<{width}}  {status:<{vwidth}}  {reason}")
    for k, w in enumerate(report.witnesses):
        edges = ", ".join(_edge_name(net, e) for e in w.edges)
        node = "" if w.node is None else f" at node {label[w.node]}"
        print(f"witness {k}: {w.kind.value}{node}; edges {edges}; max deviation {w.max_deviation:.3e}")
        for e in w.edges:
            print(f"  {_edge_name(net, e)}: {w.original[e]}  ->  {w.modified[e]}")
    for note in report.notes:
        print(f"note: {note}")


def cmd_analyze(args) -> int:
    net = load_network(args.file)
    _require_class(net)
    pattern = _require_pattern(net)
    report = engine.analyze(net.dag, pattern, net.funcs, seed=args.seed, draws=args.draws, trials=args.trials, tol=args.tol)
    if args.json:
        print(json.dumps(report.to_dict(net.label), indent=2, sort_keys=False))
    else:
        _print_report(net, report)
    return SUMMARY_EXIT[report.summary]


def cmd_patterns(args) -> int:
    net = load_network(args.file)
    _require_class(net)
    label = net.label
    patterns = enumerate_valid_patterns(net.dag, max_results=args.limit)
    for p in patterns:
        report = engine.analyze(net.dag, p, net.funcs, seed=args.seed, draws=args.draws, trials=args.trials, tol=args.tol)
        excited = ",".join(label[i] for i in sorted(p.excited))
        measured = ",".join(label[i] for i in sorted(p.measured))
        print(f"excited={{{excited}}} measured={{{measured}}}  {report.summary.value}")
    print(f"{len(patterns)} pattern(s)")
    return EXIT_OK


def _node_id(net: Network, name):
    return None if name is None else net.node(name)


def cmd_witness(args) -> int:
    net = load_network(args.file)
    _require_class(net)
    pattern = _require_pattern(net)
    funcs = _funcs(net, args.seed)
    witness = engine.build_witness(
        args.kind, net.dag, funcs, pattern, node=_node_id(net, args.node), gamma=args.gamma,
        seed=args.seed, trials=args.trials, tol=args.tol,
    )
    out = Network(net.names, net.dag, witness.modified, net.pattern)
    text = dump_network(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    edges = ", ".join(_edge_name(net, e) for e in witness.edges)
    status = "verified" if witness.verified else "NOT verified"
    print(f"{witness.kind.value}: {status}; edges {edges}; max deviation {witness.max_deviation:.3e} "
          f"over {args.trials} schedules (tol {args.tol:g})", file=sys.stderr)
    return EXIT_OK if witness.verified else EXIT_UNVERIFIED


def cmd_simulate(args) -> int:
    net = load_network(args.file)
    _require_class(net)
    pattern = _require_pattern(net)
    funcs = _funcs(net, args.seed)
    if args.impulse:
        sched = impulse_schedule(sorted(pattern.excited), args.horizon)
    else:
        sched = random_schedule(pattern, args.horizon, np.random.default_rng(args.seed))
    traj = simulate(net.dag, funcs, sched)
    text = traj.to_csv(net.label)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_export(args) -> int:
    net = load_network(args.file)
    sys.stdout.write(to_dot(net) if args.dot else dump_network(net))
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netident", description="Identifiability analysis for nonlinear networks on DAGs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, seeded=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="network file (YAML)")
        if seeded:
            p.add_argument("--seed", type=int, default=None, help="random seed (default 42, or NETIDENT_SEED)")
        p.set_defaults(func=func)
        return p

    def verification(p):
        p.add_argument("--draws", type=int, default=engine.DEFAULT_DRAWS, help="genericity probe points per node")
        p.add_argument("--trials", type=int, default=engine.DEFAULT_TRIALS, help="random schedules per witness check")
        p.add_argument("--tol", type=float, default=engine.DEFAULT_TOL, help="witness equality tolerance")

    command("validate", cmd_validate, "check a network file", seeded=False)
    p = command("analyze", cmd_analyze, "per-edge identifiability verdicts")
    verification(p)
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p = command("patterns", cmd_patterns, "enumerate minimal valid patterns with their verdicts")
    verification(p)
    p.add_argument("--limit", type=int, default=None, help="stop after N patterns")
    p = command("witness", cmd_witness, "build and verify an unidentifiability witness")
    verification(p)
    p.add_argument("--kind", required=True, choices=[k.value for k in WitnessKind])
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--node", default=None, help="node name the construction applies to")
    p.add_argument("--out", default=None, help="write the modified network here instead of stdout")
    p = command("simulate", cmd_simulate, "simulate and print a CSV trajectory")
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--impulse", action="store_true", help="unit impulse on each excited node instead of random inputs")
    p.add_argument("--out", default=None)
    p = command("export", cmd_export, "print the network as normalized YAML or Graphviz DOT", seeded=False)
    p.add_argument("--dot", action="store_true")
    return parser


def _error_code(exc: Exception) -> int:
    # order matters: CyclicNetwork is both a parse error and a cycle
    for cls, code in (
        (CycleDetected, EXIT_CYCLE),
        (NetfileError, EXIT_PARSE),
        (InvalidGraph, EXIT_GRAPH),
        (UnknownNode, EXIT_PATTERN),
        (PatternRejected, EXIT_PATTERN),
        (PatternSpaceTooLarge, EXIT_TOO_LARGE),
        (WitnessRefused, EXIT_REFUSED),
        (InversionUnsupported, EXIT_REFUSED),
        (EvaluationOverflow, EXIT_OVERFLOW),
    ):
        if isinstance(exc, cls):
            return code
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = default_seed()
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NetidentError as exc:
        kind = "refused" if isinstance(exc, (WitnessRefused, InversionUnsupported)) else "error"
        print(f"{kind}: {exc}", file=sys.stderr)
        return _error_code(exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
