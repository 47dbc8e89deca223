"""Identification patterns: which nodes are excited and which are measured."""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum

from .errors import PatternRejected, PatternSpaceTooLarge
from .graph import Dag

MAX_ENUMERATION_NODES = 20


@dataclass(frozen=True)
class IdentificationPattern:
    """Excited set and measured set. A node may be in both."""

    excited: frozenset[int] = field(default_factory=frozenset)
    measured: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "excited", frozenset(int(i) for i in self.excited))
        object.__setattr__(self, "measured", frozenset(int(i) for i in self.measured))

    @classmethod
    def of(cls, excited: Iterable[int] = (), measured: Iterable[int] = ()) -> IdentificationPattern:
        return cls(frozenset(excited), frozenset(measured))

    def __str__(self) -> str:
        return f"(excited={sorted(self.excited)}, measured={sorted(self.measured)})"


class ViolationKind(str, Enum):
    UNEXCITED_SOURCE = "UnexcitedSource"
    UNMEASURED_SINK = "UnmeasuredSink"
    UNCOVERED = "Uncovered"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    node: int

    def __str__(self) -> str:
        return f"{self.kind.value}({self.node})"


@dataclass(frozen=True)
class NecessaryCheckResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def count_actions(pattern: IdentificationPattern) -> int:
    return len(pattern.excited) + len(pattern.measured)


def check_necessary(dag: Dag, pattern: IdentificationPattern) -> NecessaryCheckResult:
    """Sources must be excited, sinks measured, and every node excited or measured."""
    for node in pattern.excited | pattern.measured:
        dag._check(node)
    violations = []
    for node in dag.nodes:
        if node in dag.sources and node not in pattern.excited:
            violations.append(Violation(ViolationKind.UNEXCITED_SOURCE, node))
        if node in dag.sinks and node not in pattern.measured:
            violations.append(Violation(ViolationKind.UNMEASURED_SINK, node))
        if node not in pattern.excited and node not in pattern.measured:
            violations.append(Violation(ViolationKind.UNCOVERED, node))
    return NecessaryCheckResult(tuple(violations))


def canonical_full_excitation(dag: Dag) -> IdentificationPattern:
    """Measure the sinks, excite everything else."""
    sinks = dag.sinks
    return IdentificationPattern(frozenset(dag.nodes) - sinks, sinks)


def reduce_to_full_measurement(pattern: IdentificationPattern, dag: Dag) -> IdentificationPattern:
    """``(N^e, N^m) -> (N^e, V)``; identifiability is unchanged for patterns that pass
    the necessary checks, so the rest of the analysis may assume every node is measured."""
    result = check_necessary(dag, pattern)
    if not result.ok:
        raise PatternRejected(
            "full-measurement reduction requires a pattern that passes the necessary checks; "
            f"violations: {', '.join(map(str, result.violations))}"
        )
    return IdentificationPattern(pattern.excited, frozenset(dag.nodes))


def strip_redundant_measurements(pattern: IdentificationPattern) -> IdentificationPattern:
    """Drop measurements of nodes that are also excited."""
    return IdentificationPattern(pattern.excited, pattern.measured - pattern.excited)


def enumerate_valid_patterns(dag: Dag, max_results: int | None = None) -> list[IdentificationPattern]:
    """All patterns with exactly ``n`` actions that pass the necessary checks.

    Sources are always excited and sinks always measured; each interior node is
    either excited or measured. Patterns come in descending lexicographic order of
    the excited indicator vector ``(1 in N^e, 2 in N^e, ...)``, so the canonical
    full-excitation pattern is first.
    """
    if dag.n > MAX_ENUMERATION_NODES:
        raise PatternSpaceTooLarge(
            f"{dag.n} nodes exceeds the enumeration limit of {MAX_ENUMERATION_NODES}; "
            "analyze specific patterns instead"
        )
    sources, sinks = dag.sources, dag.sinks
    if sources & sinks:
        return []
    interior = [i for i in dag.nodes if i not in sources and i not in sinks]
    out = []
    for choice in itertools.product((True, False), repeat=len(interior)):
        excited = set(sources) | {node for node, ex in zip(interior, choice) if ex}
        measured = set(sinks) | {node for node, ex in zip(interior, choice) if not ex}
        out.append(IdentificationPattern(frozenset(excited), frozenset(measured)))
        if max_results is not None and len(out) >= max_results:
            break
    return out
