"""YAML network files.

A document looks like::

    netident: 1
    nodes: [a, b, c]
    edges:
      - {tail: a, head: b, delay: 1, coefficients: [0.0, 0.0, 1.0]}
      - {tail: b, head: c}
    pattern:
      excited: [a]
      measured: [b, c]

``coefficients`` lists ``a_1, a_2, ...`` and must be given on every edge or on
none. ``delay`` defaults to 1 and ``pattern`` is optional. Node names are kept
as strings; node ``k`` in memory is the ``k``-th name in ``nodes``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from ..errors import CycleDetected, NetidentError
from ..funclib import EdgeFunction, FunctionSet
from ..graph import Dag
from ..patterns import IdentificationPattern

FORMAT_VERSION = 1
_TOP = ("netident", "nodes", "edges", "pattern")
_EDGE = ("tail", "head", "delay", "coefficients")
_PATTERN = ("excited", "measured")


class NetfileError(NetidentError):
    """Malformed document; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str = "<network>"):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        NetidentError.__init__(self, self.located())

    def located(self) -> str:
        if self.line is None:
            return f"{self.source}: {self.message}"
        return f"{self.source}:{self.line}:{self.column}: {self.message}"


class CyclicNetwork(NetfileError, CycleDetected):
    def __init__(self, cycle_nodes, message: str, line: int | None, source: str):
        self.cycle_nodes = tuple(cycle_nodes)
        NetfileError.__init__(self, message, line, 1 if line else None, source)


@dataclass
class Network:
    """In-memory model of a network file."""

    names: tuple[str, ...]
    dag: Dag
    funcs: FunctionSet | None = None
    pattern: IdentificationPattern | None = None
    # (head, tail) -> 1-based line of the edge entry; not part of the model
    edge_lines: dict[tuple[int, int], int] = field(default_factory=dict, compare=False, repr=False)
    pattern_line: int | None = field(default=None, compare=False, repr=False)

    @property
    def label(self) -> dict[int, str]:
        return {k + 1: name for k, name in enumerate(self.names)}

    def node(self, name: str) -> int:
        try:
            return self.names.index(str(name)) + 1
        except ValueError:
            raise NetfileError(f"unknown node {name!r}") from None


class _MarkedDict(dict):
    mark = None
    key_marks: dict


class _MarkedList(list):
    mark = None
    item_marks: list


class _Loader(yaml.SafeLoader):
    pass


def _mapping(loader, node):
    loader.flatten_mapping(node)
    out = _MarkedDict()
    out.mark = node.start_mark
    out.key_marks = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        if key in out:
            raise NetfileError(f"duplicate key {key!r}", key_node.start_mark.line + 1, key_node.start_mark.column + 1)
        out[key] = loader.construct_object(value_node, deep=True)
        out.key_marks[key] = value_node.start_mark
    return out


def _sequence(loader, node):
    out = _MarkedList(loader.construct_object(child, deep=True) for child in node.value)
    out.mark = node.start_mark
    out.item_marks = [child.start_mark for child in node.value]
    return out


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _mapping)
_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_SEQUENCE_TAG, _sequence)


def _line(mark) -> tuple[int | None, int | None]:
    return (mark.line + 1, mark.column + 1) if mark is not None else (None, None)


class _Parser:
    def __init__(self, source: str):
        self.source = source

    def fail(self, message: str, mark=None):
        line, col = _line(mark)
        raise NetfileError(message, line, col, self.source)

    def mapping(self, value, allowed, mark, what: str) -> _MarkedDict:
        if not isinstance(value, dict):
            self.fail(f"{what} must be a mapping", mark)
        for key in value:
            if key not in allowed:
                self.fail(f"unknown field {key!r} in {what}; allowed: {', '.join(allowed)}", value.key_marks.get(key, mark))
        return value

    def sequence(self, value, mark, what: str) -> _MarkedList:
        if not isinstance(value, list):
            self.fail(f"{what} must be a list", mark)
        return value

    def parse(self, text: str) -> Network:
        try:
            doc = yaml.load(text, Loader=_Loader)
        except NetfileError as exc:
            raise NetfileError(exc.message, exc.line, exc.column, self.source) from None
        except yaml.MarkedYAMLError as exc:
            line, col = _line(exc.problem_mark)
            raise NetfileError(f"YAML syntax error: {exc.problem}", line, col, self.source) from None
        except yaml.YAMLError as exc:
            raise NetfileError(f"YAML error: {exc}", source=self.source) from None
        if doc is None:
            self.fail("empty document")
        doc = self.mapping(doc, _TOP, getattr(doc, "mark", None), "document")
        for key in ("netident", "nodes", "edges"):
            if key not in doc:
                self.fail(f"missing required field {key!r}", doc.mark)
        if doc["netident"] != FORMAT_VERSION:
            self.fail(f"unsupported format version {doc['netident']!r}; expected {FORMAT_VERSION}", doc.key_marks["netident"])

        raw_nodes = self.sequence(doc["nodes"], doc.key_marks["nodes"], "nodes")
        if not raw_nodes:
            self.fail("nodes must not be empty", doc.key_marks["nodes"])
        names: list[str] = []
        for name, mark in zip(raw_nodes, raw_nodes.item_marks):
            if isinstance(name, (dict, list)) or name is None:
                self.fail("node names must be scalars", mark)
            if str(name) in names:
                self.fail(f"duplicate node name {str(name)!r}", mark)
            names.append(str(name))
        index = {name: k + 1 for k, name in enumerate(names)}

        def node_id(value, mark) -> int:
            if isinstance(value, (dict, list)) or value is None or str(value) not in index:
                self.fail(f"unknown node {value!r}", mark)
            return index[str(value)]

        raw_edges = self.sequence(doc["edges"] if doc["edges"] is not None else _MarkedList(), doc.key_marks["edges"], "edges")
        triples = []
        coeffs: dict[tuple[int, int], EdgeFunction] = {}
        lines: dict[tuple[int, int], int] = {}
        with_coeffs = set()
        for entry, mark in zip(raw_edges, getattr(raw_edges, "item_marks", [])):
            entry = self.mapping(entry, _EDGE, mark, "edge")
            for key in ("tail", "head"):
                if key not in entry:
                    self.fail(f"edge is missing {key!r}", mark)
            tail = node_id(entry["tail"], entry.key_marks["tail"])
            head = node_id(entry["head"], entry.key_marks["head"])
            delay = entry.get("delay", 1)
            if isinstance(delay, bool) or not isinstance(delay, int) or delay < 1:
                self.fail(f"delay must be an integer >= 1, got {delay!r}", entry.key_marks.get("delay", mark))
            if (head, tail) in lines:
                self.fail(f"duplicate edge {names[tail - 1]} -> {names[head - 1]}", mark)
            lines[(head, tail)] = mark.line + 1
            triples.append((head, tail, delay))
            if with_coeffs and ("coefficients" in entry) not in with_coeffs:
                self.fail("coefficients must be given on every edge or on none", mark)
            with_coeffs.add("coefficients" in entry)
            if "coefficients" in entry:
                cmark = entry.key_marks["coefficients"]
                values = self.sequence(entry["coefficients"], cmark, "coefficients")
                if not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in values):
                    self.fail("coefficients must be numbers", cmark)
                try:
                    coeffs[(head, tail)] = EdgeFunction(tuple(float(c) for c in values))
                except ValueError as exc:
                    self.fail(str(exc), cmark)

        try:
            dag = Dag(len(names), triples)
        except CycleDetected as exc:
            cyc = set(exc.cycle_nodes)
            line = min((ln for (h, t), ln in lines.items() if h in cyc and t in cyc), default=None)
            cycle = " -> ".join(names[i - 1] for i in exc.cycle_nodes)
            raise CyclicNetwork(exc.cycle_nodes, f"directed cycle through {cycle}", line, self.source) from None

        pattern = None
        pattern_line = None
        if doc.get("pattern") is not None:
            pmark = doc.key_marks["pattern"]
            raw = self.mapping(doc["pattern"], _PATTERN, pmark, "pattern")
            sets = {}
            for key in _PATTERN:
                values = raw.get(key, _MarkedList())
                kmark = raw.key_marks.get(key, pmark)
                values = self.sequence(values if values is not None else _MarkedList(), kmark, f"pattern.{key}")
                marks = getattr(values, "item_marks", [kmark] * len(values))
                sets[key] = frozenset(node_id(v, m) for v, m in zip(values, marks))
            pattern = IdentificationPattern(sets["excited"], sets["measured"])
            pattern_line = pmark.line + 1
        funcs = coeffs if with_coeffs == {True} else None
        return Network(tuple(names), dag, funcs, pattern, lines, pattern_line)


def parse_network(text: str, source: str = "<network>") -> Network:
    return _Parser(source).parse(text)


def load_network(path) -> Network:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise NetfileError(f"cannot read file: {exc.strerror}", source=str(path)) from None
    return parse_network(text, str(path))


def to_document(net: Network) -> dict:
    names = net.names
    edges = []
    for head, tail, delay in net.dag.edges:
        entry: dict = {"tail": names[tail - 1], "head": names[head - 1], "delay": delay}
        if net.funcs is not None:
            entry["coefficients"] = [float(c) for c in net.funcs[(head, tail)].coefficients]
        edges.append(entry)
    doc: dict = {"netident": FORMAT_VERSION, "nodes": list(names), "edges": edges}
    if net.pattern is not None:
        doc["pattern"] = {
            "excited": [names[i - 1] for i in sorted(net.pattern.excited)],
            "measured": [names[i - 1] for i in sorted(net.pattern.measured)],
        }
    return doc


def dump_network(net: Network) -> str:
    return yaml.safe_dump(to_document(net), sort_keys=False, default_flow_style=None)


def network_from(dag: Dag, funcs: FunctionSet | None = None, pattern: IdentificationPattern | None = None,
                 names=None) -> Network:
    names = tuple(str(x) for x in (names or dag.nodes))
    return Network(names, dag, dict(funcs) if funcs is not None else None, pattern)
