"""Graphviz export. Excited nodes are white, measured nodes gray, nodes with both roles half-filled."""

from __future__ import annotations

from .netfile import Network


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def node_style(net: Network, node: int) -> str:
    p = net.pattern
    excited = p is not None and node in p.excited
    measured = p is not None and node in p.measured
    if excited and measured:
        return 'style=wedged, fillcolor="white:gray"'
    if measured:
        return "style=filled, fillcolor=gray"
    return "style=filled, fillcolor=white"


def to_dot(net: Network) -> str:
    label = net.label
    lines = ["digraph network {", "  rankdir=LR;", "  node [shape=circle];"]
    for i in net.dag.nodes:
        lines.append(f"  {_quote(label[i])} [{node_style(net, i)}];")
    for head, tail, delay in net.dag.edges:
        text = f"f_{{{label[head]},{label[tail]}}}, m={delay}"
        lines.append(f"  {_quote(label[tail])} -> {_quote(label[head])} [label={_quote(text)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
