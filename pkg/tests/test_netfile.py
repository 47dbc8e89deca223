import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_dag
from netident import fixtures as fx
from netident.errors import CycleDetected
from netident.funclib import random_function_set
from netident.io import NetfileError, dump_network, network_from, parse_network, to_dot
from netident.patterns import IdentificationPattern as P

GOOD = """\
netident: 1
nodes: [src, mid, out]
edges:
  - {tail: src, head: mid, delay: 2, coefficients: [0.0, 0.0, 1.5]}
  - {tail: mid, head: out, coefficients: [1.0, 0.0, -0.5]}
pattern:
  excited: [src]
  measured: [mid, out]
"""


def test_parse_good():
    net = parse_network(GOOD)
    assert net.names == ("src", "mid", "out")
    assert net.dag.delay(2, 1) == 2 and net.dag.delay(3, 2) == 1
    assert net.funcs[(3, 2)].coefficients == (1.0, 0.0, -0.5)
    assert net.pattern == P.of({1}, {2, 3})
    assert net.edge_lines[(2, 1)] == 4


def test_without_coefficients_or_pattern():
    net = parse_network("netident: 1\nnodes: [a, b]\nedges:\n  - {tail: a, head: b}\n")
    assert net.funcs is None and net.pattern is None


def error(text):
    with pytest.raises(NetfileError) as err:
        parse_network(text, "f.yaml")
    return err.value


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        (GOOD.replace("delay: 2", "dealy: 2"), 4, "unknown field 'dealy'"),
        (GOOD.replace("head: out", "head: nowhere"), 5, "unknown node"),
        (GOOD.replace("netident: 1", "netident: 2"), 1, "unsupported format version"),
        (GOOD + "extra: 1\n", 9, "unknown field 'extra'"),
        (GOOD.replace("delay: 2", "delay: 0"), 4, "delay"),
        (GOOD.replace("[0.0, 0.0, 1.5]", "[a]"), 4, "coefficients must be numbers"),
        (GOOD.replace(", coefficients: [1.0, 0.0, -0.5]", ""), 5, "every edge or on none"),
        (GOOD.replace("[src, mid, out]", "[src, src, out]"), 2, "duplicate node"),
        (GOOD.replace("excited: [src]", "excited: [ghost]"), 7, "unknown node"),
        ("netident: 1\nnodes: [a\n", 3, "YAML syntax error"),
    ],
)
def test_errors_report_lines(text, line, fragment):
    err = error(text)
    assert fragment in err.message
    assert err.line == line
    assert str(err).startswith(f"f.yaml:{line}:")


def test_missing_field():
    assert "missing required field 'edges'" in error("netident: 1\nnodes: [a]\n").message


def test_empty_document():
    assert "empty" in error("").message


def test_cycle_is_cycle_error():
    text = "netident: 1\nnodes: [a, b]\nedges:\n  - {tail: a, head: b}\n  - {tail: b, head: a}\n"
    with pytest.raises(CycleDetected) as err:
        parse_network(text, "c.yaml")
    message = str(err.value)
    assert "c.yaml:4" in message
    assert "a -> b" in message or "b -> a" in message


def test_numeric_names_are_strings():
    net = parse_network("netident: 1\nnodes: [1, 2]\nedges:\n  - {tail: 1, head: 2}\n")
    assert net.names == ("1", "2")
    assert parse_network(dump_network(net)) == net


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.booleans(), st.booleans())
def test_round_trip(seed, with_funcs, with_pattern):
    dag = random_dag(seed, n_max=8, max_delay=4)
    funcs = random_function_set(dag, seed, degree=[3, 5, 7][seed % 3]) if with_funcs else None
    pattern = P.of(dag.sources, dag.sinks | {1}) if with_pattern else None
    net = network_from(dag, funcs, pattern, names=[f"n{i}" for i in dag.nodes])
    again = parse_network(dump_network(net))
    assert again == net
    assert dump_network(again) == dump_network(net)


def test_dot_fig1():
    f = fx.fig1()
    dot = to_dot(network_from(f.dag, None, f.pattern))
    assert dot.count(" -> ") == 8
    node_lines = [ln for ln in dot.splitlines() if ln.strip().startswith('"') and "->" not in ln]
    assert len(node_lines) == 6
    assert '"4" [style=wedged' in dot and '"6" [style=wedged' in dot
    assert 'label="f_{2,1}, m=1"' in dot


def test_dot_fig6_colours():
    f = fx.fig6()
    dot = to_dot(network_from(f.dag, f.funcs, f.pattern))
    assert '"1" [style=filled, fillcolor=white]' in dot
    for i in (2, 3, 4):
        assert f'"{i}" [style=filled, fillcolor=gray]' in dot


def test_dot_single_node():
    from netident.graph import Dag

    dot = to_dot(network_from(Dag(1, []), None, P.of({1}, {1})))
    assert dot.count(" -> ") == 0 and '"1" [style=wedged' in dot
