import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_dag
from netident import fixtures as fx
from netident.errors import PatternRejected, PatternSpaceTooLarge
from netident.graph import Dag
from netident.patterns import (
    IdentificationPattern as P,
    Violation,
    ViolationKind,
    canonical_full_excitation,
    check_necessary,
    count_actions,
    enumerate_valid_patterns,
    reduce_to_full_measurement,
    strip_redundant_measurements,
)

seeds = st.integers(0, 10_000)


def test_count_actions():
    assert count_actions(P.of({1}, {2, 3, 4})) == 4
    assert count_actions(P()) == 0
    assert count_actions(P.of({1}, {1})) == 2


class TestNecessary:
    def test_fig6_ok(self):
        f = fx.fig6()
        assert check_necessary(f.dag, f.pattern).ok

    def test_unexcited_source(self):
        dag = fx.fig6().dag
        result = check_necessary(dag, P.of(set(), dag.nodes))
        assert result.violations == (Violation(ViolationKind.UNEXCITED_SOURCE, 1),)
        assert not result

    def test_uncovered(self):
        result = check_necessary(fx.chain(3), P.of({1}, {3}))
        assert result.violations == (Violation(ViolationKind.UNCOVERED, 2),)

    def test_reports_every_violation(self):
        result = check_necessary(fx.chain(3), P())
        kinds = {(v.kind, v.node) for v in result.violations}
        assert (ViolationKind.UNEXCITED_SOURCE, 1) in kinds
        assert (ViolationKind.UNMEASURED_SINK, 3) in kinds
        assert {(ViolationKind.UNCOVERED, i) for i in (1, 2, 3)} <= kinds


class TestCanonical:
    def test_examples(self):
        assert canonical_full_excitation(fx.fig6().dag) == P.of({1, 2, 3}, {4})
        assert canonical_full_excitation(fx.chain(2)) == P.of({1}, {2})
        assert canonical_full_excitation(fx.fig5().dag) == P.of({1, 2, 3, 4, 5}, {6})

    @settings(max_examples=60, deadline=None)
    @given(seeds)
    def test_always_valid_with_n_actions(self, seed):
        dag = random_dag(seed, n_max=10)
        p = canonical_full_excitation(dag)
        assert check_necessary(dag, p).ok and count_actions(p) == dag.n


class TestReduction:
    def test_fig6(self):
        f = fx.fig6()
        assert reduce_to_full_measurement(f.pattern, f.dag) == P.of({1}, {1, 2, 3, 4})

    def test_idempotent(self):
        f = fx.fig6()
        full = reduce_to_full_measurement(f.pattern, f.dag)
        assert reduce_to_full_measurement(full, f.dag) == full

    def test_fig4(self):
        f = fx.fig4()
        assert reduce_to_full_measurement(f.pattern, f.dag).measured == frozenset(range(1, 9))

    def test_refuses_invalid(self):
        with pytest.raises(PatternRejected):
            reduce_to_full_measurement(P.of({1}, {3}), fx.chain(3))


class TestStrip:
    def test_examples(self):
        assert strip_redundant_measurements(P.of({1}, {1, 2})) == P.of({1}, {2})
        assert strip_redundant_measurements(P.of({1}, {2})) == P.of({1}, {2})
        assert strip_redundant_measurements(P.of({1}, {1})) == P.of({1}, set())

    @given(st.sets(st.integers(1, 6)), st.sets(st.integers(1, 6)))
    def test_idempotent_and_keeps_excited(self, excited, measured):
        p = P.of(excited, measured)
        once = strip_redundant_measurements(p)
        assert once.excited == p.excited
        assert strip_redundant_measurements(once) == once


class TestEnumeration:
    def test_chain(self):
        assert enumerate_valid_patterns(fx.chain(3)) == [P.of({1, 2}, {3}), P.of({1}, {2, 3})]

    def test_single_edge(self):
        assert enumerate_valid_patterns(fx.chain(2)) == [P.of({1}, {2})]

    def test_fig6(self):
        assert len(enumerate_valid_patterns(fx.fig6().dag)) == 4

    def test_limit(self):
        assert len(enumerate_valid_patterns(fx.fig4().dag, max_results=3)) == 3

    def test_size_guard(self):
        with pytest.raises(PatternSpaceTooLarge):
            enumerate_valid_patterns(fx.chain(21))

    def test_single_node(self):
        # a lone node is source and sink at once, so n = 1 action cannot cover it
        assert enumerate_valid_patterns(Dag(1, [])) == []

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_matches_brute_force(self, seed):
        dag = random_dag(seed, n_max=6)
        nodes = list(dag.nodes)
        expected = []
        for roles in itertools.product(("e", "m", "em", ""), repeat=len(nodes)):
            p = P.of({i for i, r in zip(nodes, roles) if "e" in r}, {i for i, r in zip(nodes, roles) if "m" in r})
            if count_actions(p) == dag.n and check_necessary(dag, p).ok:
                expected.append(p)
        got = enumerate_valid_patterns(dag)
        assert set(got) == set(expected) and len(got) == len(expected)
        assert got[0] == canonical_full_excitation(dag)
