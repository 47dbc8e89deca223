import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_dag
from oracles import max_disjoint_paths, poly, poly_derivative, reach
from netident import fixtures as fx
from netident.errors import EvaluationOverflow, GenericityUndetermined
from netident.funclib import EdgeFunction, monomial, random_function_set
from netident.graph import Dag, topological_order
from netident.patterns import IdentificationPattern as P
from netident.structural import (
    evaluate_network_matrix,
    genericity_probe,
    max_vertex_disjoint_paths,
    numeric_rank,
    structural_zero_pattern,
    submatrix_rank,
)

seeds = st.integers(0, 10_000)


class TestNetworkMatrix:
    def test_single_edge(self):
        m = evaluate_network_matrix(fx.chain(2), {(2, 1): monomial(1, 3)}, P.of({1}, {2}), [2.0])
        assert m.outputs[0] == 2.0
        assert m.jacobian[1, 0] == 12.0

    def test_zero_point(self):
        f = fx.fig6()
        m = evaluate_network_matrix(f.dag, f.funcs, f.pattern, {1: 0.0})
        assert not m.jacobian.any()
        assert np.array_equal(m.transfer, np.eye(4))

    def test_fig6_path_sum(self):
        f = fx.fig6((1.3, -0.7, 0.9, 1.1))
        m = evaluate_network_matrix(f.dag, f.funcs, f.pattern, [0.6])
        j = m.jacobian
        assert m.transfer[3, 0] == pytest.approx(j[3, 1] * j[1, 0] + j[3, 2] * j[2, 0], rel=1e-14)

    def test_point_validation(self):
        f = fx.fig6()
        with pytest.raises(ValueError):
            evaluate_network_matrix(f.dag, f.funcs, f.pattern, [0.1, 0.2])
        with pytest.raises(ValueError):
            evaluate_network_matrix(f.dag, f.funcs, f.pattern, {2: 0.1})

    def test_overflow(self):
        dag = fx.chain(6)
        funcs = {e: monomial(2.0, 9) for e in dag.edge_keys}
        with pytest.raises(EvaluationOverflow):
            evaluate_network_matrix(dag, funcs, P.of({1}, set()), [50.0])

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_matrix_invariants(self, seed):
        dag = random_dag(seed, n_max=8)
        funcs = random_function_set(dag, seed)
        rng = np.random.default_rng(seed)
        excited = sorted(i for i in dag.nodes if i in dag.sources or rng.random() < 0.5)
        v = rng.uniform(-0.4, 0.4, size=len(excited))
        m = evaluate_network_matrix(dag, funcs, P.of(excited, set()), v)
        # steady outputs and derivatives from the definition
        y = {}
        for i in topological_order(dag):
            y[i] = dict(zip(excited, v)).get(i, 0.0) + sum(
                poly(funcs[(i, j)].coefficients, y[j]) for j in dag.in_neighbors(i)
            )
        assert np.allclose(m.outputs, [y[i] for i in dag.nodes], rtol=1e-12, atol=1e-14)
        for (i, j), f in funcs.items():
            assert m.jacobian[i - 1, j - 1] == pytest.approx(poly_derivative(f.coefficients, y[j]), rel=1e-12, abs=1e-14)
        support = {(i, j) for i, j in zip(*np.nonzero(m.jacobian))}
        assert support <= {(h - 1, t - 1) for h, t in dag.edge_keys}
        order = [i - 1 for i in topological_order(dag)]
        permuted = m.jacobian[np.ix_(order, order)]
        assert not np.triu(permuted).any()
        n = dag.n
        resid = (np.eye(n) - m.jacobian) @ m.transfer - np.eye(n)
        assert np.abs(resid).max() <= 1e-10 * max(1.0, np.abs(m.transfer).max())
        reachable = structural_zero_pattern(dag)
        closure = reach(dag)
        for i in dag.nodes:
            for j in dag.nodes:
                assert reachable[i - 1, j - 1] == (i == j or (j, i) in closure)
                if not reachable[i - 1, j - 1]:
                    assert m.transfer[i - 1, j - 1] == 0.0


class TestRank:
    def test_identity(self):
        assert numeric_rank(np.eye(2)) == 2

    def test_zero(self):
        assert numeric_rank(np.zeros((2, 3))) == 0

    def test_rank_one_outer_product(self):
        assert numeric_rank(np.outer([1.0, 2.0, 3.0], [4.0, -1.0])) == 1

    def test_equilibration_handles_badly_scaled_rows(self):
        a = np.array([[1e12, 0.0], [0.0, 1e-3]])
        assert numeric_rank(a) == 2

    def test_fig6_single_column(self):
        f = fx.fig6()
        m = evaluate_network_matrix(f.dag, f.funcs, f.pattern, [0.5])
        assert submatrix_rank(m, {2, 3}, {1}) == 1

    def test_fig5_random_is_full(self):
        f = fx.fig5(collinear=False)
        funcs = random_function_set(f.dag, 11)
        m = evaluate_network_matrix(f.dag, funcs, f.pattern, [0.4, -0.7])
        block = m.submatrix({4, 5}, {1, 2})
        assert abs(np.linalg.det(block)) > 1e-8
        assert submatrix_rank(m, {4, 5}, {1, 2}) == 2

    def test_empty_selection(self):
        f = fx.fig6()
        m = evaluate_network_matrix(f.dag, f.funcs, f.pattern, [0.5])
        with pytest.raises(ValueError):
            submatrix_rank(m, [], {1})


class TestDisjointPaths:
    def test_fig6(self):
        cert = max_vertex_disjoint_paths(fx.fig6().dag, {1}, {2, 3})
        assert cert.achieved == 1 and cert.required == 2 and not cert.satisfied

    def test_fig7(self):
        cert = max_vertex_disjoint_paths(fx.fig7().dag, {1, 2}, {3, 4})
        assert cert.achieved == 2 and set(cert.paths) == {(1, 3), (2, 4)}

    def test_zero_length(self):
        cert = max_vertex_disjoint_paths(fx.fig7().dag, {3}, {3})
        assert cert.achieved == 1 and cert.paths == ((3,),)

    @settings(max_examples=80, deadline=None)
    @given(seeds, st.data())
    def test_matches_exhaustive_search(self, seed, data):
        dag = random_dag(seed, n_max=7)
        nodes = list(dag.nodes)
        sources = data.draw(st.sets(st.sampled_from(nodes), min_size=1))
        targets = data.draw(st.sets(st.sampled_from(nodes), min_size=1))
        cert = max_vertex_disjoint_paths(dag, sources, targets)
        assert cert.achieved == max_disjoint_paths(dag, sources, targets)
        used = [v for p in cert.paths for v in p]
        assert len(used) == len(set(used))
        for p in cert.paths:
            assert p[0] in sources and p[-1] in targets
            assert all(dag.has_edge(b, a) for a, b in zip(p, p[1:]))


class TestProbe:
    def test_collinear_drops_rank(self):
        f = fx.fig5(collinear=True)
        probe = genericity_probe(f.dag, f.funcs, f.pattern, 6, draws=10, seed=0)
        assert probe.structural == 2 and probe.max_rank == 1 and not probe.generic
        assert probe.witness_point is None

    @pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
    def test_collinear_any_gamma(self, gamma):
        f = fx.fig5(collinear=False)
        base = random_function_set(f.dag, 5)
        funcs = dict(base)
        for k in (1, 2):
            g = base[(4, k)]
            funcs[(3, k)] = EdgeFunction(tuple(gamma * a for a in g.coefficients))
        probe = genericity_probe(f.dag, funcs, f.pattern, 6, draws=10, seed=1)
        assert probe.max_rank < probe.structural == 2

    def test_random_cubics_generic(self):
        f = fx.fig5(collinear=False)
        for seed in range(10):
            probe = genericity_probe(f.dag, random_function_set(f.dag, seed), f.pattern, 6, draws=10, seed=seed)
            assert probe.generic and probe.witness_point is not None

    def test_chain_trivial(self):
        dag = fx.chain(4)
        funcs = random_function_set(dag, 0)
        for i in (2, 3, 4):
            assert genericity_probe(dag, funcs, P.of({1}, dag.nodes), i, draws=3).generic

    def test_stop_early(self):
        f = fx.fig7()
        funcs = random_function_set(f.dag, 0)
        assert len(genericity_probe(f.dag, funcs, f.pattern, 5, draws=10, stop_early=True).ranks) == 1
        assert len(genericity_probe(f.dag, funcs, f.pattern, 5, draws=10).ranks) == 10

    def test_shrinks_large_points(self):
        from netident.structural import PROBE_OUTPUT_BOUND, _bounded_matrix

        dag = fx.chain(3)
        funcs = {e: monomial(2.0, 9) for e in dag.edge_keys}
        m, scale = _bounded_matrix(dag, funcs, P.of({1}, dag.nodes), np.array([30.0]))
        assert scale < 1 and np.abs(m.outputs).max() <= PROBE_OUTPUT_BOUND

    def test_undetermined(self, monkeypatch):
        import netident.structural as structural

        monkeypatch.setattr(structural, "_bounded_matrix", lambda *a: (None, 0.0))
        f = fx.fig7()
        with pytest.raises(GenericityUndetermined):
            structural.genericity_probe(f.dag, random_function_set(f.dag, 0), f.pattern, 5)

    def test_draws_validated(self):
        f = fx.fig7()
        with pytest.raises(ValueError):
            genericity_probe(f.dag, random_function_set(f.dag, 0), f.pattern, 5, draws=0)
