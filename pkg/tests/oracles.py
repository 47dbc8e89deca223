"""Independent reference implementations used only to check the package.

Each oracle follows a definition directly and trades speed for obviousness.
"""

from __future__ import annotations

import itertools
from functools import lru_cache


def poly(coeffs, x: float) -> float:
    return sum(a * x ** n for n, a in enumerate(coeffs, start=1))


def poly_derivative(coeffs, x: float) -> float:
    return sum(n * a * x ** (n - 1) for n, a in enumerate(coeffs, start=1))


def brute_outputs(dag, funcs, signals, horizon):
    """Chase ``y_i^k = sum_j f_ij(y_j^{k - m_ij}) + u_i^{k-1}`` recursively from its definition."""
    preds = {i: [(t, d) for h, t, d in dag.edges if h == i] for i in dag.nodes}

    def u(i, k):
        if k < 1 or i not in signals:
            return 0.0
        return float(signals[i][k - 1])

    @lru_cache(maxsize=None)
    def y(i, k):
        if k < 1:
            return 0.0
        total = u(i, k - 1)
        for j, m in preds[i]:
            total += poly(funcs[(i, j)].coefficients, y(j, k - m))
        return total

    return {i: [y(i, k) for k in range(1, horizon + 1)] for i in dag.nodes}


def all_topological_orders(dag):
    edges = [(t, h) for h, t, _ in dag.edges]
    out = []
    for perm in itertools.permutations(dag.nodes):
        pos = {v: k for k, v in enumerate(perm)}
        if all(pos[a] < pos[b] for a, b in edges):
            out.append(list(perm))
    return out


def reach(dag):
    """Transitive closure by repeated relaxation; ``(a, b)`` means a path a -> b with >= 1 edge."""
    rel = {(t, h) for h, t, _ in dag.edges}
    while True:
        extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
        if not extra:
            return rel
        rel |= extra


def simple_paths(dag, start, end):
    succ = {i: [h for h, t, _ in dag.edges if t == i] for i in dag.nodes}
    out = []

    def walk(path):
        if path[-1] == end and len(path) > 1:
            out.append(tuple(path))
            return
        for nxt in succ[path[-1]]:
            walk(path + [nxt])

    walk([start])
    return out


def max_disjoint_paths(dag, sources, targets):
    """Largest set of pairwise vertex-disjoint paths by exhaustive search."""
    candidates = []
    for s in sources:
        for t in targets:
            if s == t:
                candidates.append((s,))
            else:
                candidates.extend(simple_paths(dag, s, t))
    best = 0

    def search(k, used, count):
        nonlocal best
        best = max(best, count)
        if count + (len(candidates) - k) <= best:
            return
        for idx in range(k, len(candidates)):
            p = candidates[idx]
            if used.isdisjoint(p):
                search(idx + 1, used | set(p), count + 1)

    search(0, frozenset(), 0)
    return best
