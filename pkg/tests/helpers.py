"""Seeded random graph generators shared by the test modules."""

from __future__ import annotations

import numpy as np

from netident.graph import Dag


def _relabel(rng, n, edges):
    perm = rng.permutation(n) + 1
    return [(int(perm[h - 1]), int(perm[t - 1]), d) for h, t, d in edges]


def random_dag(seed: int, n_max: int = 8, n_min: int = 2, density: float = 0.35, max_delay: int = 2) -> Dag:
    """Weakly connected DAG: a random spanning tree oriented along a hidden order plus extra forward edges."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    edges = {}
    for k in range(2, n + 1):
        other = int(rng.integers(1, k))
        edges[(k, other)] = int(rng.integers(1, max_delay + 1))
    for head in range(2, n + 1):
        for tail in range(1, head):
            if (head, tail) not in edges and rng.random() < density:
                edges[(head, tail)] = int(rng.integers(1, max_delay + 1))
    return Dag(n, _relabel(rng, n, [(h, t, d) for (h, t), d in edges.items()]))


def random_tree(seed: int, n_max: int = 12, n_min: int = 2, max_delay: int = 3) -> Dag:
    """Random tree whose edges point either way."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    edges = []
    for k in range(2, n + 1):
        parent = int(rng.integers(1, k))
        delay = int(rng.integers(1, max_delay + 1))
        edges.append((k, parent, delay) if rng.random() < 0.5 else (parent, k, delay))
    return Dag(n, _relabel(rng, n, edges))
