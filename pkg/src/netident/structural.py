"""Network matrix, transfer matrix, numeric rank and vertex-disjoint paths.

The nonlinear network matrix ``J_G(v)`` holds the edge derivatives
``f'_{i,j}(y_j)`` evaluated at the outputs produced by constant inputs
``u_j = v_j`` on the excited nodes. With constant inputs every delayed copy of
``u_j`` equals ``v_j``, which is exactly the collapse of all delays of one
excitation into a single variable. ``T_G(v) = (I - J_G(v))^{-1}`` then holds
``d y_i / d v_j`` in entry ``(i, j)``.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationOverflow, GenericityUndetermined
from .funclib import EdgeFunction, derivative, evaluate
from .graph import Dag, topological_order
from .patterns import IdentificationPattern

RANK_TOL = 1e-8
# probe points whose outputs exceed this are shrunk before ranking
PROBE_OUTPUT_BOUND = 1e4
PROBE_MAX_SHRINK = 60


@dataclass(frozen=True)
class NonlinearNetworkMatrix:
    """Evaluation of ``J_G`` and ``T_G`` at one point.

    Matrices are 0-indexed: node ``i`` sits at row/column ``i - 1``.
    """

    point: dict[int, float]
    outputs: np.ndarray
    jacobian: np.ndarray
    transfer: np.ndarray

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> np.ndarray:
        r = [i - 1 for i in sorted(rows)]
        c = [j - 1 for j in sorted(cols)]
        return self.transfer[np.ix_(r, c)]


def _as_point(pattern: IdentificationPattern, v) -> dict[int, float]:
    excited = sorted(pattern.excited)
    if isinstance(v, Mapping):
        point = {int(k): float(x) for k, x in v.items()}
        if set(point) != set(excited):
            raise ValueError(f"point keys {sorted(point)} differ from excited nodes {excited}")
        return point
    values = np.asarray(v, dtype=float).ravel()
    if values.size != len(excited):
        raise ValueError(f"expected {len(excited)} values (one per excited node), got {values.size}")
    return dict(zip(excited, values.tolist()))


def steady_outputs(dag: Dag, funcs: Mapping[tuple[int, int], EdgeFunction], point: Mapping[int, float]) -> np.ndarray:
    """Node outputs under constant inputs; index ``i - 1`` holds node ``i``."""
    y = np.zeros(dag.n)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in topological_order(dag):
            total = point.get(i, 0.0)
            for j in dag.in_neighbors(i):
                total += evaluate(funcs[(i, j)], y[j - 1])
            if not np.isfinite(total):
                raise EvaluationOverflow(f"non-finite output at node {i}; retry with a smaller point")
            y[i - 1] = total
    return y


def evaluate_network_matrix(
    dag: Dag,
    funcs: Mapping[tuple[int, int], EdgeFunction],
    pattern: IdentificationPattern,
    v,
) -> NonlinearNetworkMatrix:
    point = _as_point(pattern, v)
    y = steady_outputs(dag, funcs, point)
    n = dag.n
    jac = np.zeros((n, n))
    with np.errstate(over="ignore", invalid="ignore"):
        for (i, j), f in funcs.items():
            jac[i - 1, j - 1] = derivative(f, y[j - 1])
        # J is nilpotent on a DAG, so the Neumann series stops after n terms
        transfer = np.eye(n)
        power = np.eye(n)
        for _ in range(n - 1):
            power = power @ jac
            if not power.any():
                break
            transfer = transfer + power
    if not (np.all(np.isfinite(jac)) and np.all(np.isfinite(transfer))):
        raise EvaluationOverflow("non-finite network matrix; retry with a smaller point")
    return NonlinearNetworkMatrix(point, y, jac, transfer)


def numeric_rank(a: np.ndarray, tol: float = RANK_TOL) -> int:
    """Singular values above ``tol`` times the largest one, after equilibration.

    Rows and columns are rescaled by their largest magnitude first; diagonal
    scaling preserves rank but removes the spread that large network outputs
    put on the singular values.
    """
    a = np.array(a, dtype=float)
    if a.size == 0 or not a.any():
        return 0
    for _ in range(4):
        row = np.abs(a).max(axis=1, keepdims=True)
        a = np.divide(a, row, out=np.zeros_like(a), where=row > 0)
        col = np.abs(a).max(axis=0, keepdims=True)
        a = np.divide(a, col, out=np.zeros_like(a), where=col > 0)
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


def submatrix_rank(m: NonlinearNetworkMatrix, rows: Iterable[int], cols: Iterable[int], tol: float = RANK_TOL) -> int:
    rows, cols = list(rows), list(cols)
    if not rows or not cols:
        raise ValueError("rows and cols must be non-empty")
    return numeric_rank(m.submatrix(rows, cols), tol)


@dataclass(frozen=True)
class DisjointPathCertificate:
    """Maximum vertex-disjoint path packing from ``sources`` onto ``targets``.

    ``paths`` lists node sequences from a source to a target; a node that is both
    a source and a target contributes the one-node path ``(node,)``.
    """

    target: int | None
    required: int
    achieved: int
    paths: tuple[tuple[int, ...], ...] = ()

    @property
    def satisfied(self) -> bool:
        return self.achieved >= self.required


def _max_flow_paths(dag: Dag, sources: set[int], targets: set[int]) -> list[tuple[int, ...]]:
    # node splitting: v_in = 2v, v_out = 2v + 1, unit capacity everywhere
    s, t = 0, 1
    cap: dict[int, dict[int, int]] = {}
    forward: set[tuple[int, int]] = set()

    def add(a: int, b: int) -> None:
        cap.setdefault(a, {})[b] = 1
        cap.setdefault(b, {}).setdefault(a, 0)
        forward.add((a, b))

    for v in dag.nodes:
        add(2 * v, 2 * v + 1)
    for head, tail, _ in dag.edges:
        add(2 * tail + 1, 2 * head)
    for v in sorted(sources):
        add(s, 2 * v)
    for v in sorted(targets):
        add(2 * v + 1, t)

    while True:
        parent = {s: s}
        queue = deque([s])
        while queue and t not in parent:
            a = queue.popleft()
            for b in sorted(cap[a]):
                if cap[a][b] > 0 and b not in parent:
                    parent[b] = a
                    queue.append(b)
        if t not in parent:
            break
        b = t
        while b != s:
            a = parent[b]
            cap[a][b] -= 1
            cap[b][a] += 1
            b = a

    def carried(a: int) -> int:
        return next(b for b in sorted(cap[a]) if (a, b) in forward and cap[a][b] == 0)

    paths = []
    for start in sorted(b for b in cap[s] if cap[s][b] == 0):
        path = []
        cur = start
        while cur != t:
            if cur % 2 == 0:
                path.append(cur // 2)
            cur = carried(cur)
        paths.append(tuple(path))
    return sorted(paths)


def max_vertex_disjoint_paths(
    dag: Dag, sources: Iterable[int], targets: Iterable[int], target: int | None = None
) -> DisjointPathCertificate:
    """Maximum number of mutually vertex-disjoint paths from ``sources`` to ``targets``.

    Unit vertex capacities via node splitting and BFS augmenting paths.
    ``target`` only labels the certificate (the node whose in-neighbours are the
    ``targets``).
    """
    sources, targets = set(sources), set(targets)
    for node in sources | targets:
        dag._check(node)
    paths = _max_flow_paths(dag, sources, targets)
    return DisjointPathCertificate(target, len(targets), len(paths), tuple(paths))


def node_certificate(dag: Dag, pattern: IdentificationPattern, node: int) -> DisjointPathCertificate:
    """Disjoint-path check for ``node``: excited nodes onto its in-neighbours."""
    return max_vertex_disjoint_paths(dag, pattern.excited, dag.in_neighbors(node), target=node)


@dataclass(frozen=True)
class GenericityProbe:
    """Numeric rank of ``T_G^{N_i, N^e}(v)`` over random points ``v``."""

    node: int
    structural: int
    ranks: tuple[int, ...]
    witness_point: dict[int, float] | None = None
    shrink_factors: tuple[float, ...] = field(default=(), repr=False)

    @property
    def max_rank(self) -> int:
        return max(self.ranks, default=0)

    @property
    def generic(self) -> bool:
        """Some draw reached the structural bound; rank is lower-semicontinuous, so
        one such point certifies it. Failure on every draw is evidence, not proof."""
        return self.max_rank == self.structural


def random_probe_point(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform on ``[-1, -0.05] U [0.05, 1]``."""
    return rng.uniform(0.05, 1.0, size=size) * rng.choice([-1.0, 1.0], size=size)


def _bounded_matrix(dag, funcs, pattern, raw: np.ndarray) -> tuple[NonlinearNetworkMatrix | None, float]:
    scale = 1.0
    for _ in range(PROBE_MAX_SHRINK):
        try:
            m = evaluate_network_matrix(dag, funcs, pattern, raw * scale)
        except EvaluationOverflow:
            scale *= 0.5
            continue
        if np.abs(m.outputs).max(initial=0.0) <= PROBE_OUTPUT_BOUND:
            return m, scale
        scale *= 0.5
    return None, scale


def genericity_probe(
    dag: Dag,
    funcs: Mapping[tuple[int, int], EdgeFunction],
    pattern: IdentificationPattern,
    node: int,
    draws: int = 10,
    seed: int = 0,
    tol: float = RANK_TOL,
    stop_early: bool = False,
) -> GenericityProbe:
    """Max numeric rank of the in-neighbour / excitation block of ``T_G`` over ``draws`` points.

    With ``stop_early`` the draws end at the first point attaining the structural
    bound, which already certifies genericity.

    Rows are the in-neighbours of ``node``, columns the excited nodes. An excited
    in-neighbour has ``T[j, j] = 1``, which realizes its zero-length path.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rows = dag.in_neighbors(node)
    cols = sorted(pattern.excited)
    structural = max_vertex_disjoint_paths(dag, cols, rows, target=node).achieved
    if not rows or not cols:
        return GenericityProbe(node, structural, (0,) * draws)
    rng = np.random.default_rng(seed)
    ranks: list[int] = []
    scales: list[float] = []
    witness = None
    for _ in range(draws):
        raw = random_probe_point(rng, len(cols))
        m, scale = _bounded_matrix(dag, funcs, pattern, raw)
        if m is None:
            continue
        rank = submatrix_rank(m, rows, cols, tol)
        ranks.append(rank)
        scales.append(scale)
        if witness is None and rank == structural:
            witness = dict(m.point)
            if stop_early:
                break
    if not ranks:
        raise GenericityUndetermined(f"every probe point overflowed at node {node}")
    return GenericityProbe(node, structural, tuple(ranks), witness, tuple(scales))


def structural_zero_pattern(dag: Dag) -> np.ndarray:
    """Boolean ``R`` with ``R[i-1, j-1]`` true iff ``i == j`` or a path ``j -> i`` exists."""
    reach = np.eye(dag.n, dtype=bool)
    for i in dag.nodes:
        for j in dag.ancestors(i):
            reach[i - 1, j - 1] = True
    return reach

