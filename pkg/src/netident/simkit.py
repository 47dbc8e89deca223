"""Discrete-time simulation of the additive delayed network model.

    y_i^k = sum_{j in N_i} f_{i,j}(y_j^{k - m_{i,j}}) + u_i^{k-1}

Time runs ``k = 1..horizon`` from zero initial rest: every ``y`` and ``u`` with a
non-positive time index is 0. Arrays store time ``k`` at index ``k - 1``.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EvaluationOverflow
from .funclib import EdgeFunction, evaluate
from .graph import Dag, path_lag, paths_between, topological_order
from .patterns import IdentificationPattern

# outputs above this magnitude make an absolute 1e-9 comparison meaningless
WELL_CONDITIONED_BOUND = 1e3
MAX_RESAMPLES = 40


@dataclass(frozen=True)
class ExcitationSchedule:
    """Input sequences for the excited nodes; any other node receives zeros.

    A signal may also be 2-D with shape ``(trials, horizon)`` to run a batch.
    """

    horizon: int
    signals: dict[int, np.ndarray]

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        signals = {}
        for node, seq in self.signals.items():
            arr = np.asarray(seq, dtype=float)
            if arr.shape[-1] != self.horizon:
                raise ValueError(f"signal for node {node} has length {arr.shape[-1]}, expected {self.horizon}")
            signals[int(node)] = arr
        object.__setattr__(self, "signals", signals)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        shapes = {arr.shape[:-1] for arr in self.signals.values()}
        if len(shapes) > 1:
            raise ValueError("all signals in a batch must share a shape")
        return shapes.pop() if shapes else ()


def random_schedule(
    pattern: IdentificationPattern, horizon: int, rng: np.random.Generator, amplitude: float = 1.0, trials: int | None = None
) -> ExcitationSchedule:
    """I.i.d. uniform inputs in ``[-amplitude, amplitude]``."""
    shape = (horizon,) if trials is None else (trials, horizon)
    return ExcitationSchedule(
        horizon, {j: amplitude * rng.uniform(-1.0, 1.0, size=shape) for j in sorted(pattern.excited)}
    )


def impulse_schedule(nodes: Iterable[int], horizon: int, amplitude: float = 1.0) -> ExcitationSchedule:
    """Unit impulse at time 1 on each listed node."""
    signals = {}
    for node in nodes:
        seq = np.zeros(horizon)
        seq[0] = amplitude
        signals[node] = seq
    return ExcitationSchedule(horizon, signals)


@dataclass(frozen=True)
class Trajectory:
    outputs: dict[int, np.ndarray]

    def __getitem__(self, node: int) -> np.ndarray:
        return self.outputs[node]

    def to_csv(self, names: Mapping[int, str] | None = None) -> str:
        """One row per time step, one column per node. Batched trajectories are rejected."""
        nodes = sorted(self.outputs)
        if any(self.outputs[i].ndim != 1 for i in nodes):
            raise ValueError("CSV export needs a single (non-batched) trajectory")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k"] + [names[i] if names else str(i) for i in nodes])
        horizon = len(self.outputs[nodes[0]]) if nodes else 0
        for k in range(horizon):
            writer.writerow([k + 1] + [repr(float(self.outputs[i][k])) for i in nodes])
        return buf.getvalue()


def _run(dag: Dag, funcs, sched: ExcitationSchedule) -> dict[int, np.ndarray]:
    horizon = sched.horizon
    order = topological_order(dag)
    y = {i: np.zeros(sched.batch_shape + (horizon,)) for i in dag.nodes}
    incoming = {i: [(j, dag.delay(i, j), funcs[(i, j)]) for j in dag.in_neighbors(i)] for i in order}
    with np.errstate(over="ignore", invalid="ignore"):
        for node, u in sched.signals.items():
            # u_i^{k-1} lands at time k
            y[node][..., 1:] += u[..., :-1]
        for k in range(horizon):
            for i in order:
                # length-1 slices keep arrays 1-D, so overflow surfaces as inf, not a scalar error
                acc = y[i][..., k : k + 1]
                for j, m, f in incoming[i]:
                    if k - m >= 0:
                        acc = acc + evaluate(f, y[j][..., k - m : k - m + 1])
                y[i][..., k : k + 1] = acc
    return y


def simulate(dag: Dag, funcs: Mapping[tuple[int, int], EdgeFunction], sched: ExcitationSchedule) -> Trajectory:
    """Run the recursion for ``sched.horizon`` steps in topological order per step."""
    for node in sched.signals:
        dag._check(node)
    y = _run(dag, funcs, sched)
    for i in dag.nodes:
        if not np.all(np.isfinite(y[i])):
            raise EvaluationOverflow(f"non-finite output at node {i}")
    return Trajectory(y)


def max_lag(dag: Dag) -> int:
    """Longest input-to-output lag over all paths (at least 1)."""
    best = {i: 1 for i in dag.nodes}
    for i in topological_order(dag):
        for j in dag.in_neighbors(i):
            best[i] = max(best[i], best[j] + dag.delay(i, j))
    return max(best.values())


def default_horizon(dag: Dag) -> int:
    return max(20, max_lag(dag) + 2)


class ResponseCheck(NamedTuple):
    equal: bool
    max_deviation: float


def _batch_outputs(dag, funcs, sched, measured) -> np.ndarray:
    # non-finite trials are screened by the caller and redrawn
    y = _run(dag, funcs, sched)
    return np.stack([y[i] for i in measured], axis=0)


def response_equal(
    dag: Dag,
    pattern: IdentificationPattern,
    f1: Mapping[tuple[int, int], EdgeFunction],
    f2: Mapping[tuple[int, int], EdgeFunction],
    trials: int = 1000,
    horizon: int | None = None,
    tol: float = 1e-9,
    seed: int = 0,
) -> ResponseCheck:
    """Compare measured outputs of two function sets on seeded random schedules.

    Trial ``t`` draws its inputs from ``default_rng(seed + t)``. A trial whose
    outputs overflow or exceed ``WELL_CONDITIONED_BOUND`` under either set is
    redrawn at half the input amplitude, up to ``MAX_RESAMPLES`` times.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    horizon = horizon or default_horizon(dag)
    measured = sorted(pattern.measured)
    if not measured:
        return ResponseCheck(True, 0.0)
    excited = sorted(pattern.excited)
    if not excited:
        # zero rest and f(0) = 0 keep every output at zero under either set
        return ResponseCheck(True, 0.0)
    draws = np.stack(
        [np.random.default_rng(seed + t).uniform(-1.0, 1.0, size=(len(excited), horizon)) for t in range(trials)]
    )
    amplitude = np.ones(trials)
    deviation = np.full(trials, np.nan)
    pending = np.arange(trials)
    for _ in range(MAX_RESAMPLES):
        if pending.size == 0:
            break
        u = draws[pending] * amplitude[pending, None, None]
        sched = ExcitationSchedule(horizon, {j: u[:, idx, :] for idx, j in enumerate(excited)})
        a = _batch_outputs(dag, f1, sched, measured)
        b = _batch_outputs(dag, f2, sched, measured)
        with np.errstate(invalid="ignore"):
            size = np.maximum(np.abs(a).max(axis=(0, 2)), np.abs(b).max(axis=(0, 2)))
            ok = np.isfinite(size) & (size <= WELL_CONDITIONED_BOUND)
            dev = np.abs(a - b).max(axis=(0, 2))
        deviation[pending[ok]] = dev[ok]
        amplitude[pending[~ok]] *= 0.5
        pending = pending[~ok]
    if pending.size:
        raise EvaluationOverflow(f"{pending.size} trials stayed ill-conditioned after {MAX_RESAMPLES} resamples")
    worst = float(deviation.max())
    return ResponseCheck(worst <= tol, worst)


@dataclass(frozen=True)
class DelayCollision:
    """Path lags from excited ``source`` to ``target`` (one per path, sorted)."""

    target: int
    source: int
    lags: tuple[int, ...]

    @property
    def kind(self) -> str:
        distinct = len(set(self.lags))
        if distinct == 1:
            return "full"
        if distinct == len(self.lags):
            return "distinct"
        return "partial"


def delay_collision_report(dag: Dag, pattern: IdentificationPattern) -> list[DelayCollision]:
    """Pairs (target, excited source) joined by at least two paths, with their lags.

    The structural analysis always assumes the full-collision case; this report
    shows whether the actual delays are more favourable.
    """
    out = []
    for j in sorted(pattern.excited):
        for i in sorted(dag.descendants(j)):
            paths = paths_between(dag, j, i)
            if len(paths) >= 2:
                out.append(DelayCollision(i, j, tuple(sorted(path_lag(dag, p) for p in paths))))
    return out
