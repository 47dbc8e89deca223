"""Per-edge identifiability verdicts and constructive unidentifiability witnesses.

The pipeline is:

1. necessary checks (sources excited, sinks measured, every node covered); a
   violation is certified by a simulated witness on the affected edges;
2. reduction to full measurement, which leaves identifiability unchanged;
3. trees: every edge identifiable;
4. otherwise, per node ``i``: vertex-disjoint paths from the excited nodes onto
   the in-neighbours of ``i`` plus a numeric genericity probe of ``T_G``;
5. nodes failing step 4 are inconclusive unless a witness constructor applies
   and its witness verifies in simulation.

Identifiable verdicts from step 4 rest on a sufficient condition; failing it is
not a proof of unidentifiability, hence the third verdict.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial import Polynomial

from .errors import GenericityUndetermined, InversionUnsupported, WitnessRefused
from .funclib import (
    DEGREE_CAP,
    EdgeFunction,
    FunctionSet,
    from_polynomial,
    is_monomial,
    monomial,
    precomposed,
    random_function,
    random_function_set,
    scaled,
    to_polynomial,
    validate_class,
    validate_function_set,
)
from .graph import Dag, Edge, is_tree, topological_order
from .patterns import (
    IdentificationPattern,
    ViolationKind,
    check_necessary,
    reduce_to_full_measurement,
)
from .simkit import DelayCollision, delay_collision_report, response_equal
from .structural import DisjointPathCertificate, GenericityProbe, genericity_probe, node_certificate

DEFAULT_SEED = 42
DEFAULT_DRAWS = 10
DEFAULT_TRIALS = 1000
DEFAULT_TOL = 1e-9
BRIDGE_GAMMAS = (0.5, 0.25, 2.0, 0.75)
# collapsed response polynomials above this degree are not expanded
RESPONSE_DEGREE_CAP = 729


class Status(str, Enum):
    IDENTIFIABLE = "Identifiable"
    UNIDENTIFIABLE = "Unidentifiable"
    INCONCLUSIVE = "Inconclusive"


class WitnessKind(str, Enum):
    UNEXCITED_SOURCE = "UnexcitedSource"
    UNMEASURED_SINK = "UnmeasuredSink"
    SCALING_GAMMA = "ScalingGamma"
    COLLINEAR_NEIGHBORS = "CollinearNeighbors"
    CUBIC_BRIDGE = "CubicBridge"


@dataclass
class Witness:
    """Second function set that reproduces every measured response.

    Every edge in ``edges`` carries a different function in ``modified``, so each
    of them is unidentifiable once ``verified`` is set.
    """

    kind: WitnessKind
    original: FunctionSet
    modified: FunctionSet
    pattern: IdentificationPattern
    node: int | None = None
    gamma: float | None = None
    construction: str = ""
    verified: bool = False
    max_deviation: float | None = None

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in sorted(self.original) if self.original[e] != self.modified[e])

    def to_dict(self, names: Mapping[int, str] | None = None) -> dict:
        label = _labeler(names)
        return {
            "kind": self.kind.value,
            "node": None if self.node is None else label(self.node),
            "gamma": self.gamma,
            "construction": self.construction,
            "edges": [[label(h), label(t)] for h, t in self.edges],
            "modified": {
                f"{label(h)},{label(t)}": list(self.modified[(h, t)].coefficients) for h, t in self.edges
            },
            "verified": self.verified,
            "max_deviation": self.max_deviation,
        }


@dataclass(frozen=True)
class Verdict:
    status: Status
    reason: str
    witness: Witness | None = None


@dataclass
class Report:
    pattern_given: IdentificationPattern
    pattern_used: IdentificationPattern
    per_edge: dict[Edge, Verdict]
    seed: int
    draws: int
    functions_source: str
    certificates: dict[int, DisjointPathCertificate] = field(default_factory=dict)
    probes: dict[int, GenericityProbe] = field(default_factory=dict)
    collisions: list[DelayCollision] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def summary(self) -> Status:
        statuses = [v.status for v in self.per_edge.values()]
        if all(s is Status.IDENTIFIABLE for s in statuses):
            return Status.IDENTIFIABLE
        if any(s is Status.UNIDENTIFIABLE for s in statuses):
            return Status.UNIDENTIFIABLE
        return Status.INCONCLUSIVE

    @property
    def witnesses(self) -> list[Witness]:
        seen: list[Witness] = []
        for edge in sorted(self.per_edge):
            w = self.per_edge[edge].witness
            if w is not None and all(w is not s for s in seen):
                seen.append(w)
        return seen

    def to_dict(self, names: Mapping[int, str] | None = None) -> dict:
        label = _labeler(names)
        witnesses = self.witnesses
        index = {id(w): k for k, w in enumerate(witnesses)}

        def pattern(p: IdentificationPattern) -> dict:
            return {"excited": [label(i) for i in sorted(p.excited)], "measured": [label(i) for i in sorted(p.measured)]}

        return {
            "summary": self.summary.value,
            "seed": self.seed,
            "draws": self.draws,
            "functions": self.functions_source,
            "pattern_given": pattern(self.pattern_given),
            "pattern_used": pattern(self.pattern_used),
            "notes": list(self.notes),
            "edges": [
                {
                    "head": label(h),
                    "tail": label(t),
                    "verdict": v.status.value,
                    "reason": v.reason,
                    "witness": None if v.witness is None else index[id(v.witness)],
                }
                for (h, t), v in sorted(self.per_edge.items())
            ],
            "witnesses": [w.to_dict(names) for w in witnesses],
            "certificates": [
                {
                    "node": label(i),
                    "required": c.required,
                    "achieved": c.achieved,
                    "paths": [[label(x) for x in p] for p in c.paths],
                }
                for i, c in sorted(self.certificates.items())
            ],
            "probes": [
                {
                    "node": label(i),
                    "structural": p.structural,
                    "max_rank": p.max_rank,
                    "ranks": list(p.ranks),
                    "generic": p.generic,
                    "witness_point": None
                    if p.witness_point is None
                    else {label(k): x for k, x in sorted(p.witness_point.items())},
                }
                for i, p in sorted(self.probes.items())
            ],
            "delay_collisions": [
                {"target": label(c.target), "source": label(c.source), "lags": list(c.lags), "kind": c.kind}
                for c in self.collisions
            ],
        }


def _labeler(names: Mapping[int, str] | None):
    if names is None:
        return lambda i: i
    return lambda i: names[i]


# -- witness plumbing -------------------------------------------------------


def _finish(witness: Witness, dag: Dag, trials: int, tol: float, seed: int) -> Witness:
    if not witness.edges:
        raise WitnessRefused("modified function set equals the original")
    for edge in witness.edges:
        violation = validate_class(witness.modified[edge])
        if violation is not None:
            raise WitnessRefused(f"modified function on edge {edge} leaves the class: {violation}")
    check = response_equal(dag, witness.pattern, witness.original, witness.modified, trials=trials, tol=tol, seed=seed)
    witness.verified = check.equal
    witness.max_deviation = check.max_deviation
    return witness


def _replacement(original: EdgeFunction, seed: int) -> EdgeFunction:
    for k in range(100):
        candidate = random_function(seed + k, 3)
        if candidate != original:
            return candidate
    raise WitnessRefused("could not draw a replacement function")  # pragma: no cover


def witness_unexcited_source(
    dag: Dag,
    funcs: FunctionSet,
    pattern: IdentificationPattern,
    source: int,
    out_neighbor: int | None = None,
    seed: int = 0,
    replacement: EdgeFunction | None = None,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
) -> Witness:
    """Replace outgoing functions of an unexcited source.

    The source output is identically zero and every edge function vanishes at
    zero, so its outgoing functions never influence any output. With
    ``out_neighbor=None`` every outgoing edge is replaced.
    """
    if dag.in_neighbors(source):
        raise WitnessRefused(f"node {source} is not a source")
    if source in pattern.excited:
        raise WitnessRefused(f"source {source} is excited; its outgoing edges are observable")
    targets = dag.out_neighbors(source) if out_neighbor is None else (out_neighbor,)
    modified = dict(funcs)
    for k, head in enumerate(targets):
        if not dag.has_edge(head, source):
            raise WitnessRefused(f"no edge from {source} to {head}")
        modified[(head, source)] = replacement if replacement is not None else _replacement(funcs[(head, source)], seed + 101 * k)
    w = Witness(WitnessKind.UNEXCITED_SOURCE, dict(funcs), modified, pattern, node=source,
                construction="outgoing functions of an unexcited source replaced")
    return _finish(w, dag, trials, tol, seed)


def witness_unmeasured_sink(
    dag: Dag,
    funcs: FunctionSet,
    pattern: IdentificationPattern,
    sink: int,
    in_neighbor: int | None = None,
    seed: int = 0,
    replacement: EdgeFunction | None = None,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
) -> Witness:
    """Replace incoming functions of an unmeasured sink, whose output reaches no measurement."""
    if dag.out_neighbors(sink):
        raise WitnessRefused(f"node {sink} is not a sink")
    if sink in pattern.measured:
        raise WitnessRefused(f"sink {sink} is measured")
    tails = dag.in_neighbors(sink) if in_neighbor is None else (in_neighbor,)
    modified = dict(funcs)
    for k, tail in enumerate(tails):
        if not dag.has_edge(sink, tail):
            raise WitnessRefused(f"no edge from {tail} to {sink}")
        modified[(sink, tail)] = replacement if replacement is not None else _replacement(funcs[(sink, tail)], seed + 101 * k)
    w = Witness(WitnessKind.UNMEASURED_SINK, dict(funcs), modified, pattern, node=sink,
                construction="incoming functions of an unmeasured sink replaced")
    return _finish(w, dag, trials, tol, seed)


def witness_scaling(
    dag: Dag,
    funcs: FunctionSet,
    pattern: IdentificationPattern,
    node: int,
    gamma: float = 2.0,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> Witness:
    """Scale the incoming functions of an uncovered node by ``gamma`` and feed its
    outgoing functions ``x / gamma``; the node's output is scaled but never observed."""
    if node in pattern.excited or node in pattern.measured:
        raise WitnessRefused(
            f"node {node} is excited or measured; the scaling construction needs a node that is neither"
        )
    if not dag.in_neighbors(node) or not dag.out_neighbors(node):
        raise WitnessRefused(f"node {node} is a source or a sink")
    if gamma == 0 or not math.isfinite(gamma):
        raise WitnessRefused("gamma must be finite and nonzero")
    modified = dict(funcs)
    for tail in dag.in_neighbors(node):
        modified[(node, tail)] = scaled(funcs[(node, tail)], gamma)
    for head in dag.out_neighbors(node):
        modified[(head, node)] = precomposed(funcs[(head, node)], 1.0 / gamma)
    w = Witness(WitnessKind.SCALING_GAMMA, dict(funcs), modified, pattern, node=node, gamma=gamma,
                construction="incoming scaled by gamma, outgoing precomposed with x/gamma")
    return _finish(w, dag, trials, tol, seed)


# -- collinear in-neighbours ------------------------------------------------


@dataclass(frozen=True)
class CollinearSite:
    """Join ``join`` fed directly by ``direct`` and through ``relay`` by ``twin``,
    where ``f_{twin,k} = gamma * f_{direct,k}`` for every shared in-neighbour ``k``."""

    join: int
    direct: int
    relay: int
    twin: int
    gamma: float


def _ratio(a: EdgeFunction, b: EdgeFunction) -> float | None:
    """``g`` with ``a = g * b`` coefficient-wise, if it exists."""
    width = max(len(a.coefficients), len(b.coefficients))
    va = np.array(a.coefficients + (0.0,) * (width - len(a.coefficients)))
    vb = np.array(b.coefficients + (0.0,) * (width - len(b.coefficients)))
    if not vb.any() or a.constant or b.constant:
        return None
    k = int(np.argmax(np.abs(vb)))
    g = va[k] / vb[k]
    if g == 0 or not np.allclose(va, g * vb, rtol=1e-12, atol=1e-15):
        return None
    return float(g)


def find_collinear_sites(dag: Dag, funcs: FunctionSet, pattern: IdentificationPattern | None = None,
                         join: int | None = None) -> list[CollinearSite]:
    sites = []
    excited = pattern.excited if pattern is not None else frozenset()
    joins = [join] if join is not None else list(dag.nodes)
    for i in joins:
        preds = dag.in_neighbors(i)
        for relay in preds:
            if len(dag.in_neighbors(relay)) != 1 or relay in excited:
                continue
            twin = dag.in_neighbors(relay)[0]
            for direct in preds:
                if direct in (relay, twin) or direct in excited or twin in excited:
                    continue
                shared = dag.in_neighbors(direct)
                if not shared or dag.in_neighbors(twin) != shared:
                    continue
                ratios = [_ratio(funcs[(twin, k)], funcs[(direct, k)]) for k in shared]
                if any(r is None for r in ratios) or not np.allclose(ratios, ratios[0], rtol=1e-12):
                    continue
                sites.append(CollinearSite(i, direct, relay, twin, ratios[0]))
    return sites


def _swap_construction(f_direct: EdgeFunction, f_relay: EdgeFunction, f_link: EdgeFunction, gamma: float):
    """``f~_{i,p}(x) = f_{i,r}(f_{r,s}(gamma x))``, ``f~_{i,r}(x) = f_{i,p}(f_{r,s}^{-1}(x) / gamma)``.

    Returns ``None`` when the second function is not a polynomial in the class.
    """
    c, d = f_link.leading, f_link.degree
    new_direct = from_polynomial(to_polynomial(f_relay)(Polynomial([0.0] * d + [c * gamma**d])))
    root = math.copysign(abs(1.0 / c) ** (1.0 / d), c)
    coeffs: dict[int, float] = {}
    for n, b in enumerate(f_direct.coefficients, start=1):
        if b == 0.0:
            continue
        if n % d:
            return None
        coeffs[n // d] = b * (root / gamma) ** n
    new_relay = EdgeFunction(tuple(coeffs.get(k, 0.0) for k in range(1, max(coeffs) + 1)))
    if validate_class(new_direct) or validate_class(new_relay):
        return None
    return new_direct, new_relay


def _shift_construction(f_direct: EdgeFunction, f_relay: EdgeFunction, f_link: EdgeFunction, gamma: float):
    """``f~_{i,r} = f_{i,r} + delta x``, ``f~_{i,p} = f_{i,p} - delta f_{r,s}(gamma x)``."""
    for delta in (1.0, 0.5, 2.0, 0.25):
        new_relay = from_polynomial(to_polynomial(f_relay) + Polynomial([0.0, delta]))
        new_direct = from_polynomial(to_polynomial(f_direct) - delta * to_polynomial(precomposed(f_link, gamma)))
        if not validate_class(new_direct) and not validate_class(new_relay):
            return new_direct, new_relay, delta
    return None


def witness_collinear(
    dag: Dag,
    funcs: FunctionSet,
    gamma: float | None = None,
    pattern: IdentificationPattern | None = None,
    join: int | None = None,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> Witness:
    """Witness for two in-neighbours ``p`` (direct) and ``r`` (relay of twin ``s``) of a
    join whose outputs satisfy ``y_s = gamma * y_p``.

    Then ``y_join`` only sees ``h(y_p) = f_{i,p}(y_p) + f_{i,r}(f_{r,s}(gamma y_p))`` and
    the pair of join functions can be traded against each other. The exact swap
    is tried first; when it leaves the class, an additive split of ``h`` is used.
    """
    if pattern is None:
        pattern = IdentificationPattern(dag.sources, frozenset(dag.nodes))
    sites = find_collinear_sites(dag, funcs, pattern, join)
    if gamma is not None:
        sites = [s for s in sites if math.isclose(s.gamma, gamma, rel_tol=1e-9)]
    if not sites:
        raise WitnessRefused("no collinear in-neighbour pair detected" + (f" with gamma={gamma}" if gamma else ""))
    site = sites[0]
    f_link = funcs[(site.relay, site.twin)]
    if not is_monomial(f_link) or f_link.degree % 2 == 0:
        raise InversionUnsupported(f"relay function f_{site.relay},{site.twin} = {f_link} is not an odd monomial")
    f_direct = funcs[(site.join, site.direct)]
    f_relay = funcs[(site.join, site.relay)]
    swap = _swap_construction(f_direct, f_relay, f_link, site.gamma)
    if swap is not None:
        new_direct, new_relay = swap
        how = "swap: f~_{i,p}(x)=f_{i,r}(f_{r,s}(gamma x)), f~_{i,r}(x)=f_{i,p}(f_{r,s}^-1(x)/gamma)"
    else:
        shift = _shift_construction(f_direct, f_relay, f_link, site.gamma)
        if shift is None:
            raise WitnessRefused("no in-class modification of the join functions found")
        new_direct, new_relay, delta = shift
        how = f"shift: f~_{{i,r}}=f_{{i,r}}+{delta:g}x, f~_{{i,p}}=f_{{i,p}}-{delta:g}f_{{r,s}}(gamma x)"
    modified = dict(funcs)
    modified[(site.join, site.direct)] = new_direct
    modified[(site.join, site.relay)] = new_relay
    w = Witness(WitnessKind.COLLINEAR_NEIGHBORS, dict(funcs), modified, pattern, node=site.join,
                gamma=site.gamma, construction=how)
    return _finish(w, dag, trials, tol, seed)


# -- bridges: proportional in-neighbour responses ---------------------------


def _compose(f: EdgeFunction, p: Polynomial) -> Polynomial:
    acc = Polynomial([0.0])
    for a in reversed(f.coefficients):
        acc = (acc + a) * p
    return acc + f.constant


def collapsed_responses(dag: Dag, funcs: FunctionSet, source: int, nodes: Sequence[int]) -> dict[int, Polynomial] | None:
    """Outputs of ``nodes`` as polynomials in one input variable entering ``source``,
    every delayed copy identified with the same variable and all other inputs zero.

    Returns ``None`` if some degree would exceed ``RESPONSE_DEGREE_CAP``.
    """
    needed = set(nodes)
    for node in nodes:
        needed |= dag.ancestors(node)
    resp: dict[int, Polynomial] = {}
    for i in topological_order(dag):
        if i not in needed:
            continue
        acc = Polynomial([0.0, 1.0]) if i == source else Polynomial([0.0])
        for j in dag.in_neighbors(i):
            degree = resp[j].degree() * funcs[(i, j)].degree
            if degree > RESPONSE_DEGREE_CAP:
                return None
            if resp[j].coef.any():
                acc = acc + _compose(funcs[(i, j)], resp[j])
        resp[i] = acc.trim()
    return {i: resp[i] for i in nodes}


def _proportional(q: Polynomial, p: Polynomial) -> float | None:
    """``mu`` with ``q = mu * p``, if it exists."""
    if not p.coef.any() or p.degree() != q.degree():
        return None
    mu = q.coef[-1] / p.coef[-1]
    width = max(len(p.coef), len(q.coef))
    pc = np.pad(p.coef, (0, width - len(p.coef)))
    qc = np.pad(q.coef, (0, width - len(q.coef)))
    scale = max(np.abs(qc).max(), 1e-300)
    if mu == 0 or not np.allclose(qc, mu * pc, rtol=1e-9, atol=1e-12 * scale):
        return None
    return float(mu)


@dataclass(frozen=True)
class BridgeSite:
    """Join ``join`` with unexcited in-neighbours ``p``, ``q`` driven only by ``source``
    and ``y_q = mu * y_p`` as collapsed single-input responses."""

    join: int
    p: int
    q: int
    source: int
    mu: float


def find_bridge_sites(dag: Dag, funcs: FunctionSet, pattern: IdentificationPattern, join: int | None = None) -> list[BridgeSite]:
    sites = []
    joins = [join] if join is not None else list(dag.nodes)
    for i in joins:
        preds = [p for p in dag.in_neighbors(i) if p not in pattern.excited]
        drivers = {p: frozenset(dag.ancestors(p) & pattern.excited) for p in preds}
        for a_idx, p in enumerate(preds):
            for q in preds[a_idx + 1:]:
                if len(drivers[p]) != 1 or drivers[p] != drivers[q]:
                    continue
                (source,) = drivers[p]
                resp = collapsed_responses(dag, funcs, source, [p, q])
                if resp is None:
                    continue
                mu = _proportional(resp[q], resp[p])
                if mu is not None:
                    sites.append(BridgeSite(i, p, q, source, mu))
    return sites


def witness_bridge(
    dag: Dag,
    funcs: FunctionSet,
    pattern: IdentificationPattern,
    join: int | None = None,
    gamma: float | None = None,
    power: int = 3,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> Witness:
    """``f~_{i,p} = f_{i,p} + gamma mu^k x^k`` and ``f~_{i,q} = f_{i,q} - gamma x^k`` with ``k = power``.

    Since ``y_q = mu y_p`` the two added terms cancel in ``y_i``. With ``gamma=None``
    the first of ``BRIDGE_GAMMAS`` that keeps both modified functions in the class is used.
    """
    if gamma is not None and (gamma == 0 or not math.isfinite(gamma)):
        raise WitnessRefused("gamma must be finite and nonzero")
    sites = find_bridge_sites(dag, funcs, pattern, join)
    if not sites:
        raise WitnessRefused("no join with proportional single-source in-neighbour responses detected")
    site = sites[0]
    f_p = funcs[(site.join, site.p)]
    f_q = funcs[(site.join, site.q)]

    def shifted(g):
        return (
            from_polynomial(to_polynomial(f_p) + to_polynomial(monomial(g * site.mu**power, power))),
            from_polynomial(to_polynomial(f_q) - to_polynomial(monomial(g, power))),
        )

    if gamma is None:
        # a candidate can cancel the leading term of f_{i,q} or f_{i,p}
        gamma = next(
            (g for g in BRIDGE_GAMMAS if all(validate_class(f) is None for f in shifted(g))), BRIDGE_GAMMAS[0]
        )
    modified = dict(funcs)
    modified[(site.join, site.p)], modified[(site.join, site.q)] = shifted(gamma)
    w = Witness(WitnessKind.CUBIC_BRIDGE, dict(funcs), modified, pattern, node=site.join, gamma=gamma,
                construction=f"f~_{{i,p}}=f_{{i,p}}+gamma*mu^{power}x^{power}, f~_{{i,q}}=f_{{i,q}}-gamma x^{power}, mu={site.mu:g}")
    return _finish(w, dag, trials, tol, seed)


def bridge_shape(dag: Dag) -> tuple[int, int, int, int]:
    """``(source, p, q, join)`` if ``dag`` is the four-node bridge ``s->p->t``, ``s->q->t``."""
    if dag.n != 4 or len(dag.edges) != 4 or len(dag.sources) != 1 or len(dag.sinks) != 1:
        raise WitnessRefused("graph is not a four-node bridge")
    (s,) = dag.sources
    (t,) = dag.sinks
    p, q = sorted(set(dag.nodes) - {s, t})
    for head, tail in ((p, s), (q, s), (t, p), (t, q)):
        if not dag.has_edge(head, tail):
            raise WitnessRefused("graph is not a four-node bridge")
    return s, p, q, t


def witness_cubic_bridge(
    dag: Dag,
    coeffs: Sequence[float],
    gamma: float,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> Witness:
    """Four-node bridge with cubic monomials ``(a_{p,s}, a_{q,s}, a_{t,p}, a_{t,q})``.

    Modified join functions: ``(a_{t,p} + gamma a_{q,s}^3 / a_{p,s}^3) x^3`` and
    ``(a_{t,q} - gamma) x^3``; only the source is excited.
    """
    s, p, q, t = bridge_shape(dag)
    a_ps, a_qs, a_tp, a_tq = (float(c) for c in coeffs)
    if a_ps == 0:
        raise WitnessRefused("a_{p,s} must be nonzero")
    if gamma == a_tq:
        raise WitnessRefused(f"gamma = a_{{t,q}} = {a_tq} would make the modified f_{{t,q}} identically zero")
    funcs = {
        (p, s): monomial(a_ps, 3),
        (q, s): monomial(a_qs, 3),
        (t, p): monomial(a_tp, 3),
        (t, q): monomial(a_tq, 3),
    }
    pattern = IdentificationPattern(frozenset({s}), frozenset({p, q, t}))
    return witness_bridge(dag, funcs, pattern, join=t, gamma=gamma, trials=trials, tol=tol, seed=seed)


# -- analysis ---------------------------------------------------------------


def _necessary_witnesses(dag, funcs, pattern, violations, seed, trials, tol) -> list[tuple[str, Witness | None, list[Edge]]]:
    out = []
    for v in violations:
        node = v.node
        if v.kind is ViolationKind.UNEXCITED_SOURCE:
            edges = [(h, node) for h in dag.out_neighbors(node)]
            build = lambda node=node: witness_unexcited_source(dag, funcs, pattern, node, seed=seed, trials=trials, tol=tol)
            reason = f"source {node} is not excited"
        elif v.kind is ViolationKind.UNMEASURED_SINK:
            edges = [(node, t) for t in dag.in_neighbors(node)]
            build = lambda node=node: witness_unmeasured_sink(dag, funcs, pattern, node, seed=seed, trials=trials, tol=tol)
            reason = f"sink {node} is not measured"
        else:
            if node in dag.sources or node in dag.sinks:
                continue
            edges = [(node, t) for t in dag.in_neighbors(node)] + [(h, node) for h in dag.out_neighbors(node)]
            build = lambda node=node: witness_scaling(dag, funcs, pattern, node, seed=seed, trials=trials, tol=tol)
            reason = f"node {node} is neither excited nor measured"
        try:
            witness = build()
        except WitnessRefused:
            witness = None
        out.append((reason, witness, edges))
    return out


def _structural_witness(dag, funcs, pattern, node, seed, trials, tol) -> Witness | None:
    attempts = (
        lambda: witness_bridge(dag, funcs, pattern, join=node, seed=seed, trials=trials, tol=tol),
        lambda: witness_collinear(dag, funcs, pattern=pattern, join=node, seed=seed, trials=trials, tol=tol),
    )
    for attempt in attempts:
        try:
            witness = attempt()
        except (WitnessRefused, InversionUnsupported):
            continue
        if witness.verified:
            return witness
    return None


def analyze(
    dag: Dag,
    pattern: IdentificationPattern,
    funcs: FunctionSet | None = None,
    seed: int = DEFAULT_SEED,
    draws: int = DEFAULT_DRAWS,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
) -> Report:
    """Per-edge verdicts for ``dag`` under ``pattern``.

    Without ``funcs``, independent random cubics drawn from ``seed`` stand in for a
    generic function set; witnesses then refer to that set.
    """
    if funcs is None:
        funcs = random_function_set(dag, seed)
        source = "random"
    else:
        validate_function_set(dag, funcs)
        funcs = dict(funcs)
        source = "given"
    per_edge: dict[Edge, Verdict] = {}
    report = Report(pattern, pattern, per_edge, seed, draws, source)
    report.collisions = delay_collision_report(dag, pattern)

    check = check_necessary(dag, pattern)
    if not check.ok:
        for reason, witness, edges in _necessary_witnesses(dag, funcs, pattern, check.violations, seed, trials, tol):
            if witness is not None and witness.verified:
                for edge in witness.edges:
                    per_edge[edge] = Verdict(Status.UNIDENTIFIABLE, reason, witness)
        listed = ", ".join(map(str, check.violations))
        for edge in dag.edge_keys:
            per_edge.setdefault(edge, Verdict(Status.INCONCLUSIVE, f"necessary conditions fail ({listed}); not analyzed further"))
        report.notes.append(f"necessary conditions violated: {listed}")
        return report

    used = reduce_to_full_measurement(pattern, dag)
    report.pattern_used = used
    report.notes.append(
        "verdicts computed under full measurement (excited set unchanged, every node measured); "
        "this is equivalent for patterns that pass the necessary checks"
    )

    if is_tree(dag):
        for edge in dag.edge_keys:
            per_edge[edge] = Verdict(Status.IDENTIFIABLE, "tree with every source excited, every sink measured and every node covered")
        return report

    report.notes.append("structural analysis assumes every excitation's delayed copies coincide (worst case)")
    for i in topological_order(dag):
        preds = dag.in_neighbors(i)
        if not preds:
            continue
        incoming = [(i, j) for j in preds]
        cert = node_certificate(dag, used, i)
        report.certificates[i] = cert
        try:
            probe = genericity_probe(dag, funcs, used, i, draws=draws, seed=seed + i, stop_early=True)
        except GenericityUndetermined as exc:
            for edge in incoming:
                per_edge[edge] = Verdict(Status.INCONCLUSIVE, f"genericity undetermined: {exc}")
            continue
        report.probes[i] = probe
        if cert.satisfied and probe.generic:
            for edge in incoming:
                per_edge[edge] = Verdict(
                    Status.IDENTIFIABLE,
                    f"{cert.achieved} vertex-disjoint paths reach the {cert.required} in-neighbours; numeric rank attains it",
                )
            continue
        if not cert.satisfied:
            reason = f"only {cert.achieved} vertex-disjoint paths reach the {cert.required} in-neighbours"
        else:
            reason = f"numeric rank {probe.max_rank} stays below the structural bound {probe.structural} on {draws} draws"
        witness = _structural_witness(dag, funcs, used, i, seed, trials, tol)
        for edge in incoming:
            if witness is not None and edge in witness.edges:
                per_edge[edge] = Verdict(Status.UNIDENTIFIABLE, f"{reason}; {witness.kind.value} witness verified", witness)
            else:
                per_edge[edge] = Verdict(Status.INCONCLUSIVE, f"{reason}; sufficient condition not met")
    return report


def build_witness(
    kind: WitnessKind | str,
    dag: Dag,
    funcs: FunctionSet,
    pattern: IdentificationPattern,
    node: int | None = None,
    gamma: float | None = None,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
) -> Witness:
    """Dispatch to the constructor for ``kind`` (used by the command line)."""
    kind = WitnessKind(kind)
    common = dict(trials=trials, tol=tol, seed=seed)
    if kind is WitnessKind.UNEXCITED_SOURCE:
        if node is None:
            raise WitnessRefused("--node is required for UnexcitedSource")
        return witness_unexcited_source(dag, funcs, pattern, node, **common)
    if kind is WitnessKind.UNMEASURED_SINK:
        if node is None:
            raise WitnessRefused("--node is required for UnmeasuredSink")
        return witness_unmeasured_sink(dag, funcs, pattern, node, **common)
    if kind is WitnessKind.SCALING_GAMMA:
        if node is None:
            raise WitnessRefused("--node is required for ScalingGamma")
        return witness_scaling(dag, funcs, pattern, node, 2.0 if gamma is None else gamma, **common)
    if kind is WitnessKind.COLLINEAR_NEIGHBORS:
        return witness_collinear(dag, funcs, gamma, pattern, join=node, **common)
    return witness_bridge(dag, funcs, pattern, join=node, gamma=gamma, **common)


__all__ = [
    "DEGREE_CAP",
    "Report",
    "Status",
    "Verdict",
    "Witness",
    "WitnessKind",
    "analyze",
    "build_witness",
    "collapsed_responses",
    "find_bridge_sites",
    "find_collinear_sites",
    "witness_bridge",
    "witness_collinear",
    "witness_cubic_bridge",
    "witness_scaling",
    "witness_unexcited_source",
    "witness_unmeasured_sink",
]
