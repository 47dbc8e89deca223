"""Edge functions: odd-degree polynomials with zero constant term.

The function class used throughout requires analyticity, ``f(0) = 0``, at least one
nonlinear Taylor coefficient and range equal to the whole real line. Restricting to
polynomials makes the first property automatic and lets surjectivity be decided
from the parity of the degree.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import FunctionSetMismatch, InversionUnsupported

DEGREE_CAP = 9


@dataclass(frozen=True)
class EdgeFunction:
    """Polynomial ``sum_n a_n x^n`` with ``coefficients = (a_1, ..., a_d)``.

    ``a_0`` is not stored; a nonzero constant is represented only through
    ``constant`` so that ``validate_class`` can report it.
    """

    coefficients: tuple[float, ...]
    constant: float = 0.0

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coefficients)
        if not all(math.isfinite(c) for c in coeffs) or not math.isfinite(self.constant):
            raise ValueError("edge function coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def degree(self) -> int:
        for k in range(len(self.coefficients), 0, -1):
            if self.coefficients[k - 1] != 0.0:
                return k
        return 0

    @property
    def leading(self) -> float:
        d = self.degree
        return self.coefficients[d - 1] if d else 0.0

    def coefficient(self, power: int) -> float:
        if power == 0:
            return self.constant
        return self.coefficients[power - 1] if power <= len(self.coefficients) else 0.0

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self) -> str:
        terms = [f"{a:g}*x^{k}" for k, a in enumerate(self.coefficients, start=1) if a]
        if self.constant:
            terms.insert(0, f"{self.constant:g}")
        return " + ".join(terms) or "0"


FunctionSet = dict[tuple[int, int], EdgeFunction]


def monomial(a: float, power: int) -> EdgeFunction:
    """``a * x**power``."""
    return EdgeFunction(tuple([0.0] * (power - 1) + [a]))


def evaluate(f: EdgeFunction, x):
    """Horner evaluation; accepts scalars or numpy arrays."""
    if np.ndim(x) == 0 and not math.isfinite(float(x)):
        raise ValueError(f"cannot evaluate at non-finite x={x}")
    acc = 0.0
    for a in reversed(f.coefficients):
        acc = (acc + a) * x
    return acc + f.constant


def derivative(f: EdgeFunction, x):
    if np.ndim(x) == 0 and not math.isfinite(float(x)):
        raise ValueError(f"cannot differentiate at non-finite x={x}")
    acc = 0.0
    for k in range(len(f.coefficients), 0, -1):
        acc = acc * x + k * f.coefficients[k - 1]
    return acc


class ClassViolation:
    """Base for the typed failures returned by ``validate_class``."""

    message = "edge function is outside the admissible class"

    def __init__(self, f: EdgeFunction):
        self.function = f

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.function})"

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.function == other.function

    def __str__(self) -> str:
        return f"{type(self).__name__}: {self.message} ({self.function})"


class ZeroViolation(ClassViolation):
    message = "f(0) must be 0"


class PurelyLinear(ClassViolation):
    message = "needs a nonzero coefficient of degree > 1"


class NotSurjective(ClassViolation):
    message = "degree must be odd with a nonzero leading coefficient so that the range is R"


class DegreeTooHigh(ClassViolation):
    message = f"degree exceeds the cap of {DEGREE_CAP}"


def validate_class(f: EdgeFunction, degree_cap: int = DEGREE_CAP) -> ClassViolation | None:
    """Return the first violated membership property, or ``None`` when ``f`` belongs."""
    if f.constant != 0.0:
        return ZeroViolation(f)
    if not any(a != 0.0 for a in f.coefficients[1:]):
        return PurelyLinear(f)
    if f.degree % 2 == 0:
        return NotSurjective(f)
    if f.degree > degree_cap:
        return DegreeTooHigh(f)
    return None


def is_monomial(f: EdgeFunction) -> bool:
    return f.constant == 0.0 and sum(1 for a in f.coefficients if a != 0.0) == 1


def invert_monomial(f: EdgeFunction, y):
    """Real inverse of an odd monomial ``a x^n``: ``sign(y/a) |y/a|^(1/n)``."""
    if not is_monomial(f) or f.degree % 2 == 0:
        raise InversionUnsupported(f"cannot invert {f}: not an odd monomial")
    ratio = np.asarray(y, dtype=float) / f.leading
    out = np.sign(ratio) * np.abs(ratio) ** (1.0 / f.degree)
    return float(out) if out.ndim == 0 else out


def random_function(seed, degree: int = 3) -> EdgeFunction:
    """Random class member; every coefficient has magnitude in ``[0.1, 2]`` and a random sign."""
    if degree < 3 or degree % 2 == 0:
        raise ValueError(f"degree must be odd and >= 3, got {degree}")
    rng = np.random.default_rng(seed)
    mags = rng.uniform(0.1, 2.0, size=degree)
    signs = rng.choice([-1.0, 1.0], size=degree)
    return EdgeFunction(tuple(mags * signs))


def random_function_set(dag, seed, degree: int = 3) -> FunctionSet:
    """Independent random members for every edge, deterministic per seed."""
    states = np.random.SeedSequence(seed).generate_state(max(len(dag.edge_keys), 1))
    return {edge: random_function(int(s), degree) for edge, s in zip(dag.edge_keys, states)}


def scaled(f: EdgeFunction, gamma: float) -> EdgeFunction:
    """``gamma * f(x)``."""
    return EdgeFunction(tuple(gamma * a for a in f.coefficients), gamma * f.constant)


def precomposed(f: EdgeFunction, factor: float) -> EdgeFunction:
    """``f(factor * x)``, i.e. ``a_n <- a_n * factor^n``."""
    return EdgeFunction(
        tuple(a * factor**k for k, a in enumerate(f.coefficients, start=1)), f.constant
    )


def to_polynomial(f: EdgeFunction) -> Polynomial:
    return Polynomial((f.constant,) + f.coefficients)


def from_polynomial(p: Polynomial, tol: float = 0.0) -> EdgeFunction:
    coef = np.array(p.coef, dtype=float)
    if tol:
        coef[np.abs(coef) <= tol * max(np.abs(coef).max(), 1.0)] = 0.0
    coef = np.trim_zeros(coef, "b")
    if coef.size == 0:
        return EdgeFunction(())
    return EdgeFunction(tuple(coef[1:]), coef[0])


def validate_function_set(dag, funcs: Mapping[tuple[int, int], EdgeFunction]) -> None:
    """Raise when the keys differ from the edge set or a member is outside the class."""
    keys = set(funcs)
    edges = set(dag.edge_keys)
    if keys != edges:
        missing = sorted(edges - keys)
        extra = sorted(keys - edges)
        raise FunctionSetMismatch(f"function keys differ from edges: missing {missing}, extra {extra}")
    for edge in sorted(funcs):
        violation = validate_class(funcs[edge])
        if violation is not None:
            raise FunctionSetMismatch(f"edge {edge}: {violation}")


def coefficient_vector(funcs: Mapping, edges: Sequence[tuple[int, int]]) -> np.ndarray:
    """Flattened coefficients for ``edges`` (used to compare random draws)."""
    return np.concatenate([np.asarray(funcs[e].coefficients) for e in edges])
