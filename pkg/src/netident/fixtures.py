"""Reference networks used in tests, examples and the acceptance suite.

Edges are written ``tail -> head`` in comments and stored as ``(head, tail, delay)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .funclib import FunctionSet, monomial
from .graph import Dag
from .patterns import IdentificationPattern


@dataclass(frozen=True)
class Fixture:
    name: str
    dag: Dag
    pattern: IdentificationPattern
    funcs: FunctionSet | None = None


def _dag(arrows, n, delays=None) -> Dag:
    delays = delays or {}
    return Dag(n, [(h, t, delays.get((h, t), 1)) for t, h in arrows])


def triangle(m21: int = 1, m32: int = 1, m31: int = 2) -> Dag:
    """1 -> 2 -> 3 plus the shortcut 1 -> 3."""
    return Dag(3, [(2, 1, m21), (3, 2, m32), (3, 1, m31)])


def fig1() -> Fixture:
    """Six-node example with dual-role nodes 4 and 6."""
    dag = _dag([(1, 2), (2, 4), (1, 3), (2, 3), (4, 6), (3, 5), (5, 6), (3, 6)], 6)
    return Fixture("fig1", dag, IdentificationPattern.of({1, 4, 5, 6}, {2, 3, 4, 6}))


def fig3() -> Fixture:
    """Multipartite network; sources excited, the rest measured."""
    dag = _dag([(1, 3), (1, 4), (2, 5), (4, 7), (5, 7), (3, 6), (3, 7), (6, 8), (7, 9), (7, 8)], 9)
    return Fixture("fig3", dag, IdentificationPattern.of({1, 2}, set(range(3, 10))))


def fig4() -> Fixture:
    """Eight-node network used for the measured-aware ordering."""
    dag = _dag(
        [(1, 2), (2, 4), (1, 3), (4, 6), (3, 5), (6, 5), (3, 4), (6, 8), (5, 7), (8, 7), (6, 7), (3, 2)], 8
    )
    return Fixture("fig4", dag, IdentificationPattern.of({1, 2, 4, 6, 8}, {3, 5, 7}))


def fig5(collinear: bool = True) -> Fixture:
    """Join 6 fed by 4 directly and by 3 through relay 5, with ``m_{6,4} = 2``.

    With ``collinear`` the functions satisfy ``f_{3,k} = 2 f_{4,k}`` (pure cubics)
    and ``f_{5,3} = x^3``.
    """
    dag = _dag([(1, 3), (3, 5), (1, 4), (4, 6), (2, 3), (2, 4), (5, 6)], 6, {(6, 4): 2})
    funcs = None
    if collinear:
        funcs = {
            (4, 1): monomial(1.0, 3),
            (3, 1): monomial(2.0, 3),
            (4, 2): monomial(1.0, 3),
            (3, 2): monomial(2.0, 3),
            (5, 3): monomial(1.0, 3),
            (6, 4): monomial(1.0, 3),
            (6, 5): monomial(1.0, 3),
        }
    return Fixture("fig5", dag, IdentificationPattern.of({1, 2}, {3, 4, 5, 6}), funcs)


def fig6(coeffs=(1.0, 2.0, 1.0, 1.0)) -> Fixture:
    """Bridge 1 -> {2, 3} -> 4 with cubic monomials ``(a21, a31, a42, a43)``."""
    dag = _dag([(1, 2), (1, 3), (2, 4), (3, 4)], 4)
    a21, a31, a42, a43 = coeffs
    funcs = {
        (2, 1): monomial(a21, 3),
        (3, 1): monomial(a31, 3),
        (4, 2): monomial(a42, 3),
        (4, 3): monomial(a43, 3),
    }
    return Fixture("fig6", dag, IdentificationPattern.of({1}, {2, 3, 4}), funcs)


def fig7() -> Fixture:
    """Five-node network identifiable with two excitations."""
    dag = _dag([(1, 3), (3, 5), (2, 1), (4, 5), (2, 3), (2, 4)], 5)
    return Fixture("fig7", dag, IdentificationPattern.of({1, 2}, {3, 4, 5}))


def chain(n: int = 3) -> Dag:
    return Dag(n, [(i + 1, i, 1) for i in range(1, n)])


ALL = {"fig1": fig1, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6, "fig7": fig7}
