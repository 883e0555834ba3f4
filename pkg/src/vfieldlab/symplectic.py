"""Cotangent lift of planar fields to R^4 = (x, y, z, w).

A field X = (P, Q) lifts to H = zP + wQ; a second field Y = (R, S) gives the
momentum function G = zR + wS.  With the canonical bracket pairing x with z
and y with w, {H, G} = -(z [X,Y]_1 + w [X,Y]_2), so commuting fields give
Poisson-commuting functions and conversely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .exactla import ExactMatrix, rank
from .polyalg import Poly, VectorField2, lie_bracket

X_, Y_, Z_, W_ = 0, 1, 2, 3


def _embed(p: Poly) -> Poly:
    """A polynomial in (x, y) viewed in (x, y, z, w)."""
    return Poly({(i, j, 0, 0): c for (i, j), c in p.items()}, nvars=4)


def _z() -> Poly:
    return Poly.var("z", 4)


def _w() -> Poly:
    return Poly.var("w", 4)


@dataclass(frozen=True)
class LiftedHamiltonian:
    H: Poly
    source: VectorField2


def lift(X: VectorField2) -> LiftedHamiltonian:
    return LiftedHamiltonian(_z() * _embed(X.P) + _w() * _embed(X.Q), X)


def moment(Y: VectorField2) -> Poly:
    return _z() * _embed(Y.P) + _w() * _embed(Y.Q)


def poisson(F: Poly, G: Poly) -> Poly:
    """{F, G} = F_x G_z + F_y G_w - F_z G_x - F_w G_y."""
    return (
        F.partial(X_) * G.partial(Z_)
        + F.partial(Y_) * G.partial(W_)
        - F.partial(Z_) * G.partial(X_)
        - F.partial(W_) * G.partial(Y_)
    )


def remark_defect(X: VectorField2, Y: VectorField2) -> Poly:
    """{H, G} + z [X,Y]_1 + w [X,Y]_2; zero for every pair of fields."""
    B = lie_bracket(X, Y)
    return poisson(lift(X).H, moment(Y)) + _z() * _embed(B.P) + _w() * _embed(B.Q)


def is_linear_in_momenta(F: Poly) -> bool:
    return all(e[Z_] + e[W_] == 1 for e, _ in F.items())


@dataclass
class IntegrabilityCertificate:
    """Evidence that H has a second Poisson-commuting integral G.

    ``gradient_ranks`` holds the rank of the 2x4 matrix (grad H; grad G) at
    each sample point; rank 2 at some point shows H and G are functionally
    independent there.
    """

    H: Poly
    G: Poly
    bracket: Poly
    sample_points: List[Tuple[Fraction, ...]]
    gradient_ranks: List[int]

    @property
    def commuting(self) -> bool:
        return self.bracket.is_zero()

    @property
    def independent(self) -> bool:
        return any(r == 2 for r in self.gradient_ranks)


_DEFAULT_POINTS = [
    (Fraction(1, 2), Fraction(1, 3), Fraction(2), Fraction(-1)),
    (Fraction(-3, 2), Fraction(5, 7), Fraction(1), Fraction(3)),
    (Fraction(2), Fraction(-1, 4), Fraction(-2, 3), Fraction(1, 5)),
]


def gradient(F: Poly, point: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    return tuple(F.partial(k).evaluate(point) for k in range(4))


def integrability_certificate(X: VectorField2, Y: VectorField2, points=None) -> IntegrabilityCertificate:
    H = lift(X).H
    G = moment(Y)
    pts = list(points) if points is not None else list(_DEFAULT_POINTS)
    ranks = [rank(ExactMatrix.from_rows([gradient(H, p), gradient(G, p)])) for p in pts]
    return IntegrabilityCertificate(H, G, poisson(H, G), pts, ranks)
