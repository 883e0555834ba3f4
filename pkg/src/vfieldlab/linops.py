"""Linear operators built from a planar field on degree-truncated polynomial spaces.

``ad_X : Y -> [X, Y]`` acts on fields of degree <= N; its kernel is the
truncated centralizer C_N(X).  ``L_X : g -> X.grad(g)`` acts on scalars of
degree <= N; its kernel holds the polynomial first integrals and its corank
is the codimension of the range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactla import ExactMatrix, SubspaceBasis, coordinates, nullspace, rank
from .polyalg import Exponent, Poly, VectorField2, directional_derivative, lie_bracket

MAX_DEGREE = 8
DEFAULT_DEGREE = 3


class ZeroField(ValueError):
    """The operation needs a nonzero field."""


def monomials(N: int) -> List[Exponent]:
    """Exponents (i, j) with i + j <= N: by total degree, then x-power descending."""
    out = []
    for d in range(N + 1):
        for i in range(d, -1, -1):
            out.append((i, d - i))
    return out


def _check_degree(N: int, lo: int = 0):
    if N < lo:
        raise ValueError(f"degree bound must be >= {lo}, got {N}")
    if N > MAX_DEGREE:
        raise ValueError(f"degree bound {N} exceeds the cap {MAX_DEGREE}")


@dataclass(frozen=True)
class FieldSpaceIndex:
    """Coordinates on fields of degree <= N: (m, 0) for every monomial m, then (0, m)."""

    N: int

    @property
    def monomials(self) -> List[Exponent]:
        return monomials(self.N)

    @property
    def dim(self) -> int:
        return (self.N + 1) * (self.N + 2)

    def basis_field(self, k: int) -> VectorField2:
        mons = self.monomials
        half = len(mons)
        zero = Poly.zero()
        if k < half:
            return VectorField2(Poly.monomial(mons[k]), zero)
        return VectorField2(zero, Poly.monomial(mons[k - half]))

    def coords(self, Y: VectorField2) -> Tuple[Fraction, ...]:
        if Y.degree > self.N:
            raise ValueError(f"field of degree {Y.degree} does not fit degree bound {self.N}")
        mons = self.monomials
        return tuple(Y.P.coeff(m) for m in mons) + tuple(Y.Q.coeff(m) for m in mons)

    def field(self, v: Sequence[Fraction]) -> VectorField2:
        mons = self.monomials
        half = len(mons)
        P = Poly({m: c for m, c in zip(mons, v[:half])})
        Q = Poly({m: c for m, c in zip(mons, v[half:])})
        return VectorField2(P, Q)


def _scalar_coords(g: Poly, N: int) -> List[Fraction]:
    return [g.coeff(m) for m in monomials(N)]


def _target_degree(X: VectorField2, N: int) -> int:
    if X.is_zero():
        return N
    return max(N + int(X.degree) - 1, 0)


def ad_matrix(X: VectorField2, N: int) -> ExactMatrix:
    """Matrix of Y -> [X, Y] from degree <= N fields to degree <= N + deg X - 1 fields."""
    _check_degree(N)
    return _ad_matrix_uncapped(X, N)


def derivative_matrix(X: VectorField2, N: int) -> ExactMatrix:
    """Matrix of g -> P g_x + Q g_y on scalars of degree <= N."""
    _check_degree(N)
    mons = monomials(N)
    target = _target_degree(X, N)
    cols = [_scalar_coords(directional_derivative(X, Poly.monomial(m)), target) for m in mons]
    nrows = (target + 1) * (target + 2) // 2
    rows = [[cols[k][i] for k in range(len(mons))] for i in range(nrows)]
    return ExactMatrix.from_rows(rows, len(mons))


@dataclass
class CentralizerReport:
    N: int
    dimension: int
    basis: List[VectorField2]
    structure_constants: Optional[List[List[List[Fraction]]]]
    closed_within_degree: Optional[bool]
    abelian: bool
    # basis the structure constants refer to: C_N itself when closed, else C_{2N-1}
    structure_basis: List[VectorField2] = field(default_factory=list)


@dataclass
class OperatorReport:
    N: int
    domain_dimension: int
    codomain_dimension: int
    rank: int
    corank: int
    kernel_basis: List[Poly]


def _centralizer_space(X: VectorField2, N: int) -> Tuple[FieldSpaceIndex, SubspaceBasis]:
    return FieldSpaceIndex(N), nullspace(ad_matrix(X, N))


def _express(fields: Sequence[VectorField2], target: Sequence[VectorField2], N: int):
    """Coordinates of each field in ``target`` (all of degree <= N), None if any misses."""
    idx = FieldSpaceIndex(N)
    span = SubspaceBasis(idx.dim, tuple(idx.coords(B) for B in target))
    out = []
    for F in fields:
        c = coordinates(span, idx.coords(F))
        if c is None:
            return None
        out.append(list(c))
    return out


def centralizer_basis(X: VectorField2, N: int = DEFAULT_DEGREE, structure: bool = True) -> CentralizerReport:
    """Basis of C_N(X) = {Y : deg Y <= N, [X, Y] = 0}.

    With ``structure=True`` the pairwise brackets are expressed in C_N(X) when
    they all stay of degree <= N, otherwise in C_{2N-1}(X), which contains
    them by the Jacobi identity.
    """
    if X.is_zero():
        raise ZeroField("centralizer of the zero field is everything")
    _check_degree(N, 1)
    idx, ker = _centralizer_space(X, N)
    basis = [idx.field(v) for v in ker.basis]
    d = len(basis)
    brackets: Dict[Tuple[int, int], VectorField2] = {}
    for a in range(d):
        for b in range(a + 1, d):
            brackets[a, b] = lie_bracket(basis[a], basis[b])
    abelian = all(B.is_zero() for B in brackets.values())
    report = CentralizerReport(N, d, basis, None, None, abelian)
    if not structure:
        return report

    fits = all(B.degree <= N for B in brackets.values())
    ordered = [brackets[a, b] for a in range(d) for b in range(a + 1, d)]
    coeffs = _express(ordered, basis, N) if fits else None
    if coeffs is not None:
        closed, sbasis = True, basis
    else:
        closed = False
        Nb = 2 * N - 1
        ib = FieldSpaceIndex(Nb)
        sbasis = [ib.field(v) for v in nullspace(_ad_matrix_uncapped(X, Nb)).basis]
        coeffs = _express(ordered, sbasis, Nb)
        if coeffs is None:  # pragma: no cover - excluded by the Jacobi identity
            raise ArithmeticError("bracket of centralizer elements left the centralizer")
    e = len(sbasis)
    c = [[[Fraction(0)] * e for _ in range(d)] for _ in range(d)]
    it = iter(coeffs)
    for a in range(d):
        for b in range(a + 1, d):
            row = next(it)
            c[a][b] = list(row)
            c[b][a] = [-v for v in row]
    report.structure_constants = c
    report.closed_within_degree = closed
    report.structure_basis = sbasis
    return report


def _ad_matrix_uncapped(X: VectorField2, N: int) -> ExactMatrix:
    src = FieldSpaceIndex(N)
    dst = FieldSpaceIndex(_target_degree(X, N))
    cols = [dst.coords(lie_bracket(X, src.basis_field(k))) for k in range(src.dim)]
    rows = [[cols[k][i] for k in range(src.dim)] for i in range(dst.dim)]
    return ExactMatrix.from_rows(rows, src.dim)


def is_abelian(report: CentralizerReport) -> bool:
    B = report.basis
    return all(lie_bracket(B[a], B[b]).is_zero() for a in range(len(B)) for b in range(a + 1, len(B)))


def same_span(A: Sequence[VectorField2], B: Sequence[VectorField2], N: int) -> bool:
    idx = FieldSpaceIndex(N)
    sa = SubspaceBasis.from_vectors(idx.dim, [idx.coords(F) for F in A])
    sb = SubspaceBasis.from_vectors(idx.dim, [idx.coords(F) for F in B])
    return sa == sb


@dataclass
class CentralizerComparison:
    original: CentralizerReport
    rescaled: CentralizerReport
    rescaled_field: VectorField2
    dimensions_equal: bool
    abelian_equal: bool

    @property
    def necessary_conditions_hold(self) -> bool:
        return self.dimensions_equal and self.abelian_equal


def compare_centralizers(X: VectorField2, f: Poly, N: int = DEFAULT_DEGREE) -> CentralizerComparison:
    """C_N(X) against C_N(fX); equal dimension and abelian-ness are necessary for isomorphism."""
    if f.is_zero():
        raise ZeroField("rescaling function is zero")
    fX = VectorField2(f * X.P, f * X.Q)
    a = centralizer_basis(X, N)
    b = centralizer_basis(fX, N)
    return CentralizerComparison(a, b, fX, a.dimension == b.dimension, a.abelian == b.abelian)


def derivative_operator_report(X: VectorField2, N: int) -> OperatorReport:
    M = derivative_matrix(X, N)
    r = rank(M)
    mons = monomials(N)
    ker = [Poly({m: c for m, c in zip(mons, v)}) for v in nullspace(M).basis]
    return OperatorReport(N, M.cols, M.rows, r, M.rows - r, ker)


def first_integrals(X: VectorField2, N: int) -> List[Poly]:
    """Nonconstant polynomial first integrals of degree <= N (a kernel basis minus 1)."""
    _check_degree(N, 1)
    return [g for g in derivative_operator_report(X, N).kernel_basis if not g.is_constant()]


def dimension_profile(X: VectorField2, N_max: int) -> List[Tuple[int, int]]:
    if X.is_zero():
        raise ZeroField("centralizer of the zero field is everything")
    _check_degree(N_max, 1)
    return [(N, nullspace(ad_matrix(X, N)).dim) for N in range(1, N_max + 1)]
