"""Exact rational linear algebra: fraction-free elimination, rank and nullspaces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple

Vector = Tuple[Fraction, ...]


@dataclass(frozen=True)
class ExactMatrix:
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        entries = tuple(Fraction(v) for r in rows for v in r)
        return cls(len(rows), ncols, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def matvec(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.append(sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)))
        return tuple(out)

    def is_zero(self) -> bool:
        return not any(self.entries)


@dataclass(frozen=True)
class SubspaceBasis:
    """Canonical basis of a subspace of Q^n.

    Each vector has a distinguished trailing coordinate (its last nonzero
    entry) equal to 1, and every other basis vector is zero there.  Vectors
    are ordered by that coordinate.  This is the reduced echelon form read
    from the right, and it is unique for a given subspace; nullspaces come
    out in this form directly (free variables are the trailing coordinates).
    """

    ambient: int
    basis: Tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def from_vectors(cls, ambient: int, vectors: Sequence[Sequence]) -> "SubspaceBasis":
        if not vectors:
            return cls(ambient, ())
        flipped = [list(reversed([Fraction(v) for v in vec])) for vec in vectors]
        rref, pivots = _rref(_integer_rows(flipped), ambient)
        out = [tuple(reversed(rref[i])) for i in range(len(pivots))]
        out.sort(key=lambda v: max(k for k, c in enumerate(v) if c))
        return cls(ambient, tuple(out))

    def contains(self, v: Sequence[Fraction]) -> bool:
        return coordinates(self, v) is not None


def _integer_rows(rows: List[List[Fraction]]) -> List[List[int]]:
    out = []
    for r in rows:
        d = lcm(*(Fraction(c).denominator for c in r)) if r else 1
        out.append([int(Fraction(c) * d) for c in r])
    return out


def bareiss_echelon(rows: List[List[int]], ncols: int) -> Tuple[List[List[int]], List[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the transformed rows (pivot rows first) and the pivot columns.
    The pivot in each column is the nonzero candidate of least bit length.
    """
    a = [list(r) for r in rows]
    m = len(a)
    prev = 1
    k = 0
    pivots: List[int] = []
    for col in range(ncols):
        if k >= m:
            break
        best = None
        for i in range(k, m):
            v = a[i][col]
            if v and (best is None or abs(v).bit_length() < abs(a[best][col]).bit_length()):
                best = i
        if best is None:
            continue
        if best != k:
            a[k], a[best] = a[best], a[k]
        piv_row = a[k]
        p = piv_row[col]
        for i in range(k + 1, m):
            row = a[i]
            f = row[col]
            if f:
                for j in range(col + 1, ncols):
                    row[j] = (p * row[j] - f * piv_row[j]) // prev
            else:
                for j in range(col + 1, ncols):
                    if row[j]:
                        row[j] = (p * row[j]) // prev
            row[col] = 0
        prev = p
        pivots.append(col)
        k += 1
    return a, pivots


def _rref(int_rows: List[List[int]], ncols: int) -> Tuple[List[List[Fraction]], List[int]]:
    ech, pivots = bareiss_echelon(int_rows, ncols)
    r = len(pivots)
    # back substitution on the pivot rows only; entries become Fractions here
    R = []
    for i in range(r):
        row = ech[i]
        g = row[pivots[i]]
        R.append([Fraction(v, g) if v else Fraction(0) for v in row])
    for i in range(r - 1, -1, -1):
        pc = pivots[i]
        for h in range(i):
            f = R[h][pc]
            if f:
                Rh, Ri = R[h], R[i]
                for j in range(pc, ncols):
                    if Ri[j]:
                        Rh[j] -= f * Ri[j]
    return R, pivots


def rref(M: ExactMatrix) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    return _rref(_integer_rows(M.to_rows()), M.cols)


def rank(M: ExactMatrix) -> int:
    _, pivots = bareiss_echelon(_integer_rows(M.to_rows()), M.cols)
    return len(pivots)


def nullspace(M: ExactMatrix) -> SubspaceBasis:
    R, pivots = rref(M)
    pivot_set = set(pivots)
    basis = []
    for f in range(M.cols):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            if pc < f:
                v[pc] = -R[i][f]
        basis.append(tuple(v))
    return SubspaceBasis(M.cols, tuple(basis))


def solve(M: ExactMatrix, b: Sequence[Fraction]) -> Optional[Vector]:
    """A solution of M v = b (free variables set to zero), or None."""
    if len(b) != M.rows:
        raise ValueError("dimension mismatch")
    aug = [list(r) + [Fraction(bi)] for r, bi in zip(M.to_rows(), b)]
    R, pivots = _rref(_integer_rows(aug), M.cols + 1)
    if pivots and pivots[-1] == M.cols:
        return None
    v = [Fraction(0)] * M.cols
    for i, pc in enumerate(pivots):
        v[pc] = R[i][M.cols]
    return tuple(v)


def coordinates(basis: SubspaceBasis, v: Sequence[Fraction]) -> Optional[Vector]:
    """Coefficients c with sum(c_k basis_k) = v, or None if v is outside the span."""
    if not basis.basis:
        return () if not any(v) else None
    cols = [[basis.basis[k][i] for k in range(basis.dim)] for i in range(basis.ambient)]
    return solve(ExactMatrix.from_rows(cols, basis.dim), v)
