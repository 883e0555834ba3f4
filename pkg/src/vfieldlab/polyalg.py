"""Exact sparse polynomials over the rationals and planar polynomial vector fields.

Coefficients are :class:`fractions.Fraction` values.  A polynomial is a map
from exponent tuples to nonzero coefficients; absent keys are zero, so two
polynomials are equal iff their term maps are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, Tuple, Union

Rat = Fraction
Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]

VAR_NAMES = {1: ("x",), 2: ("x", "y"), 4: ("x", "y", "z", "w")}


class OddExponent(ValueError):
    """Raised when (x^2+y^2)^(n/2) would not be a polynomial."""


def _as_rat(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


def term_order_key(exp: Exponent):
    """Sort key for the canonical (graded lexicographic) ordering.

    Larger keys print first: higher total degree, then larger power of the
    earlier variable.
    """
    return (sum(exp), exp)


class Poly:
    """Immutable sparse polynomial in 1, 2 or 4 variables."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Scalar] | None = None, nvars: int = 2):
        if nvars not in VAR_NAMES:
            raise ValueError(f"unsupported number of variables: {nvars}")
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != nvars or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent {exp} for {nvars} variables")
                c = _as_rat(c)
                if c:
                    clean[exp] = clean.get(exp, Fraction(0)) + c
                    if not clean[exp]:
                        del clean[exp]
        self.nvars = nvars
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Exponent, Fraction], nvars: int) -> "Poly":
        # terms must already be canonical (no zeros)
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int = 2) -> "Poly":
        return cls._raw({}, nvars)

    @classmethod
    def const(cls, c: Scalar, nvars: int = 2) -> "Poly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, name: str, nvars: int = 2) -> "Poly":
        names = VAR_NAMES[nvars]
        if name not in names:
            raise ValueError(f"unknown variable {name!r} for {nvars} variables")
        exp = tuple(1 if v == name else 0 for v in names)
        return cls._raw({exp: Fraction(1)}, nvars)

    @classmethod
    def monomial(cls, exp: Exponent, c: Scalar = 1) -> "Poly":
        return cls({tuple(exp): c}, len(exp))

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def coeff(self, exp: Exponent) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    @property
    def degree(self) -> float:
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self._terms:
            return float("-inf")
        return max(sum(e) for e in self._terms)

    def sorted_terms(self):
        """Terms in canonical print order (leading term first)."""
        return sorted(self._terms.items(), key=lambda t: term_order_key(t[0]), reverse=True)

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly._raw({e: c for e, c in self._terms.items() if sum(e) == d}, self.nvars)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Poly"):
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(_as_rat(other), self.nvars)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({e: -c for e, c in self._terms.items()}, self.nvars)

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _as_rat(other)
            if not c:
                return Poly.zero(self.nvars)
            return Poly._raw({e: c * v for e, v in self._terms.items()}, self.nvars)
        self._check(other)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw({e: c for e, c in out.items() if c}, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other, self.nvars)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        from .exprio import format_poly

        return f"Poly({format_poly(self)!r})"

    # -- calculus and evaluation ------------------------------------------
    def partial(self, var: Union[str, int]) -> "Poly":
        k = VAR_NAMES[self.nvars].index(var) if isinstance(var, str) else var
        out = {}
        for e, c in self._terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[ne] = c * e[k]
        return Poly._raw(out, self.nvars)

    def evaluate(self, point: Iterable[Scalar]) -> Fraction:
        point = tuple(_as_rat(v) for v in point)
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for v, k in zip(point, e):
                if k:
                    term *= v ** k
            total += term
        return total

    def compose(self, images: Tuple["Poly", ...]) -> "Poly":
        """Compose with polynomial images of each variable."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        nv = images[0].nvars
        out = Poly.zero(nv)
        for e, c in self._terms.items():
            term = Poly.const(c, nv)
            for img, k in zip(images, e):
                if k:
                    term = term * img ** k
            out = out + term
        return out

    def float_source(self) -> str:
        """Python expression evaluating the polynomial in float arithmetic."""
        names = VAR_NAMES[self.nvars]
        parts = []
        for e, c in self.sorted_terms():
            factors = [repr(float(c))]
            for v, k in zip(names, e):
                if k == 1:
                    factors.append(v)
                elif k > 1:
                    factors.append(f"{v}**{k}")
            parts.append("*".join(factors))
        return " + ".join(parts) if parts else "0.0"

    def to_float_fn(self) -> Callable[..., float]:
        names = ", ".join(VAR_NAMES[self.nvars])
        return eval(f"lambda {names}: {self.float_source()}")  # noqa: S307


def x_poly(nvars: int = 2) -> Poly:
    return Poly.var("x", nvars)


def y_poly(nvars: int = 2) -> Poly:
    return Poly.var("y", nvars)


def add(p: Poly, q: Poly) -> Poly:
    return p + q


def mul(p: Poly, q: Poly) -> Poly:
    return p * q


def partial(p: Poly, var: Union[str, int]) -> Poly:
    return p.partial(var)


def evaluate(p: Poly, point) -> Fraction:
    return p.evaluate(point)


@dataclass(frozen=True)
class VectorField2:
    """Planar field x' = P(x, y), y' = Q(x, y)."""

    P: Poly
    Q: Poly

    def __post_init__(self):
        if self.P.nvars != 2 or self.Q.nvars != 2:
            raise ValueError("vector field components must be bivariate")

    @classmethod
    def zero(cls) -> "VectorField2":
        return cls(Poly.zero(), Poly.zero())

    @property
    def degree(self) -> float:
        return max(self.P.degree, self.Q.degree)

    def is_zero(self) -> bool:
        return self.P.is_zero() and self.Q.is_zero()

    def __add__(self, other: "VectorField2") -> "VectorField2":
        return VectorField2(self.P + other.P, self.Q + other.Q)

    def __sub__(self, other: "VectorField2") -> "VectorField2":
        return VectorField2(self.P - other.P, self.Q - other.Q)

    def __neg__(self) -> "VectorField2":
        return VectorField2(-self.P, -self.Q)

    def __mul__(self, c: Scalar) -> "VectorField2":
        return VectorField2(self.P * c, self.Q * c)

    __rmul__ = __mul__

    def components(self) -> Tuple[Poly, Poly]:
        return (self.P, self.Q)

    def float_fn(self) -> Callable[[float, float], Tuple[float, float]]:
        """Compiled float evaluator ``(x, y) -> (P, Q)``."""
        src = f"lambda x, y: ({self.P.float_source()}, {self.Q.float_source()})"
        return eval(src)  # noqa: S307

    def __repr__(self) -> str:
        from .exprio import format_poly

        return f"VectorField2({format_poly(self.P)!r}, {format_poly(self.Q)!r})"


def lie_bracket(X: VectorField2, Y: VectorField2) -> VectorField2:
    """[X, Y] = (DY) X - (DX) Y."""
    P, Q = X.P, X.Q
    R, S = Y.P, Y.Q
    first = P * R.partial(0) + Q * R.partial(1) - R * P.partial(0) - S * P.partial(1)
    second = P * S.partial(0) + Q * S.partial(1) - R * Q.partial(0) - S * Q.partial(1)
    return VectorField2(first, second)


def divergence(X: VectorField2) -> Poly:
    return X.P.partial(0) + X.Q.partial(1)


def scale_field(f: Poly, X: VectorField2) -> VectorField2:
    return VectorField2(f * X.P, f * X.Q)


def directional_derivative(X: VectorField2, g: Poly) -> Poly:
    return X.P * g.partial(0) + X.Q * g.partial(1)


def wedge(X: VectorField2, Y: VectorField2) -> Poly:
    """det(X, Y) = P_X * Q_Y - Q_X * P_Y."""
    return X.P * Y.Q - X.Q * Y.P


# -- the named fields ---------------------------------------------------------

def make_lienard(F: Poly) -> VectorField2:
    """Liénard field (y - F(x), -x) for a univariate F."""
    if F.nvars != 1:
        raise ValueError("F must be a polynomial in x alone")
    x, y = x_poly(), y_poly()
    F2 = F.compose((x,))
    return VectorField2(y - F2, -x)


def make_homogeneous_center(n: int) -> VectorField2:
    """(y r^n, -x r^n) with r^2 = x^2 + y^2, homogeneous of degree n + 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n % 2:
        raise OddExponent(f"(x^2+y^2)^({n}/2) is not a polynomial for odd n={n}")
    x, y = x_poly(), y_poly()
    r2k = (x * x + y * y) ** (n // 2)
    return VectorField2(y * r2k, -x * r2k)


def vdp_F() -> Poly:
    """F(x) = x^3/3 - x."""
    return Poly({(3,): Fraction(1, 3), (1,): -1}, nvars=1)


def rotation() -> VectorField2:
    return VectorField2(y_poly(), -x_poly())


def dilation() -> VectorField2:
    return VectorField2(x_poly(), y_poly())


def example1_x() -> VectorField2:
    x, y = x_poly(), y_poly()
    u = x * x + y * y - 1
    return VectorField2(y + x * u, -x + y * u)


def example1_y() -> VectorField2:
    x, y = x_poly(), y_poly()
    u = x * x + y * y - 1
    return VectorField2(2 * y + x * u, -2 * x + y * u)


def example1_mirror() -> VectorField2:
    """Example-1 field with the radial factor reversed; the circle becomes attracting."""
    x, y = x_poly(), y_poly()
    u = 1 - x * x - y * y
    return VectorField2(y + x * u, -x + y * u)


def van_der_pol() -> VectorField2:
    return make_lienard(vdp_F())
