from fractions import Fraction

import pytest
from hypothesis import given, settings

from vfieldlab import polyalg
from vfieldlab.exprio import parse_poly
from vfieldlab.polyalg import (
    OddExponent,
    Poly,
    VectorField2,
    add,
    directional_derivative,
    divergence,
    evaluate,
    example1_x,
    example1_y,
    lie_bracket,
    make_homogeneous_center,
    make_lienard,
    mul,
    partial,
    rotation,
    scale_field,
)

from conftest import fields, polys


def P(text):
    return parse_poly(text)


def F(p, q):
    return VectorField2(P(p), P(q))


def test_ring_ops():
    assert add(P("x^2"), P("-x^2")).is_zero()
    assert mul(P("x+y"), P("x-y")) == P("x^2-y^2")
    assert partial(P("x^2*y"), "x") == P("2*x*y")


def test_no_stored_zeros_and_degree():
    p = Poly({(1, 0): 1, (0, 1): 0})
    assert dict(p.terms) == {(1, 0): Fraction(1)}
    assert Poly.zero().degree == float("-inf")
    assert P("x^2*y + y").degree == 3


def test_bracket_examples():
    assert lie_bracket(example1_x(), example1_y()).is_zero()
    X = example1_x()
    assert lie_bracket(X, X).is_zero()
    assert lie_bracket(rotation(), F("x^2", "0")) == F("2*x*y", "x^2")


def test_divergence():
    assert divergence(example1_x()) == P("4*x^2 + 4*y^2 - 2")
    assert divergence(rotation()).is_zero()
    assert divergence(F("x", "y")) == P("2")


def test_scale_field():
    f = P("x^2+y^2+1")
    fX = scale_field(f, rotation())
    assert fX == F("(x^2+y^2+1)*y", "-(x^2+y^2+1)*x")
    assert scale_field(P("1"), rotation()) == rotation()
    assert lie_bracket(rotation(), fX).is_zero()


def test_directional_derivative():
    assert directional_derivative(rotation(), P("x^2+y^2")).is_zero()
    assert directional_derivative(F("x", "y"), P("x^2*y")) == P("3*x^2*y")
    assert directional_derivative(example1_x(), P("x^2+y^2")) == P("2*(x^2+y^2)*(x^2+y^2-1)")


def test_evaluate():
    u = P("x^2+y^2-1")
    assert evaluate(u, (1, 0)) == 0
    assert evaluate(u, (Fraction(1, 2), Fraction(1, 2))) == Fraction(-1, 2)
    assert evaluate(example1_x().P, (0, 1)) == 1


def test_lienard():
    F1 = Poly({(3,): Fraction(1, 3), (1,): -1}, nvars=1)
    assert make_lienard(F1) == F("y - 1/3*x^3 + x", "-x")
    assert make_lienard(Poly.zero(1)) == rotation()
    assert make_lienard(Poly({(2,): 1}, nvars=1)) == F("y - x^2", "-x")


def test_homogeneous_center():
    assert make_homogeneous_center(0) == rotation()
    assert make_homogeneous_center(2) == F("y*(x^2+y^2)", "-x*(x^2+y^2)")
    assert make_homogeneous_center(4).degree == 5
    with pytest.raises(OddExponent):
        make_homogeneous_center(3)
    with pytest.raises(ValueError):
        make_homogeneous_center(-2)


@given(fields(4), fields(4))
def test_antisymmetry(X, Y):
    assert (lie_bracket(X, Y) + lie_bracket(Y, X)).is_zero()


@settings(max_examples=60)
@given(fields(3), fields(3), fields(3))
def test_jacobi(X, Y, Z):
    total = (
        lie_bracket(X, lie_bracket(Y, Z))
        + lie_bracket(Y, lie_bracket(Z, X))
        + lie_bracket(Z, lie_bracket(X, Y))
    )
    assert total.is_zero()


@given(fields(3), fields(3), polys(3))
def test_leibniz(X, Y, g):
    lhs = lie_bracket(X, scale_field(g, Y))
    rhs = scale_field(directional_derivative(X, g), Y) + scale_field(g, lie_bracket(X, Y))
    assert lhs == rhs


@given(fields(3), polys(3), polys(3))
def test_derivation(X, g, h):
    L = lambda p: directional_derivative(X, p)  # noqa: E731
    assert L(g * h) == L(g) * h + g * L(h)


@given(fields(3), polys(3))
def test_rescaling_identity(X, f):
    assert lie_bracket(X, scale_field(f, X)) == scale_field(directional_derivative(X, f), X)


@given(polys(3), polys(3), polys(2))
def test_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()
    assert (p * q).degree == (p.degree + q.degree if p and q else float("-inf"))


@given(polys(3), polys(3))
def test_evaluate_is_homomorphism(p, q):
    pt = (Fraction(2, 3), Fraction(-5, 7))
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)


def test_module_level_functions_match_methods():
    p = P("x^3 - 2*x*y + 1/2")
    assert polyalg.partial(p, "y") == p.partial(1)
    assert polyalg.evaluate(p, (1, 1)) == Fraction(-1, 2)
