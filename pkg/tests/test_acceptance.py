"""Acceptance criteria A1-A9.

Each test records a one-line detail; the terminal summary prints one
PASS/FAIL line per criterion (see conftest.py).
"""

import math
import random
import time
from fractions import Fraction

import pytest

from vfieldlab import linops
from vfieldlab.cycles import find_cycles, invariance_defect, polar_reduce, polar_return_map, return_map
from vfieldlab.exactla import ExactMatrix, nullspace, rank
from vfieldlab.exprio import format_poly, parse_poly
from vfieldlab.flow import Blowup, EventSpec, flow_to_event, integrate, quadrature_along
from vfieldlab.linops import centralizer_basis, compare_centralizers, derivative_operator_report, first_integrals
from vfieldlab.polyalg import (
    Poly,
    VectorField2,
    dilation,
    directional_derivative,
    example1_mirror,
    example1_x,
    example1_y,
    lie_bracket,
    make_homogeneous_center,
    rotation,
    scale_field,
    van_der_pol,
)
from vfieldlab.presets import preset, preset_names
from vfieldlab.symplectic import remark_defect

import oracles

# frozen by tests/oracles.py (sympy nullspace, fixed-step RK4 at h = 1e-3 with 1e-13 crossing tolerance)
ORACLE_EX1_PROFILE = [1, 1, 2, 2, 2]
ORACLE_VDP_PROFILE = [0, 0, 1, 1, 1]
ORACLE_VDP_SECTION_RADIUS = 1.91927583563
ORACLE_VDP_AMPLITUDE = 2.00861986048


def _rand_rat(rng):
    return Fraction(rng.randint(-9, 9), rng.randint(1, 5))


def _rand_poly(rng, deg, nvars=2, terms=5):
    exps = linops.monomials(deg) if nvars == 2 else None
    if nvars == 4:
        exps = [(a, b, c, d) for a in range(deg + 1) for b in range(deg + 1) for c in range(deg + 1)
                for d in range(deg + 1) if a + b + c + d <= deg]
    return Poly({rng.choice(exps): _rand_rat(rng) for _ in range(rng.randint(0, terms))}, nvars=nvars)


def _rand_field(rng, deg):
    return VectorField2(_rand_poly(rng, deg), _rand_poly(rng, deg))


def test_A1_commutation(record_property):
    t0 = time.perf_counter()
    ex1 = lie_bracket(example1_x(), example1_y())
    homog = [lie_bracket(make_homogeneous_center(n), rotation()) for n in (0, 2, 4)]
    elapsed = time.perf_counter() - t0
    record_property("detail", f"[X,Y] = {ex1!r}; homogeneous n=0,2,4 zero: "
                              f"{[B.is_zero() for B in homog]}; {elapsed:.3f} s")
    assert ex1.is_zero()
    assert all(B.is_zero() for B in homog)
    assert elapsed < 1.0


def test_A2_centralizer_dimensions(record_property):
    t0 = time.perf_counter()
    d_dil = centralizer_basis(dilation(), 3).dimension
    d_ex1 = centralizer_basis(example1_x(), 3).dimension
    d_rot = centralizer_basis(rotation(), 3).dimension
    prof_rot = [d for _, d in linops.dimension_profile(rotation(), 5)]
    prof_ex1 = [d for _, d in linops.dimension_profile(example1_x(), 5)]
    prof_vdp = [d for _, d in linops.dimension_profile(van_der_pol(), 5)]
    elapsed = time.perf_counter() - t0
    record_property("detail", f"dims (dilation, example1, rotation) = ({d_dil}, {d_ex1}, {d_rot}); "
                              f"profiles rotation {prof_rot}, example1 {prof_ex1}, vdp {prof_vdp}; {elapsed:.2f} s")
    assert (d_dil, d_ex1, d_rot) == (4, 2, 4)
    assert prof_rot == [2, 2, 4, 4, 6]
    assert prof_ex1 == ORACLE_EX1_PROFILE
    assert prof_vdp == ORACLE_VDP_PROFILE
    assert elapsed < 5.0


def test_A2_oracle_agreement():
    x, y = oracles.x, oracles.y
    assert oracles.centralizer_dimension(x, y, 3) == 4
    assert oracles.centralizer_dimension(y, -x, 3) == 4
    u = x**2 + y**2 - 1
    assert [oracles.centralizer_dimension(y + x * u, -x + y * u, n) for n in range(1, 6)] == ORACLE_EX1_PROFILE


def test_A3_abelian(record_property):
    X, f = rotation(), parse_poly("x^2+y^2+1")
    cmp = compare_centralizers(X, f, 3)
    fX_abelian = linops.is_abelian(centralizer_basis(scale_field(f, X), 3))
    X_abelian = linops.is_abelian(centralizer_basis(X, 3))
    record_property("detail", f"abelian C3(fX) = {fX_abelian}, C3(X) = {X_abelian}; "
                              f"necessary conditions hold: {cmp.necessary_conditions_hold}")
    assert fX_abelian is True and X_abelian is False
    assert cmp.necessary_conditions_hold is False


def test_A4_remark_identity(record_property):
    rng = random.Random(2024)
    pairs = [(_rand_field(rng, 3), _rand_field(rng, 3)) for _ in range(200)]
    random_ok = sum(remark_defect(X, Y).is_zero() for X, Y in pairs)
    names = [n for n in preset_names() if not n.startswith("homogeneous")] + ["homogeneous-n0", "homogeneous-n2"]
    presets_ok = all(remark_defect(preset(a), preset(b)).is_zero() for a in names for b in names)
    record_property("detail", f"{random_ok}/200 random pairs zero; all preset pairs zero: {presets_ok}")
    assert random_ok == 200 and presets_ok


@pytest.fixture(scope="module")
def example1_scans():
    t0 = time.perf_counter()
    sx = find_cycles(example1_x(), 0.2, 2.0)
    sy = find_cycles(example1_y(), 0.2, 2.0)
    sm = find_cycles(example1_mirror(), 0.2, 2.0)
    return sx, sy, sm, time.perf_counter() - t0


def test_A5_cycle_detection(record_property, example1_scans):
    sx, sy, sm, elapsed = example1_scans
    counts = (len(sx.cycles), len(sy.cycles), len(sm.cycles))
    record_property("detail", f"cycles found (X, Y, mirror) = {counts}; {elapsed:.1f} s")
    assert counts == (1, 1, 1)
    cx, cy, cm = sx.cycles[0], sy.cycles[0], sm.cycles[0]
    record_property("detail", f"X: r*={cx.radius:.12g} T={cx.period:.12g} m={cx.multiplier:.6g}; "
                              f"Y: r*={cy.radius:.12g} T={cy.period:.12g} m={cy.multiplier:.6g}; "
                              f"mirror m={cm.multiplier:.6g}; {elapsed:.1f} s")
    assert abs(cx.radius - 1) <= 1e-6
    assert abs(cx.period - 2 * math.pi) <= 1e-8
    assert abs(cx.multiplier / math.exp(4 * math.pi) - 1) <= 1e-3
    assert abs(cy.radius - 1) <= 1e-6
    assert abs(cy.period - math.pi) <= 1e-8
    assert abs(cy.multiplier / math.exp(2 * math.pi) - 1) <= 1e-3
    assert abs(cm.multiplier / math.exp(-4 * math.pi) - 1) <= 1e-3
    assert elapsed < 30.0


@pytest.fixture(scope="module")
def vdp_scan():
    return find_cycles(van_der_pol(), 0.1, 4.0)


def test_A6_van_der_pol(record_property, vdp_scan):
    cs = vdp_scan.cycles
    assert len(cs) == 1
    c = cs[0]
    amplitude = max(abs(p[0]) for p in c.samples)
    record_property("detail", f"1 cycle, {c.stability}; section radius {c.radius:.10g} "
                              f"(oracle {ORACLE_VDP_SECTION_RADIUS}); x-amplitude {amplitude:.6g} (2.0086 +- 2e-3)")
    assert c.stability == "stable"
    assert abs(c.radius - ORACLE_VDP_SECTION_RADIUS) <= 2e-3
    assert abs(amplitude - 2.0086) <= 2e-3
    assert abs(amplitude - ORACLE_VDP_AMPLITUDE) <= 2e-3


@pytest.mark.xfail(strict=True, reason="2.0086 is the x-amplitude of the cycle; the positive x-axis "
                                       "crossing of this Lienard form is 1.9193 (independent oracle)")
def test_A6_literal_section_radius(record_property, vdp_scan):
    c = vdp_scan.cycles[0]
    record_property("detail", f"section radius {c.radius:.10g} vs stated 2.0086 +- 2e-3")
    assert abs(c.radius - 2.0086) <= 2e-3


def test_A7_invariance(record_property, example1_scans):
    cx = example1_scans[0].cycles[0]
    d = invariance_defect(example1_y(), cx)
    control = invariance_defect(VectorField2(Poly.const(1), Poly.zero()), cx)
    record_property("detail", f"defect(Y) = {d:.3g}; control (1, 0) = {control:.6g}")
    assert d <= 1e-8
    assert control >= 0.5


def test_A8_operator_reports(record_property):
    rot = derivative_operator_report(rotation(), 2)
    dil = derivative_operator_report(dilation(), 2)
    fi = first_integrals(example1_x(), 4)
    record_property("detail", f"corank rotation {rot.corank} kernel {[format_poly(g) for g in rot.kernel_basis]}; "
                              f"corank dilation {dil.corank}; example1 integrals {fi}")
    assert rot.corank == 2 and rot.kernel_basis == [Poly.const(1), parse_poly("x^2+y^2")]
    assert dil.corank == 1
    assert fi == []


def _a9_algebra(rng):
    for _ in range(100):
        X, Y, Z = (_rand_field(rng, 3) for _ in range(3))
        g = _rand_poly(rng, 3)
        assert (lie_bracket(X, Y) + lie_bracket(Y, X)).is_zero()
        assert (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
                + lie_bracket(Z, lie_bracket(X, Y))).is_zero()
        assert lie_bracket(X, scale_field(g, Y)) == (scale_field(directional_derivative(X, g), Y)
                                                     + scale_field(g, lie_bracket(X, Y)))


def _a9_rank_nullity(rng):
    for _ in range(100):
        r, c = rng.randint(0, 7), rng.randint(0, 7)
        M = ExactMatrix.from_rows([[_rand_rat(rng) if rng.random() < 0.6 else 0 for _ in range(c)]
                                   for _ in range(r)], c)
        ns = nullspace(M)
        assert rank(M) + ns.dim == c
        assert all(all(e == 0 for e in M.matvec(v)) for v in ns.basis)


def _a9_round_trip(rng):
    for _ in range(1000):
        exps = linops.monomials(6)
        p = Poly({rng.choice(exps): Fraction(rng.randint(-2**31, 2**31 - 1), rng.randint(1, 2**31 - 1))
                  for _ in range(rng.randint(0, 10))})
        assert parse_poly(format_poly(p)) == p


def _a9_flow():
    assert max(abs(a - b) for a, b in zip(integrate(rotation(), (1.0, 0.0), 2 * math.pi).final, (1, 0))) <= 1e-8
    assert max(abs(a - 2) for a in integrate(dilation(), (1.0, 1.0), math.log(2)).final) <= 1e-8
    with pytest.raises(Blowup):
        integrate(VectorField2(parse_poly("x^2"), Poly.zero()), (1.0, 0.0), 2.0)
    assert abs(flow_to_event(rotation(), (1.0, 0.0), EventSpec.angle_progress(-2 * math.pi))[1]
               - 2 * math.pi) <= 1e-9
    assert abs(flow_to_event(example1_y(), (1.0, 0.0), EventSpec.angle_progress(-2 * math.pi))[1]
               - math.pi) <= 1e-8
    assert abs(quadrature_along(rotation(), (1.0, 0.0), parse_poly("x^2"), 2 * math.pi) - math.pi) <= 1e-8


def _a9_return_maps(rng):
    worst = 0.0
    for X, lo, hi in [(example1_x(), 0.2, 0.95), (van_der_pol(), 0.2, 2.2)]:
        form = polar_reduce(X)
        for _ in range(20):
            r0 = rng.uniform(lo, hi)
            worst = max(worst, abs(return_map(X, r0) - polar_return_map(form, r0)))
    assert worst <= 1e-8
    return worst


def test_A9_property_suites(record_property, vdp_scan):
    rng = random.Random(9)
    _a9_algebra(rng)
    _a9_rank_nullity(rng)
    _a9_round_trip(rng)
    _a9_flow()
    worst = _a9_return_maps(rng)
    par = find_cycles(van_der_pol(), 0.1, 4.0, workers=2)
    identical = par == vdp_scan
    record_property("detail", f"algebra, rank-nullity, 1000 round trips, flow set ok; "
                              f"return-map gap {worst:.2g}; parallel scan identical: {identical}")
    assert identical
