"""Reproduction table for the concrete claims about the worked examples.

Every check looks its operations up through the defining module at call
time, so a faulty operation (e.g. a patched bracket) shows up as a failed row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

from . import cycles, linops, polyalg, symplectic
from .exprio import parse_poly
from .flow import DEFAULT_CONFIG, IntegratorConfig
from .presets import preset


@dataclass
class CheckResult:
    claim: str
    location: str
    computed: str
    passed: bool


def _claim(claim: str, location: str):
    """Attach the claim text; the check returns (computed text, passed)."""
    def mark(fn):
        fn.claim, fn.location = claim, location
        return fn
    return mark


@_claim("[X, Y] = 0 for the two fields sharing the unit circle", "Example 1")
def _bracket_example1() -> Tuple[str, bool]:
    B = polyalg.lie_bracket(polyalg.example1_x(), polyalg.example1_y())
    return f"({B.P!r}, {B.Q!r})", B.is_zero()


@_claim("homogeneous center commutes with the linear center (n = 0, 2, 4)", "homogeneous perturbation question")
def _bracket_homogeneous() -> Tuple[str, bool]:
    rot = polyalg.rotation()
    vals = [polyalg.lie_bracket(polyalg.make_homogeneous_center(n), rot).is_zero() for n in (0, 2, 4)]
    return str(vals), all(vals)


@_claim("centralizer of x' = x, y' = y is 4-dimensional", "Example 2")
def _dim_dilation() -> Tuple[str, bool]:
    d = linops.centralizer_basis(polyalg.dilation(), 3, structure=False).dimension
    return f"dim C_3 = {d}", d == 4


@_claim("C(X) is a 2-dimensional Lie algebra", "Example 2 (on Example 1)")
def _dim_example1() -> Tuple[str, bool]:
    d = linops.centralizer_basis(polyalg.example1_x(), 3, structure=False).dimension
    return f"dim C_3 = {d}", d == 2


@_claim("C(fX) abelian, C(X) not, so they are not isomorphic", "rescaling by f = x^2+y^2+1")
def _rescaling() -> Tuple[str, bool]:
    cmp = linops.compare_centralizers(polyalg.rotation(), parse_poly("x^2 + y^2 + 1"), 3)
    ok = cmp.rescaled.abelian and not cmp.original.abelian and not cmp.necessary_conditions_hold
    text = (f"dims ({cmp.original.dimension}, {cmp.rescaled.dimension}), "
            f"abelian ({cmp.original.abelian}, {cmp.rescaled.abelian})")
    return text, ok


@_claim("{zP+wQ, zR+wS} = 0 for the commuting pair; lift identity on all presets", "Remark")
def _remark() -> Tuple[str, bool]:
    names = ["example1-x", "example1-y", "vdp", "dilation", "rotation", "homogeneous-n2"]
    fields = [preset(n) for n in names]
    defects_zero = all(symplectic.remark_defect(a, b).is_zero() for a in fields for b in fields)
    H = symplectic.lift(polyalg.example1_x()).H
    G = symplectic.moment(polyalg.example1_y())
    commuting = symplectic.poisson(H, G).is_zero()
    return f"defects zero: {defects_zero}, {{H,G}} = 0: {commuting}", defects_zero and commuting


@lru_cache(maxsize=4)
def _example1_scan(cfg: IntegratorConfig):
    return cycles.find_cycles(polyalg.example1_x(), 0.2, 2.0, cfg)


def _cycle_text(c: cycles.CycleInfo) -> str:
    return f"r* = {c.radius:.12g}, T = {c.period:.12g}, m = {c.multiplier:.6g} ({c.stability})"


@_claim("unit circle is a hyperbolic limit cycle of X", "Example 1")
def _cycle_example1(cfg: IntegratorConfig) -> Tuple[str, bool]:
    scan = _example1_scan(cfg)
    if len(scan.cycles) != 1:
        return f"{len(scan.cycles)} cycles", False
    c = scan.cycles[0]
    ok = (abs(c.radius - 1) <= 1e-6 and abs(c.period - 2 * math.pi) <= 1e-8
          and abs(c.multiplier / math.exp(4 * math.pi) - 1) <= 1e-3 and c.stability == "unstable")
    return _cycle_text(c), ok


@_claim("the same circle is a hyperbolic limit cycle of Y", "Example 1")
def _cycle_example1_y(cfg: IntegratorConfig) -> Tuple[str, bool]:
    scan = cycles.find_cycles(polyalg.example1_y(), 0.2, 2.0, cfg)
    if len(scan.cycles) != 1:
        return f"{len(scan.cycles)} cycles", False
    c = scan.cycles[0]
    ok = (abs(c.radius - 1) <= 1e-6 and abs(c.period - math.pi) <= 1e-8
          and abs(c.multiplier / math.exp(2 * math.pi) - 1) <= 1e-3 and c.stability == "unstable")
    return _cycle_text(c), ok


@_claim("cycle of X is invariant under the commuting Y", "commuting fields share cycles")
def _invariance(cfg: IntegratorConfig) -> Tuple[str, bool]:
    scan = _example1_scan(cfg)
    if not scan.cycles:
        return "no cycle found", False
    d = cycles.invariance_defect(polyalg.example1_y(), scan.cycles[0])
    return f"defect = {d:.3g}", d <= 1e-8


CHECKS: List[Callable[..., Tuple[str, bool]]] = [
    _bracket_example1,
    _bracket_homogeneous,
    _dim_dilation,
    _dim_example1,
    _rescaling,
    _remark,
]
NUMERIC_CHECKS = [_cycle_example1, _cycle_example1_y, _invariance]


def run_checks(numeric: bool = True, cfg: Optional[IntegratorConfig] = None) -> List[CheckResult]:
    cfg = cfg or DEFAULT_CONFIG
    _example1_scan.cache_clear()
    out = [_guard(check) for check in CHECKS]
    if numeric:
        out.extend(_guard(check, cfg) for check in NUMERIC_CHECKS)
    return out


def _guard(check, *args) -> CheckResult:
    try:
        computed, passed = check(*args)
    except Exception as err:  # a crashing check is a failed check
        computed, passed = f"{type(err).__name__}: {err}", False
    return CheckResult(check.claim, check.location, computed, bool(passed))
