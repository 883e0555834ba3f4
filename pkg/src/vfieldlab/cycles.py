"""Limit cycles of planar polynomial fields.

Polar reduction, first-return maps on a ray from the origin, cycle detection
by a radial scan with bisection, characteristic multipliers from the
divergence integral, and the tangency test of a cycle under a second field.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from scipy.optimize import brentq

from . import linops
from .flow import (
    DEFAULT_CONFIG,
    Blowup,
    EventSpec,
    IntegrationError,
    IntegratorConfig,
    NoEvent,
    Trajectory,
    field_rhs,
    locate_event,
    quadrature_along,
    solve,
)
from .polyalg import Poly, VectorField2, divergence

GRID_POINTS = 200
BAND_TOL = 1e-9
BAND_MIN_RUN = 3
HYPERBOLIC_TOL = 1e-6
SAMPLE_COUNT = 256
RETURN_HORIZON = 1e3
# below this multiple of atol the polar angle of the numerical state is noise
COLLAPSE_FACTOR = 100.0


class NonTransversal(IntegrationError):
    """The polar angle stopped being monotone along the orbit."""


class DegenerateSamples(ValueError):
    pass


# -- trigonometric polynomials ----------------------------------------------------

_Gauss = Tuple[Fraction, Fraction]


def _laurent_mul(a: Dict[int, _Gauss], b: Dict[int, _Gauss]) -> Dict[int, _Gauss]:
    out: Dict[int, List[Fraction]] = {}
    for k1, (r1, i1) in a.items():
        for k2, (r2, i2) in b.items():
            acc = out.setdefault(k1 + k2, [Fraction(0), Fraction(0)])
            acc[0] += r1 * r2 - i1 * i2
            acc[1] += r1 * i2 + i1 * r2
    return {k: (v[0], v[1]) for k, v in out.items() if v[0] or v[1]}


_HALF = Fraction(1, 2)
_COS = {1: (_HALF, Fraction(0)), -1: (_HALF, Fraction(0))}
_SIN = {1: (Fraction(0), -_HALF), -1: (Fraction(0), _HALF)}


@dataclass(frozen=True)
class TrigPoly:
    """sum_k c_k cos(k t) + s_k sin(k t) with exact coefficients."""

    coeffs: Tuple[Tuple[int, Fraction, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, d: Dict[int, Tuple[Fraction, Fraction]]) -> "TrigPoly":
        items = tuple(sorted((k, c, s) for k, (c, s) in d.items() if c or s))
        return cls(items)

    @classmethod
    def cos_sin_power(cls, i: int, j: int) -> "TrigPoly":
        """cos(t)^i sin(t)^j as a harmonic sum."""
        acc: Dict[int, _Gauss] = {0: (Fraction(1), Fraction(0))}
        for _ in range(i):
            acc = _laurent_mul(acc, _COS)
        for _ in range(j):
            acc = _laurent_mul(acc, _SIN)
        out: Dict[int, Tuple[Fraction, Fraction]] = {}
        for k, (re, im) in acc.items():
            if k == 0:
                out[0] = (re, Fraction(0))
            elif k > 0:
                out[k] = (2 * re, -2 * im)
        return cls.from_dict(out)

    def as_dict(self) -> Dict[int, Tuple[Fraction, Fraction]]:
        return {k: (c, s) for k, c, s in self.coeffs}

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        d = self.as_dict()
        for k, c, s in other.coeffs:
            c0, s0 = d.get(k, (Fraction(0), Fraction(0)))
            d[k] = (c0 + c, s0 + s)
        return TrigPoly.from_dict(d)

    def scale(self, a: Fraction) -> "TrigPoly":
        return TrigPoly.from_dict({k: (a * c, a * s) for k, c, s in self.coeffs})

    def is_zero(self) -> bool:
        return not self.coeffs

    def constant(self) -> Optional[Fraction]:
        """The value if this is a constant, else None."""
        if not self.coeffs:
            return Fraction(0)
        if len(self.coeffs) == 1 and self.coeffs[0][0] == 0:
            return self.coeffs[0][1]
        return None

    def __call__(self, t: float) -> float:
        total = 0.0
        for k, c, s in self.coeffs:
            if k == 0:
                total += float(c)
            else:
                total += float(c) * math.cos(k * t) + float(s) * math.sin(k * t)
        return total


def _trig_of_homogeneous(p: Poly) -> TrigPoly:
    """p(cos t, sin t) for a homogeneous polynomial p."""
    out = TrigPoly()
    for (i, j), c in p.items():
        out = out + TrigPoly.cos_sin_power(i, j).scale(c)
    return out


@dataclass(frozen=True)
class PolarForm:
    """dr/dtheta = sum_k A_k(theta) r^k / sum_k B_k(theta) r^k."""

    numerator: Dict[int, TrigPoly]
    denominator: Dict[int, TrigPoly]
    source: VectorField2
    nontransversal_angles: Tuple[float, ...] = ()

    @property
    def transversal_near_origin(self) -> bool:
        return not self.nontransversal_angles and bool(self.denominator)

    def num(self, theta: float, r: float) -> float:
        return sum(A(theta) * r ** k for k, A in self.numerator.items())

    def den(self, theta: float, r: float) -> float:
        return sum(B(theta) * r ** k for k, B in self.denominator.items())

    def rhs(self, theta: float, r: float) -> float:
        return self.num(theta, r) / self.den(theta, r)


def _trig_zeros(T: TrigPoly, samples: int = 4096) -> Tuple[float, ...]:
    two_pi = 2 * math.pi
    ts = [two_pi * i / samples for i in range(samples)]
    vals = [T(t) for t in ts]
    roots: List[float] = []
    for i in range(samples):
        a, b = ts[i], ts[i + 1] if i + 1 < samples else two_pi
        va, vb = vals[i], vals[(i + 1) % samples]
        if va == 0.0:
            roots.append(a)
        elif va * vb < 0:
            roots.append(brentq(T, a, b, xtol=1e-14) % two_pi)
    roots.sort()
    out: List[float] = []
    for r in roots:
        if not out or r - out[-1] > 1e-9:
            out.append(r)
    if len(out) > 1 and two_pi - out[-1] + out[0] <= 1e-9:
        out.pop()
    return tuple(out)


def polar_reduce(X: VectorField2) -> PolarForm:
    """Exact trig-polynomial coefficients of dr/dtheta = r(xP+yQ)/(xQ-yP).

    The common power of r is cancelled, and a negative constant denominator
    is normalized to a positive one.
    """
    x, y = Poly.var("x"), Poly.var("y")
    radial = x * X.P + y * X.Q
    angular = x * X.Q - y * X.P
    num: Dict[int, TrigPoly] = {}
    den: Dict[int, TrigPoly] = {}
    for d in range(int(max(radial.degree, 0)) + 1):
        T = _trig_of_homogeneous(radial.homogeneous_part(d))
        if not T.is_zero():
            num[d + 1] = T  # extra factor r from dr/dtheta = r * radial / angular
    for d in range(int(max(angular.degree, 0)) + 1):
        U = _trig_of_homogeneous(angular.homogeneous_part(d))
        if not U.is_zero():
            den[d] = U
    powers = list(num) + list(den)
    shift = min(powers) if powers else 0
    num = {k - shift: v for k, v in num.items()}
    den = {k - shift: v for k, v in den.items()}
    if len(den) == 1:
        (k0, B0), = den.items()
        c = B0.constant()
        if c is not None and c < 0:
            num = {k: v.scale(Fraction(-1)) for k, v in num.items()}
            den = {k0: B0.scale(Fraction(-1))}
    zeros: Tuple[float, ...] = ()
    if den:
        lowest = den[min(den)]
        if lowest.constant() is None:
            zeros = _trig_zeros(lowest)
    return PolarForm(num, den, X, zeros)


# -- return maps -------------------------------------------------------------------

@dataclass
class ReturnResult:
    radius: float
    time: float
    point: Tuple[float, float]
    trajectory: Trajectory


def _angular_speed_sign(fn, x: float, y: float) -> int:
    p, q = fn(x, y)
    c = x * q - y * p
    return (c > 0) - (c < 0)


def first_return(X: VectorField2, r0: float, alpha: float = 0.0, cfg: IntegratorConfig = DEFAULT_CONFIG,
                 horizon: float = RETURN_HORIZON) -> ReturnResult:
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    fn = X.float_fn()
    start = (r0 * math.cos(alpha), r0 * math.sin(alpha))
    sign = _angular_speed_sign(fn, *start)
    if sign == 0:
        raise NonTransversal(f"angular speed vanishes at the start point r0={r0:.17g}")

    floor = COLLAPSE_FACTOR * cfg.atol

    def check(state):
        if math.hypot(state[0], state[1]) < floor:
            raise NoEvent(f"orbit from r0={r0:.17g} fell into the equilibrium at the origin")
        if _angular_speed_sign(fn, state[0], state[1]) != sign:
            raise NonTransversal(f"polar angle reversed along the orbit from r0={r0:.17g}")

    hit = locate_event(field_rhs(X), start, EventSpec.angle_progress(sign * 2 * math.pi), cfg,
                       horizon, step_check=check)
    return ReturnResult(math.hypot(*hit.point), hit.time, hit.point, hit.trajectory)


def return_map(X: VectorField2, r0: float, alpha: float = 0.0, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Radius at the first return to the ray at angle ``alpha``."""
    return first_return(X, r0, alpha, cfg).radius


def polar_return_map(form: PolarForm, r0: float, alpha: float = 0.0, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Same map computed by integrating dr/dtheta over one turn."""
    fn = form.source.float_fn()
    sign = _angular_speed_sign(fn, r0 * math.cos(alpha), r0 * math.sin(alpha))
    if sign == 0:
        raise NonTransversal("angular speed vanishes at the start point")
    b0 = form.den(alpha, r0)

    def rhs(phi, s):
        th = alpha + sign * phi
        b = form.den(th, s[0])
        if b * b0 <= 0:
            raise NonTransversal("dr/dtheta denominator changed sign")
        return (sign * form.num(th, s[0]) / b,)

    return solve(rhs, (r0,), 2 * math.pi, cfg).final[0]


# -- cycles ------------------------------------------------------------------------

@dataclass
class CycleInfo:
    field: VectorField2
    section_angle: float
    radius: float
    period: float
    multiplier: float
    stability: str
    samples: List[Tuple[float, float]]
    residual: float

    @property
    def start(self) -> Tuple[float, float]:
        return (self.radius * math.cos(self.section_angle), self.radius * math.sin(self.section_angle))


@dataclass
class GridPoint:
    radius: float
    displacement: Optional[float]
    error: Optional[str] = None


@dataclass
class CycleScan:
    cycles: List[CycleInfo]
    center_bands: List[Tuple[float, float]]
    grid: List[GridPoint] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)


def classify(m: float) -> str:
    if m < 1 - HYPERBOLIC_TOL:
        return "stable"
    if m > 1 + HYPERBOLIC_TOL:
        return "unstable"
    return "non-hyperbolic"


def _displacement(X: VectorField2, r: float, alpha: float, cfg: IntegratorConfig) -> GridPoint:
    try:
        return GridPoint(r, return_map(X, r, alpha, cfg) - r)
    except Blowup:
        # escape to infinity before returning: the radius grew without bound
        return GridPoint(r, math.inf, "Blowup")
    except IntegrationError as err:
        return GridPoint(r, None, type(err).__name__)


def _displacement_job(args) -> GridPoint:
    return _displacement(*args)


def multiplier(X: VectorField2, cycle: CycleInfo, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """exp of the divergence integrated once around the cycle."""
    return math.exp(quadrature_along(X, cycle.start, divergence(X), cycle.period, cfg))


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def _bisect(X, lo: GridPoint, hi: GridPoint, alpha, cfg) -> Tuple[GridPoint, GridPoint]:
    # run to float resolution: strongly repelling cycles need r* to the last bit
    # for the fixed-point residual to stay small
    s_lo = _sign(lo.displacement)
    while True:
        mid = 0.5 * (lo.radius + hi.radius)
        if mid <= lo.radius or mid >= hi.radius:
            return lo, hi
        gm = _displacement(X, mid, alpha, cfg)
        if gm.displacement is None:
            raise NonTransversal(f"bisection hit {gm.error} at r={mid:.17g}")
        if gm.displacement == 0.0:
            return gm, gm
        if _sign(gm.displacement) == s_lo:
            lo = gm
        else:
            hi = gm


def _build_cycle(X: VectorField2, r: float, alpha: float, cfg: IntegratorConfig) -> CycleInfo:
    ret = first_return(X, r, alpha, cfg)
    traj = ret.trajectory
    T = ret.time
    samples = [tuple(traj.at(T * k / SAMPLE_COUNT)[:2]) for k in range(SAMPLE_COUNT)]
    info = CycleInfo(X, alpha, r, T, math.nan, "non-hyperbolic", samples, abs(ret.radius - r))
    info.multiplier = multiplier(X, info, cfg)
    info.stability = classify(info.multiplier)
    return info


def find_cycles(X: VectorField2, r_min: float, r_max: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
                alpha: float = 0.0, grid: int = GRID_POINTS, workers: Optional[int] = None) -> CycleScan:
    """Scan the return displacement on [r_min, r_max] and refine every sign change."""
    if not 0 < r_min < r_max:
        raise ValueError("need 0 < r_min < r_max")
    radii = [r_min + (r_max - r_min) * i / (grid - 1) for i in range(grid)]
    radii[-1] = r_max
    jobs = [(X, r, alpha, cfg) for r in radii]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_displacement_job, jobs, chunksize=max(1, grid // (4 * workers))))
    else:
        points = [_displacement_job(j) for j in jobs]

    in_band = [False] * grid
    bands: List[Tuple[float, float]] = []
    i = 0
    while i < grid:
        j = i
        while j < grid and points[j].displacement is not None and abs(points[j].displacement) < BAND_TOL:
            j += 1
        if j - i >= BAND_MIN_RUN:
            bands.append((radii[i], radii[j - 1]))
            for k in range(i, j):
                in_band[k] = True
        i = max(j, i + 1)

    scan = CycleScan([], bands, points)
    roots: List[float] = []
    for k in range(grid - 1):
        a, b = points[k], points[k + 1]
        if in_band[k] or in_band[k + 1] or a.displacement is None or b.displacement is None:
            continue
        if a.displacement == 0.0:
            roots.append(a.radius)
            continue
        if b.displacement == 0.0 or _sign(a.displacement) == _sign(b.displacement):
            continue
        if math.isinf(a.displacement) and math.isinf(b.displacement):
            continue
        try:
            lo, hi = _bisect(X, a, b, alpha, cfg)
        except IntegrationError as err:
            scan.failures.append(f"[{a.radius:.6g}, {b.radius:.6g}]: {err}")
            continue
        best = min((p for p in (lo, hi) if math.isfinite(p.displacement)),
                   key=lambda p: abs(p.displacement), default=None)
        if best is None:
            scan.failures.append(f"[{a.radius:.6g}, {b.radius:.6g}]: no finite displacement")
            continue
        roots.append(best.radius)
    if points[-1].displacement == 0.0 and not in_band[-1]:
        roots.append(points[-1].radius)

    for r in sorted(set(roots)):
        try:
            scan.cycles.append(_build_cycle(X, r, alpha, cfg))
        except IntegrationError as err:
            scan.failures.append(f"cycle at r={r:.17g}: {err}")
    return scan


def invariance_defect(Y: VectorField2, cycle: CycleInfo) -> float:
    """max |det(X, Y)| / (|X| |Y|) over the sampled cycle points of X."""
    fx = cycle.field.float_fn()
    fy = Y.float_fn()
    worst = None
    for x, y in cycle.samples:
        p, q = fx(x, y)
        r, s = fy(x, y)
        nx, ny = math.hypot(p, q), math.hypot(r, s)
        if nx < 1e-14 or ny < 1e-14:
            continue
        v = abs(p * s - q * r) / (nx * ny)
        worst = v if worst is None else max(worst, v)
    if worst is None:
        raise DegenerateSamples("every sample point was singular for X or Y")
    return worst


def commuting_perturbation_probe(X: VectorField2, E: VectorField2, eps: Fraction,
                                 N: int = linops.DEFAULT_DEGREE) -> linops.CentralizerReport:
    """Centralizer of X + eps E; a nontrivial commuting partner exists iff the dimension is >= 2."""
    return linops.centralizer_basis(X + E * Fraction(eps), N)
