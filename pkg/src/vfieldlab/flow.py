"""Adaptive Dormand-Prince 5(4) integration of planar polynomial fields.

Steps are controlled by the embedded 4th-order error estimate with a
proportional-integral step-size rule; every accepted step keeps the
coefficients of the 4th-order continuous extension, so trajectories can be
queried at any time in their span and events can be located on the dense
output.  Everything is plain double precision with a fixed evaluation order,
so identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from scipy.optimize import brentq

from .polyalg import Poly, VectorField2

BLOWUP_NORM = 1e12
ESCAPE_NORM = 1e4

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
# continuous extension
D1, D3, D4 = -12715105075 / 11282082432, 87487479700 / 32700410799, -10690763975 / 1880347072
D5, D6, D7 = 701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423

SAFE = 0.9
BETA = 0.04
EXPO1 = 0.2 - BETA * 0.75
FAC_MAX = 5.0  # largest step increase factor
FAC_MIN = 0.1  # largest step decrease factor


class IntegrationError(RuntimeError):
    pass


class StepLimitExceeded(IntegrationError):
    pass


class Blowup(IntegrationError):
    """State max-norm exceeded the blowup threshold (finite-time escape)."""

    def __init__(self, t: float, state: Sequence[float]):
        self.t = t
        self.state = tuple(state)
        norm = max(abs(v) for v in self.state[:2])
        super().__init__(f"finite-time escape: state norm {norm:.3g} at t={t:.17g}")


class StepSizeUnderflow(IntegrationError):
    pass


class NoEvent(IntegrationError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    h0: Optional[float] = None
    max_step: float = math.inf
    max_steps: int = 10 ** 7

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")

    def scaled(self, factor: float) -> "IntegratorConfig":
        return IntegratorConfig(self.rtol * factor, self.atol * factor, self.h0, self.max_step, self.max_steps)


DEFAULT_CONFIG = IntegratorConfig()

RHS = Callable[[float, Sequence[float]], Sequence[float]]


@dataclass(frozen=True)
class Segment:
    """Dense output on [t0, t0 + h]."""

    t0: float
    h: float
    r1: Tuple[float, ...]
    r2: Tuple[float, ...]
    r3: Tuple[float, ...]
    r4: Tuple[float, ...]
    r5: Tuple[float, ...]

    def __call__(self, t: float) -> Tuple[float, ...]:
        s = (t - self.t0) / self.h
        s1 = 1.0 - s
        return tuple(
            a + s * (b + s1 * (c + s * (d + s1 * e)))
            for a, b, c, d, e in zip(self.r1, self.r2, self.r3, self.r4, self.r5)
        )


@dataclass
class Trajectory:
    times: List[float] = field(default_factory=list)
    states: List[Tuple[float, ...]] = field(default_factory=list)
    segments: List[Segment] = field(default_factory=list)

    @property
    def t_end(self) -> float:
        return self.times[-1]

    @property
    def final(self) -> Tuple[float, ...]:
        return self.states[-1]

    def at(self, t: float) -> Tuple[float, ...]:
        if not self.times[0] <= t <= self.times[-1]:
            raise ValueError(f"t={t} outside [{self.times[0]}, {self.times[-1]}]")
        if not self.segments:
            return self.states[0]
        k = bisect.bisect_right(self.times, t) - 1
        k = min(max(k, 0), len(self.segments) - 1)
        return self.segments[k](t)


def _rms(v: Sequence[float]) -> float:
    return math.sqrt(sum(c * c for c in v) / len(v))


class _Stepper:
    """One-step-at-a-time DOPRI5 driver with FSAL reuse."""

    def __init__(self, f: RHS, y0: Sequence[float], cfg: IntegratorConfig, watch: int):
        self.f = f
        self.cfg = cfg
        self.watch = watch
        self.t = 0.0
        self.y = tuple(float(v) for v in y0)
        if not all(math.isfinite(v) for v in self.y):
            raise ValueError("start state must be finite")
        self.k1 = tuple(f(0.0, self.y))
        self.n_accepted = 0
        self.facold = 1e-4
        self.h = cfg.h0 if cfg.h0 is not None else self._initial_step()
        self.h = min(self.h, cfg.max_step)

    def _sk(self, a, b):
        cfg = self.cfg
        return [cfg.atol + cfg.rtol * max(abs(u), abs(v)) for u, v in zip(a, b)]

    def _initial_step(self) -> float:
        y, f0 = self.y, self.k1
        sk = self._sk(y, y)
        d0 = _rms([u / s for u, s in zip(y, sk)])
        d1 = _rms([u / s for u, s in zip(f0, sk)])
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        y1 = [u + h0 * v for u, v in zip(y, f0)]
        f1 = self.f(h0, y1)
        d2 = _rms([(a - b) / s for a, b, s in zip(f1, f0, sk)]) / h0
        m = max(d1, d2)
        h1 = max(1e-6, h0 * 1e-3) if m <= 1e-15 else (0.01 / m) ** 0.2
        return min(100 * h0, h1)

    def step(self, t_limit: float) -> Segment:
        """Advance by one accepted step, never past ``t_limit``."""
        f, t, y, k1 = self.f, self.t, self.y, self.k1
        cfg = self.cfg
        rejected = False
        while True:
            if self.n_accepted >= cfg.max_steps:
                raise StepLimitExceeded(f"more than {cfg.max_steps} steps")
            h = min(self.h, t_limit - t)
            last = h == t_limit - t
            if h <= 16 * 2.2e-16 * max(1.0, abs(t)):
                # escape faster than the time grid can resolve also counts as blowup
                if max(abs(v) for v in y[: self.watch]) > ESCAPE_NORM:
                    raise Blowup(t, y)
                raise StepSizeUnderflow(f"step size {h:g} underflow at t={t:.17g}")
            k2 = f(t + C2 * h, [a + h * A21 * b for a, b in zip(y, k1)])
            k3 = f(t + C3 * h, [a + h * (A31 * b + A32 * c) for a, b, c in zip(y, k1, k2)])
            k4 = f(t + C4 * h, [a + h * (A41 * b + A42 * c + A43 * d) for a, b, c, d in zip(y, k1, k2, k3)])
            k5 = f(t + C5 * h, [a + h * (A51 * b + A52 * c + A53 * d + A54 * e)
                                for a, b, c, d, e in zip(y, k1, k2, k3, k4)])
            k6 = f(t + h, [a + h * (A61 * b + A62 * c + A63 * d + A64 * e + A65 * g)
                           for a, b, c, d, e, g in zip(y, k1, k2, k3, k4, k5)])
            ynew = tuple(a + h * (B1 * b + B3 * d + B4 * e + B5 * g + B6 * p)
                         for a, b, d, e, g, p in zip(y, k1, k3, k4, k5, k6))
            k7 = tuple(f(t + h, ynew))
            errv = [h * (E1 * b + E3 * d + E4 * e + E5 * g + E6 * p + E7 * q)
                    for b, d, e, g, p, q in zip(k1, k3, k4, k5, k6, k7)]
            sk = self._sk(y, ynew)
            err = _rms([e / s for e, s in zip(errv, sk)])
            if not math.isfinite(err):
                self.h = h * FAC_MIN
                rejected = True
                continue
            fac11 = err ** EXPO1
            if err <= 1.0:
                fac = fac11 / self.facold ** BETA
                fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFE))
                hnew = h / fac
                if rejected:
                    hnew = min(hnew, h)
                self.facold = max(err, 1e-4)
                break
            self.h = h / min(1.0 / FAC_MIN, fac11 / SAFE)
            rejected = True

        r2 = tuple(b - a for a, b in zip(y, ynew))
        r3 = tuple(h * a - b for a, b in zip(k1, r2))
        r4 = tuple(b - h * a - c for a, b, c in zip(k7, r2, r3))
        r5 = tuple(h * (D1 * a + D3 * c + D4 * d + D5 * e + D6 * g + D7 * p)
                   for a, c, d, e, g, p in zip(k1, k3, k4, k5, k6, k7))
        seg = Segment(t, h, y, r2, r3, r4, r5)
        self.t = t_limit if last else t + h
        self.y = ynew
        self.k1 = k7
        self.n_accepted += 1
        # a truncated final step must not shrink the next step proposal
        if not last:
            self.h = min(hnew, cfg.max_step)
        else:
            self.h = min(max(hnew, self.h), cfg.max_step)
        if max(abs(v) for v in ynew[: self.watch]) > BLOWUP_NORM:
            raise Blowup(self.t, ynew)
        return seg


def solve(f: RHS, y0: Sequence[float], T: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
          watch: Optional[int] = None) -> Trajectory:
    """Integrate y' = f(t, y) on [0, T].  ``watch`` components are checked for blowup."""
    if not T > 0:
        raise ValueError("duration must be positive")
    st = _Stepper(f, y0, cfg, len(y0) if watch is None else watch)
    traj = Trajectory([0.0], [st.y], [])
    while st.t < T:
        seg = st.step(T)
        traj.segments.append(seg)
        traj.times.append(st.t)
        traj.states.append(st.y)
    return traj


def field_rhs(X: VectorField2) -> RHS:
    fn = X.float_fn()
    return lambda t, s: fn(s[0], s[1])


def integrate(X: VectorField2, start: Sequence[float], T: float,
              cfg: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    return solve(field_rhs(X), start, T, cfg)


def quadrature_along(X: VectorField2, start: Sequence[float], g: Poly, T: float,
                     cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    """Integral of g(x(t), y(t)) over [0, T], carried as a third state component."""
    fn = X.float_fn()
    gf = g.to_float_fn()

    def rhs(t, s):
        p, q = fn(s[0], s[1])
        return (p, q, gf(s[0], s[1]))

    traj = solve(rhs, (start[0], start[1], 0.0), T, cfg, watch=2)
    return traj.final[2]


# -- events ---------------------------------------------------------------------

def _wrap(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


@dataclass(frozen=True)
class EventSpec:
    """Scalar event along a trajectory.

    kind ``"angle"``: accumulated polar angle minus ``value`` (radians);
    ``"x"``/``"y"``: that coordinate minus ``value``; ``"poly"``: ``poly(x, y)``.
    ``direction`` is ``"+"`` (rising through zero), ``"-"`` or ``"either"``.
    """

    kind: str
    value: float = 0.0
    direction: str = "either"
    poly: Optional[Poly] = None

    def __post_init__(self):
        if self.kind not in ("angle", "x", "y", "poly"):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.direction not in ("+", "-", "either"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.kind == "poly" and self.poly is None:
            raise ValueError("poly event needs a polynomial")

    @classmethod
    def angle_progress(cls, radians: float) -> "EventSpec":
        return cls("angle", radians, "either")

    @classmethod
    def crossing(cls, coord: str, value: float = 0.0, direction: str = "either") -> "EventSpec":
        return cls(coord, value, direction)

    @classmethod
    def zero_of(cls, g: Poly, direction: str = "either") -> "EventSpec":
        return cls("poly", 0.0, direction, g)


_SUBSAMPLES = 8
EVENT_TIME_TOL = 1e-13
START_EVENT_TOL = 1e-12


@dataclass
class EventHit:
    point: Tuple[float, float]
    time: float
    trajectory: Trajectory


def _crosses(g0: float, g1: float, direction: str) -> bool:
    if direction == "+":
        return g0 < 0.0 <= g1
    if direction == "-":
        return g0 > 0.0 >= g1
    return (g0 < 0.0 <= g1) or (g0 > 0.0 >= g1)


def _signed_ok(g: float, direction: str) -> bool:
    return (direction == "+" and g > 0) or (direction == "-" and g < 0)


def locate_event(rhs: RHS, start: Sequence[float], event: EventSpec, cfg: IntegratorConfig = DEFAULT_CONFIG,
                 horizon: float = 20.0, step_check: Optional[Callable[[Tuple[float, ...]], None]] = None,
                 ) -> EventHit:
    """Flow until ``event`` fires; the time is refined on the dense output."""
    st = _Stepper(rhs, start, cfg, 2)
    traj = Trajectory([0.0], [st.y], [])

    if event.kind == "angle":
        raw0 = math.atan2(st.y[1], st.y[0])

        def g_at(state, anchor):
            theta_acc, raw = anchor
            return theta_acc + _wrap(math.atan2(state[1], state[0]) - raw) - event.value
    elif event.kind in ("x", "y"):
        k = 0 if event.kind == "x" else 1

        def g_at(state, anchor):
            return state[k] - event.value
    else:
        pf = event.poly.to_float_fn()

        def g_at(state, anchor):
            return pf(state[0], state[1])

    anchor = (0.0, raw0) if event.kind == "angle" else None
    g_prev = g_at(st.y, anchor)
    check_start = event.direction != "either" and abs(g_prev) <= START_EVENT_TOL

    while st.t < horizon:
        seg = st.step(horizon)
        traj.segments.append(seg)
        traj.times.append(st.t)
        traj.states.append(st.y)
        if step_check is not None:
            step_check(st.y)
        t0, h = seg.t0, st.t - seg.t0
        for j in range(1, _SUBSAMPLES + 1):
            tj = st.t if j == _SUBSAMPLES else t0 + h * j / _SUBSAMPLES
            sj = st.y if j == _SUBSAMPLES else seg(tj)
            if event.kind == "angle":
                raw = math.atan2(sj[1], sj[0])
                new_anchor = (anchor[0] + _wrap(raw - anchor[1]), raw)
            else:
                new_anchor = None
            gj = g_at(sj, anchor)
            if check_start:
                check_start = False
                if _signed_ok(gj, event.direction):
                    return EventHit((traj.states[0][0], traj.states[0][1]), 0.0, traj)
            if _crosses(g_prev, gj, event.direction):
                ta = t0 + h * (j - 1) / _SUBSAMPLES
                fixed = anchor
                if g_prev == 0.0:
                    tev = ta
                elif gj == 0.0:
                    tev = tj
                else:
                    tev = brentq(lambda t: g_at(seg(t), fixed), ta, tj, xtol=EVENT_TIME_TOL)
                p = seg(tev)
                return EventHit((p[0], p[1]), tev, traj)
            g_prev = gj
            anchor = new_anchor
    raise NoEvent(f"event {event.kind} not reached before t={horizon:g}")


def flow_to_event(X: VectorField2, start: Sequence[float], event: EventSpec,
                  cfg: IntegratorConfig = DEFAULT_CONFIG, horizon: float = 20.0) -> Tuple[Tuple[float, float], float]:
    hit = locate_event(field_rhs(X), start, event, cfg, horizon)
    return hit.point, hit.time
