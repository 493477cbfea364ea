"""Radial constant-Q dynamics on the cylinder and its adaptive integrator.

The fourth-order equation v'''' - 4 v'' = e^(4v) becomes the first-order
system

    x1' = x2,   x2' = 4 x1 + x3,   x3' = x4,   x4' = 4 x1 x4,

with x1 = v', x2 = v'', x3 = v''' - 4 v' and x4 = e^(4v) > 0.  We evolve
w4 = log x4 (so w4' = 4 x1) because trapped orbits have x4 decaying like
exp(-c t^2), far below double-precision underflow in the raw variable.

The quantity 2 x2^2 - 8 x1^2 - 4 x1 x3 + x4 is conserved along orbits and is
monitored on every trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

State = tuple[float, float, float, float]  # (x1, x2, x3, w4)

_EXP_CAP = 700.0  # beyond this, exp(w4) overflows; force a step rejection


class StiffnessError(RuntimeError):
    """Step size underflowed; carries the partial trajectory."""

    def __init__(self, message: str, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class FootballState:
    """Point of the radial system: (v', v'', v'''-4v', log e^(4v))."""

    x1: float
    x2: float
    x3: float
    w4: float

    def __post_init__(self):
        if not math.isfinite(self.w4):
            raise ValueError("w4 = log x4 must be finite (x4 > 0)")

    @property
    def x4(self) -> float:
        return math.exp(self.w4)

    @property
    def x2_prime(self) -> float:
        return 4.0 * self.x1 + self.x3

    def as_tuple(self) -> State:
        return (self.x1, self.x2, self.x3, self.w4)

    @staticmethod
    def from_tuple(y: Sequence[float]) -> "FootballState":
        return FootballState(y[0], y[1], y[2], y[3])


def _safe_exp(w: float) -> float:
    return math.exp(w) if w < _EXP_CAP else math.inf


def vector_field(y: State) -> State:
    """Right side of the system in (x1, x2, x3, w4) coordinates."""
    x1, x2, x3, w4 = y
    return (x2, 4.0 * x1 + x3, _safe_exp(w4), 4.0 * x1)


def first_integral(s: FootballState | State) -> float:
    """Conserved quantity 2 x2^2 - 8 x1^2 - 4 x1 x3 + x4."""
    x1, x2, x3, w4 = s.as_tuple() if isinstance(s, FootballState) else s
    return 2.0 * x2 * x2 - 8.0 * x1 * x1 - 4.0 * x1 * x3 + _safe_exp(w4)


def first_integral_alt(s: FootballState | State) -> float:
    """Equivalent form 2 x2^2 + x3^2/2 - (x2')^2/2 + x4 with x2' = 4 x1 + x3."""
    x1, x2, x3, w4 = s.as_tuple() if isinstance(s, FootballState) else s
    dx2 = 4.0 * x1 + x3
    return 2.0 * x2 * x2 + 0.5 * x3 * x3 - 0.5 * dx2 * dx2 + _safe_exp(w4)


def round_sphere_state(t: float) -> FootballState:
    """Closed-form orbit of the standard sphere: v = -log cosh t + log(6)/4.

    Componentwise (-tanh t, -sech^2 t, 2 tanh t (sech^2 t + 2), 6 sech^4 t),
    with w4 = log 6 - 4 log cosh t kept in log form for large |t|.
    """
    th = math.tanh(t)
    # log cosh t without overflow: |t| + log1p(exp(-2|t|)) - log 2
    logcosh = abs(t) + math.log1p(math.exp(-2.0 * abs(t))) - math.log(2.0)
    sech2 = math.exp(-2.0 * logcosh)
    return FootballState(
        x1=-th,
        x2=-sech2,
        x3=2.0 * th * (sech2 + 2.0),
        w4=math.log(6.0) - 4.0 * logcosh,
    )


# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Event:
    """Terminal or recording predicate, fired at a sign change of `fn`.

    direction +1 fires on crossings from negative to nonnegative, -1 on
    crossings from positive to nonpositive, 0 on any sign change.  Crossing
    times are located by bisection on the dense output to `loc_tol` in t.
    """

    name: str
    fn: Callable[[State], float]
    direction: int = 0
    terminal: bool = True


def x2_crosses_zero() -> Event:
    return Event("x2_nonnegative", lambda y: y[1], direction=+1)


def trapped_collapse() -> Event:
    """All of x1, x2, x2', x2'' negative: a provably invariant trap.

    While the four quantities are negative, each one strictly decreases
    (x2''' = 4 x2' + 4 x1 x4 < 0 closes the loop), so x2 -> -infinity and the
    orbit can never return to x2 = 0.
    """

    def fn(y: State) -> float:
        x1, x2, x3, w4 = y
        dx2 = 4.0 * x1 + x3
        ddx2 = 4.0 * x2 + _safe_exp(w4)
        return max(x1, x2, dx2, ddx2)

    return Event("trapped_collapse", fn, direction=-1)


# ---------------------------------------------------------------------------
# Trajectory
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Accepted-step samples of one integration, with conservation metrics.

    times are strictly increasing (backward runs are stored reversed); derivs
    holds the vector field at each sample so cubic Hermite interpolation and
    CSV dense output are available after the fact.
    """

    times: list[float]
    states: list[FootballState]
    derivs: list[State]
    c0: float
    max_drift: float
    events_hit: list[tuple[str, float]] = field(default_factory=list)
    reached_t_end: bool = True

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must align")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")

    @property
    def t0(self) -> float:
        return self.times[0]

    @property
    def t_end(self) -> float:
        return self.times[-1]

    def state_at_end(self) -> FootballState:
        return self.states[-1]

    def _bracket(self, t: float) -> int:
        lo, hi = 0, len(self.times) - 1
        if not (self.times[0] <= t <= self.times[-1]):
            raise ValueError(f"t={t} outside trajectory range")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.times[mid] <= t:
                lo = mid
            else:
                hi = mid
        return lo

    def interpolate(self, t: float) -> State:
        """Cubic Hermite interpolation on the bracketing accepted step."""
        i = self._bracket(t)
        t0, t1 = self.times[i], self.times[i + 1]
        if t1 == t0:
            return self.states[i].as_tuple()
        return _hermite(t0, self.states[i].as_tuple(), self.derivs[i],
                        t1, self.states[i + 1].as_tuple(), self.derivs[i + 1], t)

    def resample(self, n: int) -> tuple[list[float], list[State]]:
        """n+1 uniformly spaced dense-output samples over the whole span."""
        a, b = self.times[0], self.times[-1]
        ts = [a + (b - a) * i / n for i in range(n + 1)]
        return ts, [self.interpolate(t) for t in ts]

    def write_csv(self, out: TextIO, dense_dt: float | None = None) -> None:
        """Rows t,x1,x2,x3,x4,v,first_integral in deterministic order."""
        out.write("t,x1,x2,x3,x4,v,first_integral\n")
        if dense_dt is None:
            rows: Iterable[tuple[float, State]] = (
                (t, s.as_tuple()) for t, s in zip(self.times, self.states))
        else:
            n = max(1, int(round((self.t_end - self.t0) / dense_dt)))
            ts, ys = self.resample(n)
            rows = zip(ts, ys)
        for t, y in rows:
            x1, x2, x3, w4 = y
            out.write(f"{t!r},{x1!r},{x2!r},{x3!r},{math.exp(w4)!r},"
                      f"{w4 / 4.0!r},{first_integral(y)!r}\n")


def _hermite(t0: float, y0: State, f0: State, t1: float, y1: State, f1: State,
             t: float) -> State:
    h = t1 - t0
    u = (t - t0) / h
    h00 = (1 + 2 * u) * (1 - u) ** 2
    h10 = u * (1 - u) ** 2
    h01 = u * u * (3 - 2 * u)
    h11 = u * u * (u - 1)
    return tuple(
        h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i]
        for i in range(4)
    )  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with PI step control
# ---------------------------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_EVENT_LOC_TOL = 1e-12
_MAX_FACTOR = 10.0
_MIN_FACTOR = 0.2
_SAFETY = 0.9


def _err_norm(err: Sequence[float], y0: State, y1: State, tol: float) -> float:
    acc = 0.0
    for i in range(4):
        scale = tol + tol * max(abs(y0[i]), abs(y1[i]))
        v = err[i] / scale
        acc += v * v
    return math.sqrt(acc / 4.0)


def _initial_step(f0: State, y0: State, tol: float, span: float) -> float:
    scale = max(1.0, max(abs(v) for v in y0))
    rate = max(abs(v) for v in f0) / scale
    h = (tol ** 0.2) / max(rate, 1e-4)
    return min(h, 0.1, span)


def integrate(s0: FootballState, t_span: tuple[float, float], tol: float = 1e-10,
              events: Sequence[Event] = (), max_step: float = math.inf) -> Trajectory:
    """Adaptive embedded Runge-Kutta integration with event termination.

    Local error is kept at or below `tol` (used as both relative and absolute
    scale) by a PI controller on a Dormand-Prince 5(4) pair; dense output is
    cubic Hermite on accepted steps, and event crossings are located on it by
    bisection to 1e-12 in t.  t_span may run backward.  A non-finite stage or
    persistent rejection collapses the step and raises StiffnessError with
    the partial trajectory attached.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t0, t1 = t_span
    if t1 == t0:
        return Trajectory([t0], [s0], [vector_field(s0.as_tuple())],
                          c0=first_integral(s0), max_drift=0.0)

    direction = 1.0 if t1 > t0 else -1.0
    t = t0
    y = s0.as_tuple()
    f = vector_field(y)
    c0 = first_integral(y)
    drift = 0.0

    times = [t]
    states = [s0]
    derivs = [f]
    ev_vals = [ev.fn(y) for ev in events]
    events_hit: list[tuple[str, float]] = []

    h = direction * _initial_step(f, y, tol, abs(t1 - t0))
    err_prev = 1.0
    hmin = 1e-14 * max(1.0, abs(t0), abs(t1))

    def partial() -> Trajectory:
        seq = slice(None, None, 1 if direction > 0 else -1)
        return Trajectory(times[seq], states[seq], derivs[seq], c0=c0,
                          max_drift=drift, events_hit=events_hit,
                          reached_t_end=False)

    while (t1 - t) * direction > 0:
        if abs(h) > max_step:
            h = direction * max_step
        if (t + h - t1) * direction > 0:
            h = t1 - t
        if t + h == t:
            raise StiffnessError("step size underflow (no forward progress)", partial())

        # seven stages, FSAL
        k = [f]
        bad = False
        for i in range(1, 7):
            yi = list(y)
            ai = _A[i]
            for j, a in enumerate(ai):
                if a != 0.0:
                    kj = k[j]
                    for c in range(4):
                        yi[c] += h * a * kj[c]
            ki = vector_field(tuple(yi))
            if not all(map(math.isfinite, ki)):
                bad = True
                break
            k.append(ki)
        if not bad:
            y_new = tuple(y[c] + h * sum(_B5[i] * k[i][c] for i in range(7) if _B5[i])
                          for c in range(4))
            err = tuple(h * sum(_E[i] * k[i][c] for i in range(7) if _E[i])
                        for c in range(4))
            bad = not all(map(math.isfinite, y_new))

        if bad:
            h *= 0.25
            if abs(h) < hmin:
                raise StiffnessError("step size underflow (non-finite stages)", partial())
            continue

        en = _err_norm(err, y, y_new, tol)
        if not math.isfinite(en):
            h *= 0.25
            if abs(h) < hmin:
                raise StiffnessError("step size underflow (error blow-up)", partial())
            continue
        if en > 1.0:
            h *= max(_MIN_FACTOR, _SAFETY * en ** -0.2)
            if abs(h) < hmin:
                raise StiffnessError("step size underflow (persistent rejection)", partial())
            continue

        # accepted
        f_new = k[6]  # FSAL: stage 7 is the derivative at y_new
        t_new = t + h

        terminal_hit: tuple[float, State, str] | None = None
        for idx, ev in enumerate(events):
            g0, g1 = ev_vals[idx], ev.fn(y_new)
            # boundary starts (g exactly 0) count as crossings once g moves off 0
            crossed = ((ev.direction >= 0 and ((g0 < 0.0 <= g1) or (g0 == 0.0 < g1)))
                       or (ev.direction <= 0 and ((g0 > 0.0 >= g1) or (g0 == 0.0 > g1))))
            if not crossed:
                ev_vals[idx] = g1
                continue
            t_ev, y_ev = _locate(ev, t, y, f, t_new, y_new, f_new, g0)
            events_hit.append((ev.name, t_ev))
            if ev.terminal and (terminal_hit is None
                                or (t_ev - terminal_hit[0]) * direction < 0):
                terminal_hit = (t_ev, y_ev, ev.name)
            ev_vals[idx] = g1

        if terminal_hit is not None:
            t_ev, y_ev, _ = terminal_hit
            times.append(t_ev)
            states.append(FootballState.from_tuple(y_ev))
            derivs.append(vector_field(y_ev))
            drift = max(drift, abs(first_integral(y_ev) - c0))
            seq = slice(None, None, 1 if direction > 0 else -1)
            return Trajectory(times[seq], states[seq], derivs[seq], c0=c0,
                              max_drift=drift, events_hit=events_hit,
                              reached_t_end=False)

        t, y, f = t_new, y_new, f_new
        times.append(t)
        states.append(FootballState.from_tuple(y))
        derivs.append(f)
        drift = max(drift, abs(first_integral(y) - c0))

        # PI controller (Hairer's beta = 0.08 pairing for order 5)
        fac = _SAFETY * (en ** -0.14 if en > 0 else _MAX_FACTOR) * err_prev ** 0.08
        h *= min(_MAX_FACTOR, max(_MIN_FACTOR, fac))
        err_prev = max(en, 1e-10)

    seq = slice(None, None, 1 if direction > 0 else -1)
    return Trajectory(times[seq], states[seq], derivs[seq], c0=c0,
                      max_drift=drift, events_hit=events_hit, reached_t_end=True)


def _locate(ev: Event, t0: float, y0: State, f0: State, t1: float, y1: State,
            f1: State, g0: float) -> tuple[float, State]:
    """Bisect the Hermite interpolant for the event crossing time."""
    a, b = t0, t1
    ga = g0
    rising = ev.direction >= 0 and ga < 0.0
    for _ in range(200):
        if abs(b - a) <= _EVENT_LOC_TOL:
            break
        mid = 0.5 * (a + b)
        ym = _hermite(t0, y0, f0, t1, y1, f1, mid)
        gm = ev.fn(ym)
        on_start_side = gm < 0.0 if rising else gm > 0.0
        if on_start_side:
            a = mid
        else:
            b = mid
    yb = _hermite(t0, y0, f0, t1, y1, f1, b)
    return b, yb
