"""Shooting construction of the radial two-cone ("football") solutions.

For fixed p < 0, initial data (x1, x2, x3, x4)(0) = (0, p, 0, q) is integrated
forward; q belongs to the trapped set Q when x2 stays negative forever.  Q is
downward closed, nonempty (q <= -4p traps immediately) and bounded, and the
supremum q0 = sup Q singles out the bounded orbit connecting two points of
the fixed-point line (a, 0, -4a, 0).  Bisection on the membership oracle
therefore converges to q0, and the cone angle alpha = 1 + beta follows from
the conserved quantity: c = 2 p^2 + q0 at t = 0 must equal 8 a^2 at the ends,
so alpha = |a| = sqrt(c / 8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .geometry import cylinder_to_plane
from .ode import (Event, FootballState, StiffnessError, Trajectory,
                  first_integral, integrate, trapped_collapse, x2_crosses_zero)


class BracketError(RuntimeError):
    """A bracket for bisection or root finding could not be established."""


@dataclass(frozen=True)
class ShootingConfig:
    p: float
    q_tol: float = 1e-10
    ode_tol: float = 1e-10
    t_max: float = 30.0
    bracket_growth: float = 2.0
    max_bracket_steps: int = 60

    def __post_init__(self):
        if not (self.p < 0):
            raise ValueError("p must be negative")
        if min(self.q_tol, self.ode_tol, self.t_max) <= 0:
            raise ValueError("tolerances and t_max must be positive")
        if self.bracket_growth <= 1:
            raise ValueError("bracket_growth must exceed 1")


@dataclass(frozen=True)
class MembershipResult:
    """Outcome of one shot: trapped (in Q), escaped, or undecided by t_max.

    For undecided runs `trend` is +1 when x2 is rising at t_max (escaped
    side) and -1 when falling (trapped side); decided runs carry the firing
    time of the certifying event.
    """

    kind: str  # "in_q" | "escaped" | "undecided"
    event_time: float | None
    trend: int
    final_state: FootballState
    trajectory: Trajectory

    @property
    def decided(self) -> bool:
        return self.kind != "undecided"


def membership(p: float, q: float, cfg: ShootingConfig | None = None) -> MembershipResult:
    """Classify q against the trapped set Q for the given p.

    Escape is certified by x2 reaching 0 (monotonicity then keeps every larger
    q escaping); trapping is certified by the invariant region where x1, x2,
    x2' and x2'' are simultaneously negative, inside which all four decrease
    forever.  If neither certificate fires by t_max the run is undecided.
    """
    if p >= 0 or q <= 0:
        raise ValueError("membership needs p < 0 and q > 0")
    cfg = cfg or ShootingConfig(p=p)
    s0 = FootballState(0.0, p, 0.0, math.log(q))
    traj = integrate(s0, (0.0, cfg.t_max), tol=cfg.ode_tol,
                     events=[x2_crosses_zero(), trapped_collapse()])
    end = traj.state_at_end()
    if traj.events_hit:
        name, t_ev = min(traj.events_hit, key=lambda it: it[1])
        kind = "escaped" if name == "x2_nonnegative" else "in_q"
        return MembershipResult(kind, t_ev, 0, end, traj)
    trend = 1 if end.x2_prime > 0 else -1
    return MembershipResult("undecided", None, trend, end, traj)


@dataclass(frozen=True)
class FootballSolution:
    """Bounded-orbit result of the shooting search for one p."""

    p: float
    q0: float
    q0_err: float
    alpha: float
    beta: float
    c: float
    trajectory: Trajectory
    bisection_iters: int
    alpha_residual: float

    def __post_init__(self):
        assert abs(self.c - (2.0 * self.p ** 2 + self.q0)) < 1e-9 * (1.0 + abs(self.c))
        assert abs(self.alpha - math.sqrt(self.c / 8.0)) < 1e-12 * (1.0 + self.alpha)


def extract_alpha(p: float, q0: float) -> float:
    """Cone angle from conserved quantity: alpha = sqrt((2 p^2 + q0) / 8).

    At the fixed-point line (a, 0, -4a, 0) the conserved quantity evaluates
    to 8 a^2, while the symmetric initial data give 2 p^2 + q0.
    """
    if q0 <= 0:
        raise ValueError("q0 must be positive")
    return math.sqrt((2.0 * p * p + q0) / 8.0)


def find_q0(cfg: ShootingConfig) -> FootballSolution:
    """Bisect the membership oracle to q0 = sup Q and assemble the solution.

    The bracket starts at q_lo = -4p (trapped immediately) and grows by
    cfg.bracket_growth until an escape certifies q_hi.  Undecided probes
    shrink the side their x2 trend indicates, but once both bracket endpoints
    are undecided the search stops and the remaining width is the error bar.
    """
    p = cfg.p
    lo, lo_kind = -4.0 * p, None
    res = membership(p, lo, cfg)
    if res.kind == "escaped":
        raise BracketError(f"q = -4p = {lo} unexpectedly escaped; bad configuration")
    lo_kind = res.kind if res.decided else "undecided"

    hi = lo
    for _ in range(cfg.max_bracket_steps):
        hi *= cfg.bracket_growth
        res = membership(p, hi, cfg)
        if res.kind == "escaped":
            break
    else:
        raise BracketError(
            f"no escaping q found below {hi} after {cfg.max_bracket_steps} expansions")
    hi_kind = "escaped"

    iters = 0
    while hi - lo > cfg.q_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float resolution exhausted
            break
        res = membership(p, mid, cfg)
        iters += 1
        if res.kind == "in_q":
            lo, lo_kind = mid, "in_q"
        elif res.kind == "escaped":
            hi, hi_kind = mid, "escaped"
        elif res.trend > 0:
            hi, hi_kind = mid, "undecided"
        else:
            lo, lo_kind = mid, "undecided"
        if lo_kind == "undecided" and hi_kind == "undecided":
            break

    q0 = 0.5 * (lo + hi)
    q0_err = 0.5 * (hi - lo)
    return _assemble(cfg, q0, q0_err, iters)


def _closest_approach_index(traj: Trajectory) -> int:
    """Sample index where the orbit hugs the fixed-point line most closely.

    Distance is max(|x2|, |x2'|, x4): all three vanish on the line.  Reading
    alpha off at this point balances the orbit's remaining approach error
    against the exponential peel-off an imperfect q0 eventually causes.
    """
    best, best_i = math.inf, 0
    for i, s in enumerate(traj.states):
        d = max(abs(s.x2), abs(s.x2_prime), s.x4)
        if d < best:
            best, best_i = d, i
    return best_i


def _assemble(cfg: ShootingConfig, q0: float, q0_err: float, iters: int) -> FootballSolution:
    p = cfg.p
    c = 2.0 * p * p + q0
    alpha = extract_alpha(p, q0)
    s0 = FootballState(0.0, p, 0.0, math.log(q0))
    traj = integrate(s0, (0.0, cfg.t_max), tol=cfg.ode_tol,
                     events=[x2_crosses_zero(), trapped_collapse()])
    i_star = _closest_approach_index(traj)
    if i_star < 1:
        raise BracketError("assembled trajectory never approached the fixed-point line")
    cut = Trajectory(traj.times[:i_star + 1], traj.states[:i_star + 1],
                     traj.derivs[:i_star + 1], c0=traj.c0,
                     max_drift=max(abs(first_integral(s) - traj.c0)
                                   for s in traj.states[:i_star + 1]),
                     events_hit=[], reached_t_end=False)
    alpha_residual = abs(alpha - (-cut.state_at_end().x1))
    return FootballSolution(p=p, q0=q0, q0_err=q0_err, alpha=alpha,
                            beta=alpha - 1.0, c=c, trajectory=cut,
                            bisection_iters=iters, alpha_residual=alpha_residual)


# ---------------------------------------------------------------------------
# beta-targeted solving
# ---------------------------------------------------------------------------

_SCAN_EXPONENTS = list(range(-10, 7))  # p = -2^k, k in [-10, 6]


def solve_for_beta(beta_target: float, cfg_template: ShootingConfig | None = None,
                   alpha_tol: float = 1e-7) -> FootballSolution:
    """Find p < 0 whose bounded orbit has cone index beta_target.

    alpha(p) is continuous with alpha(-1) = 1, but no monotonicity in p is
    assumed: the solver scans p = -2^k until the target is bracketed, then
    runs a guarded secant (Illinois) iteration.
    """
    if beta_target <= -1.0:
        raise BracketError("beta must exceed -1 (alpha = 1 + beta must be positive)")
    alpha_target = 1.0 + beta_target
    base = cfg_template or ShootingConfig(p=-1.0)
    coarse = replace(base, p=-1.0, q_tol=min(1e-6, base.q_tol * 1e3 + 1e-12))

    def alpha_of(p: float, fine: bool = False) -> float:
        cfg = replace(base if fine else coarse, p=p)
        return find_q0(cfg).alpha

    # scan outward from the anchor p = -1 for a sign change
    ps = sorted((-2.0 ** k for k in _SCAN_EXPONENTS))
    anchor = ps.index(-1.0)
    seen: dict[int, float] = {anchor: alpha_of(-1.0) - alpha_target}
    bracket = None
    for step in range(1, len(ps)):
        for idx in (anchor - step, anchor + step):
            if not (0 <= idx < len(ps)) or bracket:
                continue
            seen[idx] = alpha_of(ps[idx]) - alpha_target
            lo_i, hi_i = min(seen), max(seen)
            for a, b in zip(sorted(seen), sorted(seen)[1:]):
                if b == a + 1 and seen[a] * seen[b] <= 0:
                    bracket = (ps[a], seen[a], ps[b], seen[b])
                    break
        if bracket:
            break
    if not bracket:
        raise BracketError(
            f"alpha = {alpha_target} not bracketed after scan over p in [-64, -2^-10]")

    pa, fa, pb, fb = bracket
    if fa == 0.0:
        pb = pa
    for _ in range(80):
        if fb == fa:
            break
        pm = pb - fb * (pb - pa) / (fb - fa)
        if not (min(pa, pb) < pm < max(pa, pb)):
            pm = 0.5 * (pa + pb)
        fm = alpha_of(pm) - alpha_target
        if abs(fm) <= alpha_tol or abs(pb - pa) < 1e-13 * max(1.0, abs(pb)):
            pa = pm
            break
        if fm * fb < 0:
            pa, fa = pb, fb
        else:
            fa *= 0.5  # Illinois damping keeps the bracket moving
        pb, fb = pm, fm
    else:
        raise BracketError("secant iteration on p failed to converge")

    p_final = pa if abs(alpha_of(pa) - alpha_target) <= abs(
        alpha_of(pb) - alpha_target) else pb
    return find_q0(replace(base, p=p_final))


# ---------------------------------------------------------------------------
# Metric reconstruction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricReport:
    """Plane-coordinate profile and curvature bookkeeping for one solution."""

    r_grid: tuple[float, ...]
    u_profile: tuple[float, ...]
    integral_x4: float
    total_curvature_pi2: float
    x3_limits: tuple[float, float]
    ftc_residual: float
    gbc_expected_pi2: float
    gbc_residual_rel: float
    x4_at_cut: float


def _simpson(values: list[float], h: float) -> float:
    if len(values) % 2 == 0:
        raise ValueError("simpson needs an odd number of samples")
    acc = values[0] + values[-1]
    acc += 4.0 * math.fsum(values[1:-1:2])
    acc += 2.0 * math.fsum(values[2:-2:2])
    return acc * h / 3.0


def reconstruct(sol: FootballSolution, samples_per_unit: int = 200) -> MetricReport:
    """Two-sided profile, total curvature, and the Gauss-Bonnet-Chern check.

    The trajectory is mirrored through genuine backward integration; the
    smooth-curvature total is 2 pi^2 * integral of x4 dt (composite Simpson on
    uniform dense output) and must match 8 pi^2 (2 + 2 beta), while x4 = x3'
    makes x3(t*) - x3(-t*) an independent cross-check of the same integral.
    """
    fwd = sol.trajectory
    t_star = fwd.t_end
    s0 = fwd.states[0]
    bwd = integrate(s0, (0.0, -t_star), tol=1e-12)

    n_half = max(8, int(round(t_star * samples_per_unit)))
    h = t_star / n_half
    ts: list[float] = []
    x4s: list[float] = []
    vs: list[float] = []
    x3_left = x3_right = 0.0
    for i in range(-n_half, n_half + 1):
        t = i * h
        src = bwd if t < 0 else fwd
        y = src.interpolate(max(min(t, t_star), -t_star))
        ts.append(t)
        x4s.append(math.exp(y[3]))
        vs.append(y[3] / 4.0)
        if i == -n_half:
            x3_left = y[2]
        if i == n_half:
            x3_right = y[2]

    integral = _simpson(x4s, h)
    total_pi2 = 2.0 * integral
    expected_pi2 = 8.0 * (2.0 + 2.0 * sol.beta)
    rs, us = cylinder_to_plane(ts, vs)
    return MetricReport(
        r_grid=tuple(rs),
        u_profile=tuple(us),
        integral_x4=integral,
        total_curvature_pi2=total_pi2,
        x3_limits=(x3_left, x3_right),
        ftc_residual=abs(integral - (x3_right - x3_left)),
        gbc_expected_pi2=expected_pi2,
        gbc_residual_rel=abs(total_pi2 - expected_pi2) / expected_pi2,
        x4_at_cut=math.exp(fwd.state_at_end().w4),
    )
