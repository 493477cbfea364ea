"""Acceptance gate: one test per numbered criterion, each printing PASS/FAIL.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Tolerances are pinned here and nowhere else.
"""

import math
import random
import time
from fractions import Fraction as F

import pytest

from conicq.adams import (RadialTestFunction, TruncatedLogProfile, b_constant,
                          identity_check)
from conicq.geometry import (ClassificationInput, ConicDivisor, classify)
from conicq.ode import (FootballState, integrate, round_sphere_state)
from conicq.polyexp import (HomPoly, LogRadialTerm, biharmonic, eigen_table,
                            laplacian_monomial_oracle, monomial_basis,
                            poly_dim, r2lap_matrix, rational_nullity,
                            solve_biharmonic, ts_add_term, ts_from_terms,
                            ts_terms, verify_residual)
from conicq.shooting import (ShootingConfig, find_q0, membership, reconstruct)

PI2 = math.pi ** 2
ONE = HomPoly.constant(1)
X = [HomPoly.variable(i) for i in range(4)]

SWEEP_PS = (-0.25, -0.5, -1.0, -2.0)


def report(criterion, ok, detail):
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")


@pytest.fixture(scope="module")
def sweep_solutions():
    cfgs = {p: ShootingConfig(p=p, q_tol=1e-11, ode_tol=1e-12) for p in SWEEP_PS}
    return {p: find_q0(cfg) for p, cfg in cfgs.items()}


@pytest.fixture(scope="module")
def round_sphere_short_traj():
    return integrate(round_sphere_state(0.0), (0.0, 5.0), tol=1e-10)


def test_criterion_1_round_sphere_shooting():
    t0 = time.perf_counter()
    sol = find_q0(ShootingConfig(p=-1.0, q_tol=1e-6))
    elapsed = time.perf_counter() - t0
    ok = (abs(sol.q0 - 6.0) <= 1e-5 and abs(sol.alpha - 1.0) <= 1e-5
          and elapsed < 10.0)
    report(1, ok, f"q0={sol.q0:.8f} alpha={sol.alpha:.8f} runtime={elapsed:.2f}s "
                  f"(tolerance 1e-5, budget 10s)")
    assert abs(sol.q0 - 6.0) <= 1e-5
    assert abs(sol.alpha - 1.0) <= 1e-5
    assert elapsed < 10.0


def test_criterion_2_closed_form_trajectory(round_sphere_short_traj):
    sup = 0.0
    for t, st in zip(round_sphere_short_traj.times, round_sphere_short_traj.states):
        ex = round_sphere_state(t)
        sup = max(sup, abs(st.x1 - ex.x1), abs(st.x2 - ex.x2),
                  abs(st.x3 - ex.x3), abs(st.w4 - ex.w4))
    ok = sup <= 1e-6
    report(2, ok, f"sup deviation over [0,5] = {sup:.2e} (tolerance 1e-6)")
    assert sup <= 1e-6


def test_criterion_3_first_integral_conservation(sweep_solutions,
                                                 round_sphere_short_traj):
    trajectories = [("round sphere [0,5]", round_sphere_short_traj)]
    for p, sol in sweep_solutions.items():
        trajectories.append((f"solution p={p}", sol.trajectory))
    for q, name in ((4.0, "membership q=4"), (7.0, "membership q=7")):
        trajectories.append((name, membership(-1.0, q).trajectory))
    trajectories.append(("round sphere [0,12]",
                         integrate(round_sphere_state(0.0), (0.0, 12.0), tol=1e-10)))
    trajectories.append(("round sphere [0,-12]",
                         integrate(round_sphere_state(0.0), (0.0, -12.0), tol=1e-10)))
    worst = 0.0
    ok = True
    for name, traj in trajectories:
        bound = 1e-8 * (1.0 + abs(traj.c0))
        worst = max(worst, traj.max_drift / bound)
        ok = ok and traj.max_drift <= bound
    report(3, ok, f"{len(trajectories)} trajectories, worst drift/bound = {worst:.2e}")
    assert ok


def test_criterion_4_alpha_consistency_sweep(sweep_solutions):
    residuals = {p: sol.alpha_residual for p, sol in sweep_solutions.items()}
    ok = all(r <= 1e-4 for r in residuals.values())
    detail = ", ".join(f"p={p}: {r:.2e}" for p, r in residuals.items())
    report(4, ok, f"|alpha + x1(t_max)| {detail} (tolerance 1e-4)")
    for p, r in residuals.items():
        assert r <= 1e-4, (p, r)


def test_criterion_5_gauss_bonnet_chern(sweep_solutions):
    rel_worst = 0.0
    for p, sol in sweep_solutions.items():
        rep = reconstruct(sol)
        rel_worst = max(rel_worst, rep.gbc_residual_rel)
        assert rep.gbc_residual_rel <= 1e-3, p
    sphere_rep = reconstruct(sweep_solutions[-1.0])
    sphere_gap = abs(sphere_rep.integral_x4 - 8.0)
    ok = rel_worst <= 1e-3 and sphere_gap <= 1e-6
    report(5, ok, f"worst relative GBC residual {rel_worst:.2e} (tol 1e-3); "
                  f"round-sphere integral gap {sphere_gap:.2e} (tol 1e-6)")
    assert sphere_gap <= 1e-6


def _terms(*pieces):
    ts = {}
    for poly, s, k in pieces:
        ts_add_term(ts, poly, F(s), k)
    return ts


GOLDEN_CASES = [
    ("Delta^2 r^4 = 192",
     LogRadialTerm.make(ONE, F(4), 0),
     _terms((HomPoly.constant(192), 0, 0))),
    ("Delta^2 (r^4 log r) = 448 + 384 log r",
     LogRadialTerm.make(ONE, F(4), 1),
     _terms((HomPoly.constant(448), 0, 0), (HomPoly.constant(384), 0, 1))),
    ("Delta^2 (x1 x2 r^2 log r) = 96 x1 x2 r^-2",
     LogRadialTerm.make(X[0] * X[1], F(2), 1),
     _terms(((X[0] * X[1]).scale(96), -2, 0))),
    ("Delta^2 (x1^2 r^2 log r) = 32 + 96 x1^2 r^-2 + 48 log r",
     LogRadialTerm.make(X[0] * X[0], F(2), 1),
     _terms((HomPoly.constant(32), 0, 0), ((X[0] * X[0]).scale(96), -2, 0),
            (HomPoly.constant(48), 0, 1))),
    ("Delta^2 (r^2 log r / 16) = r^-2",
     LogRadialTerm.make(ONE.scale(F(1, 16)), F(2), 1),
     _terms((ONE, -2, 0))),
]


@pytest.mark.parametrize("label,term,expected",
                         GOLDEN_CASES, ids=[c[0] for c in GOLDEN_CASES])
def test_criterion_6_golden_constants(label, term, expected):
    """Exact rational golden identities for the bilaplacian.

    The expected value recorded for r^4 log r disagrees with the
    differentiation oracle (engine, monomial oracle, and the sum over i of
    the x_i^2 identity all give 224 + 192 log r); it is asserted as recorded,
    so that one case fails.  See the companion oracle test below.
    """
    got = ts_from_terms(biharmonic(term))
    ok = got == expected
    report(6, ok, label)
    assert got == expected, f"{label}: engine returned {ts_terms(got)}"


def test_criterion_6_companion_oracle_value_for_r4_log_r():
    # three independent routes agree on 224 + 192 log r
    term = LogRadialTerm.make(ONE, F(4), 1)
    engine = ts_from_terms(biharmonic(term))
    oracle = ts_from_terms(
        [u for t in laplacian_monomial_oracle(term)
         for u in laplacian_monomial_oracle(t)])
    summed = {}
    for i in range(4):
        for t in biharmonic(LogRadialTerm.make(X[i] * X[i], F(2), 1)):
            ts_add_term(summed, t.poly, t.s, t.k)
    expected = _terms((HomPoly.constant(224), 0, 0), (HomPoly.constant(192), 0, 1))
    ok = engine == oracle == summed == expected
    report(6, ok, "oracle value Delta^2 (r^4 log r) = 224 + 192 log r "
                  "(three independent routes)")
    assert ok


def test_criterion_7_biharmonic_roundtrip_property():
    rng = random.Random(42)
    betas = [F(-1, 4), F(-1, 3), F(-2, 3), F(-3, 4), F(-1, 2)]
    checked = 0
    while checked < 100:
        beta = rng.choice(betas)
        max_deg = 2 if beta == F(-1, 2) else 6  # resonant channel precondition
        deg = rng.randint(0, max_deg)
        basis = monomial_basis(deg)
        picks = rng.sample(basis, min(4, len(basis)))
        f = HomPoly(deg, {e: F(rng.randint(-9, 9), rng.randint(1, 9)) for e in picks})
        if f.is_zero():
            continue
        k = rng.randint(0, 2)
        expansion = solve_biharmonic(f, beta, k)
        src = {}
        ts_add_term(src, f, 4 * beta, k)
        assert ts_from_terms(biharmonic(expansion.terms)) == src
        assert verify_residual(expansion, beta, F(1000),
                               source=ts_terms(src)) == []
        checked += 1
    report(7, True, f"{checked} randomized (f, beta, k) roundtrips, exact")


def test_criterion_8_spectral_table():
    for m in range(0, 7):
        basis, mat = r2lap_matrix(m)
        n = len(basis)
        total = 0
        for j, lam, mult in eigen_table(m).entries:
            a = [[F(mat[r][c]) - (lam if r == c else 0) for c in range(n)]
                 for r in range(n)]
            nullity = rational_nullity(a)
            assert nullity == mult, (m, j, lam, nullity, mult)
            total += nullity
        assert total == poly_dim(m) == n  # no eigenvalue unaccounted for
    report(8, True, "m <= 6 matrix spectra equal 2j(2+2m-2j) with harmonic "
                    "multiplicities, exact")


def test_criterion_9_adams_identity():
    b4 = b_constant(4)
    machine_ok = abs(b4 - 32.0 * PI2) <= 1e-13 * 32.0 * PI2
    profiles = [
        RadialTestFunction.quartic_bump(height=0.15),
        RadialTestFunction.cosine_cap(height=0.12),
        TruncatedLogProfile.at_depth(2.0 ** -4).normalized_test_function(),
    ]
    worst = 0.0
    for beta in (-0.25, -0.5, -0.75):
        for v in profiles:
            _, _, gap = identity_check(v, beta)
            worst = max(worst, gap)
            assert gap <= 1e-6, (beta, v.tag, gap)
    ok = machine_ok and worst <= 1e-6
    report(9, ok, f"b_4,2 = 32 pi^2 (rel err {abs(b4 - 32 * PI2) / (32 * PI2):.1e}); "
                  f"worst identity gap {worst:.2e} over 9 profile/beta pairs")
    assert machine_ok


def test_criterion_10_classification_truth_table():
    def make(k, betas):
        return ClassificationInput(k, ConicDivisor.from_betas(betas))

    checks = [
        (classify(make(16.0, [-0.5, -0.5])).label, "critical"),
        (classify(make(16.0, [-0.5])).label, "supercritical"),
        (classify(make(0.0, [-0.5, -0.5])).label, "subcritical"),
    ]
    margins = [
        (classify(make(16.0, [-0.5, -0.5])).margin_pi2, 0.0),
        (classify(make(16.0, [-0.5])).margin_pi2, 4.0),
        (classify(make(0.0, [-0.5, -0.5])).margin_pi2, -16.0),
    ]
    grid_ok = all(classify(make(16.0, [b, b])).label == "critical"
                  for b in (-0.045 * (i + 1) for i in range(20)))
    labels_ok = all(got == want for got, want in checks)
    margins_ok = all(abs(got - want) < 1e-11 for got, want in margins)
    ok = labels_ok and margins_ok and grid_ok
    report(10, ok, "three labelled examples exact; 20-point equal-index grid "
                   "all critical")
    assert ok


def test_criterion_11_comparison_monotonicity():
    rng = random.Random(1234)
    worst = 0.0
    for _ in range(50):
        p = rng.uniform(-2.0, -1.5)
        q = rng.uniform(1.0, 3.5)
        y0 = FootballState(0.0, p, 0.0, math.log(q))
        gaps = [0.0 if rng.random() < 0.25 else rng.uniform(1e-3, 0.1)
                for _ in range(4)]
        x0 = FootballState(y0.x1 + gaps[0], y0.x2 + gaps[1],
                           y0.x3 + gaps[2], y0.w4 + gaps[3])
        upper = integrate(x0, (0.0, 10.0), tol=1e-10)
        lower = integrate(y0, (0.0, 10.0), tol=1e-10)
        for t in [0.25 * i for i in range(1, 41)]:
            yu, yl = upper.interpolate(t), lower.interpolate(t)
            for i in range(4):
                worst = max(worst, yl[i] - yu[i])
                assert yu[i] >= yl[i] - 1e-8, (p, q, gaps, t, i)
    ok = worst <= 1e-8
    report(11, ok, f"50 ordered pairs on (0,10], worst ordering violation "
                   f"{worst:.2e} (tolerance 1e-8)")
    assert ok
