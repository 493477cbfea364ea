"""Divisor arithmetic, criticality trichotomy, and coordinate maps."""

import math

import pytest

from conicq.geometry import (ClassificationInput, ConicDivisor, DivisorError,
                             classify, cylinder_to_plane, gamma_n,
                             gamma_n_pi2, kelvin_invert, sphere_volume,
                             total_q_integral_pi2)

PI2 = math.pi ** 2


def make_input(k_pi2, betas, dim=4):
    return ClassificationInput(k_g0_pi2=k_pi2, divisor=ConicDivisor.from_betas(betas),
                               dimension=dim)


def test_gamma_n_dimension_four():
    # |S^4| = 8 pi^2 / 3, so 3! * |S^4| / 2 = 8 pi^2; also 4 |S^3| = 8 pi^2
    assert math.isclose(sphere_volume(4), 8.0 * PI2 / 3.0, rel_tol=1e-14)
    assert math.isclose(gamma_n(4), 8.0 * PI2, rel_tol=1e-14)
    assert math.isclose(gamma_n(4), 4.0 * sphere_volume(3), rel_tol=1e-14)
    assert gamma_n_pi2(4) == 8.0


def test_gamma_n_dimension_six():
    # |S^6| = 2 pi^(7/2) / Gamma(7/2) = 16 pi^3 / 15, so gamma_6 = 64 pi^3
    assert math.isclose(sphere_volume(6), 16.0 * math.pi ** 3 / 15.0, rel_tol=1e-14)
    assert math.isclose(gamma_n(6), math.factorial(5) * sphere_volume(6) / 2.0,
                        rel_tol=1e-15)
    assert math.isclose(gamma_n(6), 64.0 * math.pi ** 3, rel_tol=1e-14)


@pytest.mark.parametrize("n", [3, 5, 2, 0, -4])
def test_gamma_n_rejects_bad_dimension(n):
    with pytest.raises(DivisorError):
        gamma_n(n)


def test_total_q_integral_examples():
    assert total_q_integral_pi2(make_input(16.0, [-0.5, -0.5])) == 8.0
    assert total_q_integral_pi2(ClassificationInput(
        16.0, ConicDivisor.from_betas([]))) == 16.0
    assert total_q_integral_pi2(make_input(16.0, [-0.2, -0.3])) == pytest.approx(
        12.0, abs=1e-12)


def test_classify_examples():
    crit = classify(make_input(16.0, [-0.5, -0.5]))
    assert crit.label == "critical" and abs(crit.margin_pi2) < 1e-11
    assert crit.beta_min == -0.5

    sup = classify(make_input(16.0, [-0.5]))
    assert sup.label == "supercritical"
    assert sup.margin_pi2 == pytest.approx(4.0, abs=1e-12)

    sub = classify(make_input(0.0, [-0.5, -0.5]))
    assert sub.label == "subcritical"
    assert sub.margin_pi2 == pytest.approx(-16.0, abs=1e-12)


def test_classify_permutation_invariant():
    a = classify(make_input(16.0, [-0.7, -0.2, -0.4]))
    b = classify(make_input(16.0, [-0.4, -0.7, -0.2]))
    assert a == b


def test_classify_margin_affine():
    base = classify(make_input(10.0, [-0.5, -0.25])).margin_pi2
    # slope 1 in the background total
    shifted = classify(make_input(13.0, [-0.5, -0.25])).margin_pi2
    assert shifted - base == pytest.approx(3.0, abs=1e-12)
    # slope gamma_n in a non-minimal index
    up_other = classify(make_input(10.0, [-0.5, -0.15])).margin_pi2
    assert up_other - base == pytest.approx(8.0 * 0.1, abs=1e-12)
    # slope gamma_n - 2 gamma_n = -gamma_n in the minimal index
    down_min = classify(make_input(10.0, [-0.6, -0.25])).margin_pi2
    assert down_min - base == pytest.approx(-8.0 * (-0.1), abs=1e-12)


def test_two_point_divisors_on_the_sphere():
    grid = [-0.04 * (i + 1) for i in range(20)]
    for b in grid:
        assert classify(make_input(16.0, [b, b])).label == "critical"
    assert classify(make_input(16.0, [-0.3, -0.6])).label == "supercritical"
    assert classify(make_input(16.0, [-0.9, -0.1])).label == "supercritical"


def test_classify_empty_divisor_is_error():
    with pytest.raises(DivisorError):
        classify(ClassificationInput(16.0, ConicDivisor.from_betas([])))


@pytest.mark.parametrize("bad", [0.0, -1.0, 0.2, -1.5])
def test_divisor_rejects_out_of_range_index(bad):
    with pytest.raises(DivisorError):
        ConicDivisor.from_betas([bad])


def test_divisor_sorted_ascending():
    d = ConicDivisor.from_betas([-0.2, -0.8, -0.5])
    assert d.betas == (-0.8, -0.5, -0.2)
    assert d.beta_min == -0.8


def test_cylinder_to_plane_zero_profile():
    ts = [-2.0 + 0.1 * i for i in range(41)]
    rs, us = cylinder_to_plane(ts, [0.0] * len(ts))
    for t, r, u in zip(ts, rs, us):
        assert r == pytest.approx(math.exp(t), rel=1e-15)
        assert u == pytest.approx(-math.log(r), abs=1e-12)


def test_cylinder_to_plane_round_sphere():
    # v(t) = -log cosh t + log(6)/4 maps to u(r) = log(2/(1+r^2)) + log(6)/4
    ts = [-3.0 + 0.05 * i for i in range(121)]
    vs = [-math.log(math.cosh(t)) + 0.25 * math.log(6.0) for t in ts]
    rs, us = cylinder_to_plane(ts, vs)
    for r, u in zip(rs, us):
        expect = math.log(2.0 / (1.0 + r * r)) + 0.25 * math.log(6.0)
        assert u == pytest.approx(expect, abs=1e-12)


def test_cylinder_to_plane_single_sample():
    rs, us = cylinder_to_plane([0.0], [1.7])
    assert rs == [1.0] and us == [1.7]


def test_kelvin_invert_pure_cone():
    beta = -0.4
    rs = [math.exp(0.1 * i) for i in range(1, 60)]
    us = [-(2.0 + beta) * math.log(r) for r in rs]
    ss, ws = kelvin_invert(rs, us, beta)
    assert max(abs(w) for w in ws) < 1e-12


def test_kelvin_invert_constant_shift():
    beta = -0.4
    rs = [math.exp(0.1 * i) for i in range(1, 60)]
    us = [-(2.0 + beta) * math.log(r) + 2.5 for r in rs]
    _, ws = kelvin_invert(rs, us, beta)
    assert all(w == pytest.approx(2.5, abs=1e-12) for w in ws)


def test_kelvin_invert_round_sphere_symmetric():
    rs = [math.exp(0.05 * i) for i in range(1, 100)]
    us = [math.log(2.0 / (1.0 + r * r)) + 0.25 * math.log(6.0) for r in rs]
    ss, ws = kelvin_invert(rs, us, 0.0)
    for s, w in zip(ss, ws):
        expect = math.log(2.0 / (1.0 + s * s)) + 0.25 * math.log(6.0)
        assert w == pytest.approx(expect, abs=1e-12)


def test_kelvin_invert_is_involution():
    beta = -0.3
    rs = [math.exp(0.07 * i) for i in range(1, 80)]
    us = [math.log(2.0 / (1.0 + r * r)) - (2.0 + beta) * math.log(r) for r in rs]
    ss, ws = kelvin_invert(rs, us, beta)
    rs2, us2 = kelvin_invert(ss, ws, beta)
    for (r, u), (r2, u2) in zip(sorted(zip(rs, us)), sorted(zip(rs2, us2))):
        assert r2 == pytest.approx(r, rel=1e-14)
        assert u2 == pytest.approx(u, abs=1e-12)


def test_kelvin_invert_rejects_zero_radius():
    with pytest.raises(ValueError):
        kelvin_invert([0.0, 1.0], [0.0, 0.0], -0.5)
