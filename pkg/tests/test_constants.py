import math

import pytest

from sphere_ramsey import constants
from sphere_ramsey.errors import DomainError, InfeasibleParametersError

P2 = (3.0 - math.sqrt(5.0)) / 2.0
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def test_p_C_at_one_is_half():
    assert constants.solve_p_C(1.0) == 0.5


def test_p_C_closed_form_at_two():
    # p = (1-p)^2 has the closed-form root (3 - sqrt 5)/2
    assert constants.solve_p_C(2.0) == pytest.approx(P2, abs=1e-12)


def test_growth_base_is_golden_ratio():
    tc = constants.threshold_constants(2.0)
    assert tc.M_C == pytest.approx(GOLDEN, abs=1e-10)
    assert tc.M_C * math.sqrt(tc.p_C) == pytest.approx(1.0, abs=1e-12)


def test_p_C_residual_and_monotonicity():
    prev = 0.6
    for C in (1.1, 1.5, 2.0, 3.0, 5.0, 10.0):
        p = constants.solve_p_C(C)
        assert abs(C * math.log1p(-p) - math.log(p)) <= 1e-13
        assert 0.0 < p < 0.5
        assert p < prev
        prev = p


def test_p_C_domain():
    with pytest.raises(DomainError):
        constants.solve_p_C(0.9)


def test_squared_p_inequality():
    # p_C^2 * C < (1 - p_C)^2 for C > 1
    for C in (1.1, 1.5, 2.0, 3.0, 5.0, 10.0):
        p = constants.solve_p_C(C)
        assert p * p * C < (1.0 - p) ** 2


def test_threshold_constants_fields():
    tc = constants.threshold_constants(2.0)
    assert tc.f_pC == pytest.approx(1.0 / tc.p_C ** 2 - 2.0 / (1.0 - tc.p_C) ** 2, rel=1e-12)
    # for C=2 the gap collapses to (1-2p)/p^2 = golden ratio
    assert tc.f_pC == pytest.approx(1.6180339887498948, abs=1e-10)
    assert tc.alpha_C == max(1000.0, 20.0 * math.sqrt(2.0 * math.log(10.0 / tc.p_C)))
    assert tc.eps0 == pytest.approx(0.004985283860631136, rel=1e-10)
    assert tc.D == pytest.approx(1e5 * tc.alpha_C ** 4 / (tc.p_C ** 3 * tc.f_pC), rel=1e-12)
    assert tc.eps > 0.0
    assert tc.eps / tc.M_C == pytest.approx(tc.eps0 / (6.0 * tc.D), rel=1e-12)


def test_threshold_constants_positive_gap():
    for C in (1.1, 1.5, 2.0, 5.0, 10.0):
        assert constants.threshold_constants(C).f_pC > 0.0


def test_threshold_constants_reject_C_at_one():
    with pytest.raises(DomainError):
        constants.threshold_constants(1.0)


def test_eps_quadratic_trend_near_one():
    # eps scales like (C-1)^2 as C -> 1+: ratio ~ 4 per doubling of C-1
    e1 = constants.threshold_constants(1.01).eps
    e2 = constants.threshold_constants(1.02).eps
    e4 = constants.threshold_constants(1.04).eps
    assert e2 / e1 == pytest.approx(4.0, rel=0.15)
    assert e4 / e2 == pytest.approx(4.0, rel=0.15)


def test_select_p_star_residual():
    C, D, k = 2.0, 1e8, 10 ** 10
    p_c = constants.solve_p_C(C)
    p = constants.select_p_star(C, D, k)
    assert p_c < p < p_c + 1.0 / (p_c * p_c * D)
    from sphere_ramsey.geometry import solve_cap_threshold
    f = constants.gap_function(C, p_c)
    c0 = solve_cap_threshold(k, p_c).c
    g0 = (math.exp(-c0 * c0) / (2.0 * math.pi)) ** 1.5
    target = p_c - g0 * f / (9.0 * D)
    cx = solve_cap_threshold(k, p).c
    F = p - (math.exp(-cx * cx) / (2.0 * math.pi)) ** 1.5 / (3.0 * D * p * p)
    assert abs(F - target) <= 1e-12


def test_select_p_star_balances_both_colors():
    # with the returned p, the red-side equality implies the blue-side inequality
    C, D, k = 2.0, 1e8, 10 ** 10
    from sphere_ramsey.geometry import solve_cap_threshold
    p_c = constants.solve_p_C(C)
    f = constants.gap_function(C, p_c)
    c0 = solve_cap_threshold(k, p_c).c
    g0 = (math.exp(-c0 * c0) / (2.0 * math.pi)) ** 1.5
    p = constants.select_p_star(C, D, k)
    cx = solve_cap_threshold(k, p).c
    gx = (math.exp(-cx * cx) / (2.0 * math.pi)) ** 1.5
    red_lhs = p - gx / (3.0 * D * p * p)
    red_rhs = p_c - g0 * f / (9.0 * D)
    blue_lhs = 1.0 - p + gx * C / (3.0 * D * (1.0 - p) ** 2)
    blue_rhs = 1.0 - p_c - g0 * f / (9.0 * D)
    assert red_lhs <= red_rhs + 1e-12
    assert blue_lhs <= blue_rhs + 1e-12


def test_select_p_star_bracket_shrinks_with_D():
    p_c = constants.solve_p_C(2.0)
    d1 = constants.select_p_star(2.0, 1e8, 10 ** 10) - p_c
    d2 = constants.select_p_star(2.0, 2e8, 10 ** 10) - p_c
    assert d2 / d1 == pytest.approx(0.5, abs=0.1)


def test_select_p_star_rejects_small_D():
    with pytest.raises(InfeasibleParametersError):
        constants.select_p_star(2.0, 1.0, 10 ** 6)


def test_ramsey_config_defaults():
    cfg = constants.RamseyConfig.from_parameters(2.0, 10, D=50.0)
    assert cfg.k == 50 * 50 * 10 * 10
    assert cfg.p == cfg.constants.p_C
    assert cfg.c > 0.0
    assert cfg.a_kp == pytest.approx((math.exp(-cfg.c ** 2) / (2 * math.pi)) ** 1.5, rel=1e-12)
