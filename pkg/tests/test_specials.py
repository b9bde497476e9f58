import math

import mpmath as mp
import pytest

from sphere_ramsey import specials
from sphere_ramsey.errors import DomainError

mp.mp.dps = 30


def mp_phi(x: float) -> float:
    """High-precision erf-series oracle for the normal CDF."""
    return float(0.5 * mp.erfc(-mp.mpf(x) / mp.sqrt(2)))


def test_cdf_symmetry_and_center():
    assert specials.normal_cdf(0.0) == 0.5
    for x in (0.3, 1.0, 2.5):
        assert specials.normal_cdf(x) == pytest.approx(1.0 - specials.normal_cdf(-x), abs=1e-15)


def test_cdf_against_series_oracle():
    # 0.975 at the classic two-sided 95% point, plus random-ish spots.
    assert abs(specials.normal_cdf(1.959963985) - 0.975) <= 1e-9
    for x in (-8.0, -3.7, -1.0, -0.1, 0.3, 1.0, 2.5, 5.5, 7.9):
        assert abs(specials.normal_cdf(x) - mp_phi(x)) <= 1e-14


def test_sf_deep_tail():
    # survival function stays accurate where 1 - cdf would cancel
    for x in (10.0, 20.0, 30.0):
        exact = float(0.5 * mp.erfc(mp.mpf(x) / mp.sqrt(2)))
        assert specials.normal_sf(x) == pytest.approx(exact, rel=1e-13)


def test_quantile_roundtrip_grid():
    for i in range(1, 100):
        p = i / 100.0
        x = specials.normal_quantile(p)
        assert abs(specials.normal_cdf(x) - p) <= 1e-12


def test_quantile_inverse_roundtrip():
    for x in (-6.0, -3.0, -1.2, 0.0, 0.7, 2.5, 4.5):
        assert specials.normal_quantile(specials.normal_cdf(x)) == pytest.approx(x, abs=1e-10)


def test_quantile_inverse_roundtrip_upper_tail():
    # Above x ~ 4.75 the rounding of cdf(x) to a double already discards
    # ulp(1)/2 of mass, so the best achievable round-trip error is
    # 5.6e-17/pdf(x); at x = 6 that is ~9e-9.
    for x in (5.0, 6.0):
        err = abs(specials.normal_quantile(specials.normal_cdf(x)) - x)
        assert err <= 1.1 * (2.0 ** -53) / specials.normal_pdf(x)


def test_quantile_specific_value():
    # frozen from a bisection on the erf-series CDF oracle
    x = specials.normal_quantile(0.618034)
    assert x == pytest.approx(0.30032141489065392, abs=1e-12)
    assert specials.normal_quantile(0.5) == 0.0


def test_quantile_domain():
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(DomainError):
            specials.normal_quantile(bad)


def test_hazard_closed_form_at_zero():
    assert specials.hazard_mu(0.0).mu == pytest.approx(math.sqrt(2.0 / math.pi), abs=1e-14)


def test_hazard_bracket_at_three():
    mu = specials.hazard_mu(3.0).mu
    assert 3.0 < mu <= (9.0 + 1.0) / 3.0
    assert mu == pytest.approx(3.2830986549304365, abs=1e-12)


def test_hazard_negative_tail():
    mu = specials.hazard_mu(-10.0).mu
    assert 0.0 < mu <= 1e-20


def test_hazard_mu_exceeds_t():
    for t in (-5.0, -1.0, 0.0, 1.0, 4.0, 8.0, 12.0, 30.0):
        mu = specials.hazard_mu(t).mu
        assert mu > max(t, 0.0)


def test_hazard_branch_continuity():
    # direct ratio below 8 and the continued fraction above agree
    lo = specials.hazard_mu(8.0).mu
    hi = specials.hazard_mu(8.0 + 1e-12).mu
    assert hi == pytest.approx(lo, rel=1e-10)


def test_hazard_derivative_bounded():
    # |mu'(t)| <= 100 over a fine grid, by central differences
    step = 1e-4
    t = -10.0
    while t <= 10.0:
        d = (specials.hazard_mu(t + step).mu - specials.hazard_mu(t - step).mu) / (2 * step)
        assert abs(d) <= 100.0
        t += 0.25


@pytest.mark.parametrize("a,b,x", [
    (0.5, 50.0, 0.01),
    (0.5, 5e3, 1e-4),
    (0.5, 5e5, 1e-6),
    (0.5, 5e9, 9e-12),
    (5.0, 95.5, 0.3),
    (50.0, 50.0, 0.5),
    (0.5, 0.5, 0.3),
])
def test_incomplete_beta_against_mpmath(a, b, x):
    exact = float(mp.betainc(a, b, 0, x, regularized=True))
    assert specials.regularized_incomplete_beta(a, b, x) == pytest.approx(exact, abs=1e-13)
    assert specials.regularized_incomplete_beta_c(a, b, x) == pytest.approx(1.0 - exact, abs=1e-13)


def test_incomplete_beta_edges():
    assert specials.regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert specials.regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
    with pytest.raises(DomainError):
        specials.regularized_incomplete_beta(2.0, 3.0, -0.1)
