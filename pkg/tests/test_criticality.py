import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpgie import (DPParams, DomainError, PhysicalConstants, critical_distance,
                   critical_distance_scan, gamma, perturbative_coeffs)
from dpgie.criticality import extrapolated_critical_distance

UNIT = DPParams.equal(1.0, 1.0)
DIMLESS = PhysicalConstants.dimensionless()


def test_horizontal_root():
    res = critical_distance("horizontal", 1.0)
    assert res.d_c_over_sigma == pytest.approx(0.850872, abs=1e-4)
    assert abs(res.residual) <= 1e-12
    assert abs(gamma(res.d_c, UNIT, DIMLESS)) <= 1e-12
    lo, hi = res.bracket
    assert lo < res.d_c < hi


def test_transversal_root():
    res = critical_distance("transversal", 1.0)
    assert res.d_c_over_sigma == pytest.approx(2.21093, abs=1e-3)
    assert abs(res.residual) <= 1e-12


def test_gamma_sign_either_side():
    d_c = critical_distance("horizontal", 1.0).d_c
    assert gamma(0.9 * d_c, UNIT, DIMLESS) < 0 < gamma(1.1 * d_c, UNIT, DIMLESS)
    for d in np.linspace(0.05, d_c * 0.999, 30):
        assert gamma(d, UNIT, DIMLESS) < 0
    for d in np.linspace(d_c * 1.001, 10, 30):
        assert gamma(d, UNIT, DIMLESS) > 0


@given(sigma=st.floats(1e-7, 1e3))
@settings(max_examples=60, deadline=None)
def test_critical_distance_scales_with_sigma(sigma):
    for geometry in ("horizontal", "transversal"):
        base = critical_distance(geometry, 1.0).d_c
        assert critical_distance(geometry, sigma).d_c == pytest.approx(base * sigma, rel=1e-12)


def test_physical_units_do_not_move_root():
    r = critical_distance("horizontal", 50e-6, DPParams.equal(50e-6, 1e-15), PhysicalConstants())
    assert r.d_c / 50e-6 == pytest.approx(critical_distance("horizontal", 1.0).d_c, rel=1e-12)


def test_invalid():
    with pytest.raises(DomainError):
        critical_distance("diagonal", 1.0)
    with pytest.raises(DomainError):
        critical_distance("horizontal", -1.0)
    with pytest.raises(DomainError):
        gamma(0.0, UNIT, DIMLESS)
    with pytest.raises(DomainError):
        critical_distance_scan("horizontal", [0.0, 1.0], 1.0)


def test_horizontal_scan_approaches_limit_from_below():
    rep = critical_distance_scan("horizontal", [1e-3, 0.01, 0.05, 0.1], 1.0)
    d_c = critical_distance("horizontal", 1.0).d_c
    assert np.all(rep.d_c < d_c)
    assert rep.monotonicity() == "decreasing"
    # d_c(L) ~ d_c - L to leading order
    assert rep.d_c[0] == pytest.approx(d_c - 1e-3, abs=2e-5)


def test_richardson_limit():
    est = extrapolated_critical_distance(1.0)
    assert est == pytest.approx(critical_distance("horizontal", 1.0).d_c, abs=1e-5)


def test_horizontal_no_gie_at_large_L():
    rep = critical_distance_scan("horizontal", [1.0, 2.0], 1.0)
    assert not rep.gie_possible.any()
    for d in np.geomspace(1e-3, 10, 50):
        assert perturbative_coeffs(1.0, d, UNIT, DIMLESS).e_minus > 0


def test_transversal_scan_tends_to_large_L_limit():
    rep = critical_distance_scan("transversal", [1.0, 10.0, 1e4], 1.0)
    assert rep.gie_possible.all()
    assert rep.d_c[-1] == pytest.approx(critical_distance("transversal", 1.0).d_c, abs=1e-3)
    assert rep.monotonicity() == "increasing"


def test_scan_root_is_sign_change():
    rep = critical_distance_scan("horizontal", [0.05], 1.0)
    u = rep.d_c[0]
    assert perturbative_coeffs(0.05, u * (1 - 1e-6), UNIT, DIMLESS).e_minus < 0
    assert perturbative_coeffs(0.05, u * (1 + 1e-6), UNIT, DIMLESS).e_minus > 0
    assert rep.sign_changes == [1]


def test_scan_covariant_in_sigma():
    a = critical_distance_scan("horizontal", [0.02, 0.1], 1.0)
    b = critical_distance_scan("horizontal", [0.02 * 3e-5, 0.1 * 3e-5], 3e-5)
    assert np.allclose(b.d_c / 3e-5, a.d_c, rtol=1e-10)
