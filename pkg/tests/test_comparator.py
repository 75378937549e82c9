import math
from fractions import Fraction

import numpy as np
import pytest

from dpgie import (AmplitudePair, ConfigurationBasis, DomainError, PhysicalConstants,
                   oscillation_period, quantum_entanglement_condition, unitary_state)
from dpgie.comparator import compare_series, entangling_phase_cycles, phase_curvature
from dpgie.entanglement import min_pt_eigenvalue
from dpgie.params import DPParams

L, D, M = 23e-6, 24e-6, 1e-15
CONSTS = PhysicalConstants()


def test_phase_curvature_exact():
    exact = Fraction(1, 24) + Fraction(1, 70) - Fraction(2, 47)
    assert phase_curvature(L, D) == pytest.approx(float(exact) * 1e6, rel=1e-13)
    assert phase_curvature(L, D) == pytest.approx(13399.19, rel=1e-6)


def test_period_value():
    p = oscillation_period(L, D, (M, M), CONSTS)
    assert p == pytest.approx(740.92, rel=1e-4)
    assert entangling_phase_cycles(p, L, D, (M, M), CONSTS) == pytest.approx(1.0, rel=1e-13)


def test_initial_state_is_uniform():
    basis = ConfigurationBasis.build("horizontal", L, D)
    rho = unitary_state(0.0, basis, masses=(M, M), consts=CONSTS)
    assert np.allclose(rho, 0.25, atol=1e-16)


def test_half_period_reaches_bell_like_minimum():
    basis = ConfigurationBasis.build("horizontal", L, D)
    p = oscillation_period(L, D, (M, M), CONSTS)
    rho = unitary_state(p / 2, basis, masses=(M, M), consts=CONSTS)
    assert min_pt_eigenvalue(rho).min_eig == pytest.approx(-0.5, abs=1e-9)


def test_closed_form_negativity(rng):
    basis = ConfigurationBasis.build("horizontal", L, D)
    p = oscillation_period(L, D, (M, M), CONSTS)
    for t in rng.uniform(0, 5 * p, 40):
        theta = 2 * math.pi * t / p
        rho = unitary_state(t, basis, masses=(M, M), consts=CONSTS)
        assert min_pt_eigenvalue(rho).min_eig == pytest.approx(-abs(math.sin(theta / 2)) / 2,
                                                               abs=1e-9)


def test_purity(rng):
    basis = ConfigurationBasis.build("transversal", L, D)
    for t in rng.uniform(0, 1e4, 20):
        rho = unitary_state(t, basis, masses=(M, M), consts=CONSTS)
        assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-13)


def test_periodicity():
    basis = ConfigurationBasis.build("horizontal", L, D)
    p = oscillation_period(L, D, (M, M), CONSTS)
    for t in (10.0, 123.4, 600.0):
        first = min_pt_eigenvalue(unitary_state(t, basis, masses=(M, M), consts=CONSTS))
        later = min_pt_eigenvalue(unitary_state(t + 7 * p, basis, masses=(M, M), consts=CONSTS))
        assert abs(first.min_eig - later.min_eig) <= 1e-9


def test_condition_examples():
    p = oscillation_period(L, D, (M, M), CONSTS)
    assert not quantum_entanglement_condition(0.0, L, D, (M, M), CONSTS)
    assert not quantum_entanglement_condition(3 * p, L, D, (M, M), CONSTS)
    assert quantum_entanglement_condition(0.5 * p, L, D, (M, M), CONSTS)
    with pytest.raises(DomainError):
        quantum_entanglement_condition(-1.0, L, D, (M, M), CONSTS)


def test_condition_agrees_with_spectrum():
    basis = ConfigurationBasis.build("horizontal", L, D)
    p = oscillation_period(L, D, (M, M), CONSTS)
    for t in np.linspace(0.013 * p, 4 * p, 301):
        rho = unitary_state(t, basis, masses=(M, M), consts=CONSTS)
        q = entangling_phase_cycles(t, L, D, (M, M), CONSTS)
        if abs(q - round(q)) < 1e-6:
            continue
        assert min_pt_eigenvalue(rho).entangled == quantum_entanglement_condition(
            t, L, D, (M, M), CONSTS)


def test_coincident_branches_rejected():
    basis = ConfigurationBasis.from_branches(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(DomainError):
        unitary_state(1.0, basis)


def test_compare_series_shapes():
    basis = ConfigurationBasis.build("horizontal", L, D)
    s = compare_series(basis, DPParams.equal(100e-6, M), CONSTS, 2000.0, 101)
    assert s.unitary_min_eig.shape == s.dp_min_eig.shape == (101,)
    assert s.unitary_min_eig.min() < -0.49
    assert s.dp_min_eig.min() > -0.1
