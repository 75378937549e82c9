"""Unitary Newtonian-gravity benchmark with kinetic terms neglected.

Each branch ``|a^j>|b^k>`` picks up the phase ``-G m1 m2 t / (hbar |a^j - b^k|)``.
Positions are exact labels here, so the narrow-wavepacket approximation
introduces no error in this model.
"""
from __future__ import annotations

import math

import numpy as np

from .dynamics import (AmplitudePair, ConfigurationBasis, TimeSeries, build_initial,
                       dp_series, map_chunks, time_grid)
from .entanglement import min_pt_eigenvalues
from .errors import DomainError
from .params import DPParams, PhysicalConstants

INTEGER_BAND = 1e-9


def _masses(masses):
    m1, m2 = masses
    if not (m1 > 0 and m2 > 0):
        raise DomainError("masses must be positive")
    return float(m1), float(m2)


def branch_phase_rates(basis: ConfigurationBasis, masses, consts):
    """Phase per unit time for each branch, in basis order."""
    dist = basis.branch_distances()
    if np.any(dist <= 0):
        raise DomainError("coincident branch positions give a singular potential")
    m1, m2 = _masses(masses)
    return -consts.G * m1 * m2 / (consts.hbar * dist)


def _branch_vectors(times, basis, amplitudes, masses, consts):
    rates = branch_phase_rates(basis, masses, consts)
    # only relative phases matter; referencing branch 0 keeps arguments small
    rel = rates - rates[0]
    psi0 = np.kron(amplitudes.alpha, amplitudes.beta)
    return psi0[None, :] * np.exp(1j * np.outer(times, rel))


def unitary_state(t, basis, amplitudes=None, masses=(1.0, 1.0), consts=None):
    """Pure state ``|psi(t)><psi(t)|`` of the phased branches."""
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"t must be finite and non-negative, got {t!r}")
    amplitudes = amplitudes or AmplitudePair.uniform()
    consts = consts or PhysicalConstants()
    psi = _branch_vectors(np.array([float(t)]), basis, amplitudes, masses, consts)[0]
    return np.outer(psi, psi.conj())


def unitary_states(times, basis, amplitudes, masses, consts):
    psi = _branch_vectors(np.asarray(times, dtype=float), basis, amplitudes, masses, consts)
    return psi[:, :, None] * psi.conj()[:, None, :]


def phase_curvature(L, d):
    """``1/d + 1/(d+2L) - 2/(d+L)`` for the horizontal geometry."""
    if not (L > 0 and d > 0):
        raise DomainError("L and d must be positive")
    return 1.0 / d + 1.0 / (d + 2 * L) - 2.0 / (d + L)


def entangling_phase_cycles(t, L, d, masses, consts) -> float:
    """``(G m1 m2 t / 2 pi hbar) (1/d + 1/(d+2L) - 2/(d+L))``."""
    m1, m2 = _masses(masses)
    return consts.G * m1 * m2 * t / (2 * math.pi * consts.hbar) * phase_curvature(L, d)


def oscillation_period(L, d, masses, consts) -> float:
    """Time for the entangling phase to advance by 2 pi."""
    m1, m2 = _masses(masses)
    return 2 * math.pi * consts.hbar / (consts.G * m1 * m2 * phase_curvature(L, d))


def quantum_entanglement_condition(t, L, d, masses, consts) -> bool:
    """True iff the entangling phase is not a whole number of cycles.

    Values within ``1e-9`` of an integer count as integers.
    """
    if t < 0:
        raise DomainError("t must be non-negative")
    q = entangling_phase_cycles(t, L, d, masses, consts)
    return abs(q - round(q)) > INTEGER_BAND


def unitary_series(t_max, steps, basis, masses, consts, amplitudes=None,
                   spacing="uniform", workers=None):
    times = time_grid(t_max, steps, spacing)
    amplitudes = amplitudes or AmplitudePair.uniform()
    mins = map_chunks(
        lambda ts: min_pt_eigenvalues(unitary_states(ts, basis, amplitudes, masses, consts)),
        times, workers)
    return times, mins


def compare_series(basis, params: DPParams, consts, t_max, steps, amplitudes=None,
                   spacing="uniform", workers=None) -> TimeSeries:
    """DP and unitary minimal PT eigenvalues on a shared time grid."""
    amplitudes = amplitudes or AmplitudePair.uniform()
    rho0 = build_initial(amplitudes, basis)
    dp = dp_series(rho0, t_max, steps, basis, params, consts, spacing, workers)
    _, unitary = unitary_series(t_max, steps, basis, params.masses, consts,
                                amplitudes, spacing, workers)
    return TimeSeries(dp.times, dp.dp_min_eig, unitary, dp.metadata)
