"""Diosi-Penrose gravitationally induced entanglement for two-branch particles."""
from .comparator import (compare_series, oscillation_period,
                         quantum_entanglement_condition, unitary_state)
from .criticality import CriticalResult, critical_distance, critical_distance_scan, gamma
from .dynamics import (AmplitudePair, ConfigurationBasis, TimeSeries, build_initial,
                       dp_propagate, dp_series)
from .entanglement import (PerturbativeCoefficients, PTSpectrum,
                           instantaneous_entanglement_verdict, min_pt_eigenvalue,
                           partial_transpose, perturbative_coeffs, pt_spectrum_small_t_fit)
from .errors import DomainError, NumericError
from .kernel import f_tilde, f_tilde_dd, g_func
from .params import DPParams, ExperimentParams, PhysicalConstants

__all__ = [
    "AmplitudePair", "ConfigurationBasis", "CriticalResult", "DPParams", "DomainError",
    "ExperimentParams", "NumericError", "PTSpectrum", "PerturbativeCoefficients",
    "PhysicalConstants", "TimeSeries", "build_initial", "compare_series",
    "critical_distance", "critical_distance_scan", "dp_propagate", "dp_series",
    "f_tilde", "f_tilde_dd", "g_func", "gamma", "instantaneous_entanglement_verdict",
    "min_pt_eigenvalue", "oscillation_period", "partial_transpose", "perturbative_coeffs",
    "pt_spectrum_small_t_fit", "quantum_entanglement_condition", "unitary_state",
]
