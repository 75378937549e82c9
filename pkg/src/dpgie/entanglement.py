"""Partial transposition, PT spectra and the perturbative PT eigenvalues.

For the uniform product state the spectrum of ``rho(t)^T1`` behaves as
``{1 + O(t), E+ t + O(t^2), E- t + O(t^2), nu t^2 + O(t^3)}``; the state
becomes entangled at small times iff ``E- < 0``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ConfigurationBasis, build_initial, AmplitudePair, generator
from .errors import DomainError, NumericError
from .kernel import f_tilde
from .linalg import eigh, eigvalsh
from .params import DPParams, GEOMETRIES, PhysicalConstants

ENTANGLEMENT_TOL = 1e-12
LINEAR_REGIME = 1e-3

_PLUS = np.array([1.0, 1.0]) / math.sqrt(2)
_MINUS = np.array([1.0, -1.0]) / math.sqrt(2)
PLUS_PLUS = np.kron(_PLUS, _PLUS)
MINUS_MINUS = np.kron(_MINUS, _MINUS)


def partial_transpose(rho):
    """Transpose the first qubit's indices; works on ``(..., 4, 4)`` stacks."""
    rho = np.asarray(rho)
    if rho.shape[-2:] != (4, 4):
        raise DomainError(f"expected 4x4 matrices, got shape {rho.shape}")
    lead = rho.shape[:-2]
    r = rho.reshape(lead + (2, 2, 2, 2))
    n = len(lead)
    axes = tuple(range(n)) + (n + 2, n + 1, n, n + 3)
    return r.transpose(axes).reshape(lead + (4, 4))


@dataclass(frozen=True)
class PTSpectrum:
    eigenvalues: np.ndarray
    min_eig: float
    entangled: bool


def min_pt_eigenvalue(rho, tol=ENTANGLEMENT_TOL) -> PTSpectrum:
    """Sorted PT spectrum and the Peres-Horodecki verdict for a two-qubit state.

    Values of ``min_eig`` in ``[-tol, 0]`` count as separable.
    """
    w = eigvalsh(partial_transpose(rho))
    return PTSpectrum(w, float(w[0]), bool(w[0] < -tol))


def min_pt_eigenvalues(rhos):
    """Minimal PT eigenvalue for each state of a ``(n, 4, 4)`` stack."""
    return eigvalsh(partial_transpose(rhos))[..., 0]


@dataclass(frozen=True)
class PerturbativeCoefficients:
    e_plus: float
    e_minus: float
    nu: float
    geometry: str


def perturbative_coeffs(L, d, params: DPParams, consts: PhysicalConstants,
                        geometry="horizontal") -> PerturbativeCoefficients:
    """Closed-form first-order rates E+- and the quadratic coefficient nu."""
    if not (L > 0 and d > 0 and math.isfinite(L) and math.isfinite(d)):
        raise DomainError(f"L and d must be positive, got L={L!r}, d={d!r}")
    if geometry not in GEOMETRIES:
        raise DomainError(f"unknown geometry {geometry!r}")
    m = params.mass
    s = params.sigma
    k = consts.G * m * m / (2.0 * consts.hbar)
    local = f_tilde(0.0, s) - f_tilde(L, s)
    if geometry == "horizontal":
        cross = f_tilde(d + 2 * L, s) + f_tilde(d, s) - 2.0 * f_tilde(L + d, s)
        split = abs(cross) / math.sqrt(2)
        nu = k * k / 2.0 * (2.0 * local**2 + cross**2)
    else:
        cross = f_tilde(d, s) - f_tilde(math.hypot(L, d), s)
        split = math.sqrt(2) * cross
        nu = k * k * (local**2 + 2.0 * cross**2)
    return PerturbativeCoefficients(k * (local + split), k * (local - split), nu, geometry)


def instantaneous_entanglement_verdict(L, d, params, consts, geometry="horizontal") -> bool:
    """True iff the DP dynamics entangles the configuration (E- < 0)."""
    return perturbative_coeffs(L, d, params, consts, geometry).e_minus < 0.0


@dataclass(frozen=True)
class SmallTimeFit:
    e_plus: float
    e_minus: float
    nu: float
    lambda0_intercept: float
    minus_minus_overlap: float
    times: np.ndarray
    branches: np.ndarray


def _track_branches(states):
    """Eigen-decompose each PT matrix and order branches by vector continuity."""
    vals0, vecs0 = eigh(states[0])
    values = [vals0]
    vectors = [vecs0]
    for h in states[1:]:
        vals, vecs = eigh(h)
        overlap = np.abs(vectors[-1].conj().T @ vecs) ** 2
        best, best_score, second = None, -1.0, -1.0
        for perm in itertools.permutations(range(4)):
            score = sum(overlap[i, perm[i]] for i in range(4))
            if score > best_score:
                best, best_score, second = perm, score, best_score
            elif score > second:
                second = score
        perm = list(best)
        matched = overlap[np.arange(4), perm]
        if matched.min() < 0.9 or best_score - second < 0.5:
            raise NumericError("ambiguous eigenvalue branch crossing",
                               min_overlap=float(matched.min()),
                               score_gap=float(best_score - second))
        values.append(vals[perm])
        vectors.append(vecs[:, perm])
    return np.array(values), vectors


def pt_spectrum_small_t_fit(basis: ConfigurationBasis, params: DPParams,
                            consts: PhysicalConstants, t_grid=None) -> SmallTimeFit:
    """Fit the small-t PT spectrum of the DP-evolved uniform state.

    Each branch is fitted by least squares to a short polynomial in ``t``:
    the unit branch with a free intercept, the two linear branches and the
    quadratic branch with vanishing intercept (and vanishing slope for the
    quadratic one). The default grid keeps ``max|rate| * t <= 1e-3``.
    """
    rates = generator(basis, params, consts)
    scale = float(np.max(np.abs(rates)))
    if scale == 0.0:
        raise DomainError("the generator vanishes; nothing to fit")
    if t_grid is None:
        t_hi = LINEAR_REGIME / scale
        t_grid = np.linspace(t_hi / 40, t_hi, 40)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 6 or np.any(t_grid <= 0):
        raise DomainError("t_grid needs at least 6 positive times")
    t_hi = float(t_grid.max())
    if t_hi * scale > LINEAR_REGIME * (1 + 1e-9):
        raise DomainError("t_grid leaves the linear-response regime")
    tau = t_grid / t_hi

    rho0 = build_initial(AmplitudePair.uniform(), basis)
    states = partial_transpose(rho0[None] * np.exp(rates[None] * t_grid[:, None, None]))
    branches, vectors = _track_branches(states)

    def fit(y, powers):
        design = np.stack([tau**p for p in powers], axis=1)
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        return dict(zip(powers, coef))

    top = int(np.argmax(branches[0]))
    unit = fit(branches[:, top], (0, 1, 2, 3))
    rest = [i for i in range(4) if i != top]
    slopes = {i: fit(branches[:, i], (1, 2, 3, 4))[1] / t_hi for i in rest}
    quad_idx = min(rest, key=lambda i: abs(slopes[i]))
    lin = sorted((slopes[i] for i in rest if i != quad_idx), reverse=True)
    nu = fit(branches[:, quad_idx], (2, 3, 4))[2] / t_hi**2

    overlap = float(abs(np.vdot(MINUS_MINUS, vectors[0][:, quad_idx])) ** 2)
    return SmallTimeFit(lin[0], lin[1], nu, float(unit[0]), overlap, t_grid, branches)
