"""Critical distances beyond which the DP dynamics cannot entangle.

All root finding happens in the reduced variable ``u = d / sigma`` on
dimensionless criticality functions, so results scale exactly with sigma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .entanglement import perturbative_coeffs
from .errors import DomainError, NumericError
from .kernel import SQRT_PI, f_tilde, f_tilde_dd
from .params import DPParams, GEOMETRIES, PhysicalConstants

RESIDUAL_TOL = 1e-12
BRACKET = (1e-3, 10.0)
_XTOL = 1e-15
_RTOL = 1e-13


@dataclass(frozen=True)
class CriticalResult:
    d_c: float
    residual: float
    bracket: tuple[float, float]
    iterations: int
    geometry: str = "horizontal"
    sigma: float = 1.0

    @property
    def d_c_over_sigma(self) -> float:
        return self.d_c / self.sigma


def gamma(d, params: DPParams, consts: PhysicalConstants) -> float:
    """``lim_{L->0} E-/L^2`` as a function of the separation ``d``."""
    if not (math.isfinite(d) and d > 0):
        raise DomainError(f"d must be positive, got {d!r}")
    m = params.mass
    s = params.sigma
    k = consts.G * m * m / (2.0 * consts.hbar)
    return k * (-0.5 * f_tilde_dd(0.0, s) - abs(f_tilde_dd(d, s)) / math.sqrt(2))


def _reduced_gamma(u):
    # gamma * sigma^3 / (G m^2 / 2 hbar) at sigma = 1
    return -0.5 * f_tilde_dd(0.0, 1.0) - abs(f_tilde_dd(u, 1.0)) / math.sqrt(2)


def _reduced_transversal(u):
    # large-L limit of the transversal E-, in units of G m^2 / (2 hbar sigma)
    return 1.0 / SQRT_PI - math.sqrt(2) * f_tilde(u, 1.0)


def _expand_bracket(fn, lo, hi, max_expand=40):
    flo, fhi = fn(lo), fn(hi)
    for _ in range(max_expand):
        if flo < 0 < fhi:
            return lo, hi
        if flo >= 0:
            lo /= 2.0
            flo = fn(lo)
        if fhi <= 0:
            hi *= 2.0
            fhi = fn(hi)
    raise NumericError("no sign change found for the criticality function",
                       lo=lo, hi=hi, f_lo=flo, f_hi=fhi)


def _solve(fn, lo, hi):
    root, info = brentq(fn, lo, hi, xtol=_XTOL, rtol=_RTOL, full_output=True)
    if not info.converged:
        raise NumericError("root finder did not converge", flag=info.flag)
    return root, info.iterations


def critical_distance(geometry, sigma, params=None, consts=None) -> CriticalResult:
    """Largest separation allowing GIE: root of gamma (horizontal) or of the
    large-L transversal rate.

    ``params`` and ``consts`` only set the overall rate scale, which does not
    move the root; they are accepted for interface symmetry.
    """
    if not (math.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    if geometry == "horizontal":
        fn = _reduced_gamma
    elif geometry == "transversal":
        fn = _reduced_transversal
    else:
        raise DomainError(f"unknown geometry {geometry!r}")
    lo, hi = _expand_bracket(fn, *BRACKET)
    u, iterations = _solve(fn, lo, hi)
    residual = fn(u)
    if abs(residual) > RESIDUAL_TOL:
        raise NumericError("root residual above tolerance", residual=residual)
    return CriticalResult(u * sigma, residual, (lo * sigma, hi * sigma), iterations,
                          geometry, sigma)


@dataclass
class ScanReport:
    geometry: str
    sigma: float
    L: np.ndarray
    d_c: np.ndarray  # NaN where no separation allows GIE
    sign_changes: list[int] = field(default_factory=list)

    @property
    def gie_possible(self) -> np.ndarray:
        return np.isfinite(self.d_c)

    def monotonicity(self) -> str:
        """``increasing``, ``decreasing``, ``constant`` or ``non-monotone`` in L.

        L values without any entangling separation count as ``d_c = 0``.
        """
        dc = np.where(np.isfinite(self.d_c), self.d_c, 0.0)
        steps = np.diff(dc[np.argsort(self.L)])
        if np.all(steps == 0):
            return "constant"
        if np.all(steps <= 0):
            return "decreasing"
        if np.all(steps >= 0):
            return "increasing"
        return "non-monotone"


def _reduced_e_minus(geometry, ell):
    unit = DPParams.equal(1.0, 1.0)
    consts = PhysicalConstants.dimensionless()

    def fn(u):
        # rate prefactor is 1/2 in reduced units
        return 2.0 * perturbative_coeffs(ell, u, unit, consts, geometry).e_minus

    return fn


def critical_distance_scan(geometry, L_grid, sigma, params=None, consts=None,
                           n_probe=400) -> ScanReport:
    """For each L, the largest d with E-(d; L) < 0.

    Sign changes are located on a log-spaced probe grid over the reduced
    bracket and refined by Brent's method; the largest negative-to-positive
    crossing is reported. No crossing with E- >= 0 throughout gives NaN.
    """
    if geometry not in GEOMETRIES:
        raise DomainError(f"unknown geometry {geometry!r}")
    if not (math.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    L_grid = np.asarray(L_grid, dtype=float)
    if np.any(~np.isfinite(L_grid)) or np.any(L_grid <= 0):
        raise DomainError("L values must be positive")

    lo, hi = BRACKET
    base = np.geomspace(lo, hi, n_probe)
    out = np.full(len(L_grid), np.nan)
    changes = []
    for i, L in enumerate(L_grid):
        fn = _reduced_e_minus(geometry, L / sigma)
        probe = base
        vals = np.array([fn(u) for u in probe])
        # transversal E- can stay negative well past the default bracket
        while vals[-1] < 0 and probe[-1] < 1e6:
            ext = np.geomspace(probe[-1], 2.0 * probe[-1], 20)[1:]
            probe = np.concatenate([probe, ext])
            vals = np.concatenate([vals, [fn(u) for u in ext]])
        sign = np.sign(vals)
        flips = np.nonzero(sign[:-1] != sign[1:])[0]
        changes.append(len(flips))
        up = [k for k in flips if vals[k] < 0 <= vals[k + 1]]
        if up:
            k = up[-1]
            u, _ = _solve(fn, probe[k], probe[k + 1])
            out[i] = u * sigma
    return ScanReport(geometry, sigma, L_grid, out, changes)


def extrapolated_critical_distance(sigma, L_small=1e-3):
    """Richardson estimate of lim_{L->0} d_c(L) from L and L/2 (horizontal)."""
    rep = critical_distance_scan("horizontal", [L_small * sigma, 0.5 * L_small * sigma], sigma)
    d1, d2 = rep.d_c
    return 2.0 * d2 - d1
