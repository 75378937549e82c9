"""Initial states and exact H = 0 DP evolution on a four-configuration basis.

With ``H = 0`` the DP master equation acts elementwise in the position
basis, so

    <x|rho(t)|y> = exp((G / 2 hbar) g(x, y) t) <x|rho(0)|y>

and the two-particle state stays inside the span of its initial support.
Basis index ``2 j + k`` labels the branch pair ``|a^j>|b^k>``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .kernel import decoherence_matrix
from .params import GEOMETRIES, DPParams, PhysicalConstants

HERMITIAN_TOL = 1e-13
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12


@dataclass(frozen=True)
class ConfigurationBasis:
    """The four two-particle configurations spanning the two-qubit space.

    ``configs[2 j + k]`` is the ``(2, 3)`` array ``(a^j, b^k)``.
    """

    geometry: str
    L: float
    d: float
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, geometry: str, L: float, d: float) -> ConfigurationBasis:
        if not (L > 0 and d > 0 and np.isfinite(L) and np.isfinite(d)):
            raise DomainError(f"L and d must be positive, got L={L!r}, d={d!r}")
        if geometry == "horizontal":
            a = [(0.0, 0.0, 0.0), (L, 0.0, 0.0)]
            b = [(d + L, 0.0, 0.0), (d + 2 * L, 0.0, 0.0)]
        elif geometry == "transversal":
            a = [(0.0, 0.0, 0.0), (0.0, L, 0.0)]
            b = [(d, 0.0, 0.0), (d, L, 0.0)]
        else:
            raise DomainError(f"geometry must be one of {GEOMETRIES}, got {geometry!r}")
        return cls(geometry, float(L), float(d), np.array(a), np.array(b))

    @classmethod
    def from_branches(cls, a, b) -> ConfigurationBasis:
        """Arbitrary branch positions, two per particle (geometry ``custom``)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape != (2, 3) or b.shape != (2, 3):
            raise DomainError("each particle needs exactly two 3-vectors")
        return cls("custom", float("nan"), float("nan"), a, b)

    @property
    def configs(self) -> list[np.ndarray]:
        return [np.array([self.a[j], self.b[k]]) for j in range(2) for k in range(2)]

    def branch_distances(self) -> np.ndarray:
        """``|a^j - b^k|`` in basis order."""
        return np.array([np.linalg.norm(self.a[j] - self.b[k])
                         for j in range(2) for k in range(2)])


@dataclass(frozen=True)
class AmplitudePair:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if v.shape != (2,):
                raise DomainError(f"{name} must have two components")
            if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
                raise DomainError(f"{name} is not normalized: |{name}| = "
                                  f"{np.linalg.norm(v)!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def uniform(cls) -> AmplitudePair:
        h = np.full(2, 1 / np.sqrt(2))
        return cls(h, h)


@dataclass
class TimeSeries:
    times: np.ndarray
    dp_min_eig: np.ndarray
    unitary_min_eig: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.dp_min_eig = np.asarray(self.dp_min_eig, dtype=float)
        if self.unitary_min_eig is not None:
            self.unitary_min_eig = np.asarray(self.unitary_min_eig, dtype=float)
            if len(self.unitary_min_eig) != len(self.times):
                raise DomainError("series lengths differ")
        if len(self.dp_min_eig) != len(self.times):
            raise DomainError("series lengths differ")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("times must be strictly increasing")


def check_state(rho, hermitian_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
    """Validate a 4x4 density matrix; returns it as a complex array."""
    from .linalg import eigvalsh

    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"density matrix must be 4x4, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > hermitian_tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise DomainError(f"density matrix trace is {np.trace(rho)!r}")
    if eigvalsh(rho)[0] < -psd_tol:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def build_initial(amplitudes: AmplitudePair, basis: ConfigurationBasis | None = None):
    """Product state ``|psi_1><psi_1| (x) |psi_2><psi_2|`` in basis order.

    ``basis`` only fixes the meaning of the indices and is not otherwise used.
    """
    psi = np.kron(amplitudes.alpha, amplitudes.beta)
    return np.outer(psi, psi.conj())


def _check_pipeline(basis, params):
    if len(params.masses) != 2:
        raise DomainError("the four-configuration basis describes two particles")


def generator(basis: ConfigurationBasis, params: DPParams, consts: PhysicalConstants):
    """Elementwise rates ``(G / 2 hbar) g(x_r, x_c)`` of the H = 0 dynamics."""
    _check_pipeline(basis, params)
    return consts.G / (2.0 * consts.hbar) * decoherence_matrix(basis.configs, params)


def dp_propagate(rho0, t, basis, params, consts):
    if not (np.isfinite(t) and t >= 0):
        raise DomainError(f"t must be finite and non-negative, got {t!r}")
    rho0 = np.asarray(rho0, dtype=complex)
    return rho0 * np.exp(generator(basis, params, consts) * t)


def propagate_many(rho0, times, rates):
    """Stack of evolved states for a vector of times, given precomputed rates."""
    times = np.asarray(times, dtype=float)
    return np.asarray(rho0, dtype=complex)[None] * np.exp(rates[None] * times[:, None, None])


def time_grid(t_max, steps, spacing="uniform"):
    if not (np.isfinite(t_max) and t_max > 0):
        raise DomainError(f"t_max must be positive, got {t_max!r}")
    if int(steps) != steps or steps < 2:
        raise DomainError(f"steps must be an integer >= 2, got {steps!r}")
    steps = int(steps)
    if spacing == "uniform":
        return np.linspace(0.0, t_max, steps)
    if spacing == "log":
        # t = 0 followed by six decades up to t_max
        return np.concatenate([[0.0], np.logspace(np.log10(t_max) - 6, np.log10(t_max), steps - 1)])
    raise DomainError(f"unknown grid spacing {spacing!r}")


def worker_count() -> int:
    raw = os.environ.get("DP_GIE_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    default = min(8, os.cpu_count() or 1)
    return max(1, min(cap, default) if cap > 0 else default)


def map_chunks(fn, items, workers=None):
    """Apply ``fn`` to contiguous chunks of ``items``; ordered concatenation."""
    items = np.asarray(items)
    workers = workers or worker_count()
    if workers == 1 or len(items) < 64:
        return fn(items)
    chunks = np.array_split(items, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)


def dp_series(rho0, t_max, steps, basis, params, consts, spacing="uniform", workers=None):
    """Minimal partial-transpose eigenvalue of the DP-evolved state over time."""
    from .entanglement import min_pt_eigenvalues

    times = time_grid(t_max, steps, spacing)
    rates = generator(basis, params, consts)
    rho0 = np.asarray(rho0, dtype=complex)
    mins = map_chunks(lambda ts: min_pt_eigenvalues(propagate_many(rho0, ts, rates)),
                      times, workers)
    return TimeSeries(times, mins, metadata={
        "geometry": basis.geometry, "L": basis.L, "d": basis.d,
        "sigma": params.sigma, "masses": list(params.masses),
        "G": consts.G, "hbar": consts.hbar, "spacing": spacing,
    })
