"""The erf-smeared gravitational kernel and the DP decoherence function.

The pair kernel is ``f(z, z') = f_tilde(|z - z'|)`` with

    f_tilde(z) = erf(z / 2 sigma) / z,     f_tilde(0) = 1 / (sigma sqrt(pi)).

Near ``z = 0`` both the kernel and its second derivative are evaluated from
the Taylor series of erf, which avoids the 0/0 cancellation of the direct
expressions.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import erf

from .errors import DomainError
from .params import DPParams

SQRT_PI = math.sqrt(math.pi)

# f_tilde switches to its series below this z / sigma.
SERIES_SWITCH = 1e-4
# f_tilde_dd loses ~log10(sigma/z)^2 digits in the direct form; the series
# converges fast for z < sigma so it is used on that whole range.
SERIES_SWITCH_DD = 1.0
_N_TERMS_DD = 20

# Coefficients of erf(u) / u = (2/sqrt(pi)) * sum_n c_n u^(2n).
_SERIES_C = np.array(
    [(-1) ** n / (math.factorial(n) * (2 * n + 1)) for n in range(_N_TERMS_DD + 1)]
)
# Second-derivative coefficients: d^2/du^2 u^(2n) = 2n(2n-1) u^(2n-2).
_SERIES_DD = np.array(
    [_SERIES_C[n] * 2 * n * (2 * n - 1) for n in range(1, _N_TERMS_DD + 1)]
)


def _check_args(z, sigma):
    if not (math.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma must be finite and positive, got {sigma!r}")
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("kernel argument must be finite")
    if np.any(z < 0):
        raise DomainError("kernel argument must be non-negative")
    return z


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def f_tilde(z, sigma):
    """Return ``erf(z / 2 sigma) / z`` with the continuous value at ``z = 0``.

    Accepts a scalar or an array of distances; the return type follows ``z``.
    """
    zarr = _check_args(z, sigma)
    u = zarr / (2.0 * sigma)
    small = zarr < SERIES_SWITCH * sigma
    out = np.empty_like(u)
    us = u[small]
    out[small] = (1.0 - us * us / 3.0 + us**4 / 10.0) / (sigma * SQRT_PI)
    zl = zarr[~small]
    out[~small] = erf(u[~small]) / zl
    return _scalar_or_array(out, z)


def f_tilde_dd(z, sigma):
    """Second derivative of ``f_tilde`` with respect to ``z``.

    ``f_tilde_dd(0) = -1 / (6 sqrt(pi) sigma^3)``.
    """
    zarr = _check_args(z, sigma)
    u = zarr / (2.0 * sigma)
    small = zarr < SERIES_SWITCH_DD * sigma
    out = np.empty_like(u)

    u2 = u[small] ** 2
    acc = np.zeros_like(u2)
    for c in _SERIES_DD[::-1]:
        acc = acc * u2 + c
    out[small] = acc / (4.0 * sigma**3 * SQRT_PI)

    zl = zarr[~small]
    gauss = np.exp(-u[~small] ** 2) / (sigma * SQRT_PI)
    out[~small] = 2.0 * erf(u[~small]) / zl**3 - gauss * (2.0 / zl**2 + 0.5 / sigma**2)
    return _scalar_or_array(out, z)


def _as_config(x, n):
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != 3:
        raise DomainError(f"configuration must have shape (n, 3), got {x.shape}")
    if x.shape[0] != n:
        raise DomainError(
            f"configuration has {x.shape[0]} particles but {n} masses were given"
        )
    if not np.all(np.isfinite(x)):
        raise DomainError("positions must be finite")
    return x


def _pair_kernel(p, q, sigma):
    dist = np.linalg.norm(p[:, None, :] - q[None, :, :], axis=-1)
    return f_tilde(dist, sigma)


def g_func(x, y, params: DPParams) -> complex:
    """DP decoherence exponent between two n-particle configurations.

    ``<x|A(rho)|y> = g(x, y) <x|rho|y>`` where

        g(x, y) = sum_jk m_j m_k [(i-1) f(x_j,x_k) + (-i-1) f(y_j,y_k)
                                  + 2 f(x_j,y_k)].

    ``x`` and ``y`` are ``(n, 3)`` arrays of particle positions.
    """
    n = len(params.masses)
    x = _as_config(x, n)
    y = _as_config(y, n)
    mm = np.outer(params.masses, params.masses)
    fxx = _pair_kernel(x, x, params.sigma)
    fyy = _pair_kernel(y, y, params.sigma)
    fxy = _pair_kernel(x, y, params.sigma)
    # real and imaginary parts kept apart so that g(x, x) vanishes exactly
    re = np.sum(mm * (2.0 * fxy - (fxx + fyy)))
    im = np.sum(mm * (fxx - fyy))
    return complex(re, im)


def decoherence_matrix(configs, params: DPParams) -> np.ndarray:
    """Matrix of ``g(configs[r], configs[c])`` over a configuration list.

    Only the upper triangle is evaluated; the lower one is its conjugate, so
    the result is exactly Hermitian with an exactly zero diagonal.
    """
    k = len(configs)
    out = np.zeros((k, k), dtype=complex)
    for r in range(k):
        for c in range(r + 1, k):
            out[r, c] = g_func(configs[r], configs[c], params)
            out[c, r] = out[r, c].conjugate()
    return out
