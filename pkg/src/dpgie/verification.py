"""Independent numerical oracles for the closed-form parts of the library.

* classical RK4 on the H = 0 DP generator, against the exact exponential;
* adaptive quadrature of the radial form of the Gaussian double integral
  behind the smeared kernel, against ``(2 pi sigma^2)^3 f_tilde(r)``;
* five-point finite differences of ``f_tilde`` against ``f_tilde_dd``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dynamics import AmplitudePair, ConfigurationBasis, build_initial, dp_propagate, generator
from .errors import DomainError, NumericError
from .kernel import SQRT_PI, f_tilde, f_tilde_dd
from .params import DPParams, PhysicalConstants

RK4_LOCAL_TOL = 1e-8
# quadrature is cut where the Gaussian envelope has decayed by e^-36
TRUNCATION_SIGMAS = 12.0
FD_STEP = 1e-4


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    reference: float
    oracle: float
    abs_err: float
    rel_err: float
    tolerance: float
    kind: str = "rel"

    @property
    def passed(self) -> bool:
        err = self.rel_err if self.kind == "rel" else self.abs_err
        return bool(err <= self.tolerance)

    @classmethod
    def compare(cls, quantity, reference, oracle, tolerance, kind="rel"):
        abs_err = float(abs(oracle - reference))
        rel_err = abs_err / abs(reference) if reference != 0 else math.inf
        return cls(quantity, float(reference), float(oracle), abs_err, rel_err,
                   float(tolerance), kind)

    def as_row(self) -> str:
        return ",".join([
            self.quantity, f"{self.reference:.17g}", f"{self.oracle:.17g}",
            f"{self.abs_err:.17g}", f"{self.rel_err:.17g}", f"{self.tolerance:.17g}",
            self.kind, "pass" if self.passed else "fail",
        ])


REPORT_HEADER = "quantity,reference,oracle,abs_err,rel_err,tolerance,kind,status"


def _rk4_step(y, rates, dt):
    k1 = rates * y
    k2 = rates * (y + 0.5 * dt * k1)
    k3 = rates * (y + 0.5 * dt * k2)
    k4 = rates * (y + dt * k3)
    return y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_integrate(rho0, t, dt, basis, params, consts):
    """Integrate ``d rho / dt = (G / 2 hbar) A(rho)`` with fixed-step RK4.

    The step is rejected up front if a step-doubling estimate of the local
    error exceeds ``1e-8``. A final partial step reaches ``t`` exactly.
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise DomainError(f"dt must be positive, got {dt!r}")
    if not (t >= dt and math.isfinite(t)):
        raise DomainError(f"t must satisfy t >= dt, got t={t!r}, dt={dt!r}")
    rates = generator(basis, params, consts)
    y = np.asarray(rho0, dtype=complex).copy()

    full = _rk4_step(y, rates, dt)
    half = _rk4_step(_rk4_step(y, rates, dt / 2), rates, dt / 2)
    local = float(np.max(np.abs(full - half))) * 16.0 / 15.0
    if local > RK4_LOCAL_TOL:
        raise NumericError("RK4 step too large", dt=dt, local_error=local)

    n = int(math.floor(t / dt + 1e-9))
    for _ in range(n):
        y = _rk4_step(y, rates, dt)
    rest = t - n * dt
    if rest > 1e-12 * dt:
        y = _rk4_step(y, rates, rest)
    return y


def rk4_vs_exact(rho0, t, dt, basis, params, consts) -> float:
    """Max elementwise deviation between RK4 and the exact propagator."""
    num = rk4_integrate(rho0, t, dt, basis, params, consts)
    exact = dp_propagate(rho0, t, basis, params, consts)
    return float(np.max(np.abs(num - exact)))


def radial_integral(r, sigma):
    """``int_0^inf exp(-l^2/4s^2) sinh(l r/2s^2) dl`` times ``exp(-r^2/4s^2)``.

    The sinh is split into two shifted Gaussians so the integrand stays O(1);
    the domain ends ``12 sigma`` past the peak at ``l = r``.
    """
    w = 4.0 * sigma * sigma

    def integrand(lam):
        return 0.5 * (math.exp(-(lam - r) ** 2 / w) - math.exp(-(lam + r) ** 2 / w))

    upper = r + TRUNCATION_SIGMAS * sigma
    val, err, info = quad(integrand, 0.0, upper, epsabs=0.0, epsrel=1e-13,
                          limit=200, points=[r], full_output=True)[:3]
    if err > 1e-10 * abs(val):
        raise NumericError("radial quadrature did not converge", r=r, error=err)
    return val


def kernel_quadrature_check(r, sigma, tolerance=1e-6) -> OracleReport:
    """Rebuild the double integral I(r) from J1 and the quadrature of J2.

    With ``y = 0`` and ``x`` at distance ``r``:
    ``I = exp(-r^2/2s^2) / 8 * J1 * J2``,
    ``J1 = (4 pi s^2)^(3/2) exp(r^2/4s^2)``,
    ``J2 = (8 pi s^2 / r) int exp(-l^2/4s^2) sinh(l r/2s^2) dl``.
    The exponentials are combined analytically before multiplying.
    """
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"r must be positive, got {r!r}")
    if not (sigma > 0 and math.isfinite(sigma)):
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    j1_scaled = (4.0 * math.pi * sigma**2) ** 1.5
    j2_scaled = 8.0 * math.pi * sigma**2 / r * radial_integral(r, sigma)
    oracle = j1_scaled * j2_scaled / 8.0
    reference = (2.0 * math.pi * sigma**2) ** 3 * f_tilde(r, sigma)
    return OracleReport.compare(f"I(r={r / sigma:g}sigma)", reference, oracle, tolerance)


def _fd5(fn, z, h):
    return (-fn(z + 2 * h) + 16 * fn(z + h) - 30 * fn(z) + 16 * fn(z - h) - fn(z - 2 * h)) / (12 * h * h)


def derivative_check(fn="f_tilde_dd", z_grid=(1.0, 0.85), sigma=1.0) -> list[OracleReport]:
    """Five-point second differences of ``f_tilde`` against ``f_tilde_dd``.

    Grid points too close to 0 for the stencil (``z < 2h``) are instead
    compared with the limit ``f_tilde_dd(0) = -1/(6 sqrt(pi) sigma^3)``.
    """
    if fn != "f_tilde_dd":
        raise DomainError(f"no finite-difference check for {fn!r}")
    h = FD_STEP * sigma
    out = []
    for z in z_grid:
        if not z > 0:
            raise DomainError("grid points must be positive")
        if z < 2 * h:
            limit = -1.0 / (6.0 * SQRT_PI * sigma**3)
            out.append(OracleReport.compare(f"f_tilde_dd(z={z / sigma:g}sigma)~limit",
                                            limit, f_tilde_dd(z, sigma), 1e-8))
        else:
            fd = _fd5(lambda x: f_tilde(x, sigma), z, h)
            out.append(OracleReport.compare(f"f_tilde_dd(z={z / sigma:g}sigma)",
                                            f_tilde_dd(z, sigma), fd, 1e-6))
    return out


def rk4_convergence_ratio(dt, t, basis, params, consts) -> float:
    """Error at ``dt`` over error at ``dt / 2``; about 16 for a 4th-order method."""
    rho0 = build_initial(AmplitudePair.uniform(), basis)
    return rk4_vs_exact(rho0, t, dt, basis, params, consts) / rk4_vs_exact(
        rho0, t, dt / 2, basis, params, consts)


def reference_setup(sigma=50e-6, L=23e-6, d=24e-6, mass=1e-15):
    basis = ConfigurationBasis.build("horizontal", L, d)
    return basis, DPParams.equal(sigma, mass), PhysicalConstants()


def run_all() -> list[OracleReport]:
    """The full oracle battery behind the ``verify`` subcommand."""
    reports = []

    basis, params, consts = reference_setup()
    rho0 = build_initial(AmplitudePair.uniform(), basis)
    err = rk4_vs_exact(rho0, 1e4, 1.0, basis, params, consts)
    reports.append(OracleReport("rk4_vs_exact(t=1e4s,dt=1s)", 0.0, err, err, math.inf,
                                1e-10, "abs"))

    coincident = ConfigurationBasis.from_branches(np.zeros((2, 3)), np.zeros((2, 3)))
    y = rk4_integrate(rho0, 10.0, 1.0, coincident, params, consts)
    dev = float(np.max(np.abs(y - rho0)))
    reports.append(OracleReport("rk4_zero_generator", 0.0, dev, dev, math.inf, 0.0, "abs"))

    unit = DPParams.equal(1.0, 1.0)
    dimless = PhysicalConstants.dimensionless()
    b = ConfigurationBasis.build("horizontal", 0.5, 0.5)
    scale = float(np.max(np.abs(generator(b, unit, dimless))))
    dt = 0.04 / scale
    ratio = rk4_convergence_ratio(dt, 50 * dt, b, unit, dimless)
    reports.append(OracleReport.compare("rk4_order_ratio", 16.0, ratio, 0.1))

    for r in (0.1, 0.5, 1.0, 2.0, 4.0, 8.0):
        reports.append(kernel_quadrature_check(r, 1.0))

    reports.extend(derivative_check("f_tilde_dd", (1.0, 0.85, 1e-5), 1.0))
    return reports
