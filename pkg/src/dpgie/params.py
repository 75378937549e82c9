"""Physical constants and model parameters.

Everything is SI internally. ``PhysicalConstants.dimensionless()`` together
with ``sigma = mass = 1`` gives the reduced unit system in which rates are
measured in units of G m^2 / (2 hbar sigma).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

GEOMETRIES = ("horizontal", "transversal")


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class PhysicalConstants:
    G: float = 6.67430e-11
    hbar: float = 1.054571817e-34

    def __post_init__(self):
        object.__setattr__(self, "G", _positive("G", self.G))
        object.__setattr__(self, "hbar", _positive("hbar", self.hbar))

    @classmethod
    def dimensionless(cls) -> PhysicalConstants:
        return cls(G=1.0, hbar=1.0)


@dataclass(frozen=True)
class DPParams:
    """Smearing length and per-particle masses of the DP model."""

    sigma: float
    masses: tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))
        masses = tuple(_positive("mass", m) for m in self.masses)
        if not masses:
            raise DomainError("at least one mass is required")
        object.__setattr__(self, "masses", masses)

    @classmethod
    def equal(cls, sigma: float, mass: float, n: int = 2) -> DPParams:
        return cls(sigma=sigma, masses=(mass,) * n)

    @property
    def mass(self) -> float:
        """The common mass; only defined when all masses agree."""
        first = self.masses[0]
        if any(m != first for m in self.masses):
            raise DomainError("this operation assumes equal masses, got "
                              f"{self.masses!r}")
        return first


@dataclass(frozen=True)
class ExperimentParams:
    """One complete experimental point: model, geometry and constants."""

    sigma: float = 50e-6
    mass: float = 1e-15
    L: float = 23e-6
    d: float = 24e-6
    geometry: str = "horizontal"
    consts: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        for name in ("sigma", "mass", "L", "d"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        if self.geometry not in GEOMETRIES:
            raise DomainError(f"unknown geometry {self.geometry!r}")

    @property
    def dp_params(self) -> DPParams:
        return DPParams.equal(self.sigma, self.mass)

    @property
    def rate_unit(self) -> float:
        """G m^2 / (2 hbar sigma), the natural unit of the first-order rates."""
        return self.consts.G * self.mass**2 / (2 * self.consts.hbar * self.sigma)

    def basis(self):
        from .dynamics import ConfigurationBasis

        return ConfigurationBasis.build(self.geometry, self.L, self.d)
