"""Pointwise thermodynamics for the potential-temperature gas.

The pressure law is p = a*(rho*theta)**gamma.  Rewriting the pressure in
terms of density and total physical entropy

    S(rho, theta) = rho/(gamma-1) * log(a*theta**gamma)

gives p(rho, S) = rho**gamma * exp((gamma-1)*S/rho), whose potential
P = p/(gamma-1) is convex in (rho, S).  Everything downstream (relative
energy, coercivity certificates) is built on these closed forms.

All operations accept floats or NumPy arrays and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FluidParams",
    "ThermoPoint",
    "pressure_of_rhotheta",
    "pressure_potential_of_rhotheta",
    "entropy",
    "theta_of_entropy",
    "pressure_rho_s",
    "pressure_potential_rho_s",
    "dP_drho",
    "dP_dS",
    "absolute_temperature",
    "sound_speed",
]


@dataclass(frozen=True)
class FluidParams:
    """Physical constants of the model.

    gamma   adiabatic index, > 1 (physically relevant range (1, 5/3])
    a       pressure constant, > 0
    mu      shear viscosity, > 0
    lam     bulk-viscosity parameter, >= -(2/d)*mu
    c_star  uniform lower bound for the potential temperature, > 0
    d       spatial dimension (the solver only supports 2)
    """

    gamma: float = 1.4
    a: float = 1.0
    mu: float = 1e-2
    lam: float = 0.0
    c_star: float = 0.5
    d: int = 2

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.a > 0.0:
            raise ValueError(f"pressure constant a must be positive, got {self.a}")
        if not self.mu > 0.0:
            raise ValueError(f"shear viscosity mu must be positive, got {self.mu}")
        if self.lam < -2.0 * self.mu / self.d:
            raise ValueError(
                f"lam must be >= -2*mu/d = {-2.0 * self.mu / self.d}, got {self.lam}"
            )
        if not self.c_star > 0.0:
            raise ValueError(f"c_star must be positive, got {self.c_star}")
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")


def _require_nonnegative(x, name):
    if np.any(np.asarray(x) < 0):
        raise ValueError(f"{name} must be nonnegative")


def pressure_of_rhotheta(w, params: FluidParams):
    """Pressure a*w**gamma from the total potential temperature w = rho*theta."""
    _require_nonnegative(w, "rho*theta")
    return params.a * np.asarray(w, dtype=float) ** params.gamma


def pressure_potential_of_rhotheta(w, params: FluidParams):
    """Pressure potential a/(gamma-1)*w**gamma, the internal-energy density."""
    _require_nonnegative(w, "rho*theta")
    return params.a / (params.gamma - 1.0) * np.asarray(w, dtype=float) ** params.gamma


def entropy(rho, theta, params: FluidParams):
    """Total physical entropy S = rho/(gamma-1)*log(a*theta**gamma).

    Zero density gives S = 0.  theta below c_star is rejected: the floor is a
    standing assumption, which keeps the log finite.
    """
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    _require_nonnegative(rho, "rho")
    if np.any(theta < params.c_star):
        raise ValueError(f"theta must be >= c_star = {params.c_star}")
    g = params.gamma
    out = rho / (g - 1.0) * np.log(params.a * theta**g)
    return out if out.ndim else float(out)


def theta_of_entropy(rho, S, params: FluidParams):
    """Invert ``entropy`` in theta for rho > 0."""
    rho = np.asarray(rho, dtype=float)
    S = np.asarray(S, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive to invert the entropy")
    g = params.gamma
    out = (np.exp((g - 1.0) * S / rho) / params.a) ** (1.0 / g)
    return out if out.ndim else float(out)


def pressure_rho_s(rho, S, params: FluidParams):
    """Pressure in (rho, S) variables: rho**gamma * exp((gamma-1)*S/rho).

    Degenerate branches: rho = 0 with S <= 0 gives 0; rho = 0 with S > 0 is
    an error (the limit is +inf and indicates invalid upstream data).
    """
    rho = np.asarray(rho, dtype=float)
    S = np.asarray(S, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be nonnegative")
    vacuum = rho == 0
    if np.any(vacuum & (S > 0)):
        raise ValueError("pressure is infinite at rho = 0 with S > 0")
    g = params.gamma
    safe_rho = np.where(vacuum, 1.0, rho)
    out = np.where(vacuum, 0.0, safe_rho**g * np.exp((g - 1.0) * S / safe_rho))
    return out if out.ndim else float(out)


def pressure_potential_rho_s(rho, S, params: FluidParams):
    """Pressure potential P(rho, S) = p(rho, S)/(gamma-1)."""
    return pressure_rho_s(rho, S, params) / (params.gamma - 1.0)


def _positive_rho(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    return rho


def dP_drho(rho, S, params: FluidParams):
    """Partial derivative of P(rho, S) with respect to rho, for rho > 0."""
    rho = _positive_rho(rho)
    S = np.asarray(S, dtype=float)
    g = params.gamma
    out = (
        rho ** (g - 1.0)
        * np.exp((g - 1.0) * S / rho)
        * (g - (g - 1.0) * S / rho)
        / (g - 1.0)
    )
    return out if out.ndim else float(out)


def dP_dS(rho, S, params: FluidParams):
    """Partial derivative of P(rho, S) with respect to S, for rho > 0.

    Strictly positive; coincides with the absolute temperature.
    """
    rho = _positive_rho(rho)
    S = np.asarray(S, dtype=float)
    g = params.gamma
    out = rho ** (g - 1.0) * np.exp((g - 1.0) * S / rho)
    return out if out.ndim else float(out)


def absolute_temperature(rho, S, params: FluidParams):
    """Absolute temperature dP/dS; equals a*rho**(gamma-1)*theta**gamma."""
    return dP_dS(rho, S, params)


def sound_speed(rho, theta, params: FluidParams):
    """Acoustic speed sqrt(gamma*p/rho) of the pressure law at frozen theta."""
    rho = _positive_rho(rho)
    theta = np.asarray(theta, dtype=float)
    g = params.gamma
    out = np.sqrt(g * params.a * (rho * theta) ** (g - 1.0) * theta)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ThermoPoint:
    """A self-consistent (rho, theta, S) triple; build via ``from_rho_theta``."""

    rho: float
    theta: float
    S: float = field(default=0.0)

    @classmethod
    def from_rho_theta(cls, rho: float, theta: float, params: FluidParams) -> "ThermoPoint":
        return cls(rho=float(rho), theta=float(theta), S=float(entropy(rho, theta, params)))
