"""Explicit finite-volume time integrator for the compressible system
with potential temperature transport.

Scheme: Rusanov interface fluxes for (rho, rho*u) with the pressure in the
momentum flux, mass-flux-consistent upwinding of theta for rho*theta,
central viscous terms, forward Euler in time, no-slip walls through mirror
ghosts.  Mass and integrated rho*theta are conserved to round-off because
wall fluxes vanish identically and interior fluxes telescope.

The per-step viscous dissipation integral of S(grad u):grad u is
accumulated along the run; trajectories carry it for the energy checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .fields import (
    ConservedState,
    Grid2D,
    TensorField,
    apply_noslip_ghosts,
    integrate_array,
    velocity_gradient,
)
from .thermo import FluidParams

__all__ = [
    "SolverConfig",
    "Trajectory",
    "PositivityError",
    "viscous_stress",
    "stress_contraction",
    "dissipation_rate",
    "cfl_dt",
    "step",
    "run",
]

RHO_FLOOR = 1e-10
THETA_FLOOR_TOL = 1e-12

# Forcing: callable (t, X, Y) -> (f_rho, f_mx, f_my, f_z) on cell centers.
Forcing = Callable[[float, np.ndarray, np.ndarray], tuple]


class PositivityError(RuntimeError):
    """Raised when a step produces rho <= floor or theta below c_star."""


@dataclass(frozen=True)
class SolverConfig:
    grid: Grid2D
    params: FluidParams
    cfl: float = 0.45
    t_end: float = 0.1
    output_every: int = 1  # record every k-th step (initial and final always)
    forcing: Optional[Forcing] = None

    def __post_init__(self):
        if not 0.0 < self.cfl <= 0.9:
            raise ValueError(f"cfl must lie in (0, 0.9], got {self.cfl}")
        if self.t_end < 0.0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.output_every < 1:
            raise ValueError("output_every must be >= 1")
        if self.params.d != 2:
            raise ValueError("the solver supports d = 2 only")


@dataclass(frozen=True)
class Trajectory:
    """Recorded snapshots of a run plus per-step dissipation accounting.

    ``dissipation_accum[k]`` is the sum over all steps up to ``times[k]`` of
    dt * integral(S(grad u):grad u); it is nondecreasing.
    """

    config: SolverConfig
    times: tuple
    states: tuple
    dissipation_accum: tuple
    n_steps: int = 0

    def __post_init__(self):
        if len(self.times) != len(self.states) or len(self.times) != len(self.dissipation_accum):
            raise ValueError("times, states, dissipation_accum must align")
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if any(d1 < d0 for d0, d1 in zip(self.dissipation_accum, self.dissipation_accum[1:])):
            raise ValueError("dissipation accumulator must be nondecreasing")

    def index_of_time(self, t: float, tol: float = 1e-12) -> int:
        for k, tk in enumerate(self.times):
            if abs(tk - t) <= tol * max(1.0, abs(t)):
                return k
        raise ValueError(f"t = {t} is not a snapshot time")


def viscous_stress(grad_u: TensorField, params: FluidParams) -> TensorField:
    """mu*(G + G^T - (2/d) tr(G) I) + lam*tr(G) I for G = grad u."""
    G = grad_u.data
    d = params.d
    div = np.trace(G, axis1=0, axis2=1)
    out = params.mu * (G + np.swapaxes(G, 0, 1))
    scal = (params.lam - 2.0 * params.mu / d) * div
    for a in range(2):
        out[a, a] += scal
    return TensorField(grad_u.grid, out)


def stress_contraction(grad_u: TensorField, params: FluidParams) -> np.ndarray:
    """Pointwise S(grad u):grad u (the viscous dissipation density)."""
    S = viscous_stress(grad_u, params)
    return np.einsum("ab...,ab...->...", S.data, grad_u.data)


def dissipation_rate(state: ConservedState, params: FluidParams) -> float:
    """integral of S(grad u):grad u for the state's velocity field."""
    gu = velocity_gradient(state.velocity())
    return integrate_array(state.grid, stress_contraction(gu, params))


def cfl_dt(state: ConservedState, params: FluidParams, grid: Grid2D, cfl: float) -> float:
    """Largest stable explicit step: acoustic CFL plus a viscous bound."""
    if np.any(state.rho <= 0):
        raise ValueError("cfl_dt needs positive density")
    u = state.mom / state.rho
    theta = state.z / state.rho
    c = np.sqrt(params.gamma * params.a * (state.rho * theta) ** (params.gamma - 1.0) * theta)
    rate = (
        (np.abs(u[0]) + c) / grid.dx
        + (np.abs(u[1]) + c) / grid.dy
        + 2.0 * (2.0 * params.mu + abs(params.lam)) / state.rho * (1.0 / grid.dx**2 + 1.0 / grid.dy**2)
    )
    return cfl / float(np.max(rate))


def step(
    state: ConservedState,
    dt: float,
    params: FluidParams,
    forcing: Optional[Forcing] = None,
    t: float = 0.0,
) -> ConservedState:
    """One conservative forward-Euler step of length dt."""
    g = state.grid
    padded = apply_noslip_ghosts(state, layers=2)
    d_rho, d_mx, d_my, d_z = kernels.rhs(
        padded.rho, padded.mx, padded.my, padded.z,
        g.dx, g.dy, params.gamma, params.a, params.mu, params.lam,
    )
    rho = state.rho + dt * d_rho
    mx = state.mom[0] + dt * d_mx
    my = state.mom[1] + dt * d_my
    z = state.z + dt * d_z
    if forcing is not None:
        X, Y = g.centers()
        f_rho, f_mx, f_my, f_z = forcing(t, X, Y)
        rho = rho + dt * f_rho
        mx = mx + dt * f_mx
        my = my + dt * f_my
        z = z + dt * f_z

    if np.any(rho <= RHO_FLOOR):
        j, i = np.unravel_index(int(np.argmin(rho)), rho.shape)
        raise PositivityError(
            f"density fell to {rho[j, i]:.3e} <= {RHO_FLOOR} at cell ({i},{j})"
        )
    theta = z / rho
    floor = params.c_star * (1.0 - THETA_FLOOR_TOL)
    if np.any(theta < floor):
        j, i = np.unravel_index(int(np.argmin(theta)), theta.shape)
        raise PositivityError(
            f"theta fell to {theta[j, i]:.15e} < c_star at cell ({i},{j})"
        )
    return ConservedState(g, rho, np.stack([mx, my]), z)


def run(config: SolverConfig, initial: ConservedState) -> Trajectory:
    """Integrate to t_end, recording snapshots every ``output_every`` steps."""
    if initial.grid != config.grid:
        raise ValueError("initial state grid does not match the config grid")
    bad = initial.check(config.params)
    if bad:
        raise ValueError("invalid initial state: " + "; ".join(bad))

    params = config.params
    t = 0.0
    state = initial
    diss = 0.0
    times = [0.0]
    states = [initial]
    diss_accum = [0.0]
    n = 0
    while t < config.t_end and not math.isclose(t, config.t_end, rel_tol=0.0, abs_tol=1e-14):
        dt = cfl_dt(state, params, config.grid, config.cfl)
        if t + dt > config.t_end:
            dt = config.t_end - t
        try:
            new_state = step(state, dt, params, config.forcing, t)
        except PositivityError as exc:
            raise PositivityError(f"at t = {t:.6e}: {exc}") from exc
        diss += dt * dissipation_rate(state, params)
        state = new_state
        t += dt
        n += 1
        at_end = t >= config.t_end or math.isclose(t, config.t_end, rel_tol=0.0, abs_tol=1e-14)
        if n % config.output_every == 0 or at_end:
            times.append(t)
            states.append(state)
            diss_accum.append(diss)
    return Trajectory(
        config=config,
        times=tuple(times),
        states=tuple(states),
        dissipation_accum=tuple(diss_accum),
        n_steps=n,
    )
