"""Smooth reference solutions with closed-form derivative evaluators.

A StrongSolution bundles callables for (rho, theta, u) and their first
space/time derivatives plus the second-derivative combinations entering
div(S(grad u)) = mu*Laplace(u) + lam*grad(div u) (d = 2).  Everything the
relative-energy terms need (entropy, absolute temperature, pressure
gradients along the solution) is derived from these by exact chain rules,
so no numerical differentiation enters the diagnostics.

Two factories are provided: a constant state and a manufactured
trigonometric state whose velocity vanishes on the walls.  The latter is
turned into an exact solution of the forced system via ``forcing_for``,
which assembles the source terms from the same evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .thermo import FluidParams

__all__ = ["StrongSolution", "constant_strong_solution", "manufactured_strong_solution"]

Scalar = Callable[[float, np.ndarray, np.ndarray], np.ndarray]
Vector = Callable[[float, np.ndarray, np.ndarray], np.ndarray]  # (2, ...)
Tensor = Callable[[float, np.ndarray, np.ndarray], np.ndarray]  # (2, 2, ...)


@dataclass(frozen=True)
class StrongSolution:
    """Reference triplet (rho, theta, u) with derivative access.

    rho_bounds/theta_bounds are (inf, sup) over the run window; both lower
    bounds must be positive and u must vanish on the domain boundary.
    """

    rho: Scalar
    theta: Scalar
    u: Vector
    drho_dt: Scalar
    grad_rho: Vector
    dtheta_dt: Scalar
    grad_theta: Vector
    du_dt: Vector
    grad_u: Tensor  # [a, b] = d u_a / d x_b
    laplace_u: Vector
    grad_div_u: Vector
    rho_bounds: tuple
    theta_bounds: tuple

    def __post_init__(self):
        if self.rho_bounds[0] <= 0 or self.theta_bounds[0] <= 0:
            raise ValueError("strong solutions need positive rho and theta floors")

    def div_u(self, t, X, Y) -> np.ndarray:
        G = self.grad_u(t, X, Y)
        return G[0, 0] + G[1, 1]

    def div_visc_stress(self, t, X, Y, params: FluidParams) -> np.ndarray:
        """div(S(grad u)) = mu*Laplace(u) + lam*grad(div u) for d = 2."""
        return params.mu * self.laplace_u(t, X, Y) + params.lam * self.grad_div_u(t, X, Y)

    def forcing_for(self, params: FluidParams):
        """Source terms making this triplet an exact solution of the forced
        system; returns a solver-compatible forcing callable."""

        def forcing(t, X, Y):
            rho = self.rho(t, X, Y)
            th = self.theta(t, X, Y)
            u = self.u(t, X, Y)
            G = self.grad_u(t, X, Y)
            grho = self.grad_rho(t, X, Y)
            gth = self.grad_theta(t, X, Y)
            div = G[0, 0] + G[1, 1]
            f_rho = self.drho_dt(t, X, Y) + grho[0] * u[0] + grho[1] * u[1] + rho * div
            # grad p = a*gamma*(rho*theta)**(gamma-1) * grad(rho*theta)
            gz = grho * th + rho * gth
            gp = params.a * params.gamma * (rho * th) ** (params.gamma - 1.0) * gz
            dudt = self.du_dt(t, X, Y)
            adv = np.stack([G[0, 0] * u[0] + G[0, 1] * u[1], G[1, 0] * u[0] + G[1, 1] * u[1]])
            dvs = self.div_visc_stress(t, X, Y, params)
            f_mx = rho * dudt[0] + u[0] * f_rho + rho * adv[0] + gp[0] - dvs[0]
            f_my = rho * dudt[1] + u[1] * f_rho + rho * adv[1] + gp[1] - dvs[1]
            f_z = th * f_rho + rho * (
                self.dtheta_dt(t, X, Y) + gth[0] * u[0] + gth[1] * u[1]
            )
            return f_rho, f_mx, f_my, f_z

        return forcing


def constant_strong_solution(rho0: float, theta0: float) -> StrongSolution:
    """The resting constant state; every derivative vanishes."""
    if rho0 <= 0 or theta0 <= 0:
        raise ValueError("constant state needs positive rho and theta")

    def scal(value):
        def f(t, X, Y):
            return np.full_like(np.asarray(X, dtype=float), value)

        return f

    def vec(value):
        def f(t, X, Y):
            X = np.asarray(X, dtype=float)
            return np.full((2,) + X.shape, value)

        return f

    def tens(t, X, Y):
        X = np.asarray(X, dtype=float)
        return np.zeros((2, 2) + X.shape)

    return StrongSolution(
        rho=scal(rho0),
        theta=scal(theta0),
        u=vec(0.0),
        drho_dt=scal(0.0),
        grad_rho=vec(0.0),
        dtheta_dt=scal(0.0),
        grad_theta=vec(0.0),
        du_dt=vec(0.0),
        grad_u=tens,
        laplace_u=vec(0.0),
        grad_div_u=vec(0.0),
        rho_bounds=(rho0, rho0),
        theta_bounds=(theta0, theta0),
    )


def manufactured_strong_solution(
    lx: float,
    ly: float,
    rho0: float = 1.0,
    theta0: float = 1.0,
    amp_rho: float = 0.1,
    amp_theta: float = 0.1,
    amp_u: float = 0.1,
    decay: float = 0.5,
) -> StrongSolution:
    """Trigonometric reference state on [0, lx] x [0, ly]:

        rho   = rho0   * (1 + amp_rho   * e(t) * cos(pi x/lx) cos(pi y/ly))
        theta = theta0 * (1 + amp_theta * e(t) * cos(pi x/lx) cos(pi y/ly))
        u_a   = amp_u * e(t) * sin(pi x/lx) sin(pi y/ly) * (1, -1)_a

    with e(t) = exp(-decay*t).  u vanishes on the boundary; amplitudes
    below 1 keep rho and theta positive.
    """
    if not (0 <= amp_rho < 1 and 0 <= amp_theta < 1):
        raise ValueError("relative amplitudes must lie in [0, 1)")
    kx = np.pi / lx
    ky = np.pi / ly
    sgn = np.array([1.0, -1.0])

    def e(t):
        return np.exp(-decay * t)

    def mode(X, Y):
        return np.cos(kx * X) * np.cos(ky * Y)

    def rho(t, X, Y):
        return rho0 * (1.0 + amp_rho * e(t) * mode(X, Y))

    def theta(t, X, Y):
        return theta0 * (1.0 + amp_theta * e(t) * mode(X, Y))

    def u(t, X, Y):
        base = amp_u * e(t) * np.sin(kx * X) * np.sin(ky * Y)
        return np.stack([sgn[0] * base, sgn[1] * base])

    def drho_dt(t, X, Y):
        return -decay * rho0 * amp_rho * e(t) * mode(X, Y)

    def dtheta_dt(t, X, Y):
        return -decay * theta0 * amp_theta * e(t) * mode(X, Y)

    def grad_rho(t, X, Y):
        f = rho0 * amp_rho * e(t)
        return np.stack(
            [-f * kx * np.sin(kx * X) * np.cos(ky * Y), -f * ky * np.cos(kx * X) * np.sin(ky * Y)]
        )

    def grad_theta(t, X, Y):
        f = theta0 * amp_theta * e(t)
        return np.stack(
            [-f * kx * np.sin(kx * X) * np.cos(ky * Y), -f * ky * np.cos(kx * X) * np.sin(ky * Y)]
        )

    def du_dt(t, X, Y):
        return -decay * u(t, X, Y)

    def grad_u(t, X, Y):
        f = amp_u * e(t)
        gx = f * kx * np.cos(kx * X) * np.sin(ky * Y)
        gy = f * ky * np.sin(kx * X) * np.cos(ky * Y)
        out = np.empty((2, 2) + np.shape(gx))
        out[0, 0] = sgn[0] * gx
        out[0, 1] = sgn[0] * gy
        out[1, 0] = sgn[1] * gx
        out[1, 1] = sgn[1] * gy
        return out

    def laplace_u(t, X, Y):
        return -(kx**2 + ky**2) * u(t, X, Y)

    def grad_div_u(t, X, Y):
        # div u = f*(sgn0*kx*cos sx*sin sy + sgn1*ky*sin sx*cos sy)
        f = amp_u * e(t)
        sx, cx = np.sin(kx * X), np.cos(kx * X)
        sy, cy = np.sin(ky * Y), np.cos(ky * Y)
        ddx = f * (-sgn[0] * kx * kx * sx * sy + sgn[1] * ky * kx * cx * cy)
        ddy = f * (sgn[0] * kx * ky * cx * cy - sgn[1] * ky * ky * sx * sy)
        return np.stack([ddx, ddy])

    return StrongSolution(
        rho=rho,
        theta=theta,
        u=u,
        drho_dt=drho_dt,
        grad_rho=grad_rho,
        dtheta_dt=dtheta_dt,
        grad_theta=grad_theta,
        du_dt=du_dt,
        grad_u=grad_u,
        laplace_u=laplace_u,
        grad_div_u=grad_div_u,
        rho_bounds=(rho0 * (1.0 - amp_rho), rho0 * (1.0 + amp_rho)),
        theta_bounds=(theta0 * (1.0 - amp_theta), theta0 * (1.0 + amp_theta)),
    )
