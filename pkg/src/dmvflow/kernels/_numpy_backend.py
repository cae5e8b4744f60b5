"""Vectorized NumPy implementation of the hot finite-volume kernels.

Semantics shared with the compiled backend:

* input arrays carry two ghost layers filled for no-slip walls (scalars
  mirrored, momenta sign-flipped), shape (ny+4, nx+4);
* convective interface fluxes are local Lax-Friedrichs (Rusanov) with
  signal speed |u.n| + c, the pressure riding in the momentum flux;
* rho*theta is advected with the Rusanov mass flux and upwind theta, which
  gives the discrete minimum principle and entropy production for theta;
* viscous terms are central: stress from the centered velocity gradient on
  the one-ring, then a centered divergence.

Returns time derivatives (d rho, d mx, d my, d z) on the interior.
"""

import numpy as np


def rhs(rho_p, mx_p, my_p, z_p, dx, dy, gamma, a, mu, lam):
    inv2dx = 0.5 / dx
    inv2dy = 0.5 / dy

    u_p = mx_p / rho_p
    v_p = my_p / rho_p
    p_p = a * z_p**gamma
    c_p = np.sqrt(gamma * p_p / rho_p)
    theta_p = z_p / rho_p

    # x-faces between columns ii and ii+1 for ii in [1, nx+2); rows 2:-2
    rL = rho_p[2:-2, 1:-2]
    rR = rho_p[2:-2, 2:-1]
    uL = u_p[2:-2, 1:-2]
    uR = u_p[2:-2, 2:-1]
    mxL = mx_p[2:-2, 1:-2]
    mxR = mx_p[2:-2, 2:-1]
    myL = my_p[2:-2, 1:-2]
    myR = my_p[2:-2, 2:-1]
    pL = p_p[2:-2, 1:-2]
    pR = p_p[2:-2, 2:-1]
    s = np.maximum(np.abs(uL) + c_p[2:-2, 1:-2], np.abs(uR) + c_p[2:-2, 2:-1])
    fx_rho = 0.5 * (rL * uL + rR * uR) - 0.5 * s * (rR - rL)
    fx_mx = 0.5 * (mxL * uL + pL + mxR * uR + pR) - 0.5 * s * (mxR - mxL)
    fx_my = 0.5 * (myL * uL + myR * uR) - 0.5 * s * (myR - myL)
    fx_z = fx_rho * np.where(fx_rho >= 0.0, theta_p[2:-2, 1:-2], theta_p[2:-2, 2:-1])

    # y-faces between rows jj and jj+1 for jj in [1, ny+2); columns 2:-2
    rB = rho_p[1:-2, 2:-2]
    rT = rho_p[2:-1, 2:-2]
    vB = v_p[1:-2, 2:-2]
    vT = v_p[2:-1, 2:-2]
    mxB = mx_p[1:-2, 2:-2]
    mxT = mx_p[2:-1, 2:-2]
    myB = my_p[1:-2, 2:-2]
    myT = my_p[2:-1, 2:-2]
    pB = p_p[1:-2, 2:-2]
    pT = p_p[2:-1, 2:-2]
    sy = np.maximum(np.abs(vB) + c_p[1:-2, 2:-2], np.abs(vT) + c_p[2:-1, 2:-2])
    fy_rho = 0.5 * (rB * vB + rT * vT) - 0.5 * sy * (rT - rB)
    fy_mx = 0.5 * (mxB * vB + mxT * vT) - 0.5 * sy * (mxT - mxB)
    fy_my = 0.5 * (myB * vB + pB + myT * vT + pT) - 0.5 * sy * (myT - myB)
    fy_z = fy_rho * np.where(fy_rho >= 0.0, theta_p[1:-2, 2:-2], theta_p[2:-1, 2:-2])

    d_rho = -(fx_rho[:, 1:] - fx_rho[:, :-1]) / dx - (fy_rho[1:, :] - fy_rho[:-1, :]) / dy
    d_mx = -(fx_mx[:, 1:] - fx_mx[:, :-1]) / dx - (fy_mx[1:, :] - fy_mx[:-1, :]) / dy
    d_my = -(fx_my[:, 1:] - fx_my[:, :-1]) / dx - (fy_my[1:, :] - fy_my[:-1, :]) / dy
    d_z = -(fx_z[:, 1:] - fx_z[:, :-1]) / dx - (fy_z[1:, :] - fy_z[:-1, :]) / dy

    # viscous stress on the one-ring around the interior, d = 2:
    # S = mu*(grad u + grad u^T) + (lam - mu)*div(u)*I
    dudx = (u_p[1:-1, 2:] - u_p[1:-1, :-2]) * inv2dx
    dudy = (u_p[2:, 1:-1] - u_p[:-2, 1:-1]) * inv2dy
    dvdx = (v_p[1:-1, 2:] - v_p[1:-1, :-2]) * inv2dx
    dvdy = (v_p[2:, 1:-1] - v_p[:-2, 1:-1]) * inv2dy
    div = dudx + dvdy
    s11 = 2.0 * mu * dudx + (lam - mu) * div
    s12 = mu * (dudy + dvdx)
    s22 = 2.0 * mu * dvdy + (lam - mu) * div

    d_mx += (s11[1:-1, 2:] - s11[1:-1, :-2]) * inv2dx + (s12[2:, 1:-1] - s12[:-2, 1:-1]) * inv2dy
    d_my += (s12[1:-1, 2:] - s12[1:-1, :-2]) * inv2dx + (s22[2:, 1:-1] - s22[:-2, 1:-1]) * inv2dy

    return d_rho, d_mx, d_my, d_z
