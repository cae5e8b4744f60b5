# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the NumPy kernel backend (see _numpy_backend.py for the
shared semantics).  One fused pass over the padded arrays."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt, pow

cnp.import_array()


def rhs(double[:, ::1] rho_p, double[:, ::1] mx_p, double[:, ::1] my_p,
        double[:, ::1] z_p, double dx, double dy, double gamma, double a,
        double mu, double lam):
    cdef Py_ssize_t nyp = rho_p.shape[0]
    cdef Py_ssize_t nxp = rho_p.shape[1]
    cdef Py_ssize_t ny = nyp - 4
    cdef Py_ssize_t nx = nxp - 4
    cdef Py_ssize_t i, j

    out_rho = np.empty((ny, nx))
    out_mx = np.empty((ny, nx))
    out_my = np.empty((ny, nx))
    out_z = np.empty((ny, nx))
    cdef double[:, ::1] d_rho = out_rho
    cdef double[:, ::1] d_mx = out_mx
    cdef double[:, ::1] d_my = out_my
    cdef double[:, ::1] d_z = out_z

    u_arr = np.empty((nyp, nxp))
    v_arr = np.empty((nyp, nxp))
    p_arr = np.empty((nyp, nxp))
    c_arr = np.empty((nyp, nxp))
    t_arr = np.empty((nyp, nxp))
    cdef double[:, ::1] u = u_arr
    cdef double[:, ::1] v = v_arr
    cdef double[:, ::1] p = p_arr
    cdef double[:, ::1] c = c_arr
    cdef double[:, ::1] theta = t_arr

    # x-face fluxes: nx+1 faces per interior row; y-face fluxes: ny+1 per column
    fxr_a = np.empty((ny, nx + 1)); fxmx_a = np.empty((ny, nx + 1))
    fxmy_a = np.empty((ny, nx + 1)); fxz_a = np.empty((ny, nx + 1))
    fyr_a = np.empty((ny + 1, nx)); fymx_a = np.empty((ny + 1, nx))
    fymy_a = np.empty((ny + 1, nx)); fyz_a = np.empty((ny + 1, nx))
    cdef double[:, ::1] fxr = fxr_a, fxmx = fxmx_a, fxmy = fxmy_a, fxz = fxz_a
    cdef double[:, ::1] fyr = fyr_a, fymx = fymx_a, fymy = fymy_a, fyz = fyz_a

    s11_a = np.empty((ny + 2, nx + 2)); s12_a = np.empty((ny + 2, nx + 2))
    s22_a = np.empty((ny + 2, nx + 2))
    cdef double[:, ::1] s11 = s11_a, s12 = s12_a, s22 = s22_a

    cdef double inv2dx = 0.5 / dx
    cdef double inv2dy = 0.5 / dy
    cdef double sL, sR, s, fr
    cdef double dudx, dudy, dvdx, dvdy, div

    for j in range(nyp):
        for i in range(nxp):
            u[j, i] = mx_p[j, i] / rho_p[j, i]
            v[j, i] = my_p[j, i] / rho_p[j, i]
            p[j, i] = a * pow(z_p[j, i], gamma)
            c[j, i] = sqrt(gamma * p[j, i] / rho_p[j, i])
            theta[j, i] = z_p[j, i] / rho_p[j, i]

    for j in range(ny):
        for i in range(nx + 1):
            # face between padded columns (i+1, i+2) in padded row j+2
            sL = fabs(u[j + 2, i + 1]) + c[j + 2, i + 1]
            sR = fabs(u[j + 2, i + 2]) + c[j + 2, i + 2]
            s = sL if sL > sR else sR
            fr = 0.5 * (rho_p[j + 2, i + 1] * u[j + 2, i + 1]
                        + rho_p[j + 2, i + 2] * u[j + 2, i + 2]) \
                - 0.5 * s * (rho_p[j + 2, i + 2] - rho_p[j + 2, i + 1])
            fxr[j, i] = fr
            fxmx[j, i] = 0.5 * (mx_p[j + 2, i + 1] * u[j + 2, i + 1] + p[j + 2, i + 1]
                                + mx_p[j + 2, i + 2] * u[j + 2, i + 2] + p[j + 2, i + 2]) \
                - 0.5 * s * (mx_p[j + 2, i + 2] - mx_p[j + 2, i + 1])
            fxmy[j, i] = 0.5 * (my_p[j + 2, i + 1] * u[j + 2, i + 1]
                                + my_p[j + 2, i + 2] * u[j + 2, i + 2]) \
                - 0.5 * s * (my_p[j + 2, i + 2] - my_p[j + 2, i + 1])
            fxz[j, i] = fr * (theta[j + 2, i + 1] if fr >= 0.0 else theta[j + 2, i + 2])

    for j in range(ny + 1):
        for i in range(nx):
            sL = fabs(v[j + 1, i + 2]) + c[j + 1, i + 2]
            sR = fabs(v[j + 2, i + 2]) + c[j + 2, i + 2]
            s = sL if sL > sR else sR
            fr = 0.5 * (rho_p[j + 1, i + 2] * v[j + 1, i + 2]
                        + rho_p[j + 2, i + 2] * v[j + 2, i + 2]) \
                - 0.5 * s * (rho_p[j + 2, i + 2] - rho_p[j + 1, i + 2])
            fyr[j, i] = fr
            fymx[j, i] = 0.5 * (mx_p[j + 1, i + 2] * v[j + 1, i + 2]
                                + mx_p[j + 2, i + 2] * v[j + 2, i + 2]) \
                - 0.5 * s * (mx_p[j + 2, i + 2] - mx_p[j + 1, i + 2])
            fymy[j, i] = 0.5 * (my_p[j + 1, i + 2] * v[j + 1, i + 2] + p[j + 1, i + 2]
                                + my_p[j + 2, i + 2] * v[j + 2, i + 2] + p[j + 2, i + 2]) \
                - 0.5 * s * (my_p[j + 2, i + 2] - my_p[j + 1, i + 2])
            fyz[j, i] = fr * (theta[j + 1, i + 2] if fr >= 0.0 else theta[j + 2, i + 2])

    # stress on the one-ring: padded index (j+1, i+1), j in [0, ny+2)
    for j in range(ny + 2):
        for i in range(nx + 2):
            dudx = (u[j + 1, i + 2] - u[j + 1, i]) * inv2dx
            dudy = (u[j + 2, i + 1] - u[j, i + 1]) * inv2dy
            dvdx = (v[j + 1, i + 2] - v[j + 1, i]) * inv2dx
            dvdy = (v[j + 2, i + 1] - v[j, i + 1]) * inv2dy
            div = dudx + dvdy
            s11[j, i] = 2.0 * mu * dudx + (lam - mu) * div
            s12[j, i] = mu * (dudy + dvdx)
            s22[j, i] = 2.0 * mu * dvdy + (lam - mu) * div

    for j in range(ny):
        for i in range(nx):
            d_rho[j, i] = -(fxr[j, i + 1] - fxr[j, i]) / dx - (fyr[j + 1, i] - fyr[j, i]) / dy
            d_mx[j, i] = -(fxmx[j, i + 1] - fxmx[j, i]) / dx - (fymx[j + 1, i] - fymx[j, i]) / dy \
                + (s11[j + 1, i + 2] - s11[j + 1, i]) * inv2dx \
                + (s12[j + 2, i + 1] - s12[j, i + 1]) * inv2dy
            d_my[j, i] = -(fxmy[j, i + 1] - fxmy[j, i]) / dx - (fymy[j + 1, i] - fymy[j, i]) / dy \
                + (s12[j + 1, i + 2] - s12[j + 1, i]) * inv2dx \
                + (s22[j + 2, i + 1] - s22[j, i + 1]) * inv2dy
            d_z[j, i] = -(fxz[j, i + 1] - fxz[j, i]) / dx - (fyz[j + 1, i] - fyz[j, i]) / dy

    return out_rho, out_mx, out_my, out_z
