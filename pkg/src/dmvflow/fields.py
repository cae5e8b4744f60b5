"""Structured 2D grid, discrete fields, and discrete differential operators.

Cells are uniform rectangles; values live at cell centers ((i+1/2)*dx,
(j+1/2)*dy).  Arrays are indexed [j, i] (y-row outer, x inner) so that C
order matches the row-major cell index i + nx*j used by the CSV dumps.

The generic gradient/divergence use second-order central stencils in the
interior and second-order one-sided stencils in the boundary-adjacent
cells.  Velocity fields get a dedicated gradient that fills no-slip ghosts
(u_ghost = -u_interior) and differences centrally everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .thermo import FluidParams

__all__ = [
    "Grid2D",
    "ScalarField",
    "VectorField",
    "TensorField",
    "ConservedState",
    "PaddedState",
    "gradient",
    "divergence",
    "tensor_divergence",
    "integrate",
    "integrate_array",
    "apply_noslip_ghosts",
    "velocity_gradient",
    "dirichlet_gradient_sq",
    "dump_state_csv",
    "load_state_csv",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform Cartesian grid on the rectangle [0, lx] x [0, ly]."""

    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ValueError("need at least 4 cells per axis")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("domain extents must be positive")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    def xs(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.dx

    def ys(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.dy

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinate arrays X, Y of shape (ny, nx)."""
        return np.meshgrid(self.xs(), self.ys(), indexing="xy")


def _check_shape(grid: Grid2D, data: np.ndarray, lead: tuple[int, ...]):
    want = lead + grid.shape
    if data.shape != want:
        raise ValueError(f"field data shape {data.shape} does not match {want}")


@dataclass(frozen=True)
class ScalarField:
    grid: Grid2D
    data: np.ndarray  # (ny, nx)

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=float))
        _check_shape(self.grid, self.data, ())


@dataclass(frozen=True)
class VectorField:
    grid: Grid2D
    data: np.ndarray  # (2, ny, nx), [a] = component a

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=float))
        _check_shape(self.grid, self.data, (2,))


@dataclass(frozen=True)
class TensorField:
    grid: Grid2D
    data: np.ndarray  # (2, 2, ny, nx), [a, b] = d u_a / d x_b for gradients

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=float))
        _check_shape(self.grid, self.data, (2, 2))


@dataclass(frozen=True)
class ConservedState:
    """Per-cell conserved fields (rho, rho*u, rho*theta)."""

    grid: Grid2D
    rho: np.ndarray  # (ny, nx)
    mom: np.ndarray  # (2, ny, nx)
    z: np.ndarray  # (ny, nx), z = rho*theta

    def __post_init__(self):
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=float))
        object.__setattr__(self, "mom", np.asarray(self.mom, dtype=float))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        _check_shape(self.grid, self.rho, ())
        _check_shape(self.grid, self.mom, (2,))
        _check_shape(self.grid, self.z, ())

    def velocity(self) -> VectorField:
        return VectorField(self.grid, self.mom / self.rho)

    def theta(self) -> np.ndarray:
        return self.z / self.rho

    def check(self, params: FluidParams, tol: float = 1e-12) -> list[str]:
        """Return invariant violations (empty when the state is admissible)."""
        bad = []
        if np.any(self.rho < 0):
            j, i = np.unravel_index(int(np.argmin(self.rho)), self.rho.shape)
            bad.append(f"negative density at cell ({i},{j})")
        pos = self.rho > 0
        theta = np.where(pos, self.z / np.where(pos, self.rho, 1.0), params.c_star)
        if np.any(theta < params.c_star * (1.0 - tol)):
            j, i = np.unravel_index(int(np.argmin(theta)), theta.shape)
            bad.append(f"theta below c_star at cell ({i},{j})")
        return bad

    def copy(self) -> "ConservedState":
        return ConservedState(self.grid, self.rho.copy(), self.mom.copy(), self.z.copy())


def _ddx(arr: np.ndarray, h: float) -> np.ndarray:
    """Second-order d/dx along the last axis: central inside, one-sided at
    the ends (difference form, so constants are annihilated exactly)."""
    out = np.empty_like(arr)
    out[..., 1:-1] = (arr[..., 2:] - arr[..., :-2]) / (2.0 * h)
    out[..., 0] = (
        4.0 * (arr[..., 1] - arr[..., 0]) - (arr[..., 2] - arr[..., 0])
    ) / (2.0 * h)
    out[..., -1] = (
        4.0 * (arr[..., -1] - arr[..., -2]) - (arr[..., -1] - arr[..., -3])
    ) / (2.0 * h)
    return out


def _ddy(arr: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(arr)
    out[..., 1:-1, :] = (arr[..., 2:, :] - arr[..., :-2, :]) / (2.0 * h)
    out[..., 0, :] = (
        4.0 * (arr[..., 1, :] - arr[..., 0, :]) - (arr[..., 2, :] - arr[..., 0, :])
    ) / (2.0 * h)
    out[..., -1, :] = (
        4.0 * (arr[..., -1, :] - arr[..., -2, :]) - (arr[..., -1, :] - arr[..., -3, :])
    ) / (2.0 * h)
    return out


def gradient(field):
    """Discrete nabla: ScalarField -> VectorField, VectorField -> TensorField."""
    g = field.grid
    if isinstance(field, ScalarField):
        return VectorField(g, np.stack([_ddx(field.data, g.dx), _ddy(field.data, g.dy)]))
    if isinstance(field, VectorField):
        out = np.empty((2, 2) + g.shape)
        for a in range(2):
            out[a, 0] = _ddx(field.data[a], g.dx)
            out[a, 1] = _ddy(field.data[a], g.dy)
        return TensorField(g, out)
    raise TypeError(f"cannot take the gradient of {type(field).__name__}")


def divergence(field) -> ScalarField:
    """Discrete div of a VectorField, mirroring the gradient stencils."""
    if not isinstance(field, VectorField):
        raise TypeError(f"divergence needs a VectorField, got {type(field).__name__}")
    g = field.grid
    return ScalarField(g, _ddx(field.data[0], g.dx) + _ddy(field.data[1], g.dy))


def tensor_divergence(field: TensorField) -> VectorField:
    """Row-wise divergence (div T)_a = d T_ab / d x_b."""
    g = field.grid
    out = np.empty((2,) + g.shape)
    for a in range(2):
        out[a] = _ddx(field.data[a, 0], g.dx) + _ddy(field.data[a, 1], g.dy)
    return VectorField(g, out)


def integrate(field: ScalarField) -> float:
    """Midpoint-rule integral over the domain; fixed summation order."""
    if not isinstance(field, ScalarField):
        raise TypeError(f"integrate needs a ScalarField, got {type(field).__name__}")
    return float(np.sum(field.data)) * field.grid.cell_area


def integrate_array(grid: Grid2D, data: np.ndarray) -> float:
    """Midpoint-rule integral of a bare (ny, nx) array."""
    return float(np.sum(data)) * grid.cell_area


def _pad_mirror(arr: np.ndarray, layers: int, sign: float) -> np.ndarray:
    """Mirror-extend across all four walls; sign = -1 reflects (no-slip)."""
    ny, nx = arr.shape
    out = np.empty((ny + 2 * layers, nx + 2 * layers))
    out[layers:-layers, layers:-layers] = arr
    for k in range(1, layers + 1):
        out[:, layers - k] = sign * out[:, layers + k - 1]
        out[:, nx + layers + k - 1] = sign * out[:, nx + layers - k]
    for k in range(1, layers + 1):
        out[layers - k, :] = sign * out[layers + k - 1, :]
        out[ny + layers + k - 1, :] = sign * out[ny + layers - k, :]
    return out


@dataclass(frozen=True)
class PaddedState:
    """Ghost-extended conserved fields; ghosts realize no-slip walls."""

    grid: Grid2D
    layers: int
    rho: np.ndarray
    mx: np.ndarray
    my: np.ndarray
    z: np.ndarray


def apply_noslip_ghosts(state: ConservedState, layers: int = 2) -> PaddedState:
    """Extend a state with mirror ghosts: scalars copy, momenta flip sign.

    The wall-interpolated velocity (u_interior + u_ghost)/2 is exactly zero,
    while density and potential temperature get zero normal gradient.
    """
    return PaddedState(
        grid=state.grid,
        layers=layers,
        rho=_pad_mirror(state.rho, layers, +1.0),
        mx=_pad_mirror(state.mom[0], layers, -1.0),
        my=_pad_mirror(state.mom[1], layers, -1.0),
        z=_pad_mirror(state.z, layers, +1.0),
    )


def velocity_gradient(u: VectorField) -> TensorField:
    """Gradient of a no-slip velocity field: central stencils against
    reflected ghosts, so boundary cells see the wall condition."""
    g = u.grid
    out = np.empty((2, 2) + g.shape)
    for a in range(2):
        p = _pad_mirror(u.data[a], 1, -1.0)
        out[a, 0] = (p[1:-1, 2:] - p[1:-1, :-2]) / (2.0 * g.dx)
        out[a, 1] = (p[2:, 1:-1] - p[:-2, 1:-1]) / (2.0 * g.dy)
    return TensorField(g, out)


def dirichlet_gradient_sq(u: VectorField) -> float:
    """Discrete Dirichlet energy sum_faces |difference quotient|^2 * area.

    Interior faces contribute ((v_R - v_L)/h)^2; wall faces contribute
    2*(v/h)^2, the quadratic form of the reflection Laplacian.  This is the
    gradient norm for which the discrete Poincare inequality with constant
    1/lambda_1 (smallest reflection-Laplacian eigenvalue) is exact.
    """
    g = u.grid
    total = 0.0
    for a in range(2):
        v = u.data[a]
        total += float(np.sum(((v[:, 1:] - v[:, :-1]) / g.dx) ** 2))
        total += 2.0 * float(np.sum((v[:, 0] / g.dx) ** 2))
        total += 2.0 * float(np.sum((v[:, -1] / g.dx) ** 2))
        total += float(np.sum(((v[1:, :] - v[:-1, :]) / g.dy) ** 2))
        total += 2.0 * float(np.sum((v[0, :] / g.dy) ** 2))
        total += 2.0 * float(np.sum((v[-1, :] / g.dy) ** 2))
    return total * g.cell_area


def dump_state_csv(state: ConservedState, path) -> None:
    """Write `x,y,rho,ux,uy,theta` rows, row-major by cell index, 17 digits."""
    g = state.grid
    X, Y = g.centers()
    u = state.mom / state.rho
    theta = state.z / state.rho
    cols = [X, Y, state.rho, u[0], u[1], theta]
    with open(path, "w") as fh:
        fh.write("x,y,rho,ux,uy,theta\n")
        flat = [c.reshape(-1) for c in cols]
        for k in range(g.nx * g.ny):
            fh.write(",".join(f"{c[k]:.17g}" for c in flat) + "\n")


def load_state_csv(grid: Grid2D, path) -> ConservedState:
    """Inverse of ``dump_state_csv`` on a matching grid."""
    raw = np.loadtxt(path, delimiter=",", skiprows=1)
    if raw.shape != (grid.nx * grid.ny, 6):
        raise ValueError(f"snapshot at {path} does not match a {grid.nx}x{grid.ny} grid")
    rho = raw[:, 2].reshape(grid.shape)
    ux = raw[:, 3].reshape(grid.shape)
    uy = raw[:, 4].reshape(grid.shape)
    theta = raw[:, 5].reshape(grid.shape)
    return ConservedState(grid, rho, np.stack([rho * ux, rho * uy]), rho * theta)
