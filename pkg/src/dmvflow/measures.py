"""Finite-atom Young measures per cell, observable expectations, and the
defect fields that accompany them.

A cell measure is a finite convex combination of atoms (rho, theta, u);
a MeasureField stores one measure per grid cell in stacked arrays (all
cells share the atom count, which covers Dirac embeddings and uniform
refinement ensembles).  Expectations <V; g> are weighted sums over atoms
for observables from a fixed catalog.

Defect fields (energy concentration, accumulated dissipation, Reynolds
tensor) are user-supplied data, zero by default; ``infer_defects`` offers
the ensemble energy-gap construction.  ``validate`` reports admissibility
violations as data rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fields import ConservedState, Grid2D
from .thermo import FluidParams, pressure_of_rhotheta, pressure_potential_of_rhotheta

__all__ = [
    "Atom",
    "CellMeasure",
    "MeasureField",
    "DefectFields",
    "OBSERVABLES",
    "expectation",
    "expectation_field",
    "dirac_from_state",
    "ensemble_from_refinement",
    "zero_defects",
    "infer_defects",
    "validate",
    "ValidationReport",
    "dump_measure_csv",
    "dump_defects_csv",
]

WEIGHT_TOL = 1e-14


@dataclass(frozen=True)
class Atom:
    weight: float
    rho: float
    theta: float
    u: np.ndarray  # (2,)

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float).reshape(2))


class CellMeasure:
    """Probability measure on state space with finitely many atoms.

    Weights must sum to 1 within 1e-14 and are renormalized exactly on
    construction.  Atom admissibility (rho >= 0, theta >= c_star) is not
    enforced here; ``validate`` reports it.
    """

    __slots__ = ("weights", "rho", "theta", "u")

    def __init__(self, weights, rho, theta, u):
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.size == 0:
            raise ValueError("a cell measure needs at least one atom")
        if np.any(w <= 0):
            raise ValueError("atom weights must be positive")
        total = float(np.sum(w))
        if abs(total - 1.0) > WEIGHT_TOL * w.size:
            raise ValueError(f"atom weights sum to {total}, not 1")
        self.weights = w / total
        self.rho = np.asarray(rho, dtype=float).reshape(-1)
        self.theta = np.asarray(theta, dtype=float).reshape(-1)
        self.u = np.asarray(u, dtype=float).reshape(2, -1)
        k = self.weights.size
        if not (self.rho.size == k and self.theta.size == k and self.u.shape[1] == k):
            raise ValueError("atom arrays must share the atom count")

    @classmethod
    def from_atoms(cls, atoms: Sequence[Atom]) -> "CellMeasure":
        return cls(
            [a.weight for a in atoms],
            [a.rho for a in atoms],
            [a.theta for a in atoms],
            np.stack([a.u for a in atoms], axis=1),
        )

    def atoms(self) -> list[Atom]:
        return [
            Atom(self.weights[k], self.rho[k], self.theta[k], self.u[:, k])
            for k in range(self.weights.size)
        ]


# Observable catalog: id -> (kind, evaluator on atom arrays).
# kind: "scalar", "vector" (2,), or "tensor" (2, 2).
def _obs_rho(w, rho, theta, u, p):
    return np.sum(w * rho, axis=0)


def _obs_mom(w, rho, theta, u, p):
    return np.sum(w * rho * u, axis=1)


def _obs_rhotheta(w, rho, theta, u, p):
    return np.sum(w * rho * theta, axis=0)


def _obs_rhotheta_u(w, rho, theta, u, p):
    return np.sum(w * rho * theta * u, axis=1)


def _obs_rho_log_theta(w, rho, theta, u, p):
    return np.sum(w * rho * np.log(theta), axis=0)


def _obs_rho_log_theta_u(w, rho, theta, u, p):
    return np.sum(w * rho * np.log(theta) * u, axis=1)


def _obs_u(w, rho, theta, u, p):
    return np.sum(w * u, axis=1)


def _obs_momflux(w, rho, theta, u, p):
    return np.sum(w * rho * u[:, None] * u[None, :], axis=2)


def _obs_pressure(w, rho, theta, u, p):
    return np.sum(w * pressure_of_rhotheta(rho * theta, p), axis=0)


def _obs_total_energy(w, rho, theta, u, p):
    kinetic = 0.5 * rho * np.sum(u * u, axis=0)
    return np.sum(w * (kinetic + pressure_potential_of_rhotheta(rho * theta, p)), axis=0)


OBSERVABLES = {
    "rho": ("scalar", _obs_rho),
    "mom": ("vector", _obs_mom),
    "rhotheta": ("scalar", _obs_rhotheta),
    "rhotheta_u": ("vector", _obs_rhotheta_u),
    "rho_log_theta": ("scalar", _obs_rho_log_theta),
    "rho_log_theta_u": ("vector", _obs_rho_log_theta_u),
    "u": ("vector", _obs_u),
    "momflux": ("tensor", _obs_momflux),
    "pressure": ("scalar", _obs_pressure),
    "total_energy": ("scalar", _obs_total_energy),
}


def expectation(cell: CellMeasure, observable: str, params: FluidParams):
    """<V; g> for one cell: the weighted sum of g over the atoms."""
    try:
        kind, fn = OBSERVABLES[observable]
    except KeyError:
        raise ValueError(
            f"unknown observable {observable!r}; choose from {sorted(OBSERVABLES)}"
        ) from None
    out = fn(cell.weights, cell.rho, cell.theta, cell.u, params)
    return float(out) if kind == "scalar" else out


class MeasureField:
    """One CellMeasure per grid cell, stored as stacked (K, ny, nx) arrays."""

    def __init__(self, grid: Grid2D, weights, rho, theta, u):
        self.grid = grid
        self.weights = np.asarray(weights, dtype=float)
        self.rho = np.asarray(rho, dtype=float)
        self.theta = np.asarray(theta, dtype=float)
        self.u = np.asarray(u, dtype=float)
        K = self.weights.shape[0]
        want = (K,) + grid.shape
        if self.weights.shape != want or self.rho.shape != want or self.theta.shape != want:
            raise ValueError("measure arrays must have shape (K, ny, nx)")
        if self.u.shape != (2,) + want:
            raise ValueError("velocity atoms must have shape (2, K, ny, nx)")
        if np.any(self.weights <= 0):
            raise ValueError("atom weights must be positive")
        sums = np.sum(self.weights, axis=0)
        if np.any(np.abs(sums - 1.0) > WEIGHT_TOL * K):
            raise ValueError("atom weights must sum to 1 per cell")
        self.weights = self.weights / sums

    @property
    def n_atoms(self) -> int:
        return self.weights.shape[0]

    def cell(self, i: int, j: int) -> CellMeasure:
        return CellMeasure(
            self.weights[:, j, i], self.rho[:, j, i], self.theta[:, j, i], self.u[:, :, j, i]
        )

    def field_expectation(self, observable: str, params: FluidParams) -> np.ndarray:
        """<V; g> on every cell; shape (ny, nx), (2, ny, nx) or (2, 2, ny, nx)."""
        return expectation_field(self, observable, params)


def expectation_field(mf: MeasureField, observable: str, params: FluidParams) -> np.ndarray:
    try:
        kind, fn = OBSERVABLES[observable]
    except KeyError:
        raise ValueError(
            f"unknown observable {observable!r}; choose from {sorted(OBSERVABLES)}"
        ) from None
    # atom axis sits first for scalars and second for velocities, matching
    # the per-cell evaluators' axis arguments
    return fn(mf.weights, mf.rho, mf.theta, mf.u, params)


def dirac_from_state(state: ConservedState, params: FluidParams) -> MeasureField:
    """Embed a discrete solution as the Dirac measure (rho, z/rho, m/rho)."""
    if np.any(state.rho <= 0):
        j, i = np.unravel_index(int(np.argmin(state.rho)), state.rho.shape)
        raise ValueError(f"cannot form a Dirac atom at vacuum cell ({i},{j})")
    g = state.grid
    w = np.ones((1,) + g.shape)
    rho = state.rho[None]
    theta = (state.z / state.rho)[None]
    u = (state.mom / state.rho)[:, None]
    return MeasureField(g, w, rho, theta, u)


def ensemble_from_refinement(
    fine_states: Sequence[ConservedState], coarse_grid: Grid2D
) -> MeasureField:
    """Collect k x k fine subcell values as equal-weight atoms per coarse cell.

    Several fine states concatenate their atoms with uniform weights,
    modeling the oscillation limit of a refinement sequence.
    """
    if len(fine_states) == 0:
        raise ValueError("need at least one fine state")
    fg = fine_states[0].grid
    if any(s.grid != fg for s in fine_states):
        raise ValueError("all fine states must share one grid")
    if fg.nx % coarse_grid.nx or fg.ny % coarse_grid.ny:
        raise ValueError("fine grid must be an integer refinement of the coarse grid")
    kx = fg.nx // coarse_grid.nx
    ky = fg.ny // coarse_grid.ny
    if kx != ky or abs(fg.lx - coarse_grid.lx) > 1e-14 or abs(fg.ly - coarse_grid.ly) > 1e-14:
        raise ValueError("grids must be nested with one refinement factor")

    def atoms_of(arr):  # (ny_f, nx_f) -> (k*k, ny_c, nx_c)
        blocks = arr.reshape(coarse_grid.ny, ky, coarse_grid.nx, kx)
        return blocks.transpose(1, 3, 0, 2).reshape(ky * kx, coarse_grid.ny, coarse_grid.nx)

    per_state = []
    for s in fine_states:
        if np.any(s.rho <= 0):
            raise ValueError("ensemble atoms need positive density")
        per_state.append(
            (atoms_of(s.rho), atoms_of(s.z / s.rho),
             np.stack([atoms_of(s.mom[0] / s.rho), atoms_of(s.mom[1] / s.rho)]))
        )
    rho = np.concatenate([p[0] for p in per_state], axis=0)
    theta = np.concatenate([p[1] for p in per_state], axis=0)
    u = np.concatenate([p[2] for p in per_state], axis=1)
    K = rho.shape[0]
    w = np.full((K,) + coarse_grid.shape, 1.0 / K)
    return MeasureField(coarse_grid, w, rho, theta, u)


@dataclass(frozen=True)
class DefectFields:
    """Energy (E), accumulated dissipation (D) and Reynolds (R) defects.

    The trace-compatibility constants d_lo <= d_hi tie tr(R) to E cellwise;
    the defaults (1, d) are a configurable artifact choice.
    """

    grid: Grid2D
    E: np.ndarray  # (ny, nx)
    D: np.ndarray  # (ny, nx), accumulated over [0, t]
    R: np.ndarray  # (2, 2, ny, nx), symmetric PSD
    d_lo: float = 1.0
    d_hi: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.d_lo <= self.d_hi:
            raise ValueError("need 0 < d_lo <= d_hi")
        if self.E.shape != self.grid.shape or self.D.shape != self.grid.shape:
            raise ValueError("defect fields must match the grid")
        if self.R.shape != (2, 2) + self.grid.shape:
            raise ValueError("Reynolds defect must have shape (2, 2, ny, nx)")


def zero_defects(grid: Grid2D, d_lo: float = 1.0, d_hi: float = 2.0) -> DefectFields:
    return DefectFields(
        grid,
        np.zeros(grid.shape),
        np.zeros(grid.shape),
        np.zeros((2, 2) + grid.shape),
        d_lo,
        d_hi,
    )


def infer_defects(mf: MeasureField, params: FluidParams) -> DefectFields:
    """Energy-gap defects of an ensemble: E is the expectation of the total
    energy minus the energy of the conserved-variable barycenter, and R is
    the velocity second-moment gap <rho u x u> - m x m / rho."""
    rho_bar = expectation_field(mf, "rho", params)
    m_bar = expectation_field(mf, "mom", params)
    z_bar = expectation_field(mf, "rhotheta", params)
    if np.any(rho_bar <= 0):
        raise ValueError("barycenter density must be positive to infer defects")
    bary_energy = 0.5 * np.sum(m_bar**2, axis=0) / rho_bar + pressure_potential_of_rhotheta(
        z_bar, params
    )
    E = expectation_field(mf, "total_energy", params) - bary_energy
    R = expectation_field(mf, "momflux", params) - m_bar[:, None] * m_bar[None, :] / rho_bar
    return DefectFields(mf.grid, E, np.zeros(mf.grid.shape), R, 1.0, float(params.d))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(self.violations)


def validate(
    mf: MeasureField,
    defects: DefectFields | None,
    params: FluidParams,
    tol: float = 1e-12,
) -> ValidationReport:
    """Check every admissibility invariant; violations are returned, not raised."""
    bad = []

    def cell_of(flat_idx, shape):
        j, i = np.unravel_index(flat_idx, shape)
        return int(i), int(j)

    sums = np.sum(mf.weights, axis=0)
    off = np.abs(sums - 1.0) > WEIGHT_TOL * mf.n_atoms
    if np.any(off):
        i, j = cell_of(int(np.argmax(np.abs(sums - 1.0))), sums.shape)
        bad.append(f"cell ({i},{j}): atom weights sum to {sums[j, i]!r}")
    neg_rho = np.min(mf.rho, axis=0)
    if np.any(neg_rho < 0):
        i, j = cell_of(int(np.argmin(neg_rho)), neg_rho.shape)
        bad.append(f"cell ({i},{j}): atom density {neg_rho[j, i]} < 0")
    min_theta = np.min(mf.theta, axis=0)
    if np.any(min_theta < params.c_star):
        i, j = cell_of(int(np.argmin(min_theta)), min_theta.shape)
        bad.append(
            f"cell ({i},{j}): atom theta {min_theta[j, i]} below the floor {params.c_star}"
        )

    if defects is None:
        return ValidationReport(tuple(bad))

    if np.any(defects.E < -tol):
        i, j = cell_of(int(np.argmin(defects.E)), defects.E.shape)
        bad.append(f"cell ({i},{j}): energy defect {defects.E[j, i]} < 0")
    if np.any(defects.D < -tol):
        i, j = cell_of(int(np.argmin(defects.D)), defects.D.shape)
        bad.append(f"cell ({i},{j}): dissipation defect {defects.D[j, i]} < 0")

    R = defects.R
    scale = np.max(np.abs(R)) if np.max(np.abs(R)) > 0 else 1.0
    asym = np.abs(R[0, 1] - R[1, 0])
    if np.any(asym > tol * scale):
        i, j = cell_of(int(np.argmax(asym)), asym.shape)
        bad.append(f"cell ({i},{j}): Reynolds defect is not symmetric")
    tr = R[0, 0] + R[1, 1]
    det = R[0, 0] * R[1, 1] - 0.25 * (R[0, 1] + R[1, 0]) ** 2
    psd_bad = (tr < -tol * scale) | (det < -tol * scale**2)
    if np.any(psd_bad):
        i, j = cell_of(int(np.argmax(psd_bad)), psd_bad.shape)
        bad.append(f"cell ({i},{j}): Reynolds defect is not positive semi-definite")
    escale = np.maximum(1.0, np.abs(defects.E))
    lo_bad = tr < defects.d_lo * defects.E - tol * escale
    hi_bad = tr > defects.d_hi * defects.E + tol * escale
    if np.any(lo_bad):
        i, j = cell_of(int(np.argmax(lo_bad)), lo_bad.shape)
        bad.append(
            f"cell ({i},{j}): tr(R) = {tr[j, i]} below d_lo*E = {defects.d_lo * defects.E[j, i]}"
        )
    if np.any(hi_bad):
        i, j = cell_of(int(np.argmax(hi_bad)), hi_bad.shape)
        bad.append(
            f"cell ({i},{j}): tr(R) = {tr[j, i]} above d_hi*E = {defects.d_hi * defects.E[j, i]}"
        )
    return ValidationReport(tuple(bad))


def dump_measure_csv(mf: MeasureField, path) -> None:
    """Write `cell_i,cell_j,atom_k,weight,rho,theta,ux,uy` rows."""
    with open(path, "w") as fh:
        fh.write("cell_i,cell_j,atom_k,weight,rho,theta,ux,uy\n")
        for j in range(mf.grid.ny):
            for i in range(mf.grid.nx):
                for k in range(mf.n_atoms):
                    vals = (
                        mf.weights[k, j, i],
                        mf.rho[k, j, i],
                        mf.theta[k, j, i],
                        mf.u[0, k, j, i],
                        mf.u[1, k, j, i],
                    )
                    fh.write(f"{i},{j},{k}," + ",".join(f"{v:.17g}" for v in vals) + "\n")


def dump_defects_csv(defects: DefectFields, path) -> None:
    """Write `x,y,E,D,R11,R12,R22` rows, row-major by cell index."""
    g = defects.grid
    X, Y = g.centers()
    cols = [X, Y, defects.E, defects.D, defects.R[0, 0], defects.R[0, 1], defects.R[1, 1]]
    flat = [c.reshape(-1) for c in cols]
    with open(path, "w") as fh:
        fh.write("x,y,E,D,R11,R12,R22\n")
        for k in range(g.nx * g.ny):
            fh.write(",".join(f"{c[k]:.17g}" for c in flat) + "\n")
