"""dmvflow: finite-volume compressible flow with potential temperature
transport, and measure-valued relative-energy diagnostics on top of it."""

from .fields import ConservedState, Grid2D, ScalarField, TensorField, VectorField
from .kernels import backend_name as kernel_backend
from .measures import Atom, CellMeasure, DefectFields, MeasureField
from .solver import PositivityError, SolverConfig, Trajectory
from .strong import StrongSolution, constant_strong_solution, manufactured_strong_solution
from .thermo import FluidParams, ThermoPoint

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "kernel_backend",
    "FluidParams",
    "ThermoPoint",
    "Grid2D",
    "ScalarField",
    "VectorField",
    "TensorField",
    "ConservedState",
    "SolverConfig",
    "Trajectory",
    "PositivityError",
    "Atom",
    "CellMeasure",
    "MeasureField",
    "DefectFields",
    "StrongSolution",
    "constant_strong_solution",
    "manufactured_strong_solution",
]
