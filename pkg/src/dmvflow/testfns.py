"""Closed-form test functions for the weak-form and entropy residuals.

Scalar entries supply value, time derivative and spatial gradient; vector
entries (for the momentum identity) additionally carry the full Jacobian.
Momentum test functions must vanish on the boundary, which the residual
code enforces through the ``zero_boundary`` flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["ScalarTestFn", "VectorTestFn", "SCALAR_TESTFNS", "VECTOR_TESTFNS", "get_scalar", "get_vector"]


@dataclass(frozen=True)
class ScalarTestFn:
    name: str
    value: Callable  # (t, X, Y) -> (...)
    dt: Callable
    grad: Callable  # (t, X, Y) -> (2, ...)
    nonnegative: bool
    zero_boundary: bool


@dataclass(frozen=True)
class VectorTestFn:
    name: str
    value: Callable  # (t, X, Y) -> (2, ...)
    dt: Callable
    grad: Callable  # (t, X, Y) -> (2, 2, ...), [a, b] = d phi_a / d x_b
    zero_boundary: bool


def _bubble_parts(lx, ly):
    def b(X, Y):
        return 16.0 * (X / lx) * (1.0 - X / lx) * (Y / ly) * (1.0 - Y / ly)

    def bx(X, Y):
        return 16.0 / lx * (1.0 - 2.0 * X / lx) * (Y / ly) * (1.0 - Y / ly)

    def by(X, Y):
        return 16.0 / ly * (X / lx) * (1.0 - X / lx) * (1.0 - 2.0 * Y / ly)

    return b, bx, by


def make_catalog(lx: float, ly: float):
    """Build the catalog for a given domain size."""
    b, bx, by = _bubble_parts(lx, ly)

    def zero_s(t, X, Y):
        return np.zeros_like(np.asarray(X, dtype=float))

    def zero_v(t, X, Y):
        X = np.asarray(X, dtype=float)
        return np.zeros((2,) + X.shape)

    scalars = {
        "one": ScalarTestFn(
            "one",
            lambda t, X, Y: np.ones_like(np.asarray(X, dtype=float)),
            zero_s,
            zero_v,
            nonnegative=True,
            zero_boundary=False,
        ),
        "space_bubble": ScalarTestFn(
            "space_bubble",
            lambda t, X, Y: b(X, Y),
            zero_s,
            lambda t, X, Y: np.stack([bx(X, Y), by(X, Y)]),
            nonnegative=True,
            zero_boundary=True,
        ),
        "spacetime_bubble": ScalarTestFn(
            "spacetime_bubble",
            lambda t, X, Y: (1.0 + t) * b(X, Y),
            lambda t, X, Y: b(X, Y),
            lambda t, X, Y: (1.0 + t) * np.stack([bx(X, Y), by(X, Y)]),
            nonnegative=True,
            zero_boundary=True,
        ),
    }

    def vb_value(t, X, Y):
        base = b(X, Y)
        return np.stack([(1.0 + 0.5 * t) * base, (1.0 - 0.25 * t) * base])

    def vb_dt(t, X, Y):
        base = b(X, Y)
        return np.stack([0.5 * base, -0.25 * base])

    def vb_grad(t, X, Y):
        gx, gy = bx(X, Y), by(X, Y)
        out = np.empty((2, 2) + np.shape(gx))
        out[0, 0] = (1.0 + 0.5 * t) * gx
        out[0, 1] = (1.0 + 0.5 * t) * gy
        out[1, 0] = (1.0 - 0.25 * t) * gx
        out[1, 1] = (1.0 - 0.25 * t) * gy
        return out

    vectors = {
        "vbubble": VectorTestFn("vbubble", vb_value, vb_dt, vb_grad, zero_boundary=True),
        "constant_vec": VectorTestFn(
            "constant_vec",
            lambda t, X, Y: np.stack([np.ones_like(np.asarray(X, dtype=float)),
                                      np.ones_like(np.asarray(X, dtype=float))]),
            zero_v,
            lambda t, X, Y: np.zeros((2, 2) + np.shape(np.asarray(X))),
            zero_boundary=False,
        ),
    }
    return scalars, vectors


def get_scalar(name: str, lx: float, ly: float) -> ScalarTestFn:
    scalars, _ = make_catalog(lx, ly)
    try:
        return scalars[name]
    except KeyError:
        raise ValueError(f"unknown scalar test function {name!r}; have {sorted(scalars)}") from None


def get_vector(name: str, lx: float, ly: float) -> VectorTestFn:
    _, vectors = make_catalog(lx, ly)
    try:
        return vectors[name]
    except KeyError:
        raise ValueError(f"unknown vector test function {name!r}; have {sorted(vectors)}") from None


SCALAR_TESTFNS = ("one", "space_bubble", "spacetime_bubble")
VECTOR_TESTFNS = ("vbubble", "constant_vec")
