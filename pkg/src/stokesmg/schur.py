"""Approximate inverse of the Schur complement.

The approximation combines the density-weighted Poisson solve for the
inertial part with a pressure-space viscosity diagonal chosen per viscous
form: mu for the Laplacian form, 2 mu for the stress form and
gamma + 4/3 mu when bulk viscosity is present.  For constant coefficients
on periodic grids these choices invert the Schur complement exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .grid import CellField
from .operators import (
    LAPLACIAN,
    STRESS,
    STRESS_BULK,
    CoefficientSet,
    div,
    grad,
)


class SchurSign(enum.Enum):
    MINUS = "minus"
    PLUS = "plus"


MINUS = SchurSign.MINUS
PLUS = SchurSign.PLUS


@dataclass(frozen=True)
class SchurConfig:
    sign: SchurSign = MINUS
    pressure_cycles: int = 1

    def __post_init__(self):
        if self.pressure_cycles < 1:
            raise ValueError("need at least one pressure cycle")


def schur_diagonal(coeff: CoefficientSet) -> np.ndarray:
    """Cell array of the local viscous part of the Schur inverse."""
    form = coeff.viscous_form
    if form is LAPLACIAN:
        return coeff.mu_cell.data
    if form is STRESS:
        return 2.0 * coeff.mu_cell.data
    if form is STRESS_BULK:
        return coeff.gamma_cell.data + (4.0 / 3.0) * coeff.mu_cell.data
    raise ValueError(f"unknown viscous form {form}")


def apply_schur_inv(
    r: CellField,
    coeff: CoefficientSet,
    cfg: SchurConfig,
    pressure_solve=None,
) -> CellField:
    """Approximate S^{-1} r = -theta * Lrho^{-1} r + V r.

    ``pressure_solve`` supplies the (inexact or exact) Poisson inverse and
    is only consulted for unsteady flow; steady applications are purely
    diagonal and never touch a Poisson solver.
    """
    if coeff.theta > 0:
        if pressure_solve is None:
            raise ValueError("unsteady Schur inverse needs a pressure solver")
        phi = pressure_solve(r)
        data = -coeff.theta * phi.data + schur_diagonal(coeff) * r.data
    else:
        data = schur_diagonal(coeff) * r.data
    return CellField(r.grid, data)


def exact_schur_apply(p: CellField, coeff: CoefficientSet, face_solver=None) -> CellField:
    """Reference -D A^{-1} G p via dense factorization (small grids only).

    Pass a prebuilt :class:`stokesmg._exact.DenseFaceSolver` to amortize the
    factorization over repeated applications.
    """
    from ._exact import DenseFaceSolver

    if face_solver is None:
        face_solver = DenseFaceSolver(p.grid, coeff)
    u = face_solver.solve(grad(p))
    return -div(u)
