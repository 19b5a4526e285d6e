"""Dense small-grid assembly and eigenvalue analysis.

Reproduces the saddle-operator and Schur-complement spectrum studies:
operators are assembled column-by-column with unit vectors, and the
preconditioned Schur spectrum is obtained from the similar symmetric
matrix V^{1/2} S V^{1/2} with V the diagonal viscous Schur approximation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._exact import MAX_DENSE_DOFS, face_operator_matrix, probe_columns
from .grid import (
    GridSpec,
    pack_cell,
    pack_face,
    pack_stokes,
    unpack_cell,
    unpack_face,
    unpack_stokes,
)
from .operators import CoefficientSet, apply_M, div, grad
from .schur import schur_diagonal

#: dense matrices are plain float arrays; rows/columns follow the packed
#: unknown-DOF order of :mod:`stokesmg.grid` (velocity components first,
#: axis-major within each block, then pressure).
DenseMatrix = np.ndarray

MAX_SPECTRUM_CELLS = 1024  # full spectra capped at 32x32


def _space_size(grid: GridSpec, space: str) -> int:
    if space == "cell":
        return grid.n_cell_unknowns()
    if space == "face":
        return sum(grid.n_face_unknowns(a) for a in range(grid.dim))
    if space == "stokes":
        return grid.n_unknowns()
    raise ValueError(f"unknown space {space!r}")


_PACK = {"cell": pack_cell, "face": pack_face, "stokes": pack_stokes}
_UNPACK = {"cell": unpack_cell, "face": unpack_face, "stokes": unpack_stokes}


def assemble_dense(operator, grid: GridSpec, domain: str = "stokes",
                   codomain: str = "stokes") -> DenseMatrix:
    """Assemble a linear field operator by probing with unit vectors.

    ``operator`` maps a field of the ``domain`` space to one of the
    ``codomain`` space ('cell', 'face' or 'stokes'); column j of the result
    is the packed image of the j-th unit vector.
    """
    n = _space_size(grid, domain)
    if n > MAX_DENSE_DOFS:
        raise ValueError(f"{n} unknowns exceed dense cap {MAX_DENSE_DOFS}")
    unpack = _UNPACK[domain]
    pack = _PACK[codomain]
    return probe_columns(lambda v: pack(operator(unpack(grid, v))), n)


def sym_eigenvalues(A: DenseMatrix) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending.

    Rejects inputs whose asymmetry exceeds 1e-10 relative to the largest
    entry.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("need a square matrix")
    scale = max(np.abs(A).max(), 1.0)
    if np.abs(A - A.T).max() > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    return np.sort(scipy.linalg.eigvalsh(0.5 * (A + A.T)))


@dataclass
class SpectrumReport:
    """Sorted eigenvalues plus the clustering statistics of the study."""

    which: str
    n_dof: int
    eigenvalues: np.ndarray
    tol_zero: float
    tol_unit: float
    zero_multiplicity: int = 0
    non_unit_count: int = 0
    nonpositive_count: int = 0
    min_nonzero: float = 0.0
    max_nonzero: float = 0.0
    frac_near_unit: float = 0.0
    histogram_counts: list = field(default_factory=list)
    histogram_edges: list = field(default_factory=list)

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=np.float64)
        self.eigenvalues = np.sort(lam)
        nz = self.eigenvalues[np.abs(self.eigenvalues) > self.tol_zero]
        self.zero_multiplicity = int(np.sum(np.abs(self.eigenvalues) <= self.tol_zero))
        self.non_unit_count = int(np.sum(np.abs(self.eigenvalues - 1.0) > self.tol_unit))
        self.nonpositive_count = int(np.sum(self.eigenvalues <= self.tol_zero))
        if len(nz):
            self.min_nonzero = float(nz.min())
            self.max_nonzero = float(nz.max())
            self.frac_near_unit = float(np.mean((nz > 0.99) & (nz < 1.01)))
        if not self.histogram_counts:
            counts, edges = np.histogram(self.eigenvalues, bins=50)
            self.histogram_counts = counts.tolist()
            self.histogram_edges = edges.tolist()

    def to_dict(self) -> dict:
        return {
            "which": self.which,
            "n_dof": self.n_dof,
            "n_eigenvalues": len(self.eigenvalues),
            "tol_zero": self.tol_zero,
            "tol_unit": self.tol_unit,
            "zero_multiplicity": self.zero_multiplicity,
            "non_unit_count": self.non_unit_count,
            "nonpositive_count": self.nonpositive_count,
            "min_nonzero": self.min_nonzero,
            "max_nonzero": self.max_nonzero,
            "frac_near_unit": self.frac_near_unit,
            "histogram_counts": self.histogram_counts,
            "histogram_edges": self.histogram_edges,
            "eigenvalues": self.eigenvalues.tolist(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def schur_complement_matrix(grid: GridSpec, coeff: CoefficientSet) -> DenseMatrix:
    """S = -D A^{-1} G as a dense matrix (steady small grids)."""
    from ._exact import _null_shift
    from .operators import velocity_null_components

    A = face_operator_matrix(grid, coeff)
    nulls = []
    offsets = np.cumsum([0] + [grid.n_face_unknowns(a) for a in range(grid.dim)])
    for a in velocity_null_components(grid, coeff):
        v = np.zeros(A.shape[0])
        v[offsets[a]: offsets[a + 1]] = 1.0 / np.sqrt(grid.n_face_unknowns(a))
        nulls.append(v)
    A = _null_shift(A, nulls)
    G = assemble_dense(lambda p: grad(p), grid, domain="cell", codomain="face")
    D = assemble_dense(lambda u: div(u), grid, domain="face", codomain="cell")
    return -D @ np.linalg.solve(A, G)


def analyze_stokes_spectrum(grid: GridSpec, coeff: CoefficientSet,
                            which: str) -> SpectrumReport:
    """Spectrum of M, of S, or of the preconditioned product.

    ``which`` is one of ``M``, ``S`` or ``precondS``.  The Schur analyses
    require steady flow; the preconditioned spectrum is computed from
    V^{1/2} S V^{1/2}, similar to V S with V the diagonal Schur inverse.
    """
    if grid.n_cell_unknowns() > MAX_SPECTRUM_CELLS:
        raise ValueError(
            f"{grid.n_cell_unknowns()} cells exceed spectrum cap {MAX_SPECTRUM_CELLS}"
        )
    if which == "M":
        M = assemble_dense(lambda x: apply_M(x, coeff), grid)
        lam = sym_eigenvalues(M)
        n_dof = grid.n_unknowns()
    elif which in ("S", "precondS"):
        if coeff.theta != 0:
            raise ValueError("Schur spectrum analysis is defined for steady flow")
        S = schur_complement_matrix(grid, coeff)
        if which == "precondS":
            w = np.sqrt(schur_diagonal(coeff).ravel(order="F"))
            S = w[:, None] * S * w[None, :]
        lam = sym_eigenvalues(S)
        n_dof = grid.n_cell_unknowns()
    else:
        raise ValueError(f"unknown analysis {which!r}; use M, S or precondS")
    tol_zero = 1e-8 * float(np.abs(lam).max())
    return SpectrumReport(which=which, n_dof=n_dof, eigenvalues=lam,
                          tol_zero=tol_zero, tol_unit=1e-8)
