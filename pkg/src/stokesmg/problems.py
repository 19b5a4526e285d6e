"""Test-problem generators.

Constant-coefficient and bubble coefficient fields, random consistent
right-hand sides with known solutions, and the viscous-CFL
parameterization of the inertial coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import CellField, GridSpec, StokesVector
from .operators import (
    STRESS,
    CoefficientSet,
    ViscousForm,
    apply_M,
    average_cell_to_faces,
    average_cell_to_node_edge,
    make_coefficients,
    velocity_null_components,
)

#: bit-generator identifier recorded in output metadata for reproducibility
PRNG_NAME = "philox4x64-10"


def _generators(seed: int, n_streams: int):
    seqs = np.random.SeedSequence(int(seed)).spawn(n_streams)
    return [np.random.Generator(np.random.Philox(s)) for s in seqs]


@dataclass(frozen=True)
class BubbleSpec:
    """Smoothed sphere/disk of one fluid embedded in another.

    The coefficient profile is ``(r+1)/2 + (r-1)/2 * tanh(d/eps) + 0.1 R``
    with ``d`` the signed distance to the interface (positive outside by
    default, so the ambient phase carries the contrast factor) and ``R``
    per-cell uniform noise on (0, 1).  ``epsilon`` and ``radius`` default
    to the grid spacing and a quarter of the domain length.
    """

    r_mu: float = 100.0
    r_rho: float = 100.0
    epsilon: float | None = None
    radius: float | None = None
    noise_amp: float = 0.1
    seed: int = 0
    positive_outside: bool = True

    def __post_init__(self):
        if self.r_mu < 1 or self.r_rho < 1:
            raise ValueError("contrast ratios must be >= 1")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("smoothing width must be positive")


def bubble_profile(grid: GridSpec, r: float, spec: BubbleSpec,
                   noise: np.ndarray | None) -> np.ndarray:
    coords = grid.cell_centers()
    center = [0.5 * L for L in grid.lengths]
    radius = spec.radius if spec.radius is not None else 0.25 * max(grid.lengths)
    eps = spec.epsilon if spec.epsilon is not None else grid.h
    d = np.sqrt(sum((x - c) ** 2 for x, c in zip(coords, center))) - radius
    if not spec.positive_outside:
        d = -d
    f = 0.5 * (r + 1.0) + 0.5 * (r - 1.0) * np.tanh(d / eps)
    if noise is not None:
        f = f + spec.noise_amp * noise
    return f


def bubble_coefficients(
    grid: GridSpec,
    spec: BubbleSpec,
    theta: float = 0.0,
    viscous_form: ViscousForm = STRESS,
    mu0: float = 1.0,
    rho0: float = 1.0,
    gamma0: float = 0.0,
) -> CoefficientSet:
    """Bubble viscosity/density fields with independent noise streams."""
    gen_mu, gen_rho = _generators(spec.seed, 2)
    noise_mu = gen_mu.random(grid.cells) if spec.noise_amp else None
    noise_rho = gen_rho.random(grid.cells) if spec.noise_amp else None
    mu = CellField(grid, mu0 * bubble_profile(grid, spec.r_mu, spec, noise_mu))
    rho = CellField(grid, rho0 * bubble_profile(grid, spec.r_rho, spec, noise_rho))
    gamma = CellField.full(grid, gamma0) if gamma0 else CellField.zeros(grid)
    return make_coefficients(grid, theta, rho, mu, gamma, viscous_form)


def bubble_density(grid: GridSpec, spec: BubbleSpec, rho0: float = 1.0) -> CellField:
    """Only the density field of the bubble problem (for inviscid runs).

    Draws from the same noise stream as :func:`bubble_coefficients`, so a
    given seed describes one bubble across the whole viscous-CFL sweep.
    """
    _, gen_rho = _generators(spec.seed, 2)
    noise = gen_rho.random(grid.cells) if spec.noise_amp else None
    return CellField(grid, rho0 * bubble_profile(grid, spec.r_rho, spec, noise))


def constant_coefficients(
    grid: GridSpec,
    mu0: float = 1.0,
    rho0: float = 1.0,
    theta: float = 0.0,
    viscous_form: ViscousForm = STRESS,
    gamma0: float = 0.0,
) -> CoefficientSet:
    """Uniform coefficient fields (averaging reproduces the constants)."""
    gamma = CellField.full(grid, gamma0) if gamma0 else CellField.zeros(grid)
    return make_coefficients(
        grid, theta, CellField.full(grid, rho0), CellField.full(grid, mu0),
        gamma, viscous_form,
    )


def inviscid_coefficients(grid: GridSpec, rho_cell: CellField,
                          theta: float = 1.0) -> CoefficientSet:
    """A = theta*rho only; the viscous operator vanishes identically."""
    zero = CellField.zeros(grid)
    return CoefficientSet(
        theta=theta,
        rho_cell=rho_cell,
        rho_face=average_cell_to_faces(rho_cell),
        mu_cell=zero,
        mu_node_edge=average_cell_to_node_edge(zero),
        gamma_cell=CellField.zeros(grid),
        viscous_form=STRESS,
    )


@dataclass(frozen=True)
class CflSpec:
    """Viscous CFL number beta = mu0 / (theta rho0 h^2).

    ``beta = inf`` is the steady limit (theta = 0); ``beta = 0`` the
    inviscid limit (mu = 0 with theta from a unit time step).
    """

    beta: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("viscous CFL number must be >= 0")

    @property
    def steady(self) -> bool:
        return math.isinf(self.beta)

    @property
    def inviscid(self) -> bool:
        return self.beta == 0.0


def cfl_to_theta(spec: CflSpec, mu0: float, rho0: float, h: float) -> float:
    """Invert beta = mu0 / (theta rho0 h^2) for theta."""
    if spec.steady:
        return 0.0
    if spec.inviscid:
        return 1.0
    return mu0 / (spec.beta * rho0 * h * h)


def project_nulls(x: StokesVector, coeff: CoefficientSet) -> StokesVector:
    """Remove the pressure constant and any velocity constants from x."""
    out = x.copy()
    out.p.data -= out.p.data.mean()
    for a in velocity_null_components(x.grid, coeff):
        view = out.u.interior(a)
        view -= view.mean()
    return out


def make_rhs(grid: GridSpec, coeff: CoefficientSet, seed: int = 0):
    """Random consistent right-hand side with its known solution.

    Draws ``x_exact`` in the unknown space from a seeded Philox stream,
    projects out null components (a degenerate draw is resampled from the
    next substream), and returns ``(M x_exact, x_exact)``.
    """
    gens = _generators(seed, 4)
    for gen in gens:
        x = StokesVector.zeros(grid)
        for a in range(grid.dim):
            view = x.u.interior(a)
            view[...] = gen.standard_normal(view.shape)
        x.p.data[...] = gen.standard_normal(grid.cells)
        x = project_nulls(x, coeff)
        from .grid import norm2

        if norm2(x) > 1e-8 * math.sqrt(grid.n_unknowns()):
            return apply_M(x, coeff), x
    raise RuntimeError("could not draw a nondegenerate solution")
