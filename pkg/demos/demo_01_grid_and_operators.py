"""Tour of the staggered grid and its discrete operators.

Builds a small MAC grid, shows where the fields live, and verifies the
structural identities the whole solver rests on: the divergence is the
negative adjoint of the gradient, their product is the five-point pressure
Laplacian, and the saddle operator is self-adjoint.
"""

import numpy as np

from stokesmg import (
    NO_SLIP,
    PERIODIC,
    CellField,
    FaceField,
    GridSpec,
    StokesVector,
    apply_M,
    div,
    dot,
    grad,
    lap_pressure,
    make_coefficients,
    norm2,
)

rng = np.random.default_rng(0)

# An 8x8 box with no-slip walls.  Pressure lives at cell centers; the u and
# v velocity components live on x- and y-faces, boundary faces included.
grid = GridSpec((8, 8), h=0.25, bc=((NO_SLIP, NO_SLIP), (NO_SLIP, NO_SLIP)))
print("cells:", grid.cells)
print("u faces:", grid.face_shape(0), " v faces:", grid.face_shape(1))
print("unknown DOFs:", grid.n_unknowns())

p = CellField(grid, rng.standard_normal(grid.cells))
u = FaceField.zeros(grid)
for axis in range(2):
    view = u.interior(axis)
    view[...] = rng.standard_normal(view.shape)

# D = -G*: the discrete integration-by-parts identity.
lhs = dot(grad(p), u)
rhs = -dot(p, div(u))
print(f"\n<G p, u> = {lhs:+.6e}")
print(f"-<p, D u> = {rhs:+.6e}   (difference {abs(lhs - rhs):.2e})")

# D G = L_p bit-exactly, by construction.
print("D G == L_p exactly:",
      np.array_equal(div(grad(p)).data, lap_pressure(p).data))

# The full saddle operator with variable coefficients stays symmetric.
mu = CellField(grid, 1.0 + rng.random(grid.cells))
rho = CellField(grid, 1.0 + rng.random(grid.cells))
coeff = make_coefficients(grid, theta=1.0, rho_cell=rho, mu_cell=mu)
x = StokesVector(u, p)
y = StokesVector.zeros(grid)
for axis in range(2):
    view = y.u.interior(axis)
    view[...] = rng.standard_normal(view.shape)
y.p.data[...] = rng.standard_normal(grid.cells)
print(f"<M x, y> - <x, M y> = "
      f"{dot(apply_M(x, coeff), y) - dot(x, apply_M(y, coeff)):+.2e}")

# Periodic grids make every constant invisible to the stencils.
per = GridSpec((8, 8), h=0.25, bc=((PERIODIC, PERIODIC),) * 2)
const = FaceField(per, tuple(np.full(per.face_shape(a), 3.0) for a in range(2)))
print("div of a constant velocity field:", norm2(div(const)))
