"""Eigenvalue structure of the Schur complement, before and after
preconditioning.

At 16^2 with no-slip walls the raw saddle operator has a wide indefinite
spectrum, while the viscosity-scaled Schur product clusters at one: a single
zero mode (the pressure constant), at most 4(n-1) non-unit eigenvalues, and
everything inside (0, 1] for constant viscosity.
"""

import numpy as np

from stokesmg import (
    NO_SLIP,
    BubbleSpec,
    GridSpec,
    analyze_stokes_spectrum,
    bubble_coefficients,
    constant_coefficients,
)

n = 16
grid = GridSpec((n, n), 1.0, ((NO_SLIP, NO_SLIP),) * 2)

print(f"--- constant viscosity, {n}x{n} no-slip ---")
coeff = constant_coefficients(grid)
rep_m = analyze_stokes_spectrum(grid, coeff, "M")
print(f"saddle operator M: {rep_m.n_dof} DOFs, "
      f"{rep_m.nonpositive_count} nonpositive eigenvalues (= number of cells)")

rep = analyze_stokes_spectrum(grid, coeff, "precondS")
print(f"preconditioned Schur: zero multiplicity {rep.zero_multiplicity}, "
      f"{rep.non_unit_count} non-unit (bound 4(n-1) = {4 * (n - 1)}), "
      f"nonzero range ({rep.min_nonzero:.4f}, {rep.max_nonzero:.10f}]")

print(f"\n--- bubble viscosity, contrast 100 ---")
coeff = bubble_coefficients(grid, BubbleSpec(r_mu=100, r_rho=100, seed=0))
rep = analyze_stokes_spectrum(grid, coeff, "precondS")
print(f"nonzero range ({rep.min_nonzero:.4f}, {rep.max_nonzero:.4f}], "
      f"{100 * rep.frac_near_unit:.1f}% of eigenvalues within (0.99, 1.01)")

edges = np.asarray(rep.histogram_edges)
counts = np.asarray(rep.histogram_counts)
peak = counts.max()
print("\nhistogram:")
for lo, hi, c in zip(edges[:-1], edges[1:], counts):
    if c:
        bar = "#" * max(1, int(40 * c / peak))
        print(f"  [{lo:6.3f}, {hi:6.3f}) {c:4d} {bar}")
