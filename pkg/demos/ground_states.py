"""
Ground states with a rearrangement step
=======================================

Petviashvili iteration for L Q + Q = Q^3 where every iterate is replaced
by its Fourier rearrangement.  For L = -Laplacian the answer is the
sech soliton; for the bilaplacian the ground state oscillates in sign
but keeps a nonnegative transform.
"""
import math

import numpy as np

from fourier_rearrangement import GridSpec, Field
from fourier_rearrangement.functionals import GNParams
from fourier_rearrangement.multiplier import fractional_laplacian
from fourier_rearrangement.solver import SolverConfig, ground_state, minimize_weinstein

grid = GridSpec.uniform(1, 1025, 20 * math.pi)

res = ground_state(SolverConfig(grid, fractional_laplacian(1.0)))
soliton = Field.sample(grid, lambda x: math.sqrt(2) / np.cosh(x))
print("soliton: iterations", res.iterations, "residual", res.residual,
      "sup error", np.max(np.abs(res.Q.values - soliton.values)))

bi = ground_state(SolverConfig(grid, fractional_laplacian(2.0)))
for k, v in bi.diagnostics().items():
    print(f"  biharmonic {k:26s} {v}")

for s in (1.0, 2.0):
    w = minimize_weinstein(GNParams(1, s, 4), grid)
    print(f"sharp constant C(1,{s:g},4) = {w.sharp_constant:.12f}")
