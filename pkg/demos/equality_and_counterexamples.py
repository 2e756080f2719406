"""
When does equality hold?
========================

A translated Gaussian with a constant phase is recovered exactly from its
classification report.  Two spectral bumps far apart carry independent
phases without changing the L4 norm, and for p = 3 the majorant property
fails already for three-term trigonometric polynomials.
"""
import math

import numpy as np

from fourier_rearrangement import GridSpec, Field, fourier_rearrange, l2_norm
from fourier_rearrangement.majorant import (
    affine_reconstruction,
    classify_equality,
    disconnected_equality_example,
    littlewood_counterexample,
    littlewood_search,
)
from fourier_rearrangement.multiplier import fractional_laplacian

grid = GridSpec.uniform(1, 257, 16.0)
h = grid.spacing[0]
f = Field.sample(grid, lambda x: np.exp(0.3j) * np.exp(-np.pi * (x - 4 * h) ** 2))
rep = classify_equality(f, fractional_laplacian(1.0), 4)
print(rep.verdict, "x0/h =", rep.x0[0] / h, "alpha =", rep.alpha)
rec = affine_reconstruction(fourier_rearrange(f), rep.alpha, rep.beta)
print("reconstruction error:", l2_norm(rec - f) / l2_norm(f))

ex = disconnected_equality_example(6.0, 0.0, math.pi / 2)
print("two bumps:", ex.report.verdict, "L4 gap", ex.l4_gap, "phase residual", ex.report.phase_residual)

for p in (3, 4):
    s = littlewood_search(p)
    print(f"p={p}: best sign pattern gap {s.best_gap:+.3e}")
    for pattern, gap in sorted(s.gaps.items(), key=lambda kv: -kv[1])[:3]:
        print("   ", pattern, f"{gap:+.3e}")
for lam in (1 / 16, 1 / 64, 1 / 256):
    print(f"line transfer lam={lam:.5f}: relative gap {littlewood_counterexample(3, lam).relative_gap:.6f}")
