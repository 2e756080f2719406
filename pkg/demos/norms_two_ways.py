"""
Norms evaluated twice
=====================

Every even Lp norm can be read off a chain of convolutions in frequency
space.  Weighted and Choquard norms have a physical and a spectral route;
here both routes are printed next to each other.
"""
import math

import numpy as np

from fourier_rearrangement import GridSpec, Field, forward_transform
from fourier_rearrangement.functionals import (
    WeightSpec,
    amt_functional,
    choquard_norm,
    choquard_norm_direct,
    lp_even_fourier,
    lp_norm,
    weighted_norm_check,
)

grid = GridSpec.uniform(1, 513, 16.0)
g = Field.sample(grid, lambda x: np.exp(-np.pi * x**2))

for m in (1, 2, 3):
    print(f"||g||_{2*m}^{2*m}: quadrature {lp_norm(g, 2*m) ** (2*m):.15f}  convolution {lp_even_fourier(forward_transform(g), m):.15f}")

for w in (WeightSpec.bessel(2.0), WeightSpec.riesz(0.5)):
    chk = weighted_norm_check(g, 2, w)
    print(f"{w.kind:6s} weight: physical {chk.physical:.12f}  fourier {chk.fourier:.12f}  gap {chk.gap:.1e}")

# Choquard: refine both steps together
for n in (129, 257, 513):
    spec = GridSpec.uniform(1, n, math.sqrt(n) / 2)
    f = Field.sample(spec, lambda x: np.exp(-np.pi * x**2) * (1 + x))
    a, b = choquard_norm(f, 2, 0.5), choquard_norm_direct(f, 2, 0.5)
    print(f"Choquard N={n}: fourier {a:.12f}  double sum {b:.12f}  rel gap {abs(a - b) / b:.1e}")

r = amt_functional(g, 1.0, 30)
print("AMT direct", r.direct, "series", r.series, "tail bound", r.tail_bound)
