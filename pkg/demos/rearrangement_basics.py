"""
Fourier rearrangement of a moving wave packet
=============================================

A Gaussian that is translated and modulated has the same spectral modulus
as the centred Gaussian, so its rearrangement is the centred Gaussian.
"""
import numpy as np

from fourier_rearrangement import GridSpec, Field, fourier_rearrange, l2_norm
from fourier_rearrangement.multiplier import catalog, quadratic_form, rearrangement_energy_gap

grid = GridSpec.uniform(1, 257, 16.0)
h = grid.spacing[0]
x = grid.mesh()[0]

# packet centred at 9h carrying a plane wave
packet = Field.physical(grid, np.exp(2j * np.pi * 7 * grid.freq_spacing[0] * x) * np.exp(-np.pi * (x - 9 * h) ** 2))
sharp = fourier_rearrange(packet)
centred = np.exp(-np.pi * x**2)
print("max |f# - G|      :", np.max(np.abs(sharp.values - centred)))
print("L2 norms f, f#    :", l2_norm(packet), l2_norm(sharp))

# energies can only go down
rng = np.random.default_rng(0)
noisy = Field.physical(grid, packet.values + 0.1 * rng.standard_normal(grid.shape))
for L in catalog():
    E = quadratic_form(noisy, L)
    print(f"{L.kind:22s} <f,Lf> = {E:12.6f}   gap = {rearrangement_energy_gap(noisy, L):.6e}")
