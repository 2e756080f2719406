"""Rectangle rule corrections for integrands with a power singularity at 0.

For ``phi`` smooth and ``gamma > -1`` the one-dimensional rule that skips
the node at the origin satisfies the generalized Euler-Maclaurin
expansion

    int |t|^gamma phi(t) dt = D sum_{k != 0} |k D|^gamma phi(k D)
                              - 2 sum_j zeta(-gamma - 2j) phi^(2j)(0) / (2j)! D^(1 + gamma + 2j)

so subtracting the first few terms removes the cusp error.  For
``gamma = 2n`` the zeta factors vanish and nothing is added.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import zeta


def even_derivatives(values: np.ndarray, center: int, step: float) -> tuple[float, float, float]:
    """``phi(0), phi''(0), phi''''(0)`` from a 1D sample array by central differences."""
    v = np.asarray(values)
    n = v.size
    w = [v[(center + k) % n] for k in (-3, -2, -1, 0, 1, 2, 3)]
    m3, m2, m1, z, p1, p2, p3 = w
    d2 = (-m2 + 16 * m1 - 30 * z + 16 * p1 - p2) / (12 * step**2)
    d4 = (-m3 + 12 * m2 - 39 * m1 + 56 * z - 39 * p1 + 12 * p2 - p3) / (6 * step**4)
    return z, d2, d4


def cusp_correction(gamma: float, step: float, phi0, phi2, phi4=0.0):
    """Amount to add to the origin-skipping rectangle sum of ``|t|^gamma phi(t)``."""
    if gamma <= -1:
        raise ValueError("gamma must exceed -1")
    if float(gamma).is_integer() and gamma >= 0 and int(gamma) % 2 == 0:
        return 0.0 * phi0
    terms = (
        2 * zeta(-gamma) * phi0 * step ** (1 + gamma),
        zeta(-gamma - 2) * phi2 * step ** (3 + gamma),
        zeta(-gamma - 4) / 12 * phi4 * step ** (5 + gamma),
    )
    return -sum(terms)


def omitted_ball(gamma: float, dim: int, cell_volume: float) -> float:
    """``int |t|^gamma`` over the ball with the volume of one grid cell."""
    unit = math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)
    r = (cell_volume / unit) ** (1 / dim)
    sphere = dim * unit
    return sphere * r ** (gamma + dim) / (gamma + dim)
