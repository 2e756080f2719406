"""Symmetric-decreasing rearrangement on grids and the Fourier rearrangement.

The discrete rearrangement is a pure value permutation: the moduli are
sorted in decreasing order and written onto the nodes in *radial order*
(ascending radius, ties broken by the lexicographically smallest
coordinate tuple).  No tied values are averaged, so the multiset of
moduli is preserved bit for bit.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import ContractError, InternalConsistencyError
from .grid import Field, GridSpec, Space, forward_transform, inverse_transform, l2_norm

__all__ = [
    "RadialOrder",
    "RearrangeReport",
    "radial_order",
    "symmetric_decreasing_rearrange",
    "fourier_rearrange",
    "partial_fourier_rearrange",
    "is_rearranged_fixed_point",
    "rearrange_report",
    "imaginary_residual_bound",
    "is_shell_sorted",
]


@dataclass(frozen=True)
class RadialOrder:
    """Node permutation sorted by radius, then by coordinate tuple.

    Attributes:
        spec: Grid the order belongs to.
        space: Which coordinates (physical or frequency) define the radius.
        permutation: Flat C-order node indices; ``permutation[0]`` is the origin.
        squared_radius: ``|x|^2`` along the permutation (nondecreasing).
    """

    spec: GridSpec
    space: Space
    permutation: NDArray[np.intp]
    squared_radius: NDArray[np.float64]

    def shells(self) -> NDArray[np.intp]:
        """Start offsets (into ``permutation``) of each group of equal radius, plus the end."""
        r2 = self.squared_radius
        breaks = np.flatnonzero(np.diff(r2) != 0) + 1
        return np.concatenate(([0], breaks, [r2.size]))


@functools.lru_cache(maxsize=64)
def radial_order(spec: GridSpec, space: Space = Space.FREQUENCY) -> RadialOrder:
    r2 = spec.squared_radius(space).ravel()
    ks = [k.ravel() for k in spec.index_mesh()]
    # np.lexsort uses the last key as primary
    perm = np.lexsort(tuple(reversed(ks)) + (r2,))
    perm.setflags(write=False)
    r2_sorted = r2[perm]
    r2_sorted.setflags(write=False)
    return RadialOrder(spec, Space(space), perm, r2_sorted)


def _rearranged_moduli(values: NDArray, order: RadialOrder) -> NDArray[np.float64]:
    mod = np.abs(values).ravel()
    out = np.empty_like(mod)
    out[order.permutation] = np.sort(mod)[::-1]
    return out.reshape(values.shape)


def symmetric_decreasing_rearrange(g: Field) -> Field:
    """Sorted moduli of ``g`` placed on the nodes in radial order (same space tag)."""
    order = radial_order(g.spec, g.space)
    return g.with_values(_rearranged_moduli(g.values, order))


def imaginary_residual_bound(f: Field) -> float:
    """Largest imaginary part a Fourier rearrangement may carry before it counts as complex."""
    return 1e-10 * l2_norm(f) * np.sqrt(f.spec.size)


def fourier_rearrange(f: Field, *, strict_real: bool = False) -> Field:
    """``F^-1 (F f)^*`` on the grid.

    When the rearranged spectrum is even up to rounding (the imaginary part
    of the result is below :func:`imaginary_residual_bound`) the imaginary
    part is zeroed.  For generic inputs the tie-break places different
    values on ``xi`` and ``-xi``; the result is then genuinely complex and
    is returned as such unless ``strict_real`` is set, in which case an
    :class:`InternalConsistencyError` is raised.
    """
    if f.space != Space.PHYSICAL:
        raise ContractError("fourier_rearrange expects a physical field")
    spectrum = symmetric_decreasing_rearrange(forward_transform(f))
    out = inverse_transform(spectrum)
    imag = float(np.max(np.abs(out.values.imag))) if out.values.size else 0.0
    if imag <= imaginary_residual_bound(f):
        return out.with_values(out.values.real)
    if strict_real:
        raise InternalConsistencyError(
            f"imaginary residual {imag:.3e} exceeds bound {imaginary_residual_bound(f):.3e}"
        )
    return out


def partial_fourier_rearrange(f: Field, axis: int = 0) -> Field:
    """Rearrange ``|f^|`` over the remaining ``d-1`` frequency axes for each fixed ``xi_axis``."""
    spec = f.spec
    if f.space != Space.PHYSICAL:
        raise ContractError("partial_fourier_rearrange expects a physical field")
    if spec.dim < 2:
        raise ContractError("partial rearrangement needs d >= 2")
    if not 0 <= axis < spec.dim:
        raise ContractError(f"axis {axis} out of range for d={spec.dim}")
    fhat = forward_transform(f).values
    moved = np.moveaxis(fhat, axis, 0)
    rest = [a for a in range(spec.dim) if a != axis]
    slice_spec = GridSpec(
        tuple(spec.points[a] for a in rest), tuple(spec.half_width[a] for a in rest)
    )
    order = radial_order(slice_spec, Space.FREQUENCY)
    out = np.empty(moved.shape, dtype=np.float64)
    for i in range(moved.shape[0]):
        out[i] = _rearranged_moduli(moved[i], order)
    spectrum = Field(spec, Space.FREQUENCY, np.moveaxis(out, 0, axis))
    result = inverse_transform(spectrum)
    if np.max(np.abs(result.values.imag)) <= imaginary_residual_bound(f):
        return result.with_values(result.values.real)
    return result


def is_rearranged_fixed_point(f: Field, tol: float) -> bool:
    """True iff ``||f - f#|| <= tol ||f||`` (the zero field counts as a fixed point)."""
    if tol <= 0:
        raise ContractError("tol must be positive")
    norm = l2_norm(f)
    if norm == 0.0:
        return True
    return l2_norm(f - fourier_rearrange(f)) <= tol * norm


@dataclass(frozen=True)
class RearrangeReport:
    input_l2: float
    output_l2: float
    moduli_preserved: bool


def rearrange_report(g: Field, out: Field) -> RearrangeReport:
    """Equimeasurability audit of a rearrangement ``g -> out`` (same space)."""
    a = np.sort(np.abs(g.values).ravel())
    b = np.sort(np.abs(out.values).ravel())
    return RearrangeReport(l2_norm(g), l2_norm(out), bool(np.array_equal(a, b)))


def is_shell_sorted(values: NDArray, order: RadialOrder, rtol: float = 1e-8) -> bool:
    """Whether ``|values|`` is nonincreasing across radial shells.

    Within a shell (nodes of equal radius) any arrangement is accepted;
    between shells the smallest modulus of an inner shell must dominate
    the largest modulus of the next shell up to ``rtol * max|values|``.
    """
    mod = np.abs(values).ravel()[order.permutation]
    if mod.size == 0:
        return True
    slack = rtol * float(mod.max())
    b = order.shells()
    mins = np.minimum.reduceat(mod, b[:-1])
    maxs = np.maximum.reduceat(mod, b[:-1])
    return bool(np.all(mins[:-1] + slack >= maxs[1:]))
