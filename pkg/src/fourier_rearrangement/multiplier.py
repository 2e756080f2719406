"""Radial Fourier multipliers and their quadratic forms.

Every catalog symbol is a function of the angular wavenumber
``k = |2 pi xi|`` so that ``FractionalLaplacian(1)`` is exactly ``-Delta``
under the ``exp(-2 pi i x.xi)`` convention.

=====================  ===========================================  ========
kind                   symbol omega(k)                              growth s
=====================  ===========================================  ========
fractional_laplacian   k^(2s)                                       s
bessel                 (1 + k^2)^(s/2)                              s/2
polyharmonic           sum_i c_i k^(2 s_i),  c_i >= 0               max s_i
ilw                    k^(2s) coth(k^(2s)),  1 at k = 0             s
whitham                1 - sqrt(tanh(h k) / k),  1 - sqrt(h) at 0   0
custom                 user profile, validated on the grid          given
=====================  ===========================================  ========
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .errors import ContractError, GridMismatchError
from .grid import Field, GridSpec, Space, forward_transform
from .rearrange import radial_order, symmetric_decreasing_rearrange

__all__ = [
    "Multiplier",
    "fractional_laplacian",
    "bessel_power",
    "polyharmonic",
    "ilw",
    "whitham",
    "custom",
    "catalog",
    "multiplier_from_dict",
    "quadratic_form",
    "sobolev_norm",
    "rearrangement_energy_gap",
    "NotStrictlyIncreasingWarning",
]


class NotStrictlyIncreasingWarning(UserWarning):
    """Symbol has ties between distinct radii; equality classification is weakened."""


def _ilw_profile(s: float):
    def omega(k):
        x = k ** (2 * s)
        out = np.ones_like(x)
        nz = x > 0
        out[nz] = x[nz] / np.tanh(x[nz])
        return out

    return omega


def _whitham_profile(h: float):
    def omega(k):
        ratio = np.full_like(k, h)
        nz = k > 0
        ratio[nz] = np.tanh(h * k[nz]) / k[nz]
        return 1.0 - np.sqrt(ratio)

    return omega


@dataclass(frozen=True, eq=False)
class Multiplier:
    """Radial nondecreasing symbol ``omega(|2 pi xi|)``.

    Construct through the catalog helpers (:func:`fractional_laplacian`,
    :func:`polyharmonic`, ...) rather than directly.  ``spec`` optionally
    binds the multiplier to one grid; a bound multiplier refuses fields
    from any other grid.
    """

    kind: str
    params: dict
    growth_s: float
    profile: Callable[[NDArray], NDArray] = field(repr=False)
    spec: GridSpec | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def bind(self, spec: GridSpec) -> "Multiplier":
        bound = Multiplier(self.kind, self.params, self.growth_s, self.profile, spec)
        bound.symbol(spec)
        return bound

    def symbol(self, spec: GridSpec | None = None) -> NDArray[np.float64]:
        """Cached ``omega`` on the frequency nodes of ``spec`` (read-only)."""
        if spec is None:
            if self.spec is None:
                raise ContractError("unbound multiplier needs a grid")
            spec = self.spec
        elif self.spec is not None and spec != self.spec:
            raise GridMismatchError("multiplier is bound to a different grid")
        if spec not in self._cache:
            self._cache[spec] = self._evaluate(spec)
        return self._cache[spec]

    def _evaluate(self, spec: GridSpec) -> NDArray[np.float64]:
        k = 2.0 * np.pi * spec.radius(Space.FREQUENCY)
        vals = np.asarray(self.profile(k), dtype=np.float64)
        if vals.shape != k.shape or not np.all(np.isfinite(vals)):
            raise ContractError(f"{self.kind} symbol is not finite on the grid")
        if np.any(vals < 0):
            raise ContractError(f"{self.kind} symbol takes negative values on the grid")
        order = radial_order(spec, Space.FREQUENCY)
        along = vals.ravel()[order.permutation]
        shells = order.shells()
        # radial: constant on every shell
        for a, b in zip(shells[:-1], shells[1:]):
            if b - a > 1 and np.ptp(along[a:b]) != 0:
                raise ContractError(f"{self.kind} symbol is not radial on the grid")
        heads = along[shells[:-1]]
        steps = np.diff(heads)
        if np.any(steps < 0):
            raise ContractError(f"{self.kind} symbol is not nondecreasing in |xi|")
        if np.any(steps == 0):
            warnings.warn(
                f"{self.kind} symbol has ties between distinct radii on this grid",
                NotStrictlyIncreasingWarning,
                stacklevel=3,
            )
        vals.setflags(write=False)
        return vals

    def is_strict(self, spec: GridSpec | None = None) -> bool:
        """Strictly increasing across the radial shells of the grid."""
        spec = spec or self.spec
        vals = self.symbol(spec)
        order = radial_order(spec, Space.FREQUENCY)
        heads = vals.ravel()[order.permutation][order.shells()[:-1]]
        return bool(np.all(np.diff(heads) > 0))

    def growth_constant(self, spec: GridSpec | None = None) -> float:
        """Smallest ``C`` with ``omega(xi) <= C (1 + |xi|^(2s))`` on the grid nodes."""
        spec = spec or self.spec
        vals = self.symbol(spec)
        r = spec.radius(Space.FREQUENCY)
        return float(np.max(vals / (1.0 + r ** (2 * self.growth_s))))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


def fractional_laplacian(s: float) -> Multiplier:
    if s < 0:
        raise ContractError("s must be >= 0")
    return Multiplier("fractional_laplacian", {"s": float(s)}, float(s), lambda k: k ** (2 * s))


def bessel_power(s: float) -> Multiplier:
    """Symbol of ``(-Delta + 1)^(s/2)``."""
    if s < 0:
        raise ContractError("s must be >= 0")
    return Multiplier("bessel", {"s": float(s)}, float(s) / 2, lambda k: (1.0 + k * k) ** (s / 2))


def polyharmonic(terms) -> Multiplier:
    """``sum_i c_i (-Delta)^(s_i)`` from pairs ``(c_i, s_i)``; e.g. ``[(1, 2), (beta, 1)]`` is ``Delta^2 - beta Delta``."""
    terms = [(float(c), float(s)) for c, s in terms]
    if not terms:
        raise ContractError("polyharmonic needs at least one term")
    if any(c < 0 or s < 0 for c, s in terms):
        raise ContractError("polyharmonic coefficients and powers must be >= 0")

    def omega(k):
        return sum(c * k ** (2 * s) for c, s in terms)

    growth = max(s for c, s in terms if c > 0) if any(c > 0 for c, _ in terms) else 0.0
    return Multiplier("polyharmonic", {"terms": [list(t) for t in terms]}, growth, omega)


def ilw(s: float) -> Multiplier:
    if s <= 0:
        raise ContractError("s must be > 0")
    return Multiplier("ilw", {"s": float(s)}, float(s), _ilw_profile(s))


def whitham(h: float) -> Multiplier:
    """Whitham symbol; nonnegative only for ``0 < h <= 1``."""
    if not 0 < h <= 1:
        raise ContractError("whitham depth h must lie in (0, 1] for a nonnegative symbol")
    return Multiplier("whitham", {"h": float(h)}, 0.0, _whitham_profile(h))


def custom(profile: Callable[[NDArray], NDArray], growth_s: float = 0.0, name: str = "custom") -> Multiplier:
    """User symbol given as a function of the wavenumber ``k = |2 pi xi|``."""
    return Multiplier("custom", {"name": name}, float(growth_s), profile)


def catalog() -> list[Multiplier]:
    """One representative of every built-in family."""
    return [
        fractional_laplacian(1.0),
        bessel_power(2.0),
        polyharmonic([(1.0, 2.0), (0.5, 1.0)]),
        ilw(0.5),
        whitham(1.0),
    ]


def multiplier_from_dict(cfg: dict) -> Multiplier:
    """Build from a JSON-style description such as ``{"kind": "polyharmonic", "terms": [[1, 2], [0.5, 1]]}``."""
    kind = str(cfg.get("kind", "")).lower()
    try:
        if kind in ("fractional_laplacian", "laplacian"):
            return fractional_laplacian(float(cfg.get("s", 1.0)))
        if kind in ("bessel", "bessel_power"):
            return bessel_power(float(cfg["s"]))
        if kind == "polyharmonic":
            return polyharmonic(cfg["terms"])
        if kind == "biharmonic":
            return polyharmonic([(1.0, 2.0), (float(cfg.get("beta", 0.0)), 1.0)])
        if kind == "ilw":
            return ilw(float(cfg["s"]))
        if kind == "whitham":
            return whitham(float(cfg["h"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"bad multiplier description {cfg!r}: {exc}") from exc
    raise ContractError(f"unknown multiplier kind {kind!r}")


def _spectrum(f: Field) -> NDArray:
    if f.space == Space.FREQUENCY:
        return f.values
    return forward_transform(f).values


def quadratic_form(f: Field, L: Multiplier) -> float:
    """``<f, L f> = int omega(xi) |f^(xi)|^2 dxi`` by the frequency rectangle rule."""
    omega = L.symbol(f.spec)
    fhat = _spectrum(f)
    return float(np.sum(omega * np.abs(fhat) ** 2) * f.spec.cell_volume(Space.FREQUENCY))


def sobolev_norm(f: Field, s: float, split: bool = False) -> float:
    """``H^s`` norm; ``split`` uses ``||(-Delta)^(s/2) f||^2 + ||f||^2`` instead of the Bessel weight."""
    if s < 0:
        raise ContractError("s must be >= 0")
    k2 = (2.0 * np.pi) ** 2 * f.spec.squared_radius(Space.FREQUENCY)
    weight = 1.0 + k2**s if split else (1.0 + k2) ** s
    fhat = _spectrum(f)
    return float(np.sqrt(np.sum(weight * np.abs(fhat) ** 2) * f.spec.cell_volume(Space.FREQUENCY)))


def rearrangement_energy_gap(f: Field, L: Multiplier) -> float:
    """``<f, L f> - <f#, L f#>``, evaluated on the spectrum (never negative beyond rounding)."""
    omega = L.symbol(f.spec)
    fhat = Field(f.spec, Space.FREQUENCY, _spectrum(f))
    star = symmetric_decreasing_rearrange(fhat).values.real
    dxi = f.spec.cell_volume(Space.FREQUENCY)
    return float(np.sum(omega * (np.abs(fhat.values) ** 2 - star**2)) * dxi)
