"""Norms and energies: Lp, weighted Lp, Choquard, Hormander, AMT and Weinstein.

Even-exponent norms have a second evaluation route that never leaves
frequency space: ``|f|^(2m) = f^m conj(f)^m`` so its transform is a chain
of circular convolutions of ``f^`` and ``conj(f^(-xi))``.  On the grid
this identity is exact, which makes the two routes mutual oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy import signal, special

from . import _singular
from .errors import ContractError, NumericalOverflowError
from .grid import Field, GridSpec, Space, forward_transform, l2_norm
from .multiplier import fractional_laplacian, quadratic_form

__all__ = [
    "WeightSpec",
    "GNParams",
    "AMTResult",
    "WeightedNormCheck",
    "critical_exponent",
    "circular_convolve",
    "power_spectrum",
    "lp_norm",
    "lp_even_fourier",
    "weighted_lp_norm",
    "weighted_lp_norm_fourier",
    "weighted_norm_check",
    "riesz_constant",
    "choquard_norm",
    "choquard_norm_direct",
    "hormander_norm",
    "amt_functional",
    "weinstein",
]


# --- convolution machinery ------------------------------------------------


def _fold(full: NDArray, shape: tuple[int, ...]) -> NDArray:
    """Wrap a full linear convolution of two centered arrays back onto the torus."""
    out = full
    for axis, n in enumerate(shape):
        m = (n - 1) // 2
        length = out.shape[axis]
        # full index i has centered coordinate i - 2m
        target = (np.arange(length) - 2 * m + m) % n
        moved = np.moveaxis(out, axis, 0)
        acc = np.zeros((n,) + moved.shape[1:], dtype=out.dtype)
        np.add.at(acc, target, moved)
        out = np.moveaxis(acc, 0, axis)
    return out


def circular_convolve(a: NDArray, b: NDArray, method: str = "fft") -> NDArray:
    """``c[k] = sum_j a[j] b[k - j]`` on centered periodic index sets.

    Args:
        a: Centered array, odd length on every axis.
        b: Array of the same shape.
        method: ``"fft"`` or ``"direct"`` (passed to :func:`scipy.signal.convolve`).

    Returns:
        Array of the same shape as the inputs.
    """
    if a.shape != b.shape:
        raise ContractError("convolution operands must share a shape")
    full = signal.convolve(a, b, mode="full", method=method)
    return _fold(full, a.shape)


def _reflect_conj(fhat: NDArray) -> NDArray:
    """Samples of the transform of ``conj(f)``: ``conj(f^(-xi))``."""
    return np.conj(fhat[tuple(slice(None, None, -1) for _ in fhat.shape)])


def _require_frequency(fhat: Field):
    if fhat.space != Space.FREQUENCY:
        raise ContractError("expected a frequency field")


def power_spectrum(fhat: Field, m: int, method: str = "fft") -> NDArray:
    """Samples of the transform of ``|f|^(2m)`` built by ``2m - 1`` convolutions.

    Each convolution is scaled by the frequency cell volume immediately so
    intermediate arrays stay comparable in size to the transforms
    themselves.
    """
    _require_frequency(fhat)
    if int(m) != m or m < 1:
        raise ContractError("m must be a positive integer")
    dxi = fhat.spec.cell_volume(Space.FREQUENCY)
    a = dxi * circular_convolve(fhat.values, _reflect_conj(fhat.values), method)
    out = a
    for _ in range(int(m) - 1):
        out = dxi * circular_convolve(out, a, method)
        if not np.all(np.isfinite(out)):
            raise NumericalOverflowError("convolution chain overflowed")
    return out


def lp_even_fourier(fhat: Field, m: int, method: str = "fft") -> float:
    """``||f||_{2m}^{2m}`` from the frequency samples alone."""
    spec = fhat.spec
    chain = power_spectrum(fhat, m, method)
    value = chain[spec.origin_index()].real
    if not np.isfinite(value):
        raise NumericalOverflowError("convolution chain overflowed")
    return float(value)


# --- plain and weighted Lp ------------------------------------------------


def lp_norm(f: Field, p: float) -> float:
    """Rectangle-rule ``L^p`` norm in the field's own space; ``p = inf`` gives the max modulus."""
    if not p >= 1:
        raise ContractError("p must be >= 1")
    mod = np.abs(f.values)
    if math.isinf(p):
        return float(mod.max())
    scale = mod.max()
    if scale == 0:
        return 0.0
    # factor out the max to keep large p finite
    total = np.sum((mod / scale) ** p) * f.spec.cell_volume(f.space)
    return float(scale * total ** (1.0 / p))


@dataclass(frozen=True)
class WeightSpec:
    """Radial weight for ``int |f|^p w``.

    ``riesz`` is ``|x|^(-alpha)`` with ``0 < alpha < d``; ``bessel`` is
    ``(1 + |x|^2)^(-alpha/2)`` with ``alpha >= 0`` (``alpha = 0`` is the
    trivial weight).  ``custom`` takes radial profiles for ``w`` and its
    transform ``w^``.
    """

    kind: str
    alpha: float = 0.0
    weight: Callable[[NDArray], NDArray] | None = None
    fourier: Callable[[NDArray], NDArray] | None = None

    def __post_init__(self):
        if self.kind not in ("riesz", "bessel", "custom"):
            raise ContractError(f"unknown weight kind {self.kind!r}")
        if self.kind == "bessel" and not self.alpha >= 0:
            raise ContractError("bessel weight needs alpha >= 0")
        if self.kind == "riesz" and not self.alpha > 0:
            raise ContractError("riesz weight needs alpha > 0")
        if self.kind == "custom" and (self.weight is None or self.fourier is None):
            raise ContractError("custom weight needs both profiles")

    @classmethod
    def riesz(cls, alpha: float) -> "WeightSpec":
        return cls("riesz", alpha)

    @classmethod
    def bessel(cls, alpha: float) -> "WeightSpec":
        return cls("bessel", alpha)

    def validate(self, dim: int):
        if self.kind == "riesz" and not 0 < self.alpha < dim:
            raise ContractError(f"riesz alpha must lie in (0, {dim})")

    def physical(self, r: NDArray) -> NDArray:
        if self.kind == "riesz":
            safe = np.where(r > 0, r, 1.0)
            return np.where(r > 0, safe ** (-self.alpha), np.inf)
        if self.kind == "bessel":
            return (1.0 + r * r) ** (-self.alpha / 2)
        return np.asarray(self.weight(r), dtype=float)


def riesz_constant(alpha: float, dim: int) -> float:
    """``c`` in ``F[|x|^(-alpha)] = c |xi|^(alpha - d)`` for ``0 < alpha < d``."""
    return math.pi ** (alpha - dim / 2) * math.gamma((dim - alpha) / 2) / math.gamma(alpha / 2)


def _bessel_fourier(alpha: float, dim: int, rho: NDArray) -> NDArray:
    """Transform of ``(1 + |x|^2)^(-alpha/2)`` at ``|xi| = rho > 0``."""
    a = alpha / 2
    nu = a - dim / 2
    z = 2 * np.pi * rho
    return 2 * np.pi ** (dim / 2) / math.gamma(a) * (np.pi * rho) ** nu * special.kv(nu, z)


def weighted_lp_norm(f: Field, p: int, w: WeightSpec, *, correct: bool = True) -> float:
    """``(int |f|^p w dx)^(1/p)`` by the physical rectangle rule.

    For the Riesz weight the origin node is skipped; in one dimension the
    skipped-cusp error is removed with :func:`cusp_correction` unless
    ``correct`` is false.
    """
    _check_even(p)
    spec = f.spec
    w.validate(spec.dim)
    if f.space != Space.PHYSICAL:
        raise ContractError("weighted_lp_norm expects a physical field")
    u = np.abs(f.values) ** p
    if w.kind == "bessel" and w.alpha == 0:
        return lp_norm(f, p)
    r = spec.radius(Space.PHYSICAL)
    if w.kind != "riesz":
        total = np.sum(u * w.physical(r)) * spec.cell_volume(Space.PHYSICAL)
        return float(total ** (1 / p))
    mask = r > 0
    total = np.sum(u[mask] * r[mask] ** (-w.alpha)) * spec.cell_volume(Space.PHYSICAL)
    if correct:
        total += _origin_correction(u, -w.alpha, spec, Space.PHYSICAL)
    return float(max(total, 0.0) ** (1 / p))


def _origin_correction(phi: NDArray, gamma: float, spec: GridSpec, space: Space) -> float:
    """Cusp correction at the origin for ``|t|^gamma phi`` (1D) or the omitted-cell estimate."""
    center = spec.origin_index()
    if spec.dim == 1:
        step = spec.steps(space)[0]
        phi0, phi2, phi4 = _singular.even_derivatives(phi, center[0], step)
        return float(np.real(_singular.cusp_correction(gamma, step, phi0, phi2, phi4)))
    return float(np.real(phi[center]) * _singular.omitted_ball(gamma, spec.dim, spec.cell_volume(space)))


def weighted_lp_norm_fourier(f: Field, p: int, w: WeightSpec, *, correct: bool = True) -> float:
    """Same quantity as :func:`weighted_lp_norm`, computed as ``int F[|f|^p] w^ dxi``."""
    _check_even(p)
    spec = f.spec
    w.validate(spec.dim)
    fhat = forward_transform(f) if f.space == Space.PHYSICAL else f
    G = power_spectrum(fhat, p // 2)
    if w.kind == "bessel" and w.alpha == 0:
        return float(max(G[spec.origin_index()].real, 0.0) ** (1 / p))
    rho = spec.radius(Space.FREQUENCY)
    dxi = spec.cell_volume(Space.FREQUENCY)
    mask = rho > 0
    if w.kind == "custom":
        total = np.sum(G * w.fourier(rho)).real * dxi
        return float(max(total, 0.0) ** (1 / p))
    if w.kind == "riesz":
        c = riesz_constant(w.alpha, spec.dim)
        gamma = w.alpha - spec.dim
        total = c * np.sum(G[mask] * rho[mask] ** gamma).real * dxi
        if correct:
            total += c * _origin_correction(G, gamma, spec, Space.FREQUENCY)
        return float(max(total, 0.0) ** (1 / p))
    # bessel
    what = _bessel_fourier(w.alpha, spec.dim, np.where(mask, rho, 1.0))
    total = np.sum((G * what)[mask]).real * dxi
    total += _bessel_origin(G, w.alpha, spec, correct)
    return float(max(total, 0.0) ** (1 / p))


def _bessel_origin(G: NDArray, alpha: float, spec: GridSpec, correct: bool) -> float:
    """Origin node plus cusp terms for the Bessel kernel transform.

    With ``nu = (alpha - d)/2`` and ``K_nu = pi/2 (I_-nu - I_nu)/sin(nu pi)``
    the kernel transform splits into an even power series plus
    ``|xi|^(2 nu)`` times another even power series; only the second part
    needs a cusp correction.
    """
    d = spec.dim
    a = alpha / 2
    nu = a - d / 2
    center = spec.origin_index()
    dxi = spec.cell_volume(Space.FREQUENCY)
    g0 = G[center].real
    if float(nu).is_integer():
        if nu > 0:
            return float(dxi * g0 * math.pi ** (d / 2) * math.gamma(nu) / math.gamma(a))
        return 0.0
    c2 = 2 * math.pi ** (d / 2) / math.gamma(a) * math.pi / (2 * math.sin(nu * math.pi))
    total = dxi * g0 * c2 / special.gamma(1 - nu)
    if not correct:
        return float(total)
    if d > 1:
        if nu < 0:
            lead = -c2 * math.pi ** (2 * nu) / special.gamma(nu + 1)
            total += g0 * lead * _singular.omitted_ball(2 * nu, d, dxi)
        return float(total)
    step = spec.freq_spacing[0]
    G0, G2, G4 = _singular.even_derivatives(G, center[0], step)
    o0 = 1 / special.gamma(nu + 1)
    o2 = 2 * math.pi**2 / special.gamma(nu + 2)
    o4 = 12 * math.pi**4 / special.gamma(nu + 3)
    k = -c2 * math.pi ** (2 * nu)
    phi0 = k * G0 * o0
    phi2 = k * (G2 * o0 + G0 * o2)
    phi4 = k * (G4 * o0 + 6 * G2 * o2 + G0 * o4)
    total += float(np.real(_singular.cusp_correction(2 * nu, step, phi0, phi2, phi4)))
    return float(total)


@dataclass(frozen=True)
class WeightedNormCheck:
    physical: float
    fourier: float
    gap: float


def weighted_norm_check(f: Field, p: int, w: WeightSpec, *, correct: bool = True) -> WeightedNormCheck:
    """Both routes of the weighted norm and their relative disagreement."""
    a = weighted_lp_norm(f, p, w, correct=correct)
    b = weighted_lp_norm_fourier(f, p, w, correct=correct)
    gap = abs(a - b) / max(abs(a), abs(b)) if max(a, b) > 0 else 0.0
    return WeightedNormCheck(a, b, gap)


def _check_even(p):
    if int(p) != p or p < 2 or int(p) % 2:
        raise ContractError(f"p must be an even integer >= 2, got {p}")


# --- Choquard -------------------------------------------------------------


def _check_choquard(f: Field, p, alpha):
    _check_even(p)
    if not 0 < alpha < f.spec.dim:
        raise ContractError(f"alpha must lie in (0, {f.spec.dim})")
    if f.space != Space.PHYSICAL:
        raise ContractError("choquard_norm expects a physical field")


def choquard_norm(f: Field, p: int, alpha: float, *, correct: bool = True) -> float:
    """``(int int |f(x)|^p |f(y)|^p |x - y|^(-alpha))^(1/(2p))`` via ``c int |F[|f|^p]|^2 |xi|^(alpha-d)``.

    The origin frequency node is skipped; the skipped-cusp error is
    corrected in 1D and estimated by the omitted cell otherwise.
    """
    _check_choquard(f, p, alpha)
    spec = f.spec
    G = power_spectrum(forward_transform(f), p // 2)
    phi = np.abs(G) ** 2
    rho = spec.radius(Space.FREQUENCY)
    gamma = alpha - spec.dim
    mask = rho > 0
    total = np.sum(phi[mask] * rho[mask] ** gamma) * spec.cell_volume(Space.FREQUENCY)
    if correct:
        total += _origin_correction(phi, gamma, spec, Space.FREQUENCY)
    total *= riesz_constant(alpha, spec.dim)
    return float(max(total, 0.0) ** (1 / (2 * p)))


def choquard_norm_direct(f: Field, p: int, alpha: float, *, correct: bool = True) -> float:
    """Physical double sum over node pairs with the diagonal removed.

    ``O(N_tot^2)`` memory; intended as an oracle on modest grids.  In 1D
    each row gets the cusp correction for its skipped diagonal node.
    """
    _check_choquard(f, p, alpha)
    spec = f.spec
    u = (np.abs(f.values) ** p).ravel()
    pts = np.stack([m.ravel() for m in spec.mesh(Space.PHYSICAL)], axis=-1)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    np.fill_diagonal(dist, 1.0)
    kern = dist ** (-alpha)
    np.fill_diagonal(kern, 0.0)
    h = spec.cell_volume(Space.PHYSICAL)
    inner = h * (kern @ u)
    if correct:
        if spec.dim == 1:
            step = spec.spacing[0]
            z = np.roll(u, 0)
            d2 = (-np.roll(u, 2) + 16 * np.roll(u, 1) - 30 * z + 16 * np.roll(u, -1) - np.roll(u, -2)) / (12 * step**2)
            d4 = (
                -np.roll(u, 3) + 12 * np.roll(u, 2) - 39 * np.roll(u, 1) + 56 * z
                - 39 * np.roll(u, -1) + 12 * np.roll(u, -2) - np.roll(u, -3)
            ) / (6 * step**4)
            inner = inner + _singular.cusp_correction(-alpha, step, u, d2, d4)
        else:
            inner = inner + u * _singular.omitted_ball(-alpha, spec.dim, h)
    total = h * float(np.dot(u, inner))
    return float(max(total, 0.0) ** (1 / (2 * p)))


# --- Hormander, AMT, Weinstein --------------------------------------------


def hormander_norm(f: Field, s: float, p: float) -> float:
    """``||(1 + |xi|^2)^(s/2) f^||`` in ``L^(p')`` over frequency space, ``1/p + 1/p' = 1``."""
    if not p >= 1:
        raise ContractError("p must be >= 1")
    if s < 0:
        raise ContractError("s must be >= 0")
    fhat = forward_transform(f) if f.space == Space.PHYSICAL else f
    weighted = (1.0 + fhat.spec.squared_radius(Space.FREQUENCY)) ** (s / 2) * np.abs(fhat.values)
    if p == 1:
        q = math.inf
    elif math.isinf(p):
        q = 1.0
    else:
        q = p / (p - 1)
    return lp_norm(fhat.with_values(weighted), q)


@dataclass(frozen=True)
class AMTResult:
    """Both evaluations of ``int (exp(alpha |u|^2) - 1)``.

    Attributes:
        direct: Rectangle rule applied to ``expm1(alpha |u|^2)``.
        series: ``sum_{n <= trunc} alpha^n / n! ||u||_{2n}^{2n}``.
        tail_bound: Upper bound on the omitted series terms.
        terms: The individual series terms.
    """

    direct: float
    series: float
    tail_bound: float
    terms: tuple[float, ...]


def amt_functional(u: Field, alpha: float, trunc: int, route: str = "fourier") -> AMTResult:
    """Adams-Moser-Trudinger functional by direct quadrature and by its power series.

    Args:
        u: Physical field.
        alpha: Exponent parameter, positive.
        trunc: Number of series terms kept.
        route: ``"fourier"`` evaluates the even norms by convolution chains,
            ``"quadrature"`` by :func:`lp_norm`.
    """
    if alpha <= 0:
        raise ContractError("alpha must be positive")
    if int(trunc) != trunc or trunc < 1:
        raise ContractError("trunc must be a positive integer")
    if u.space != Space.PHYSICAL:
        raise ContractError("amt_functional expects a physical field")
    spec = u.spec
    mod2 = np.abs(u.values) ** 2
    peak = float(mod2.max())
    if alpha * peak > 700:
        raise NumericalOverflowError("alpha * max|u|^2 too large for double precision")
    direct = float(np.sum(np.expm1(alpha * mod2)) * spec.cell_volume(Space.PHYSICAL))
    if peak == 0:
        return AMTResult(0.0, 0.0, 0.0, (0.0,) * int(trunc))
    terms = []
    if route == "fourier":
        fhat = forward_transform(u).values
        dxi = spec.cell_volume(Space.FREQUENCY)
        a = dxi * circular_convolve(fhat, _reflect_conj(fhat))
        chain = a
        center = spec.origin_index()
        for n in range(1, int(trunc) + 1):
            if n > 1:
                chain = dxi * circular_convolve(chain, a)
            terms.append(alpha**n / math.factorial(n) * float(chain[center].real))
    elif route == "quadrature":
        for n in range(1, int(trunc) + 1):
            terms.append(alpha**n / math.factorial(n) * lp_norm(u, 2 * n) ** (2 * n))
    else:
        raise ContractError(f"unknown route {route!r}")
    x = alpha * peak
    t = int(trunc) + 1
    tail = l2_norm(u) ** 2 / peak * math.exp(t * math.log(x) - math.lgamma(t + 1) + x)
    return AMTResult(direct, float(math.fsum(terms)), tail, tuple(terms))


def critical_exponent(dim: int, s: float) -> float:
    """``2d/(d - 2s)`` when ``s < d/2``, infinity otherwise."""
    return 2 * dim / (dim - 2 * s) if s < dim / 2 else math.inf


@dataclass(frozen=True)
class GNParams:
    """Exponents of the interpolation inequality ``||f||_p <= C ||(-Delta)^(s/2) f||^theta ||f||^(1-theta)``."""

    dim: int
    s: float
    p: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ContractError("dim must be 1, 2 or 3")
        if not self.s > 0:
            raise ContractError("s must be positive")
        _check_even(self.p)
        if not 2 < self.p < self.p_star:
            raise ContractError(f"need 2 < p < p_* = {self.p_star}")

    @property
    def p_star(self) -> float:
        return critical_exponent(self.dim, self.s)

    @property
    def theta(self) -> float:
        return self.dim * (self.p - 2) / (2 * self.s * self.p)


def weinstein(f: Field, params: GNParams) -> float:
    """``||(-Delta)^(s/2) f||^theta ||f||^(1-theta) / ||f||_p``."""
    if f.space != Space.PHYSICAL:
        raise ContractError("weinstein expects a physical field")
    if f.spec.dim != params.dim:
        raise ContractError("field dimension does not match params")
    l2 = l2_norm(f)
    if l2 == 0:
        raise ContractError("weinstein functional undefined for the zero field")
    grad = math.sqrt(quadratic_form(f, fractional_laplacian(params.s)))
    th = params.theta
    return grad**th * l2 ** (1 - th) / lp_norm(f, params.p)
