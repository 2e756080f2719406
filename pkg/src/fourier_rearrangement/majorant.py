"""Majorant checks, counterexamples, and classification of the equality case.

Equality in both rearrangement inequalities is expected exactly when
``f^ = exp(i(alpha + beta.xi)) |f^|`` with ``|f^|`` radially sorted, i.e.
``f = exp(i alpha) f#(x - x0)`` with ``x0 = -beta / (2 pi)``.  The phase
is recovered from the peak of the cross-correlation of ``f`` with
``F^-1 |f^|``, which is insensitive to ``2 pi`` wrapping.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy import ndimage

from .errors import ContractError, MajorantError, SearchFailure
from .functionals import lp_even_fourier, lp_norm
from .grid import Field, GridSpec, Space, forward_transform, inverse_transform, l2_norm
from .multiplier import Multiplier, quadratic_form
from .rearrange import fourier_rearrange, radial_order

__all__ = [
    "EqualityReport",
    "TrigPolynomial",
    "UMPResult",
    "TorusSearch",
    "LittlewoodResult",
    "DisconnectedExample",
    "PhaseFit",
    "check_ump",
    "littlewood_search",
    "littlewood_counterexample",
    "disconnected_equality_example",
    "affine_phase_fit",
    "affine_reconstruction",
    "classify_equality",
]

DEFAULT_TAU = 1e-8


# --- upper majorant property ----------------------------------------------


@dataclass(frozen=True)
class UMPResult:
    """``lhs = ||f||_p`` and ``rhs = ||g||_p`` by the convolution identity, plus quadrature values."""

    holds: bool
    lhs: float
    rhs: float
    lhs_quadrature: float
    rhs_quadrature: float


def _norm_by_convolution(fhat: Field, p) -> float:
    if math.isinf(p):
        return lp_norm(inverse_transform(fhat), math.inf)
    return max(lp_even_fourier(fhat, int(p) // 2), 0.0) ** (1.0 / p)


def check_ump(f: Field, g: Field, p, rtol: float = 1e-12) -> UMPResult:
    """Compare ``||f||_p`` with ``||g||_p`` when ``g^ >= |f^|`` pointwise.

    Args:
        f: Physical field.
        g: Physical field whose transform is real, nonnegative and
            dominates ``|f^|`` (checked up to ``rtol * max g^``).
        p: Even integer or ``math.inf``.
        rtol: Slack for the precondition and for ``holds``.
    """
    if not (math.isinf(p) or (int(p) == p and p >= 2 and int(p) % 2 == 0)):
        raise ContractError("p must be an even integer or infinity")
    if f.spec != g.spec:
        raise ContractError("f and g live on different grids")
    fhat, ghat = forward_transform(f), forward_transform(g)
    gv = ghat.values
    slack = rtol * max(float(np.max(np.abs(gv))), np.finfo(float).tiny)
    if np.any(np.abs(gv.imag) > slack) or np.any(gv.real < -slack):
        raise MajorantError("majorant transform must be real and nonnegative")
    if np.any(np.abs(fhat.values) > gv.real + slack):
        raise MajorantError("|f^| exceeds g^ at some node")
    lhs = _norm_by_convolution(fhat, p)
    rhs = _norm_by_convolution(ghat, p)
    return UMPResult(bool(lhs <= rhs * (1 + rtol)), lhs, rhs, lp_norm(f, p), lp_norm(g, p))


# --- Littlewood-type counterexamples --------------------------------------


@dataclass(frozen=True)
class TrigPolynomial:
    """``P(t) = sum_k c_k exp(2 pi i k t)`` on the unit-period torus."""

    coefficients: tuple[tuple[int, complex], ...]

    def __call__(self, t: NDArray) -> NDArray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for k, c in self.coefficients:
            out += c * np.exp(2j * np.pi * k * t)
        return out

    def modulus(self) -> "TrigPolynomial":
        return TrigPolynomial(tuple((k, abs(c)) for k, c in self.coefficients))

    def torus_norm(self, p: float, samples: int = 1 << 14) -> float:
        """``L^p(T)`` norm by the periodic rectangle rule."""
        t = np.arange(samples) / samples
        return float(np.mean(np.abs(self(t)) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class TorusSearch:
    """Outcome of the sign-pattern search; gaps are ``||P_signed||_p / ||P_abs||_p - 1``."""

    p: float
    frequencies: tuple[int, ...]
    gaps: dict
    best: TrigPolynomial
    best_gap: float
    violation: bool


def littlewood_search(p: float, frequencies=(0, 1, 3), signs=(1, -1), threshold: float = 1e-12) -> TorusSearch:
    """Try every sign pattern on ``frequencies`` and keep the largest torus-norm excess."""
    if not p >= 1:
        raise ContractError("p must be >= 1")
    freqs = tuple(int(k) for k in frequencies)
    gaps = {}
    best, best_gap = None, -math.inf
    for pattern in itertools.product(signs, repeat=len(freqs)):
        poly = TrigPolynomial(tuple(zip(freqs, (complex(s) for s in pattern))))
        gap = poly.torus_norm(p) / poly.modulus().torus_norm(p) - 1.0
        gaps[pattern] = gap
        if gap > best_gap:
            best, best_gap = poly, gap
    return TorusSearch(p, freqs, gaps, best, best_gap, best_gap > threshold)


@dataclass(frozen=True)
class LittlewoodResult:
    f: Field
    majorant: Field
    gap: float
    relative_gap: float
    torus: TorusSearch


def default_line_grid() -> GridSpec:
    return GridSpec.uniform(1, 2049, 64.0)


def littlewood_counterexample(p: float, lam: float, spec: GridSpec | None = None, frequencies=(0, 1, 3)) -> LittlewoodResult:
    """Move the best torus sign pattern to the line with a wide Gaussian.

    ``f = lam^(1/(2p)) exp(-pi lam x^2) P(x)`` and the majorant is
    ``F^-1 |f^|``.  Raises :class:`SearchFailure` when no pattern violates
    the majorant inequality on the torus.
    """
    if not 0 < lam <= 1:
        raise ContractError("lam must lie in (0, 1]")
    spec = spec or default_line_grid()
    if spec.dim != 1:
        raise ContractError("the line transfer is one-dimensional")
    search = littlewood_search(p, frequencies)
    if not search.violation:
        raise SearchFailure(f"no sign pattern on {search.frequencies} violates the majorant inequality at p={p}")
    poly = search.best
    f = Field.sample(spec, lambda x: lam ** (1 / (2 * p)) * np.exp(-np.pi * lam * x * x) * poly(x))
    fhat = forward_transform(f)
    g = inverse_transform(fhat.with_values(np.abs(fhat.values)))
    gap = lp_norm(f, p) - lp_norm(g, p)
    return LittlewoodResult(f, g, gap, gap / lp_norm(g, p), search)


# --- affine phase retrieval -----------------------------------------------


@dataclass(frozen=True)
class PhaseFit:
    alpha: float
    beta: NDArray[np.float64]
    residual: float
    support_size: int

    @property
    def x0(self) -> NDArray[np.float64]:
        return -self.beta / (2 * np.pi)


def _support(mod: NDArray, tau: float) -> NDArray[np.bool_]:
    if tau <= 0:
        raise ContractError("tau must be positive")
    peak = mod.max()
    omega = mod > tau * peak
    if peak == 0 or not omega.any():
        raise ContractError("empty support set")
    return omega


def _parabola_offset(ym, y0, yp) -> float:
    den = ym - 2 * y0 + yp
    return 0.0 if den >= 0 else 0.5 * (ym - yp) / den


def _polish(weights: NDArray, xi: NDArray, x: NDArray, iters: int = 20) -> NDArray:
    """Newton ascent on ``|sum_k w_k exp(2 pi i x.xi_k)|^2``."""
    two_pi_i = 2j * np.pi
    for _ in range(iters):
        e = weights * np.exp(two_pi_i * (xi @ x))
        c = e.sum()
        dc = two_pi_i * (xi.T @ e)
        ddc = two_pi_i**2 * (xi.T * e) @ xi
        grad = 2 * np.real(np.conj(c) * dc)
        hess = 2 * np.real(np.outer(np.conj(dc), dc) + np.conj(c) * ddc)
        try:
            if np.any(np.linalg.eigvalsh(hess) >= 0):
                break
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        x = x - step
        if np.max(np.abs(step)) < 1e-15 * max(1.0, np.max(np.abs(x))):
            break
    return x


def affine_phase_fit(fhat: Field, tau: float = DEFAULT_TAU, polish: bool = True) -> PhaseFit:
    """Fit ``f^ ~ exp(i(alpha + beta.xi)) |f^|`` on ``{|f^| > tau max|f^|}``.

    Args:
        fhat: Frequency field.
        tau: Relative threshold defining the support set.
        polish: Refine the correlation peak with Newton steps on the exact
            (off-grid) correlation after the parabolic estimate.

    Returns:
        The fit; ``x0 = -beta / (2 pi)`` is the recovered translation.
    """
    if fhat.space != Space.FREQUENCY:
        raise ContractError("affine_phase_fit expects a frequency field")
    spec = fhat.spec
    v = fhat.values
    mod = np.abs(v)
    omega = _support(mod, tau)
    corr = np.abs(inverse_transform(fhat.with_values(v * mod)).values)
    peak = np.unravel_index(int(np.argmax(corr)), corr.shape)
    h = spec.spacing
    x = np.empty(spec.dim)
    for a in range(spec.dim):
        n = spec.points[a]
        idx = list(peak)
        vals = []
        for off in (-1, 0, 1):
            idx[a] = (peak[a] + off) % n
            vals.append(corr[tuple(idx)])
        x[a] = (peak[a] - (n - 1) // 2 + _parabola_offset(*vals)) * h[a]
    xi = np.stack([m[omega] for m in spec.mesh(Space.FREQUENCY)], axis=-1)
    if polish:
        x = _polish((v * mod)[omega], xi, x)
    beta = -2 * np.pi * x
    model = np.exp(1j * (xi @ beta)) * mod[omega]
    alpha = float(np.angle(np.vdot(model, v[omega])))
    resid = np.linalg.norm(v[omega] - np.exp(1j * alpha) * model) / np.linalg.norm(v[omega])
    return PhaseFit(alpha, beta, float(resid), int(omega.sum()))


def affine_reconstruction(reference: Field, alpha: float, beta) -> Field:
    """``exp(i alpha) reference(x - x0)`` with ``x0 = -beta/(2 pi)``, built spectrally."""
    rhat = forward_transform(reference)
    xi = np.stack(rhat.spec.mesh(Space.FREQUENCY), axis=-1)
    phase = np.exp(1j * (alpha + xi @ np.asarray(beta, dtype=float)))
    return inverse_transform(rhat.with_values(phase * rhat.values))


# --- classification -------------------------------------------------------


@dataclass(frozen=True)
class EqualityReport:
    """Gaps in both inequalities, the fitted affine phase, and the verdict.

    ``x0`` is always ``-beta / (2 pi)``.
    """

    energy_gap: float
    lp_gap: float
    alpha: float
    beta: tuple[float, ...]
    phase_residual: float
    support_connected: bool
    verdict: str
    p: int
    multiplier_strict: bool = True
    x0: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(-b / (2 * math.pi) for b in self.beta))

    def to_dict(self) -> dict:
        return {
            "energy_gap": self.energy_gap,
            "lp_gap": self.lp_gap,
            "alpha": self.alpha,
            "beta": list(self.beta),
            "x0": list(self.x0),
            "phase_residual": self.phase_residual,
            "support_connected": self.support_connected,
            "verdict": self.verdict,
            "p": self.p,
            "multiplier_strict": self.multiplier_strict,
        }


def _radially_contiguous(mod: NDArray, spec: GridSpec, tau: float) -> bool:
    """Support of a radially sorted modulus is a prefix of the radial order (up to shell ties)."""
    order = radial_order(spec, Space.FREQUENCY)
    inside = _support(mod, tau).ravel()[order.permutation]
    last = int(np.flatnonzero(inside)[-1])
    shells = order.shells()
    # every shell strictly before the one holding the last support node must be full
    shell_of_last = int(np.searchsorted(shells, last, side="right")) - 1
    return bool(inside[: shells[shell_of_last]].all())


def _graph_connected(mod: NDArray, tau: float) -> bool:
    _, count = ndimage.label(_support(mod, tau))
    return count == 1


def classify_equality(
    f: Field,
    L: Multiplier,
    p: int,
    *,
    reference: Field | None = None,
    tau: float = DEFAULT_TAU,
    equality_tol: float = 1e-8,
    phase_tol: float = 1e-6,
) -> EqualityReport:
    """Decide which case of the equality characterization ``f`` falls into.

    Args:
        f: Nonzero physical field.
        L: Multiplier for the energy inequality.
        p: Even exponent, at least 4 (for ``p = 2`` both norms always agree).
        reference: Comparison field with ``|reference^| = |f^|`` pointwise.
            Defaults to ``f#``, whose transform support is a centered
            ball; otherwise support connectivity is tested on the
            nearest-neighbour graph.
        tau: Support threshold for the phase fit and connectivity test.
        equality_tol: Relative size below which a gap counts as zero.
        phase_tol: Largest phase residual accepted as affine.

    Returns:
        The report with verdict ``"equality-affine"``,
        ``"equality-nonaffine (support disconnected)"``,
        ``"equality-nonaffine (support connected)"`` or ``"strict inequality"``.
    """
    if int(p) != p or p < 4 or int(p) % 2:
        raise ContractError("p must be an even integer >= 4")
    if l2_norm(f) == 0:
        raise ContractError("cannot classify the zero field")
    ref = fourier_rearrange(f) if reference is None else reference
    if ref.spec != f.spec:
        raise ContractError("reference lives on another grid")
    strict = L.is_strict(f.spec)
    if not strict:
        warnings.warn("multiplier is not strictly increasing; equality claims are weakened", stacklevel=2)
    energy_f = quadratic_form(f, L)
    energy_gap = energy_f - quadratic_form(ref, L)
    lp_f = lp_norm(f, p)
    lp_gap = lp_norm(ref, p) - lp_f
    fhat = forward_transform(f)
    fit = affine_phase_fit(fhat, tau)
    ref_mod = np.abs(forward_transform(ref).values)
    if reference is None:
        connected = _radially_contiguous(ref_mod, f.spec, tau)
    else:
        connected = _graph_connected(ref_mod, tau)
    scale_e = max(energy_f, np.finfo(float).tiny)
    equal = energy_gap <= equality_tol * scale_e and abs(lp_gap) <= equality_tol * max(lp_f, lp_f + lp_gap)
    if not equal:
        verdict = "strict inequality"
    elif fit.residual <= phase_tol:
        verdict = "equality-affine"
    elif connected:
        verdict = "equality-nonaffine (support connected)"
    else:
        verdict = "equality-nonaffine (support disconnected)"
    return EqualityReport(
        energy_gap=float(energy_gap),
        lp_gap=float(lp_gap),
        alpha=fit.alpha,
        beta=tuple(float(b) for b in fit.beta),
        phase_residual=fit.residual,
        support_connected=connected,
        verdict=verdict,
        p=int(p),
        multiplier_strict=strict,
    )


# --- two-component counterexample -----------------------------------------


@dataclass(frozen=True)
class DisconnectedExample:
    f: Field
    g: Field
    l4_gap: float
    report: EqualityReport


def _smooth_step(t: NDArray) -> NDArray:
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.clip(t, 0.0, 1.0)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def _bump(r2: NDArray, plateau: float = 0.75) -> NDArray:
    """Smooth bump supported in the unit ball, equal to 1 on ``r <= plateau``.

    The flat top spreads the mass over the ball, so a single linear phase
    cannot follow two different constants on the two components.
    """
    r = np.sqrt(r2)
    return np.where(r < 1, _smooth_step((1.0 - r) / (1.0 - plateau)), 0.0)


def default_disconnected_grid(y) -> GridSpec:
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.size == 1:
        return GridSpec.uniform(1, 513, 8.0)
    # frequency box must hold |y| + 3 on every axis without wrap-around
    n = 2 * int(math.ceil(8 * (np.max(np.abs(y)) + 3))) + 1
    return GridSpec.uniform(y.size, n, 4.0)


def disconnected_equality_example(y, alpha: float, beta: float, spec: GridSpec | None = None, L: Multiplier | None = None) -> DisconnectedExample:
    """Two unit-ball bumps in frequency at 0 and ``y`` carrying phases ``alpha`` and ``beta``.

    ``g^`` is the sum of the bumps and ``f^`` the same with phases.  For
    ``|y| > 4`` the autocorrelation pieces of ``f^`` do not overlap, so
    ``||f||_4 = ||g||_4`` while the phase of ``f^`` is not affine.
    """
    from .multiplier import fractional_laplacian

    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.linalg.norm(y) <= 4:
        raise ContractError("the two components need |y| > 4")
    spec = spec or default_disconnected_grid(y)
    if spec.dim != y.size:
        raise ContractError("y must have one entry per grid axis")
    xi = spec.mesh(Space.FREQUENCY)
    r0 = sum(c * c for c in xi)
    ry = sum((c - yc) ** 2 for c, yc in zip(xi, y))
    psi0, psiy = _bump(r0), _bump(ry)
    if psiy.max() == 0:
        raise ContractError("the second bump falls outside the frequency grid")
    g = inverse_transform(Field(spec, Space.FREQUENCY, psi0 + psiy))
    f = inverse_transform(Field(spec, Space.FREQUENCY, np.exp(1j * alpha) * psi0 + np.exp(1j * beta) * psiy))
    l4_gap = abs(lp_norm(f, 4) - lp_norm(g, 4))
    report = classify_equality(f, L or fractional_laplacian(1.0), 4, reference=g)
    return DisconnectedExample(f, g, l4_gap, report)
