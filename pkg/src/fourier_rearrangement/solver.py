"""Ground states of ``L Q + c Q = |Q|^(p-2) Q`` and interpolation-inequality optimizers.

Two iterations are provided.

* Petviashvili: ``Q^ <- M^gamma F[|Q|^(p-2) Q] / (omega + c)`` with
  ``M = <Q, (L + c) Q> / <Q, |Q|^(p-2) Q>`` and ``gamma = (p-1)/(p-2)``.
* Rearranged gradient flow: a damped normalized fixed-point flow for the
  minimization of ``T(v) = <v, L v>/2 + c ||v||^2 / 2`` on ``||v||_p = 1``.

With ``project_sharp`` every iterate is replaced by its Fourier
rearrangement, which never increases ``T`` and keeps ``||v||_p`` from
decreasing, so the iteration stays on radially sorted spectra.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractError, SolverError, ZeroCollapseError
from .functionals import GNParams, critical_exponent, lp_norm, weinstein
from .grid import Field, GridSpec, Space, forward_transform, inverse_transform, l2_norm
from .multiplier import Multiplier, fractional_laplacian, multiplier_from_dict, quadratic_form
from .rearrange import fourier_rearrange

__all__ = [
    "SolverConfig",
    "SolverResult",
    "WeinsteinResult",
    "ground_state",
    "minimize_weinstein",
    "action_value",
    "constrained_T",
    "seed_field",
    "config_from_dict",
    "CONFIG_SCHEMA",
]

METHODS = ("petviashvili", "gradient_flow")
SEEDS = ("gaussian", "sech", "random")


@dataclass(frozen=True)
class SolverConfig:
    """Problem ``L Q + omega_const Q = |Q|^(p-2) Q`` on a grid plus iteration settings.

    Attributes:
        grid: Discretization.
        L: Radial multiplier.
        omega_const: Positive frequency constant ``c``.
        p: Even exponent with ``2 < p < p_*`` for the multiplier's growth.
        method: ``"petviashvili"`` or ``"gradient_flow"``.
        max_iter: Iteration cap.
        tol_residual: Convergence threshold on the equation residual.
        project_sharp: Replace each iterate by its Fourier rearrangement.
        seed: ``"gaussian"``, ``"sech"`` or ``"random"``.
        seed_band: Frequency radius of the random seed.
        rng_seed: Seed for the random profile.
        step: Damping of the gradient flow, in ``(0, 1]``.
    """

    grid: GridSpec
    L: Multiplier
    omega_const: float = 1.0
    p: int = 4
    method: str = "petviashvili"
    max_iter: int = 500
    tol_residual: float = 1e-10
    project_sharp: bool = True
    seed: str = "gaussian"
    seed_band: float = 1.0
    rng_seed: int = 0
    step: float = 0.5

    def __post_init__(self):
        if not self.omega_const > 0:
            raise ContractError("omega_const must be positive")
        if int(self.p) != self.p or int(self.p) % 2:
            raise ContractError("p must be an even integer")
        pstar = critical_exponent(self.grid.dim, self.L.growth_s)
        if not 2 < self.p < pstar:
            raise ContractError(f"need 2 < p < p_* = {pstar} for growth s = {self.L.growth_s}")
        if self.method not in METHODS:
            raise ContractError(f"method must be one of {METHODS}")
        if self.seed not in SEEDS:
            raise ContractError(f"seed must be one of {SEEDS}")
        if not self.tol_residual > 0:
            raise ContractError("tol_residual must be positive")
        if int(self.max_iter) < 1:
            raise ContractError("max_iter must be >= 1")
        if not 0 < self.step <= 1:
            raise ContractError("step must lie in (0, 1]")

    def intrinsic_length(self) -> float:
        s = self.L.growth_s
        return self.omega_const ** (-1 / (2 * s)) if s > 0 else 1.0


@dataclass(frozen=True)
class SolverResult:
    """Converged (or last) state and its diagnostics.

    Attributes:
        Q: The state.
        residual: ``||L Q + c Q - |Q|^(p-2) Q|| / ||Q||``.
        objective: ``T(Q / ||Q||_p)``.
        iterations: Iterations performed.
        converged: Whether ``residual <= tol_residual``.
        sharp_deviation: ``||Q - Q#|| / ||Q||``.
        sign_changing: ``min Re Q < -1e-8 max|Q|``.
        positive_definite_margin: ``min_x (Re Q(0) - |Q(x)|)``; zero for peak-at-origin states.
        qhat_min: Smallest real part of ``Q^``.
        qhat_imag_max: Largest ``|Im Q^|``.
        residual_history: Residual before every update.
    """

    Q: Field
    residual: float
    objective: float
    iterations: int
    converged: bool
    sharp_deviation: float
    sign_changing: bool
    positive_definite_margin: float
    qhat_min: float
    qhat_imag_max: float
    residual_history: tuple[float, ...] = field(repr=False)

    def diagnostics(self) -> dict:
        return {
            "residual": self.residual,
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "sharp_deviation": self.sharp_deviation,
            "sign_changing": self.sign_changing,
            "positive_definite_margin": self.positive_definite_margin,
            "qhat_min": self.qhat_min,
            "qhat_imag_max": self.qhat_imag_max,
        }


def seed_field(cfg: SolverConfig) -> Field:
    spec = cfg.grid
    r2 = spec.squared_radius(Space.PHYSICAL)
    if cfg.seed == "gaussian":
        return Field.physical(spec, np.exp(-r2 / 2))
    if cfg.seed == "sech":
        return Field.physical(spec, 1.0 / np.cosh(np.sqrt(r2)))
    rng = np.random.default_rng(cfg.rng_seed)
    band = spec.radius(Space.FREQUENCY) <= cfg.seed_band
    vals = (rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)) * band
    return inverse_transform(Field.frequency(spec, vals))


def _nonlinearity(q: np.ndarray, p: int) -> np.ndarray:
    return np.abs(q) ** (p - 2) * q


def _residual(qhat: np.ndarray, nhat: np.ndarray, sym: np.ndarray) -> float:
    den = np.linalg.norm(qhat)
    if den == 0:
        return math.inf
    return float(np.linalg.norm(sym * qhat - nhat) / den)


def ground_state(
    cfg: SolverConfig,
    initial: Field | None = None,
    callback: Callable[[int, Field], None] | None = None,
) -> SolverResult:
    """Iterate to a solution of ``L Q + c Q = |Q|^(p-2) Q``.

    Args:
        cfg: Problem and iteration settings.
        initial: Starting field; defaults to the profile named by ``cfg.seed``.
        callback: Called with ``(iteration, iterate)`` after every update.

    Returns:
        The last iterate with diagnostics.  Non-convergence is reported
        through ``converged`` rather than an exception.

    Raises:
        ZeroCollapseError: The iterate vanished or its stabilizing factor
            is not finite.
    """
    spec = cfg.grid
    if cfg.grid.half_width[0] < 10 * cfg.intrinsic_length():
        warnings.warn("half width is below ten intrinsic lengths; truncation may dominate", stacklevel=2)
    q = seed_field(cfg) if initial is None else initial
    if q.spec != spec or q.space != Space.PHYSICAL:
        raise ContractError("initial field must be physical and on the configured grid")
    if cfg.project_sharp and l2_norm(q) > 0:
        q = fourier_rearrange(q)
    sym = cfg.L.symbol(spec) + cfg.omega_const
    h = spec.cell_volume(Space.PHYSICAL)
    p = int(cfg.p)
    history = []
    converged = False
    it = 0
    for it in range(int(cfg.max_iter) + 1):
        n = _nonlinearity(q.values, p)
        qhat = forward_transform(q).values
        nhat = forward_transform(q.with_values(n)).values
        res = _residual(qhat, nhat, sym)
        history.append(res)
        if res <= cfg.tol_residual:
            converged = True
            break
        if it == cfg.max_iter:
            break
        q = _step(cfg, q, qhat, n, nhat, sym, h, p)
        if cfg.project_sharp:
            q = fourier_rearrange(q)
        if callback is not None:
            callback(it + 1, q)
    return _finish(cfg, q, history, it, converged)


def _step(cfg, q, qhat, n, nhat, sym, h, p) -> Field:
    spec = cfg.grid
    dxi = spec.cell_volume(Space.FREQUENCY)
    quad = float(np.sum(sym * np.abs(qhat) ** 2) * dxi)
    pnorm = float(np.real(np.vdot(q.values, n)) * h)
    if not (pnorm > 0 and quad > 0 and math.isfinite(quad / pnorm)):
        raise ZeroCollapseError("iterate collapsed to zero")
    if cfg.method == "petviashvili":
        m = quad / pnorm
        gamma = (p - 1) / (p - 2)
        new = m**gamma * nhat / sym
        out = inverse_transform(Field.frequency(spec, new))
    else:
        # normalized flow on ||v||_p = 1, then rescale to solve the equation
        scale = pnorm ** (1 / p)
        v = qhat / scale
        mu = quad / scale**2
        vn = nhat / scale ** (p - 1)
        v = v - cfg.step * (v - mu * vn / sym)
        vfield = inverse_transform(Field.frequency(spec, v))
        norm = lp_norm(vfield, p)
        if not norm > 0:
            raise ZeroCollapseError("iterate collapsed to zero")
        vfield = vfield * (1 / norm)
        vhat = forward_transform(vfield).values
        mu = float(np.sum(sym * np.abs(vhat) ** 2) * dxi)
        out = vfield * (mu ** (1 / (p - 2)))
    if not np.all(np.isfinite(out.values)):
        raise ZeroCollapseError("iterate is not finite")
    return out


def _finish(cfg: SolverConfig, q: Field, history, it, converged) -> SolverResult:
    spec = cfg.grid
    norm = l2_norm(q)
    if norm == 0:
        raise ZeroCollapseError("iterate collapsed to zero")
    qhat = forward_transform(q).values
    vals = q.values
    peak = float(np.max(np.abs(vals)))
    center = vals[spec.origin_index()]
    sharp = fourier_rearrange(q)
    pn = lp_norm(q, cfg.p)
    return SolverResult(
        Q=q,
        residual=float(history[-1]),
        objective=constrained_T(q * (1 / pn), cfg),
        iterations=int(it),
        converged=converged,
        sharp_deviation=l2_norm(q - sharp) / norm,
        sign_changing=bool(np.min(vals.real) < -1e-8 * peak),
        positive_definite_margin=float(np.min(center.real - np.abs(vals))),
        qhat_min=float(np.min(qhat.real)),
        qhat_imag_max=float(np.max(np.abs(qhat.imag))),
        residual_history=tuple(history),
    )


def constrained_T(v: Field, cfg: SolverConfig) -> float:
    """``<v, L v>/2 + c ||v||^2 / 2`` (no normalization applied)."""
    return 0.5 * quadratic_form(v, cfg.L) + 0.5 * cfg.omega_const * l2_norm(v) ** 2


def action_value(u: Field, cfg: SolverConfig) -> float:
    """``<u, L u>/2 + c ||u||^2 / 2 - ||u||_p^p / p``."""
    return constrained_T(u, cfg) - lp_norm(u, cfg.p) ** cfg.p / cfg.p


@dataclass(frozen=True)
class WeinsteinResult:
    result: SolverResult
    sharp_constant: float
    weinstein_value: float


def minimize_weinstein(
    params: GNParams,
    grid: GridSpec,
    *,
    method: str = "petviashvili",
    max_iter: int = 500,
    tol_residual: float = 1e-10,
    project_sharp: bool = True,
) -> WeinsteinResult:
    """Minimize the Weinstein quotient through the ground state of ``(-Delta)^s Q + Q = Q^(p-1)``.

    The quotient is invariant under scaling and dilation, so the ground
    state with ``c = 1`` is a minimizer; the sharp constant is ``1/J(Q)``.

    Raises:
        SolverError: The iteration did not converge.
    """
    if grid.dim != params.dim:
        raise ContractError("grid dimension does not match params")
    cfg = SolverConfig(
        grid=grid,
        L=fractional_laplacian(params.s),
        omega_const=1.0,
        p=params.p,
        method=method,
        max_iter=max_iter,
        tol_residual=tol_residual,
        project_sharp=project_sharp,
    )
    res = ground_state(cfg)
    if not res.converged:
        raise SolverError(f"no convergence after {res.iterations} iterations (residual {res.residual:.3e})")
    j = weinstein(res.Q, params)
    return WeinsteinResult(res, 1.0 / j, j)


# --- JSON configuration ---------------------------------------------------

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema", "grid", "multiplier"],
    "properties": {
        "schema": {"const": "1"},
        "grid": {
            "type": "object",
            "required": ["points", "half_width"],
            "properties": {
                "points": {"type": "array", "items": {"type": "integer"}, "minItems": 1, "maxItems": 3},
                "half_width": {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 3},
            },
        },
        "multiplier": {"type": "object", "required": ["kind"]},
        "omega_const": {"type": "number"},
        "p": {"type": "integer"},
        "method": {"enum": list(METHODS)},
        "max_iter": {"type": "integer", "minimum": 1},
        "tol_residual": {"type": "number", "exclusiveMinimum": 0},
        "project_sharp": {"type": "boolean"},
        "seed": {"enum": list(SEEDS)},
        "seed_band": {"type": "number"},
        "rng_seed": {"type": "integer"},
        "step": {"type": "number"},
    },
    "additionalProperties": False,
}


def config_from_dict(data: dict) -> SolverConfig:
    """Validate a schema-"1" document and build the config.

    Raises:
        jsonschema.ValidationError: The document does not match :data:`CONFIG_SCHEMA`.
        ContractError: Values are in range for the schema but not for the solver.
    """
    import jsonschema

    jsonschema.validate(data, CONFIG_SCHEMA)
    grid = GridSpec(tuple(data["grid"]["points"]), tuple(data["grid"]["half_width"]))
    keys = ("omega_const", "p", "method", "max_iter", "tol_residual", "project_sharp", "seed", "seed_band", "rng_seed", "step")
    extra = {k: data[k] for k in keys if k in data}
    return SolverConfig(grid=grid, L=multiplier_from_dict(data["multiplier"]), **extra)
