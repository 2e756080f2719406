import math

import jsonschema
import numpy as np
import pytest

from conftest import random_field
from fourier_rearrangement.errors import ContractError, SolverError, ZeroCollapseError
from fourier_rearrangement.functionals import GNParams, lp_norm, weinstein
from fourier_rearrangement.grid import Field, GridSpec, l2_norm
from fourier_rearrangement.majorant import classify_equality
from fourier_rearrangement.multiplier import fractional_laplacian, polyharmonic, quadratic_form
from fourier_rearrangement.rearrange import fourier_rearrange, is_rearranged_fixed_point
from fourier_rearrangement.solver import (
    SolverConfig,
    action_value,
    config_from_dict,
    constrained_T,
    ground_state,
    minimize_weinstein,
)

GRID = GridSpec.uniform(1, 1025, 20 * math.pi)


def soliton():
    return Field.sample(GRID, lambda x: math.sqrt(2) / np.cosh(x))


def sech_weinstein():
    # closed forms: ||Q||^2 = 4, ||Q'||^2 = 4/3, ||Q||_4^4 = 16/3
    return (4 / 3) ** (1 / 8) * 4 ** (3 / 8) / (16 / 3) ** (1 / 4)


@pytest.fixture(scope="module")
def soliton_run():
    return ground_state(SolverConfig(GRID, fractional_laplacian(1.0)))


@pytest.fixture(scope="module")
def biharmonic_run():
    return ground_state(SolverConfig(GRID, fractional_laplacian(2.0)))


def test_soliton(soliton_run):
    r = soliton_run
    assert r.converged and r.residual <= 1e-10
    assert np.max(np.abs(r.Q.values - soliton().values)) <= 1e-6
    assert r.positive_definite_margin >= -1e-10
    assert not r.sign_changing


def test_gradient_flow_reaches_the_soliton():
    r = ground_state(SolverConfig(GRID, fractional_laplacian(1.0), method="gradient_flow", max_iter=2000))
    assert r.converged
    assert np.max(np.abs(r.Q.values - soliton().values)) <= 1e-6


def test_biharmonic(biharmonic_run):
    r = biharmonic_run
    assert r.converged and r.residual <= 1e-8
    assert r.sign_changing
    assert r.sharp_deviation <= 1e-8
    assert r.qhat_min >= -1e-10
    assert r.positive_definite_margin >= -1e-10


@pytest.mark.parametrize("run", ["soliton_run", "biharmonic_run"])
def test_residual_trend(run, request):
    hist = request.getfixturevalue(run).residual_history[-50:]
    # nonincreasing up to a factor 10
    assert all(b <= 10 * min(hist[: i + 1]) for i, b in enumerate(hist))


@pytest.mark.parametrize("run", ["soliton_run", "biharmonic_run"])
def test_pohozaev_and_equality_case(run, request):
    r = request.getfixturevalue(run)
    L = fractional_laplacian(1.0 if run == "soliton_run" else 2.0)
    cfg = SolverConfig(GRID, L)
    q = r.Q
    qp = lp_norm(q, 4) ** 4
    assert action_value(q, cfg) == pytest.approx((0.5 - 0.25) * qp, rel=1e-6)
    rep = classify_equality(q, L, 4)
    assert rep.verdict == "equality-affine"
    assert abs(rep.lp_gap) <= 1e-8 * lp_norm(q, 4)
    assert rep.energy_gap <= 1e-8 * quadratic_form(q, L)


def test_iterates_are_sharp_fixed_points():
    seen = []
    cfg = SolverConfig(GRID, fractional_laplacian(1.0), max_iter=15, seed="random", seed_band=0.5)
    ground_state(cfg, callback=lambda i, q: seen.append(is_rearranged_fixed_point(q, 1e-10)))
    assert seen and all(seen)


def test_zero_seed_collapses():
    cfg = SolverConfig(GRID, fractional_laplacian(1.0))
    with pytest.raises(ZeroCollapseError):
        ground_state(cfg, initial=Field.zeros(GRID))


def test_action_of_zero_and_T_under_sharp():
    cfg = SolverConfig(GridSpec.uniform(1, 65, 8.0), fractional_laplacian(1.0))
    assert action_value(Field.zeros(cfg.grid), cfg) == 0
    rng = np.random.default_rng(0)
    for _ in range(100):
        v = random_field(cfg.grid, rng)
        t = constrained_T(v, cfg)
        assert constrained_T(fourier_rearrange(v), cfg) <= t + 1e-12 * t


def test_beta_dominated_positivity():
    L = polyharmonic([(1.0, 2.0), (2.0, 1.0)])
    r = ground_state(SolverConfig(GRID, L))
    assert r.converged
    q = fourier_rearrange(r.Q).values
    assert np.min(q.real) >= -1e-6 * np.max(np.abs(q))


def test_config_validation():
    L = fractional_laplacian(1.0)
    with pytest.raises(ContractError):
        SolverConfig(GridSpec.uniform(3, 9, 4.0), L, p=6)
    with pytest.raises(ContractError):
        SolverConfig(GRID, L, p=5)
    with pytest.raises(ContractError):
        SolverConfig(GRID, L, omega_const=0)
    with pytest.raises(ContractError):
        SolverConfig(GRID, L, method="newton")
    with pytest.warns(UserWarning, match="intrinsic"):
        ground_state(SolverConfig(GridSpec.uniform(1, 65, 2.0), L, max_iter=2))


def test_minimize_weinstein_matches_sech_oracle():
    w = minimize_weinstein(GNParams(1, 1, 4), GRID)
    assert w.sharp_constant == pytest.approx(1 / sech_weinstein(), rel=1e-5)
    assert weinstein(w.result.Q, GNParams(1, 1, 4)) == pytest.approx(w.weinstein_value)


def test_minimize_weinstein_is_grid_consistent():
    a = minimize_weinstein(GNParams(1, 1, 4), GRID).sharp_constant
    b = minimize_weinstein(GNParams(1, 1, 4), GridSpec.uniform(1, 2049, 40 * math.pi)).sharp_constant
    assert abs(a - b) <= 1e-6 * a


def test_minimize_weinstein_biharmonic_is_affine():
    w = minimize_weinstein(GNParams(1, 2, 4), GRID)
    rep = classify_equality(w.result.Q, fractional_laplacian(2.0), 4)
    assert rep.verdict == "equality-affine"
    assert abs(rep.x0[0]) <= GRID.spacing[0] / 100


def test_minimize_weinstein_reports_nonconvergence():
    with pytest.raises(SolverError):
        minimize_weinstein(GNParams(1, 1, 4), GRID, max_iter=2)
    with pytest.raises(ContractError):
        minimize_weinstein(GNParams(2, 1, 4), GRID)


def test_config_from_dict():
    doc = {
        "schema": "1",
        "grid": {"points": [257], "half_width": [20.0]},
        "multiplier": {"kind": "biharmonic", "beta": 2.0},
        "p": 4,
        "method": "gradient_flow",
        "seed": "sech",
    }
    cfg = config_from_dict(doc)
    assert cfg.grid == GridSpec.uniform(1, 257, 20.0)
    assert cfg.method == "gradient_flow" and cfg.seed == "sech"
    with pytest.raises(jsonschema.ValidationError):
        config_from_dict({**doc, "schema": "2"})
    with pytest.raises(jsonschema.ValidationError):
        config_from_dict({**doc, "bogus": 1})
    with pytest.raises(ContractError):
        config_from_dict({**doc, "p": 3})


def test_result_diagnostics_keys(soliton_run):
    d = soliton_run.diagnostics()
    assert set(d) >= {"residual", "objective", "iterations", "converged", "sharp_deviation", "sign_changing",
                      "positive_definite_margin", "qhat_min", "qhat_imag_max"}
    assert d["objective"] == pytest.approx(constrained_T(soliton_run.Q * (1 / lp_norm(soliton_run.Q, 4)),
                                                        SolverConfig(GRID, fractional_laplacian(1.0))))
    assert l2_norm(soliton_run.Q) > 0
