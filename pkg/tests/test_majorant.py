import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import band_limited_field, central_band, gaussian, random_field
from fourier_rearrangement.errors import ContractError, MajorantError, SearchFailure
from fourier_rearrangement.functionals import lp_norm
from fourier_rearrangement.grid import Field, GridSpec, Space, forward_transform, inverse_transform, l2_norm
from fourier_rearrangement.majorant import (
    TrigPolynomial,
    affine_phase_fit,
    affine_reconstruction,
    check_ump,
    classify_equality,
    disconnected_equality_example,
    littlewood_counterexample,
    littlewood_search,
)
from fourier_rearrangement.multiplier import NotStrictlyIncreasingWarning, custom, fractional_laplacian
from fourier_rearrangement.rearrange import fourier_rearrange

SPEC = GridSpec.uniform(1, 129, 8.0)
seeds = st.integers(0, 2**32 - 1)


def majorant_of(f: Field, extra=None) -> Field:
    fhat = forward_transform(f)
    vals = np.abs(fhat.values) if extra is None else np.abs(fhat.values) + extra
    return inverse_transform(fhat.with_values(vals))


def test_ump_examples():
    rng = np.random.default_rng(0)
    f = band_limited_field(SPEC, rng)
    r = check_ump(f, majorant_of(f), 4)
    assert r.holds
    g = gaussian(SPEC)
    r = check_ump(g, g, 4)
    assert abs(r.lhs - r.rhs) <= 1e-12 * r.rhs
    xi = SPEC.mesh(Space.FREQUENCY)[0]
    bump = 0.5 * np.exp(-(xi**2)) * central_band(SPEC)
    r = check_ump(f, majorant_of(f, bump), 4)
    assert r.holds and r.lhs < r.rhs
    assert r.lhs == pytest.approx(r.lhs_quadrature, rel=1e-10)
    assert r.rhs == pytest.approx(r.rhs_quadrature, rel=1e-10)
    assert check_ump(f, majorant_of(f), math.inf).holds


def test_ump_precondition_errors():
    rng = np.random.default_rng(1)
    f = random_field(SPEC, rng)
    with pytest.raises(MajorantError):
        check_ump(f * 2, majorant_of(f), 4)
    with pytest.raises(MajorantError):
        check_ump(f, f, 4)
    with pytest.raises(ContractError):
        check_ump(f, majorant_of(f), 3)


specs = st.one_of(
    st.builds(lambda n: GridSpec((n,), (3.0,)), st.integers(2, 30).map(lambda k: 2 * k + 1)),
    st.builds(lambda n: GridSpec((n, n), (2.0, 2.0)), st.integers(2, 6).map(lambda k: 2 * k + 1)),
)


@given(specs, seeds, st.sampled_from([4, 6]))
def test_ump_never_fails(spec, seed, p):
    rng = np.random.default_rng(seed)
    f = random_field(spec, rng)
    extra = rng.uniform(0, 1, spec.shape) * (rng.uniform(size=spec.shape) < 0.5)
    r = check_ump(f, majorant_of(f, extra), p)
    assert r.holds
    assert r.lhs == pytest.approx(r.lhs_quadrature, rel=1e-10)
    assert r.rhs == pytest.approx(r.rhs_quadrature, rel=1e-10)


def test_trig_polynomial():
    P = TrigPolynomial(((0, 1), (1, -1), (3, 1j)))
    assert P(np.array([0.0]))[0] == pytest.approx(1j)
    assert P.modulus().coefficients == ((0, 1), (1, 1), (3, 1))
    # Parseval on the torus
    assert P.torus_norm(2) == pytest.approx(math.sqrt(3), rel=1e-12)


def test_littlewood_search():
    s3 = littlewood_search(3)
    assert s3.violation and s3.best_gap > 1e-3
    assert len(s3.gaps) == 8
    s4 = littlewood_search(4)
    assert not s4.violation
    assert max(s4.gaps.values()) <= 1e-12


def test_littlewood_gap_oracle():
    # brute-force oracle independent of torus_norm: adaptive quadrature of the best pattern
    from scipy import integrate

    best = littlewood_search(3).best
    signed = integrate.quad(lambda t: abs(best(np.array(t))) ** 3, 0, 1, limit=200)[0] ** (1 / 3)
    plain = integrate.quad(lambda t: abs(best.modulus()(np.array(t))) ** 3, 0, 1, limit=200)[0] ** (1 / 3)
    assert littlewood_search(3).best_gap == pytest.approx(signed / plain - 1, rel=1e-8)


def test_littlewood_line_transfer():
    torus_gap = littlewood_search(3).best_gap
    res = littlewood_counterexample(3, 1 / 64)
    assert res.gap > 0
    assert res.relative_gap >= torus_gap / 2
    with pytest.raises(SearchFailure):
        littlewood_counterexample(4, 1 / 64)
    with pytest.raises(ContractError):
        littlewood_counterexample(3, 0)


def test_phase_fit_examples():
    spec = GridSpec.uniform(1, 257, 16.0)
    h = spec.spacing[0]
    ghat = forward_transform(gaussian(spec))
    xi = spec.mesh(Space.FREQUENCY)[0]
    beta = -2 * np.pi * 3 * h
    fit = affine_phase_fit(ghat.with_values(np.exp(1j * (0.7 + beta * xi)) * ghat.values))
    assert fit.alpha == pytest.approx(0.7, abs=1e-8)
    assert fit.beta[0] == pytest.approx(beta, abs=1e-8)
    assert fit.residual <= 1e-10
    fit = affine_phase_fit(ghat)
    assert abs(fit.alpha) <= 1e-8 and abs(fit.beta[0]) <= 1e-8 and fit.residual <= 1e-12
    with pytest.raises(ContractError):
        affine_phase_fit(Field.zeros(spec, Space.FREQUENCY))
    with pytest.raises(ContractError):
        affine_phase_fit(gaussian(spec))


def test_phase_fit_off_grid_shift():
    spec = GridSpec.uniform(2, 65, 6.0)
    h = spec.spacing[0]
    f = gaussian(spec, (2.37 * h, -1.61 * h)) * np.exp(0.4j)
    fit = affine_phase_fit(forward_transform(f))
    assert np.allclose(fit.x0, [2.37 * h, -1.61 * h], atol=h / 100)
    assert fit.residual <= 1e-8


@given(st.integers(-10, 10), st.integers(0, 2**32 - 1))
def test_phase_fit_translation_covariance(a, seed):
    spec = GridSpec.uniform(1, 129, 8.0)
    h = spec.spacing[0]
    rng = np.random.default_rng(seed)
    s = rng.uniform(-3, 3) * h
    base = forward_transform(gaussian(spec, [s]))
    xi = spec.mesh(Space.FREQUENCY)[0]
    moved = base.with_values(base.values * np.exp(-2j * np.pi * xi * a * h))
    f0, f1 = affine_phase_fit(base), affine_phase_fit(moved)
    assert f1.x0[0] - f0.x0[0] == pytest.approx(a * h, abs=1e-9)
    assert f0.beta[0] - f1.beta[0] == pytest.approx(2 * np.pi * a * h, abs=1e-8)


def test_classify_translated_gaussian():
    spec = GridSpec.uniform(1, 257, 16.0)
    h = spec.spacing[0]
    f = gaussian(spec, [4 * h]) * np.exp(0.3j)
    rep = classify_equality(f, fractional_laplacian(1.0), 4)
    assert rep.verdict == "equality-affine"
    assert abs(rep.x0[0] - 4 * h) <= h / 100
    assert rep.alpha == pytest.approx(0.3, abs=1e-6)
    assert rep.support_connected
    assert rep.to_dict()["x0"] == list(rep.x0)
    rec = affine_reconstruction(fourier_rearrange(f), rep.alpha, rep.beta)
    assert l2_norm(rec - f) <= 1e-6 * l2_norm(f)


def test_classify_permuted_moduli_is_strict():
    rng = np.random.default_rng(5)
    ghat = forward_transform(gaussian(SPEC)).values
    fhat = ghat[rng.permutation(ghat.size)]
    f = inverse_transform(Field.frequency(SPEC, fhat))
    rep = classify_equality(f, fractional_laplacian(1.0), 4)
    assert rep.verdict == "strict inequality"
    assert rep.energy_gap > 0


def test_classify_errors_and_weak_multiplier():
    with pytest.raises(ContractError):
        classify_equality(Field.zeros(SPEC), fractional_laplacian(1.0), 4)
    with pytest.raises(ContractError):
        classify_equality(gaussian(SPEC), fractional_laplacian(1.0), 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotStrictlyIncreasingWarning)
        flat = custom(lambda k: np.minimum(k, 1.0))
        with pytest.warns(UserWarning, match="strictly"):
            rep = classify_equality(gaussian(SPEC), flat, 4)
    assert not rep.multiplier_strict


@given(seeds, st.sampled_from([4, 6]))
def test_classification_soundness(seed, p):
    spec = GridSpec.uniform(1, 129, 8.0)
    rng = np.random.default_rng(seed)
    h = spec.spacing[0]
    f = gaussian(spec, [rng.integers(-6, 7) * h]) * np.exp(1j * rng.uniform(-3, 3))
    if rng.uniform() < 0.5:
        f = band_limited_field(spec, rng)
    rep = classify_equality(f, fractional_laplacian(1.0), p)
    if rep.verdict == "equality-affine" and rep.phase_residual <= 1e-8:
        rec = affine_reconstruction(fourier_rearrange(f), rep.alpha, rep.beta)
        assert l2_norm(rec - f) <= 1e-6 * l2_norm(f)


def test_disconnected_example():
    ex = disconnected_equality_example(6.0, 0.0, math.pi / 2)
    g4 = lp_norm(ex.g, 4)
    assert ex.l4_gap <= 1e-10 * g4
    assert ex.report.phase_residual > 0.1
    assert ex.report.verdict == "equality-nonaffine (support disconnected)"
    assert not ex.report.support_connected


def test_disconnected_example_equal_phases():
    ex = disconnected_equality_example(6.0, 0.8, 0.8)
    assert ex.l4_gap <= 1e-12
    assert ex.report.phase_residual <= 1e-10
    assert ex.report.verdict == "equality-affine"


def test_disconnected_example_2d_and_errors():
    ex = disconnected_equality_example([4.5, 0.0], 0.0, math.pi / 2)
    assert ex.l4_gap <= 1e-10 * lp_norm(ex.g, 4)
    assert ex.report.phase_residual > 0.1
    with pytest.raises(ContractError):
        disconnected_equality_example(3.0, 0.0, 1.0)


@given(specs, seeds)
def test_p2_degeneracy(spec, seed):
    rng = np.random.default_rng(seed)
    ghat = np.abs(forward_transform(random_field(spec, rng)).values)
    g = inverse_transform(Field.frequency(spec, ghat))
    f = inverse_transform(Field.frequency(spec, ghat * np.exp(1j * rng.uniform(0, 2 * np.pi, spec.shape))))
    assert abs(lp_norm(g, 2) - lp_norm(f, 2)) <= 1e-12 * lp_norm(g, 2)
