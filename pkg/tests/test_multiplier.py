import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import gaussian, random_field
from fourier_rearrangement.errors import ContractError, GridMismatchError
from fourier_rearrangement.grid import Field, GridSpec, Space, forward_transform, inverse_transform, l2_norm
from fourier_rearrangement.multiplier import (
    NotStrictlyIncreasingWarning,
    bessel_power,
    catalog,
    custom,
    fractional_laplacian,
    ilw,
    multiplier_from_dict,
    polyharmonic,
    quadratic_form,
    rearrangement_energy_gap,
    sobolev_norm,
    whitham,
)
from fourier_rearrangement.rearrange import fourier_rearrange, is_shell_sorted, radial_order

SPEC = GridSpec.uniform(1, 257, 16.0)


def test_gaussian_dirichlet_energy():
    g = gaussian(SPEC)
    assert quadratic_form(g, fractional_laplacian(1.0)) == pytest.approx(np.pi / np.sqrt(2), abs=1e-8)
    both = custom(lambda k: 1 + k**2, growth_s=1.0)
    assert quadratic_form(g, both) == pytest.approx(1 / np.sqrt(2) + np.pi / np.sqrt(2), abs=1e-8)
    zero = custom(lambda k: 0 * k)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotStrictlyIncreasingWarning)
        assert quadratic_form(gaussian(SPEC), zero) == 0


def test_symbol_special_values():
    k = np.array([0.0, 1.0, 2.0])
    assert np.allclose(ilw(0.5).profile(k.copy()), [1.0, 1 / np.tanh(1.0), 2 / np.tanh(2.0)])
    w = whitham(0.5).profile(k.copy())
    assert w[0] == pytest.approx(1 - np.sqrt(0.5))
    assert w[1] == pytest.approx(1 - np.sqrt(np.tanh(0.5)))
    ph = polyharmonic([(1, 2), (0.5, 1)]).profile(k)
    assert np.allclose(ph, k**4 + 0.5 * k**2)
    assert np.allclose(bessel_power(2).profile(k), 1 + k**2)


def test_catalog_is_valid_and_strict():
    for L in catalog():
        sym = L.symbol(SPEC)
        assert np.all(sym >= 0) and np.all(np.isfinite(sym))
        assert L.is_strict(SPEC)
        assert not sym.flags.writeable


def test_growth_certificate():
    r = SPEC.radius(Space.FREQUENCY)
    for L in catalog():
        C = L.growth_constant(SPEC)
        assert np.all(L.symbol(SPEC) <= C * (1 + r ** (2 * L.growth_s)) * (1 + 1e-15))


def test_radial_in_2d():
    spec = GridSpec.uniform(2, 17, 2.0)
    for L in catalog():
        sym = L.symbol(spec)
        assert np.array_equal(sym, sym.T)
        assert np.array_equal(sym, sym[::-1, :])


def test_custom_validation():
    with pytest.raises(ContractError, match="negative"):
        custom(lambda k: k - 1).symbol(SPEC)
    with pytest.raises(ContractError, match="nondecreasing"):
        custom(lambda k: np.exp(-k)).symbol(SPEC)
    with pytest.raises(ContractError, match="radial"):
        spec = GridSpec.uniform(2, 5, 1.0)
        custom(lambda k: k + np.arange(k.size).reshape(k.shape) * 1e-3).symbol(spec)
    with pytest.warns(NotStrictlyIncreasingWarning):
        custom(lambda k: np.minimum(k, 1.0)).symbol(SPEC)


def test_parameter_validation():
    with pytest.raises(ContractError):
        whitham(1.5)
    with pytest.raises(ContractError):
        fractional_laplacian(-1)
    with pytest.raises(ContractError):
        polyharmonic([(-1, 2)])
    with pytest.raises(ContractError):
        multiplier_from_dict({"kind": "nope"})
    with pytest.raises(ContractError):
        multiplier_from_dict({"kind": "ilw"})


def test_from_dict():
    L = multiplier_from_dict({"kind": "polyharmonic", "terms": [[1.0, 2.0], [0.5, 1.0]]})
    k = 2 * np.pi * SPEC.radius(Space.FREQUENCY)
    assert np.allclose(L.symbol(SPEC), k**4 + 0.5 * k**2)
    assert L.growth_s == 2.0
    assert multiplier_from_dict({"kind": "whitham", "h": 1}).kind == "whitham"


def test_bound_multiplier_refuses_other_grid():
    L = fractional_laplacian(1.0).bind(SPEC)
    other = GridSpec.uniform(1, 129, 16.0)
    with pytest.raises(GridMismatchError):
        quadratic_form(gaussian(other), L)
    assert quadratic_form(gaussian(SPEC), L) > 0


def test_sobolev_norm():
    g = gaussian(SPEC)
    assert sobolev_norm(g, 0.0) == pytest.approx(l2_norm(g), rel=1e-12)
    assert sobolev_norm(g, 1.0, split=True) == pytest.approx(np.sqrt(1 / np.sqrt(2) + np.pi / np.sqrt(2)), abs=1e-8)
    assert sobolev_norm(g * 2, 1.5) == 2 * sobolev_norm(g, 1.5)


def test_energy_gap_examples():
    g = gaussian(SPEC)
    L = fractional_laplacian(1.0)
    assert abs(rearrangement_energy_gap(g, L)) <= 1e-10
    # permuted moduli: gap equals the brute-force sum difference
    rng = np.random.default_rng(0)
    ghat = forward_transform(g).values
    perm = rng.permutation(ghat.size)
    fhat = ghat.ravel()[perm].reshape(ghat.shape) * np.exp(1j * rng.uniform(0, 6, ghat.shape))
    f = inverse_transform(Field.frequency(SPEC, fhat))
    w = L.symbol(SPEC)
    dxi = SPEC.cell_volume(Space.FREQUENCY)
    brute = dxi * (np.sum(w * np.abs(fhat) ** 2) - np.sum(w * np.abs(ghat) ** 2))
    gap = rearrangement_energy_gap(f, L)
    assert gap > 0
    assert gap == pytest.approx(brute, rel=1e-10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotStrictlyIncreasingWarning)
        const = custom(lambda k: 0 * k + 3.0)
        assert abs(rearrangement_energy_gap(f, const)) <= 1e-12 * quadratic_form(f, const)


@given(st.integers(0, 2**32 - 1), st.sampled_from(range(5)), st.sampled_from([1, 2]))
def test_energy_monotone_and_equality_forcing(seed, which, dim):
    spec = GridSpec.uniform(dim, 33 if dim == 1 else 9, 3.0)
    L = catalog()[which]
    f = random_field(spec, np.random.default_rng(seed))
    E = quadratic_form(f, L)
    gap = rearrangement_energy_gap(f, L)
    assert gap >= -1e-12 * E
    # direct evaluation through f# agrees with the spectral shortcut
    assert E - quadratic_form(fourier_rearrange(f), L) == pytest.approx(gap, rel=1e-8, abs=1e-12 * E)
    order = radial_order(spec, Space.FREQUENCY)
    if gap <= 1e-12 * E:
        assert is_shell_sorted(forward_transform(f).values, order)


def test_sorted_modulus_gives_zero_gap():
    rng = np.random.default_rng(4)
    spec = GridSpec.uniform(2, 9, 3.0)
    order = radial_order(spec, Space.FREQUENCY)
    mod = np.empty(spec.size)
    mod[order.permutation] = np.sort(rng.uniform(0, 1, spec.size))[::-1]
    fhat = mod.reshape(spec.shape) * np.exp(1j * rng.uniform(0, 6, spec.shape))
    f = inverse_transform(Field.frequency(spec, fhat))
    for L in catalog():
        assert abs(rearrangement_energy_gap(f, L)) <= 1e-12 * quadratic_form(f, L)
