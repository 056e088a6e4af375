import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rign.grid import (MARGIN, GridFunction, ResolutionError, SupportOverflowError, dilate,
                       derivative_tensor, gaussian_bump, indicator, magnitude,
                       polynomial_bump, random_grid_function, sa_bump, sa_bump_profile, sample,
                       zero_pad)


def test_gridfunction_rejects_coarse_and_nonfinite():
    with pytest.raises(ValueError):
        GridFunction(np.zeros(4), 1.0, 1)
    vals = np.zeros(16)
    vals[8] = np.nan
    with pytest.raises(ValueError):
        GridFunction(vals, 1.0, 1)


def test_strict_margin_enforced():
    vals = np.zeros(16)
    vals[1] = 1.0
    with pytest.raises(SupportOverflowError):
        GridFunction(vals, 1.0, 1)
    GridFunction(vals, 1.0, 1, strict=False)


def test_values_are_read_only():
    f = sample(gaussian_bump(), 1, 1.5, 64)
    with pytest.raises(ValueError):
        f.values[10] = 3.0


def test_sample_overflow():
    with pytest.raises(SupportOverflowError):
        sample(gaussian_bump(1.0), 1, 1.0, 64)


def test_cell_geometry():
    f = sample(gaussian_bump(), 2, 2.0, 32)
    assert f.spacing == pytest.approx(4.0 / 32)
    assert f.cell_volume == pytest.approx((4.0 / 32) ** 2)
    assert f.coordinates().shape == (32, 32, 2)


@pytest.mark.parametrize("measure", [0.1, 0.37, 1.0])
def test_indicator_measure(measure):
    f = sample(indicator(measure), 1, 2.0, 1024)
    got = np.count_nonzero(f.values) * f.cell_volume
    assert abs(got - measure) <= f.spacing


def test_indicator_measure_2d():
    f = sample(indicator(0.5), 2, 1.5, 256)
    got = np.count_nonzero(f.values) * f.cell_volume
    assert got == pytest.approx(0.5, rel=0.02)


def test_sa_bump_profile_pieces():
    r = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 2.5])
    np.testing.assert_allclose(sa_bump_profile(r, 2), [2.0, 1.75, 1.0, 0.25, 0.0, 0.0])
    # continuous at r = 1 for every k
    for k in (1, 2, 3, 4):
        left, right = sa_bump_profile([1 - 1e-12, 1.0], k)
        assert left == pytest.approx(right, abs=1e-9)


def test_dilate_composes_and_evaluates():
    fam = dilate(dilate(polynomial_bump(1.0), 2.0), 1.5)
    assert fam.scale == pytest.approx(3.0)
    x = np.array([[0.1], [0.2]])
    np.testing.assert_allclose(fam(x), polynomial_bump(1.0)(3.0 * x))
    assert fam.support_radius(1) == pytest.approx(1 / 3)


def test_dilate_rejects_nonpositive():
    with pytest.raises(ValueError):
        dilate(gaussian_bump(), 0.0)


def test_central_difference_exact_on_polynomials():
    # iterated central differences are exact for x**2 (first) and x**3 (second)
    res, L = 64, 1.0
    x = (np.arange(res) + 0.5) * (2 * L / res) - L
    f = GridFunction(x**3, L, 1, strict=False)
    d1 = derivative_tensor(GridFunction(x**2, L, 1, strict=False), 1).values[..., 0]
    np.testing.assert_allclose(d1[1:-1], 2 * x[1:-1], atol=1e-12)
    d2 = derivative_tensor(f, 2).values[..., 0, 0]
    np.testing.assert_allclose(d2[2:-2], 6 * x[2:-2], atol=1e-9)


def test_derivative_tensor_shape_and_symmetry_2d():
    u = sample(gaussian_bump(1.0), 2, 1.5, 64)
    d2 = derivative_tensor(u, 2)
    assert d2.values.shape == (64, 64, 2, 2)
    np.testing.assert_allclose(d2.values[..., 0, 1], d2.values[..., 1, 0], atol=1e-12)


def test_derivative_resolution_error():
    u = GridFunction(np.zeros(8), 1.0, 1)
    with pytest.raises(ResolutionError):
        derivative_tensor(u, 4)


def test_derivative_converges_for_gaussian():
    def err(res):
        u = sample(gaussian_bump(1.0), 1, 1.5, res)
        x = u.axis()
        h = 1e-6
        exact = (gaussian_bump(1.0)((x + h)[:, None]) - gaussian_bump(1.0)((x - h)[:, None])) / (2 * h)
        return np.max(np.abs(derivative_tensor(u, 1).values[..., 0] - exact))
    assert err(512) < err(256) / 3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 2))
def test_magnitude_is_euclidean_norm(seed, dim):
    rng = np.random.default_rng(seed)
    u = random_grid_function(rng, res=16, dim=dim)
    d = derivative_tensor(u, 1)
    m = magnitude(d)
    np.testing.assert_allclose(m.values, np.sqrt(np.sum(d.values**2, axis=-1)))
    assert np.all(m.values >= 0)


def test_random_grid_function_margin_and_ties():
    rng = np.random.default_rng(3)
    f = random_grid_function(rng, res=64, levels=5)
    assert np.all(f.values[:MARGIN] == 0) and np.all(f.values[-MARGIN:] == 0)
    assert np.unique(np.abs(f.values[f.values != 0])).size <= 5


def test_arithmetic():
    f = sample(gaussian_bump(), 1, 1.5, 32)
    np.testing.assert_allclose((f * 2.0).values, 2 * f.values)
    np.testing.assert_allclose((f + f - f).values, f.values)


def test_sa_bump_validation():
    with pytest.raises(ValueError):
        sa_bump(0)


@pytest.mark.parametrize("dim", [1, 2])
def test_zero_pad_keeps_spacing_and_rearrangement(dim):
    from rign.rearrange import rearrange

    f = random_grid_function(np.random.default_rng(3), res=16, dim=dim)
    g = zero_pad(f, 5)
    assert g.res == 26 and g.spacing == pytest.approx(f.spacing)
    inner = (slice(5, 21),) * dim
    np.testing.assert_array_equal(g.values[inner], f.values)
    r1, r2 = rearrange(f), rearrange(g)
    np.testing.assert_array_equal(r1.values, r2.values)
    np.testing.assert_allclose(r1.widths, r2.widths, rtol=1e-12)
    with pytest.raises(ValueError):
        zero_pad(f, -1)
