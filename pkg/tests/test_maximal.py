import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rign.grid import (GridFunction, gaussian_bump, indicator, random_grid_function, sa_bump,
                       sample, zero_pad)
from rign.maximal import default_t_grid, maximal_operator, riesz_herz_curve, riesz_herz_ratio


def brute_maximal(f: GridFunction) -> np.ndarray:
    """Enumerate every cube (corner, side) inside the box."""
    a = f.abs_values()
    m, dim = f.res, f.dim
    best = a.copy()
    for side in range(1, m + 1):
        for corner in itertools.product(range(m - side + 1), repeat=dim):
            sl = tuple(slice(c, c + side) for c in corner)
            avg = a[sl].mean()
            np.maximum(best[sl], avg, out=best[sl])
    return best


seeds = st.integers(0, 2**31 - 1)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_matches_brute_force_1d(seed):
    rng = np.random.default_rng(seed)
    f = random_grid_function(rng, res=int(rng.integers(8, 40)))
    np.testing.assert_allclose(maximal_operator(f).values, brute_maximal(f), rtol=1e-12,
                               atol=1e-14)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_matches_brute_force_2d(seed):
    rng = np.random.default_rng(seed)
    f = random_grid_function(rng, res=int(rng.integers(8, 13)), dim=2)
    np.testing.assert_allclose(maximal_operator(f).values, brute_maximal(f), rtol=1e-12,
                               atol=1e-14)


def test_maximal_dominates_and_constant_on_constant():
    f = sample(gaussian_bump(), 1, 1.5, 128)
    M = maximal_operator(f).values
    assert np.all(M >= np.abs(f.values) - 1e-15)
    c = GridFunction(np.ones(16), 1.0, 1, strict=False)
    np.testing.assert_allclose(maximal_operator(c).values, 1.0)


def test_indicator_closed_form_1d():
    # chi_[0,a): outside, the best interval reaches back to the support
    f = sample(indicator(0.5), 1, 2.0, 400)
    M = maximal_operator(f).values
    x = f.axis()
    h = f.spacing
    inside = f.values > 0
    assert np.all(M[inside] == 1.0)
    lo, hi = x[inside].min() - h / 2, x[inside].max() + h / 2
    right = x > hi
    dist = x[right] + h / 2 - hi
    np.testing.assert_allclose(M[right], (hi - lo) / (hi - lo + dist), rtol=1e-12)


def test_default_t_grid():
    t = default_t_grid(2.0)
    assert t[0] == pytest.approx(2e-3) and t[-1] == pytest.approx(200.0)


@pytest.mark.parametrize("fam", [indicator(1.0), gaussian_bump(1.0), sa_bump(2)],
                         ids=lambda f: f.name)
def test_riesz_herz_band_1d(fam):
    f = sample(fam, 1, 2.5 * fam.support_radius(1), 512)
    lo, hi = riesz_herz_ratio(f)
    assert 0.4 <= lo and hi <= 1.1


def test_riesz_herz_curve_window_and_zero():
    f = sample(indicator(1.0), 1, 2.0, 128)
    t, ratio = riesz_herz_curve(f, t_grid=np.logspace(-3, 3, 50))
    assert t.max() < 2.0 and ratio.shape == t.shape
    with pytest.raises(ValueError):
        riesz_herz_ratio(GridFunction(np.zeros(16), 1.0, 1))


def test_zero_padding_extends_the_window():
    # closed forms on R: u** = min(1, 1/t), (M chi)* = min(1, 2/(t+1))
    f = zero_pad(sample(indicator(1.0), 1, 1.5, 150), 2000)
    t = np.array([0.5, 2.0, 10.0, 30.0])
    tt, ratio = riesz_herz_curve(f, t, window=np.inf)
    assert tt.size == 4
    np.testing.assert_allclose(ratio, np.minimum(1, 1 / t) / np.minimum(1, 2 / (t + 1)),
                               rtol=0.03)
    assert riesz_herz_curve(f, t)[0].tolist() == [0.5]  # default window is t < 2T
