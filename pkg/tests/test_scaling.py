import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rign.gn import GNProblem, _evaluate
from rign.grid import sa_bump
from rign.scaling import ball_volume, bump_norm_closed_forms, falsify, necessary_condition
from rign.spaces import INF, Lebesgue, Lorentz, Orlicz, fundamental_function
from rign.young import power, power_log


def inv(x):
    return 0.0 if x == INF else 1.0 / x


# -- necessary condition -------------------------------------------------------------


@pytest.mark.parametrize("X,Y,Z,j,k", [
    (Lebesgue(2), Lebesgue(2), Lebesgue(2), 1, 2),
    (Lorentz(4, 2), Lorentz(3, 1.5), Lorentz(6, 3), 1, 2),
    (Lebesgue(3), Lebesgue(2), Lebesgue(4), 1, 3),
])
def test_balanced_lorentz_ratio_is_one(X, Y, Z, j, k):
    res = necessary_condition(X, Y, Z, j, k)
    assert res.holds
    assert res.ratio.max() / res.ratio.min() <= 1 + 1e-12
    assert res.sup == pytest.approx(1.0, rel=1e-12)


def test_unbalanced_diverges():
    res = necessary_condition(Lebesgue(2), Lebesgue(3), Lebesgue(3), 1, 2)
    assert not res.holds and res.sup == INF and res.verdict.method == "asymptotic"


def test_orlicz_bounded_when_log_factors_cancel():
    X = Orlicz(power(2))
    res = necessary_condition(X, Orlicz(power_log(2, 1)), Orlicz(power_log(2, -1)), 1, 2)
    assert res.holds and math.isfinite(res.sup)
    bad = necessary_condition(X, Orlicz(power_log(2, 1)), Orlicz(power(2)), 1, 2)
    assert not bad.holds


# -- bump closed forms ------------------------------------------------------------------


def test_ball_volume():
    assert ball_volume(1) == pytest.approx(2.0)
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)


@pytest.mark.parametrize("space", [Lebesgue(2), Lorentz(3, 1), Orlicz(power_log(2, 1))], ids=str)
def test_closed_form_definition(space):
    s = np.geomspace(0.1, 10, 7)
    expected = s**2 * fundamental_function(space, 2 * (2 / s))
    np.testing.assert_allclose(bump_norm_closed_forms(s, space, 2), expected, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.integers(0, 3), st.floats(1.0, 6.0))
def test_closed_form_lebesgue_homogeneity(s, level, P):
    # doubling s multiplies the L^P size of the level-th derivative by 2^(level - 1/P)
    a = bump_norm_closed_forms(s, Lebesgue(P), level)
    b = bump_norm_closed_forms(2 * s, Lebesgue(P), level)
    assert b / a == pytest.approx(2 ** (level - 1 / P), rel=1e-10)


# -- falsification -------------------------------------------------------------------------


def test_balanced_triple_is_consistent():
    res = falsify(Lebesgue(2), Lebesgue(2), Lebesgue(2), 1, 2, s_values=np.geomspace(0.25, 4, 5))
    assert res.verdict == "consistent" and res.witness == []
    assert res.analytic.max() / res.analytic.min() <= 1 + 1e-12
    q = res.empirical
    assert q.max() / q.min() <= 1.25


def test_mild_unbalance_flagged_by_tail():
    res = falsify(Lebesgue(2), Lebesgue(3), Lebesgue(3), 1, 2, empirical=False)
    assert res.verdict == "falsified" and res.method == "asymptotic"
    # phi ratio m^(1/2 - 1/3) grows with the measure m ~ 2/s, so as s -> 0
    assert res.witness == ["s->0"]
    assert res.empirical is None and math.isnan(res.band)


@pytest.mark.parametrize("X,Y,Z,end", [
    (Lebesgue(1), Lebesgue(INF), Lebesgue(INF), "s->0"),
    (Lebesgue(INF), Lebesgue(1), Lebesgue(1), "s->inf"),
])
def test_strong_violation_growth_and_tracking(X, Y, Z, end):
    res = falsify(X, Y, Z, 1, 2, res=512)
    assert res.verdict == "falsified" and end in res.witness
    assert res.growth() >= 100
    assert res.band <= 10


def test_unit_dilation_matches_verify():
    X, Y, Z = Lebesgue(1), Lebesgue(4), Lebesgue(2)
    res = falsify(X, Y, Z, 1, 2, s_values=[1.0], res=256)
    p = GNProblem(1, 2, X, Y, Z, [sa_bump(2)], res=256, mode="lorentz")
    # the plain ratio, bypassing the balance gate of the lorentz mode
    assert res.empirical[0] == pytest.approx(_evaluate(p, sa_bump(2), 256, False)[2], rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.1, 8), st.floats(1.1, 8), st.floats(1.1, 8), st.booleans(),
       st.sampled_from([(1, 2), (1, 3), (2, 3)]))
def test_contrapositive(P, R, Q, make_balanced, jk):
    """A triple passing the necessary condition is never falsified by dilation, and vice versa."""
    j, k = jk
    th = j / k
    if make_balanced:
        P = 1 / (th / R + (1 - th) / Q)
    X, Y, Z = Lebesgue(P), Lebesgue(R), Lebesgue(Q)
    nc = necessary_condition(X, Y, Z, j, k)
    fs = falsify(X, Y, Z, j, k, empirical=False)
    balanced = abs(inv(P) - th * inv(R) - (1 - th) * inv(Q)) < 1e-12
    assert nc.holds == balanced
    assert (fs.verdict == "consistent") == nc.holds
