import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcc.profiles import constant, custom, flat_power, singular_power
from qcc.quadrature import angular_kernel, ball_volume
from qcc.radial_maps import (
    Ball,
    RadialStretch,
    SingularityError,
    change_of_variables_check,
    evaluate,
    inverse,
    jacobian,
    jacobian_power_integral,
    jacobian_power_integral_mc,
    jacobian_power_integral_quadrature,
)


def test_evaluate_examples():
    phi = RadialStretch(2)
    assert np.allclose(evaluate(phi, [1.0, 0.0]), [1.0, 0.0])
    assert np.allclose(evaluate(phi, [0.5, 0.0]), [0.25, 0.0])
    for k in (0.3, 1.0, 2.5):
        assert np.all(evaluate(RadialStretch(k), [0.0, 0.0]) == 0.0)


def test_jacobian_examples():
    assert jacobian(RadialStretch(1), [0.3, -0.2]) == pytest.approx(1.0)
    assert jacobian(RadialStretch(2), [0.5, 0.0]) == pytest.approx(0.5)
    assert jacobian(RadialStretch(2), [0.0, 1.0]) == pytest.approx(2.0)
    with pytest.raises(SingularityError):
        jacobian(RadialStretch(0.5), [0.0, 0.0])


def test_inverse_round_trip():
    assert inverse(RadialStretch(1)).k == 1
    assert inverse(RadialStretch(2)).k == 0.5
    phi = RadialStretch(3)
    x = np.array([0.3, 0.4])
    assert np.allclose(evaluate(inverse(phi), evaluate(phi, x)), x, rtol=0, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 5), st.floats(0.2, 5), st.floats(1e-3, 10), st.floats(0, 2 * math.pi))
def test_semigroup(k, j, r, th):
    x = np.array([r * math.cos(th), r * math.sin(th)])
    lhs = evaluate(RadialStretch(k), evaluate(RadialStretch(j), x))
    rhs = evaluate(RadialStretch(k * j), x)
    # relative to |x|: a near-zero coordinate may be subnormal
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10), st.floats(1e-3, 10))
def test_round_trip_range(k, r):
    x = np.array([0.6 * r, -0.8 * r])
    back = evaluate(inverse(RadialStretch(k)), evaluate(RadialStretch(k), x))
    assert np.allclose(back, x, rtol=1e-12, atol=0)


def test_distortion():
    assert RadialStretch(1).distortion == 1
    for k in (0.3, 0.9, 1.1, 3):
        assert RadialStretch(k).distortion > 1
    assert RadialStretch(2, n=3).distortion == 4


def test_jacobian_integral_examples():
    assert jacobian_power_integral(RadialStretch(1), Ball(2.0), 7) == pytest.approx(ball_volume(2, 2.0))
    assert jacobian_power_integral(RadialStretch(2), Ball(), 1) == pytest.approx(math.pi, rel=1e-14)
    assert jacobian_power_integral(RadialStretch(2), Ball(), -0.5) == pytest.approx(math.pi * math.sqrt(2), rel=1e-14)
    assert math.isinf(jacobian_power_integral(RadialStretch(2), Ball(), -1))


@pytest.mark.parametrize("k", [F(1, 2), F(4, 5), F(3, 2), F(2), F(3)])
def test_divergence_edge_is_exact(k):
    phi = RadialStretch(k)
    edge = 1 / (1 - k)  # t = -1/(k-1) for k > 1, t = 1/(1-k) for k < 1
    assert math.isinf(jacobian_power_integral(phi, Ball(), edge))
    inside = edge * F(999, 1000)
    assert math.isfinite(jacobian_power_integral(phi, Ball(), inside))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [0.5, 0.8, 1.5, 2.0, 3.0])
def test_closed_form_vs_quadrature(n, k):
    edge = 1 / (1 - k)
    for t in (0.9 * edge, 0.5 * edge, 1.0, -0.3 * abs(edge)):
        phi = RadialStretch(k, n)
        exact = jacobian_power_integral(phi, Ball(1.3), t)
        quad = jacobian_power_integral_quadrature(phi, Ball(1.3), t)
        assert quad == pytest.approx(exact, rel=1e-6)


def test_quadrature_detects_divergence():
    assert math.isinf(jacobian_power_integral_quadrature(RadialStretch(2), Ball(), -1.0))


def test_mc_off_centre_is_seeded():
    ball = Ball(0.5, (2.0, 0.0))
    phi = RadialStretch(2)
    a = jacobian_power_integral_mc(phi, ball, 1, seed=3, samples=20_000)
    b = jacobian_power_integral_mc(phi, ball, 1, seed=3, samples=20_000)
    assert a == b
    # J = 2|x|^2 averaged over the disc around (2, 0): 2 (4 + R^2/2) |B|
    assert a == pytest.approx(2 * (4 + 0.125) * math.pi * 0.25, rel=2e-2)


def test_change_of_variables_cases():
    assert change_of_variables_check(RadialStretch(2), constant(1.0), Ball()) <= 1e-6
    for prof in (singular_power(0.3), flat_power(2), constant(2.0)):
        assert change_of_variables_check(RadialStretch(1), prof, Ball(0.7)) <= 1e-12
    r_profile = custom([(0, math.inf, 1.0, 1.0)])
    assert change_of_variables_check(RadialStretch(0.5), r_profile, Ball()) <= 1e-6


def test_change_of_variables_piecewise():
    prof = custom([(0, 0.5, 1.0, -0.4), (0.5, 2.0, 3.0, 1.5)])
    assert change_of_variables_check(RadialStretch(1.7), prof, Ball(1.2)) <= 1e-6


@pytest.mark.parametrize("sp", [0.4, 1.0, 1.7])
def test_kernel_symmetric(sp):
    r = np.array([0.1, 0.37, 0.8, 0.999])
    t = np.array([0.5, 0.2, 0.81, 0.998])
    a = angular_kernel(r, t, 2, sp)
    b = angular_kernel(t, r, 2, sp)
    assert np.array_equal(a, b)


def test_stretch_validation():
    with pytest.raises(ValueError):
        RadialStretch(0)
    with pytest.raises(ValueError):
        RadialStretch(2, n=1)
    with pytest.raises(ValueError):
        Ball(-1)
