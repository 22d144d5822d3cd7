from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcc.profiles import (
    Kind,
    Membership,
    compose_with_stretch,
    constant,
    custom,
    evaluate_profile,
    flat_power,
    membership_oracle,
    membership_threshold,
    singular_power,
)
from qcc.radial_maps import RadialStretch, SingularityError


def test_evaluate_examples():
    assert evaluate_profile(singular_power(0.7), 1.0) == 0
    assert evaluate_profile(singular_power(0.5), 0.25) == pytest.approx(1.0)
    assert evaluate_profile(flat_power(2), 0.5) == pytest.approx(0.75)
    assert evaluate_profile(flat_power(2), 3.0) == 0
    with pytest.raises(SingularityError):
        evaluate_profile(singular_power(0.5), 0.0)
    assert evaluate_profile(flat_power(0.5), 0.0) == 1.0


def test_compose_examples():
    assert compose_with_stretch(singular_power(0.3), RadialStretch(1)) == singular_power(0.3)
    assert compose_with_stretch(singular_power(0.5), RadialStretch(2)) == singular_power(1.0)
    assert compose_with_stretch(flat_power(0.5), RadialStretch(1.5)) == flat_power(0.75)
    g = compose_with_stretch(flat_power(F(1, 3)), RadialStretch(F(3, 2)))
    assert g.rho == F(1, 2)


R_GRID = np.geomspace(1e-6, 1.5, 200)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 3), st.floats(0.2, 4), st.booleans())
def test_compose_matches_pointwise(rho, k, singular):
    prof = singular_power(rho) if singular else flat_power(rho)
    comp = compose_with_stretch(prof, RadialStretch(k))
    lhs = evaluate_profile(comp, R_GRID)
    rhs = evaluate_profile(prof, R_GRID**k)
    assert np.allclose(lhs, rhs, rtol=1e-14, atol=1e-14)


def test_compose_custom_pointwise():
    prof = custom([(0, 0.5, 2.0, -0.3), (0.5, 1.0, 1.0, 2.0)])
    comp = compose_with_stretch(prof, RadialStretch(1.6))
    r = np.linspace(0.01, 1.2, 97)
    assert np.allclose(comp.radial(r), prof.radial(r**1.6), rtol=1e-13)


def test_oracle_examples():
    assert membership_oracle(singular_power(F(1, 4)), F(1, 2), 2, 2) is Membership.MEMBER
    assert membership_oracle(singular_power(F(3, 4)), F(1, 2), 2, 2) is Membership.NON_MEMBER
    assert membership_oracle(flat_power(1), 1, 8, 2) is Membership.MEMBER
    assert membership_oracle(singular_power(F(1, 2)), F(1, 2), 2, 2) is Membership.BOUNDARY
    assert membership_oracle(flat_power(0.4), 0.9, 8, 2) is Membership.NON_MEMBER


def test_oracle_rejects_custom_and_bad_p():
    with pytest.raises(ValueError):
        membership_oracle(constant(), 0.5, 2, 2)
    with pytest.raises(ValueError):
        membership_oracle(singular_power(0.2), 0.5, 1, 2)


def test_threshold_values():
    assert membership_threshold(Kind.SINGULAR_POWER, F(1, 2), 2, 2) == F(1, 2)
    assert membership_threshold(Kind.FLAT_POWER, 1, 8, 2) == F(3, 4)
    assert membership_threshold(Kind.FLAT_POWER, F(1, 3), 3, 2) == -membership_threshold(
        Kind.SINGULAR_POWER, F(1, 3), 3, 2)


fr = st.fractions(min_value=F(1, 20), max_value=F(39, 20), max_denominator=40)


@settings(max_examples=150, deadline=None)
@given(fr, fr, st.fractions(min_value=0, max_value=1, max_denominator=20),
       st.fractions(min_value=F(11, 10), max_value=8, max_denominator=20))
def test_oracle_monotone(r1, r2, s, p):
    lo, hi = sorted((r1, r2))
    if membership_oracle(singular_power(hi), s, p, 2) is Membership.MEMBER:
        assert membership_oracle(singular_power(lo), s, p, 2) is Membership.MEMBER
    if membership_oracle(flat_power(lo), s, p, 2) is Membership.MEMBER:
        assert membership_oracle(flat_power(hi), s, p, 2) is Membership.MEMBER


def test_profile_structure():
    f = singular_power(0.5)
    assert f.origin_exponent() == -0.5 and f.is_singular
    assert f.pure_power_on(1.0) == (1.0, -0.5)
    g = flat_power(2)
    assert not g.is_singular
    assert g.breakpoints() == [1.0]
    assert np.allclose(g.derivative([0.25, 0.5]), [-0.5, -1.0])
    assert custom([(0, 0.5, 1, 1), (0.5, 1, 1, 2)]).pure_power_on(1.0) is None
    with pytest.raises(ValueError):
        singular_power(0)
