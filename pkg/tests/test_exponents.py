import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcc.exponents import (
    QCRegularity,
    Regime,
    Rejection,
    alpha_from_b,
    hk_beta_general,
    hk_beta_planar,
    interpolation_indices,
    lebesgue_q,
    planar_bounds,
    planar_regularity,
    reciprocal,
    regime_of,
    sobolev_q,
    target_inv_q,
    target_q,
)


def test_target_q_vectors():
    assert target_q(1, 2, QCRegularity(2, a=3, b=F(1, 2))) == 2
    assert target_q(F(1, 2), 2, QCRegularity(2, b=1)) == F(4, 3)
    assert target_q(1, 4, QCRegularity(2, a=2)) == F(8, 3)


def test_target_q_rejection():
    r = target_q(F(1, 2), F(11, 10), QCRegularity(2, b=F(1, 10)))
    assert isinstance(r, Rejection) and not r
    assert r.value > 1


def test_target_q_bad_p():
    with pytest.raises(ValueError):
        target_q(F(1, 2), 1, QCRegularity(2, b=1))


def test_float_inputs_give_float():
    q = target_q(0.5, 2.0, QCRegularity(2, b=1.0))
    assert isinstance(q, float)
    assert q == pytest.approx(4 / 3, abs=1e-12)


def test_regime_is_exact_on_the_line():
    assert regime_of(F(2, 3), 3, 2) is Regime.CRITICAL
    assert regime_of(F(2, 3) - F(1, 10**30), 3, 2) is Regime.SUBCRITICAL
    assert regime_of(F(2, 3) + F(1, 10**30), 3, 2) is Regime.SUPERCRITICAL


def test_planar_bounds():
    assert planar_bounds(2) == (2, 1)
    assert planar_bounds(3) == (F(3, 2), F(1, 2))
    assert planar_bounds(1) == (math.inf, math.inf)
    with pytest.raises(ValueError):
        planar_bounds(F(1, 2))


def test_planar_regularity_inside_window():
    reg = planar_regularity(2)
    a_K, b_K = planar_bounds(2)
    assert 1 < reg.a < a_K and 0 < reg.b < b_K


def test_lebesgue_q():
    assert lebesgue_q(math.inf, 1) == math.inf
    assert lebesgue_q(2, 1) == 1
    assert lebesgue_q(3, 2) == 2
    with pytest.raises(ValueError):
        lebesgue_q(2, 0)


def test_sobolev_q():
    reg = QCRegularity(2, a=2, b=1)
    assert sobolev_q(2, reg) == 2
    assert sobolev_q(4, reg) == F(8, 3)
    assert sobolev_q(F(3, 2), reg) == F(6, 5)
    r = sobolev_q(F(5, 4), reg)
    assert isinstance(r, Rejection) and r.value == F(4, 3)


def test_subcritical_indices_vector():
    idx = interpolation_indices(F(1, 2), 2, QCRegularity(2, b=1))
    assert (idx.p0, idx.p1, idx.q0, idx.q1) == (3, F(3, 2), F(3, 2), F(6, 5))
    assert idx.q == F(4, 3)


def test_critical_indices_pin_endpoint():
    reg = QCRegularity(3, a=3, b=2)
    idx = interpolation_indices(F(1, 2), 6, reg, epsilon0=F(1, 10))
    assert idx.regime is Regime.CRITICAL
    assert idx.p1 == idx.q1 == 3
    assert 0 < reciprocal(idx.q) - F(1, 6) < F(1, 10)


def test_supercritical_gap_bound():
    reg = QCRegularity(2, a=2, b=1)
    idx = interpolation_indices(F(3, 4), 4, reg)
    assert idx.regime is Regime.SUPERCRITICAL
    assert abs(idx.extras["q_tilde_gap"]) <= idx.extras["q_tilde_gap_bound"]


def test_hk_beta():
    assert hk_beta_planar(F(1, 2), 2, 1) == F(1, 2)
    assert hk_beta_planar(F(1, 2), 2, F(3, 2)) == F(1, 4)
    assert isinstance(hk_beta_planar(F(1, 2), 2, 3), Rejection)
    assert alpha_from_b(1) == 2
    assert hk_beta_general(F(1, 2), 2, 2, 2) == 0
    assert hk_beta_general(F(1, 2), 4, 2, 2) == F(1, 2)
    assert hk_beta_general(F(3, 10), 3, 1, 2) == F(3, 10)
    with pytest.raises(ValueError):
        hk_beta_general(1, 4, 2, 2)


fracs = st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=200)


@st.composite
def sub_cases(draw):
    n = draw(st.sampled_from([2, 3, 4]))
    s = draw(fracs)
    t = draw(fracs)
    inv_p = s / n + t * (1 - s / n)
    b = draw(st.fractions(min_value=F(1, 4), max_value=20, max_denominator=50))
    return n, s, 1 / inv_p, b


@settings(max_examples=200, deadline=None)
@given(sub_cases())
def test_subcritical_identities(case):
    n, s, p, b = case
    reg = QCRegularity(n, b=b)
    if not target_q(s, p, reg):
        return
    try:
        idx = interpolation_indices(s, p, reg)
    except ValueError:
        return  # an end point would fall to q_j <= 1
    inv = idx.inverse
    assert (1 - s) * inv["p0"] + s * inv["p1"] == 1 / p
    assert (1 - s) * inv["q0"] + s * inv["q1"] == target_inv_q(s, p, reg)
    for lam in (0, 1):
        ip, iq = inv[f"p{lam}"], inv[f"q{lam}"]
        assert iq - ip == (ip - F(lam, n)) / b


@settings(max_examples=200, deadline=None)
@given(fracs, st.sampled_from([2, 3, 4]), st.fractions(min_value=F(11, 10), max_value=10, max_denominator=50))
def test_critical_fixed_point(s, n, a):
    p = n / s
    assert target_q(s, p, QCRegularity(n, a=a, b=a - 1)) == p


@settings(max_examples=200, deadline=None)
@given(fracs, st.fractions(min_value=F(11, 10), max_value=8, max_denominator=40),
       st.fractions(min_value=F(1, 10), max_value=10, max_denominator=40))
def test_monotone_in_c_and_gap(s, p, c):
    reg1 = QCRegularity(2, a=c + 1, b=c)
    reg2 = QCRegularity(2, a=2 * c + 1, b=2 * c)
    inv1, inv2 = target_inv_q(s, p, reg1), target_inv_q(s, p, reg2)
    assert inv2 <= inv1
    regime = regime_of(s, p, 2)
    cc = reg1.b if regime is Regime.SUBCRITICAL else reg1.a
    assert inv1 - 1 / p == abs(s / 2 - 1 / p) / cc


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=F(11, 10), max_value=8, max_denominator=40),
       st.fractions(min_value=F(1, 10), max_value=10, max_denominator=40))
def test_endpoint_consistency(p, b):
    reg = QCRegularity(2, a=b + 1, b=b)
    lq = lebesgue_q(p, b)
    if lq > 1:
        assert target_q(0, p, reg) == lq
    else:
        assert isinstance(target_q(0, p, reg), Rejection)
    sq = sobolev_q(p, reg)
    if sq:
        assert target_q(1, p, reg) == sq


def test_regularity_validation():
    with pytest.raises(ValueError):
        QCRegularity(1)
    with pytest.raises(ValueError):
        QCRegularity(2, a=1)
    with pytest.raises(ValueError):
        QCRegularity(2, b=0)
