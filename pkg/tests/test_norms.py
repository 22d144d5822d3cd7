import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcc.norms import (
    DEFAULT_CUTOFFS,
    FractionalNormSpec,
    classify_membership,
    classify_partials,
    estimate,
    gagliardo_seminorm,
    lp_norm,
    modulus_seminorm,
    sobolev_seminorm,
    worker_count,
)
from qcc.profiles import Membership, constant, custom, flat_power, singular_power
from qcc.radial_maps import Ball

GAG = "gagliardo_double_integral"
MOD = "modulus_of_smoothness"

# continuous: r^-0.2 inside 1/2, linear down to 0 at r = 1
_C = 0.5**-0.2 / 0.5
KINKED = custom([(0, 0.5, 1, -0.2), (0.5, 1, _C, 0), (0.5, 1, -_C, 1)])


def test_lp_examples():
    sqrt_pi_3 = math.sqrt(math.pi / 3)
    assert lp_norm(flat_power(2), 2).value == pytest.approx(sqrt_pi_3, rel=1e-12)
    assert lp_norm(singular_power(0.5), 2).value == pytest.approx(sqrt_pi_3, rel=1e-12)
    est = lp_norm(singular_power(1.0), 2)
    assert est.divergent and est.verdict is Membership.NON_MEMBER


def test_sobolev_examples():
    assert sobolev_seminorm(constant(3.0), 2).value == 0
    assert sobolev_seminorm(flat_power(1), 2).value == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert sobolev_seminorm(singular_power(0.5), 4).divergent


def test_lp_piecewise_matches_closed_form():
    prof = custom([(0, 0.5, 2.0, 0.0), (0.5, 1.0, 1.0, 0.0)])
    # 2^2 |B_1/2| + |B_1 \ B_1/2|
    exact = math.sqrt(4 * math.pi / 4 + math.pi * 3 / 4)
    assert lp_norm(prof, 2).value == pytest.approx(exact, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(1.2, 6.0), st.floats(0.2, 5.0), st.sampled_from([2, 3]))
def test_lp_scaling_law(e, p, lam, n):
    # ||r^e||_{L^p(B_lam)} = lam^{e + n/p} ||r^e||_{L^p(B_1)}
    prof = custom([(0, math.inf, 1.0, e)])
    base = lp_norm(prof, p, Ball(1.0), n).value
    cut = [lam * c for c in DEFAULT_CUTOFFS]
    scaled = lp_norm(prof, p, Ball(lam), n, cutoffs=cut).value
    assert scaled == pytest.approx(lam ** (e + n / p) * base, rel=1e-10)


@pytest.mark.parametrize("estimator", [GAG, MOD])
def test_constant_is_zero(estimator):
    est = estimate(constant(2.0), FractionalNormSpec(0.5, 2, estimator=estimator))
    assert est.value == 0 and est.verdict is Membership.MEMBER


@pytest.mark.parametrize("estimator", [GAG, MOD])
def test_spec_examples(estimator):
    member = estimate(singular_power(0.25), FractionalNormSpec(0.5, 2, estimator=estimator))
    assert member.verdict is Membership.MEMBER
    assert -0.05 <= member.log_slope <= 0.0
    outside = estimate(singular_power(0.75), FractionalNormSpec(0.5, 2, estimator=estimator))
    assert outside.verdict is Membership.NON_MEMBER and outside.log_slope < -0.05
    flat = estimate(flat_power(0.4), FractionalNormSpec(0.9, 8, estimator=estimator))
    assert flat.divergent


def test_routes_agree():
    spec = FractionalNormSpec(0.3, 3)
    pure = gagliardo_seminorm(flat_power(1.5), spec)
    general = gagliardo_seminorm(flat_power(1.5), spec, force_general=True)
    assert pure.diagnostics["route"] == "radial_1d"
    assert general.diagnostics["route"] == "radial_2d"
    assert general.value == pytest.approx(pure.value, rel=1e-8)


def test_estimators_agree_on_value():
    spec = FractionalNormSpec(0.5, 2)
    g = gagliardo_seminorm(KINKED, spec).value
    m = modulus_seminorm(KINKED, spec, seed=11).value
    assert m == pytest.approx(g, rel=2e-2)


def test_modulus_reproducible_and_thread_independent(monkeypatch):
    spec = FractionalNormSpec(0.5, 2)
    monkeypatch.setenv("QCC_THREADS", "1")
    a = modulus_seminorm(singular_power(0.3), spec, seed=5, samples=20_000)
    monkeypatch.setenv("QCC_THREADS", "3")
    b = modulus_seminorm(singular_power(0.3), spec, seed=5, samples=20_000)
    assert np.array_equal(a.partials, b.partials)
    c = modulus_seminorm(singular_power(0.3), spec, seed=6, samples=20_000)
    assert not np.array_equal(a.partials, c.partials)
    assert c.verdict is a.verdict is Membership.MEMBER


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("QCC_THREADS", "2")
    assert worker_count() == 2
    monkeypatch.setenv("QCC_THREADS", "lots")
    with pytest.raises(ValueError):
        worker_count()


@pytest.mark.parametrize("prof,s,p", [
    (singular_power(0.25), 0.5, 2),
    (singular_power(0.9), 0.5, 2),
    (flat_power(0.3), 0.7, 4),
    (KINKED, 0.4, 3),
])
def test_partials_nondecreasing(prof, s, p):
    est = gagliardo_seminorm(prof, FractionalNormSpec(s, p))
    assert np.all(np.diff(est.partials) >= 0)
    assert np.all(np.diff(est.cutoffs) < 0)


def test_classifier_on_synthetic_sequences():
    eps = np.array(DEFAULT_CUTOFFS)
    conv = 1.0 - eps**0.5
    assert classify_partials(eps, conv, 2)["verdict"] is Membership.MEMBER
    div = eps**-0.5
    assert classify_partials(eps, div, 2)["verdict"] is Membership.NON_MEMBER
    slow = -np.log(eps)  # logarithmic growth: unresolved either way
    assert classify_partials(eps, slow, 2)["verdict"] is Membership.INCONCLUSIVE
    flat = np.ones_like(eps)
    assert classify_partials(eps, flat, 2)["verdict"] is Membership.MEMBER


def test_threshold_controls_verdicts():
    eps = np.array(DEFAULT_CUTOFFS)
    slow = 1.0 - eps**0.03
    assert classify_partials(eps, slow, 2, slope_threshold=0.05)["verdict"] is Membership.INCONCLUSIVE
    assert classify_partials(eps, slow, 2, slope_threshold=0.0)["verdict"] is Membership.MEMBER


def test_classify_membership_and_json():
    spec = FractionalNormSpec(0.5, 2)
    assert classify_membership(singular_power(0.1), spec) is Membership.MEMBER
    d = json.loads(estimate(singular_power(0.75), spec).to_json())
    assert d["value"] == "divergent" and d["verdict"] == "non-member"


def test_endpoint_smoothness_routes():
    assert estimate(flat_power(2), FractionalNormSpec(0, 2)).method == "lp"
    assert estimate(flat_power(2), FractionalNormSpec(1, 2)).method == "sobolev"


def test_spec_validation():
    with pytest.raises(ValueError):
        FractionalNormSpec(1.5, 2)
    with pytest.raises(ValueError):
        FractionalNormSpec(0.5, 1)
    with pytest.raises(ValueError):
        FractionalNormSpec(0.5, 2, estimator="fft")
    with pytest.raises(ValueError):
        FractionalNormSpec(0.5, 2, domain=Ball(1.0, (1.0, 0.0)))
