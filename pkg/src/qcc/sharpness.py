"""Witnesses showing the target exponent cannot be improved.

Given ``q'`` strictly beyond the guaranteed exponent, a radial stretch
``phi_k`` and a power profile are built so that the profile lies in
``H^{s,p}`` while its composition with ``phi_k`` misses ``H^{s,q'}``:

* subcritical (``sp < n``): ``f_rho`` with ``k = (1 - delta)(1/b + 1)``
  and ``(1 - delta)(n/p - s) < rho < n/p - s``;
* supercritical (``sp > n``): ``g_rho`` with ``k = (1 + delta)(1 - 1/a)``
  and ``s - n/p < rho < (1 + delta)(s - n/p)``.

``delta`` is half of its largest feasible value and ``rho`` is the
midpoint of its interval.  ``delta`` is rounded to a nearby rational, so
with rational inputs every recorded inequality is checked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .exponents import (
    QCRegularity,
    Regime,
    Rejection,
    as_exact,
    reciprocal,
    regime_of,
    target_q,
)
from .norms import SLOPE_THRESHOLD, FractionalNormSpec, estimate
from .profiles import (
    Kind,
    Membership,
    compose_with_stretch,
    flat_power,
    membership_oracle,
    membership_threshold,
    singular_power,
)
from .radial_maps import Ball, RadialStretch

__all__ = [
    "InfeasibleWitness",
    "Check",
    "SharpnessWitness",
    "build_witness",
    "identity_witness",
    "verify_witness_numerically",
    "positive_direction_sweep",
    "INCONCLUSIVE_MARGIN",
]

# Numerical "inconclusive" is acceptable only this close to a threshold.
INCONCLUSIVE_MARGIN = 0.05


class InfeasibleWitness(ValueError):
    """``q'`` does not beat the guaranteed exponent, or the regime has no witness."""


@dataclass(frozen=True)
class Check:
    """One verified inequality ``lhs > rhs`` (or ``lhs < rhs``)."""

    name: str
    lhs: object
    relation: str
    rhs: object

    @property
    def margin(self):
        return self.lhs - self.rhs if self.relation == ">" else self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin > 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": _num(self.lhs),
            "relation": self.relation,
            "rhs": _num(self.rhs),
            "margin": _num(self.margin),
            "holds": bool(self.holds),
            "exact": isinstance(self.margin, Fraction),
        }


def _num(x):
    if isinstance(x, Fraction):
        return {"fraction": str(x), "float": float(x)}
    return float(x)


@dataclass
class SharpnessWitness:
    regime: Regime
    s: object
    p: object
    q_prime: object
    n: int
    a_or_b: object
    epsilon: object
    delta: object
    delta_max: float
    binding: str
    k: object
    rho: object
    checks: List[Check] = field(default_factory=list)

    @property
    def kind(self) -> Kind:
        return Kind.SINGULAR_POWER if self.regime is Regime.SUBCRITICAL else Kind.FLAT_POWER

    @property
    def stretch(self) -> RadialStretch:
        return RadialStretch(self.k, self.n)

    def source_profile(self):
        make = singular_power if self.kind is Kind.SINGULAR_POWER else flat_power
        return make(self.rho)

    def composed_profile(self):
        return compose_with_stretch(self.source_profile(), self.stretch)

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "n": self.n,
            "s": _num(self.s),
            "p": _num(self.p),
            "q_prime": _num(self.q_prime),
            "a" if self.regime is Regime.SUPERCRITICAL else "b": _num(self.a_or_b),
            "epsilon": _num(self.epsilon),
            "delta": _num(self.delta),
            "delta_max": float(self.delta_max),
            "delta_bound": self.binding,
            "k": _num(self.k),
            "rho": _num(self.rho),
            "k_rho": _num(self.k * self.rho),
            "checks": [c.to_dict() for c in self.checks],
            "all_hold": self.all_hold,
        }


def _exact_delta(delta_max: float) -> Fraction:
    # Half of delta_max, as a short binary fraction strictly inside (0, delta_max).
    d = Fraction(delta_max / 2).limit_denominator(1 << 40)
    if not 0 < d < delta_max:
        d = Fraction(delta_max / 2)
    return d


def build_witness(regime, s, p, q_prime, n: int, a_or_b) -> SharpnessWitness:
    """Construct and verify a witness for ``q'`` beyond the guaranteed exponent.

    ``a_or_b`` is ``b`` in the subcritical regime and ``a`` in the
    supercritical one.  Raises :class:`InfeasibleWitness` when the slack
    ``epsilon`` is not positive or the regime is critical.
    """
    regime = Regime(regime)
    s, p, qp, c = (as_exact(x) for x in (s, p, q_prime, a_or_b))
    if regime is Regime.CRITICAL:
        raise InfeasibleWitness("the critical regime is a self-map: nothing to witness")
    if not 0 <= s <= 1 or not p > 1 or not qp > 1:
        raise ValueError("need 0 <= s <= 1, p > 1, q' > 1")
    actual = regime_of(s, p, n)
    if actual is not regime:
        raise ValueError(f"(s, p, n) is {actual.value}, not {regime.value}")
    if isinstance(c, float) and math.isinf(c):
        raise InfeasibleWitness("conformal case (infinite exponent): no loss to witness")
    if not c > 0 or (regime is Regime.SUPERCRITICAL and not c > 1):
        raise ValueError("need b > 0 (subcritical) or a > 1 (supercritical)")

    inv_p, inv_q, inv_c = reciprocal(p), reciprocal(qp), reciprocal(c)
    checks = []
    if regime is Regime.SUBCRITICAL:
        eps = inv_p + inv_c * (inv_p - s / n) - inv_q
        if not eps > 0:
            raise InfeasibleWitness(f"epsilon = {eps} <= 0: q' does not beat the theorem")
        X = n * inv_q - s
        dmax = 1.0 if X <= 0 else 1.0 - math.sqrt(float(X) / float(X + n * eps))
        binding = "trivial" if X <= 0 else "delta-inequality"
        delta = _exact_delta(dmax)
        k = (1 - delta) * (inv_c + 1)
        thr = n * inv_p - s
        rho = ((1 - delta) * thr + thr) / 2
        lower = (1 - delta) ** 2 * (X + n * eps)
        checks += [
            Check("epsilon > 0", eps, ">", 0),
            Check("delta > 0", delta, ">", 0),
            Check("(1-delta)^2 (n/q' - s + n eps) > n/q' - s", lower, ">", X),
            Check("n/p - s > 0", thr, ">", 0),
            Check("rho > (1-delta)(n/p - s)", rho, ">", (1 - delta) * thr),
            Check("rho < n/p - s", rho, "<", thr),
            Check("k < 1 + 1/b (J^{-b} integrable)", k, "<", 1 + inv_c),
            Check("k rho - (n/q' - s) > (1-delta)^2 (n/q' - s + n eps) - (n/q' - s)", k * rho - X, ">", lower - X),
            Check("k rho > n/q' - s", k * rho, ">", X),
        ]
    else:
        eps = inv_p + inv_c * (s / n - inv_p) - inv_q
        if not eps > 0:
            raise InfeasibleWitness(f"epsilon = {eps} <= 0: q' does not beat the theorem")
        Y = s - n * inv_q
        d_ineq = math.sqrt(float(Y) / float(Y - n * eps)) - 1.0
        d_cap = float(1 / (c - 1))
        dmax, binding = (d_ineq, "delta-inequality") if d_ineq <= d_cap else (d_cap, "k < 1")
        delta = _exact_delta(dmax)
        k = (1 + delta) * (1 - inv_c)
        thr = s - n * inv_p
        rho = (thr + (1 + delta) * thr) / 2
        upper = (1 + delta) ** 2 * (Y - n * eps)
        checks += [
            Check("epsilon > 0", eps, ">", 0),
            Check("delta > 0", delta, ">", 0),
            Check("(1+delta)^2 (s - n/q' - n eps) < s - n/q'", upper, "<", Y),
            Check("k < 1", k, "<", 1),
            Check("k > 1 - 1/a (J^a integrable)", k, ">", 1 - inv_c),
            Check("s - n/p > 0", thr, ">", 0),
            Check("rho > s - n/p", rho, ">", thr),
            Check("rho < (1+delta)(s - n/p)", rho, "<", (1 + delta) * thr),
            Check("s - n/q' - k rho > s - n/q' - (1+delta)^2 (s - n/q' - n eps)", Y - k * rho, ">", Y - upper),
            Check("s - n/q' - k rho > 0", Y - k * rho, ">", 0),
        ]
    return SharpnessWitness(regime, s, p, qp, n, c, eps, delta, dmax, binding, k, rho, checks)


def identity_witness(s, p, n: int, rho) -> SharpnessWitness:
    """Degenerate witness with ``k = 1`` and ``q' = p``: nothing is lost."""
    s, p, rho = as_exact(s), as_exact(p), as_exact(rho)
    regime = regime_of(s, p, n)
    if regime is Regime.CRITICAL:
        raise InfeasibleWitness("no profile family at the critical line")
    one = Fraction(1)
    return SharpnessWitness(regime, s, p, p, n, math.inf, 0, 0, 0.0, "identity", one, rho, [])


def _margin(kind, s, p, n, rho) -> float:
    """Signed distance from ``rho`` to the membership threshold (positive inside)."""
    thr = membership_threshold(kind, s, p, n)
    return float(thr - rho) if kind is Kind.SINGULAR_POWER else float(rho - thr)


def _numeric_spec(s, p, n, estimator):
    return FractionalNormSpec(float(s), float(p), n, Ball(1.0), estimator)


def verify_witness_numerically(
    w: SharpnessWitness,
    estimator: str = "gagliardo_double_integral",
    slope_threshold: float = SLOPE_THRESHOLD,
    seed: Optional[int] = None,
) -> dict:
    """Analytic and numerical verdicts for the source and composed profiles.

    Expected: source member at ``(s, p)``, composition non-member at
    ``(s, q')``.  Disagreements are reported, never raised.
    """
    src, comp = w.source_profile(), w.composed_profile()
    sides = {}
    for label, prof, q in (("source", src, w.p), ("composed", comp, w.q_prime)):
        analytic = membership_oracle(prof, w.s, q, w.n)
        kw = {"slope_threshold": slope_threshold}
        if seed is not None and estimator == "modulus_of_smoothness":
            kw["seed"] = seed
        est = estimate(prof, _numeric_spec(w.s, q, w.n, estimator), **kw)
        margin = _margin(prof.kind, w.s, q, w.n, as_exact(prof.rho))
        definite = est.verdict in (Membership.MEMBER, Membership.NON_MEMBER)
        sides[label] = {
            "rho": float(prof.rho),
            "exponent": float(q),
            "analytic": analytic.value,
            "numerical": est.verdict.value,
            "margin": margin,
            "agree": (est.verdict is analytic) if definite else None,
            "inconclusive_allowed": abs(margin) < INCONCLUSIVE_MARGIN,
            "estimate": est.to_dict(),
        }
    expected = (Membership.MEMBER.value, Membership.NON_MEMBER.value)
    if w.binding == "identity":
        expected = (Membership.MEMBER.value, Membership.MEMBER.value)
    analytic_ok = (sides["source"]["analytic"], sides["composed"]["analytic"]) == expected
    numeric_ok = all(
        side["agree"] is True or (side["agree"] is None and side["inconclusive_allowed"])
        for side in sides.values()
    )
    return {
        "witness": w.to_dict(),
        "expected": list(expected),
        "source": sides["source"],
        "composed": sides["composed"],
        "analytic_ok": analytic_ok,
        "numerical_ok": numeric_ok,
        "ok": analytic_ok and numeric_ok and w.all_hold,
    }


def _admissible(k, regime, reg: QCRegularity) -> bool:
    # The regime's Jacobian power must stay integrable near the origin.
    k = float(k)
    if regime is Regime.SUBCRITICAL:
        return k <= 1 or k < 1 + float(reciprocal(reg.b))
    return k >= 1 or k > 1 - float(reciprocal(reg.a))


def positive_direction_sweep(
    s,
    p,
    n: int,
    reg: QCRegularity,
    k_grid: Sequence,
    rho_grid: Optional[Sequence] = None,
    estimator: str = "gagliardo_double_integral",
    slope_threshold: float = SLOPE_THRESHOLD,
) -> dict:
    """Check that compositions stay in the guaranteed target space.

    For each ``k`` (admissible for ``reg``) and each ``rho`` strictly
    inside the membership region at ``(s, p)``, ``f_{k rho}`` (subcritical)
    or ``g_{k rho}`` (supercritical) must classify as a member at the
    target exponent ``q``.
    """
    s, p = as_exact(s), as_exact(p)
    regime = regime_of(s, p, n)
    if regime is Regime.CRITICAL:
        raise ValueError("no profile family at the critical line")
    q = target_q(s, p, reg)
    if isinstance(q, Rejection):
        raise ValueError(f"target exponent rejected: {q.reason}")
    kind = Kind.SINGULAR_POWER if regime is Regime.SUBCRITICAL else Kind.FLAT_POWER
    make = singular_power if kind is Kind.SINGULAR_POWER else flat_power
    thr = membership_threshold(kind, s, p, n)
    if rho_grid is None:
        if kind is Kind.SINGULAR_POWER:
            rho_grid = [thr * Fraction(i, 4) for i in (1, 2, 3)]
        else:
            base = max(thr, 0)
            rho_grid = [base + Fraction(i, 4) for i in (1, 2, 3)]
    rows = []
    for k in k_grid:
        k = as_exact(k)
        if not _admissible(k, regime, reg):
            raise ValueError(f"k = {k} is not admissible for {reg}")
        for rho in rho_grid:
            rho = as_exact(rho)
            src = make(rho)
            if membership_oracle(src, s, p, n) is not Membership.MEMBER:
                raise ValueError(f"rho = {rho} is not inside the membership region")
            comp = compose_with_stretch(src, RadialStretch(k, n))
            analytic = membership_oracle(comp, s, q, n)
            est = estimate(comp, _numeric_spec(s, q, n, estimator), slope_threshold=slope_threshold)
            rows.append(
                {
                    "k": float(k),
                    "rho": float(rho),
                    "k_rho": float(comp.rho),
                    "q": float(q),
                    "margin": _margin(kind, s, q, n, as_exact(comp.rho)),
                    "analytic": analytic.value,
                    "numerical": est.verdict.value,
                    "ok": est.verdict is Membership.MEMBER and analytic is Membership.MEMBER,
                    "log_slope": est.log_slope,
                    "decay_exponent": est.decay_exponent,
                }
            )
    return {
        "s": float(s),
        "p": float(p),
        "n": n,
        "q": float(q),
        "regime": regime.value,
        "rows": rows,
        "ok": all(r["ok"] for r in rows),
    }
