"""Exponent arithmetic for composition with quasiconformal maps.

All formulas work on reciprocals ``1/p`` so that ``p = inf`` is just
``inv_p = 0``.  Rational inputs (``int`` or ``Fraction``) are kept exact;
any ``float`` input switches the whole computation to floating point.

Outcomes that fall outside a theorem's hypotheses are returned as
:class:`Rejection` values rather than raised, so that callers sweeping a
parameter region can classify points instead of aborting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

Number = Union[int, float, Fraction]

__all__ = [
    "Regime",
    "Rejection",
    "ExponentPoint",
    "QCRegularity",
    "InterpolationIndices",
    "as_exact",
    "reciprocal",
    "from_reciprocal",
    "regime_of",
    "target_q",
    "target_inv_q",
    "planar_bounds",
    "planar_regularity",
    "lebesgue_q",
    "sobolev_q",
    "interpolation_indices",
    "default_epsilon0",
    "hk_beta_planar",
    "hk_beta_general",
    "alpha_from_b",
]


class Regime(str, Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class Rejection:
    """A theorem hypothesis failed; carries the offending quantity."""

    reason: str
    value: Optional[Number] = None

    def __bool__(self) -> bool:
        return False


def as_exact(x: Number) -> Number:
    """Return ``x`` as a Fraction when it is rational, else as float."""
    if isinstance(x, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(x, Rational):
        return Fraction(x)
    x = float(x)
    return x


def reciprocal(p: Number) -> Number:
    """``1/p`` with ``1/inf = 0`` (exact for rational ``p``)."""
    p = as_exact(p)
    if isinstance(p, float) and math.isinf(p):
        return Fraction(0)
    if p == 0:
        raise ValueError("exponent must be nonzero")
    return 1 / p


def from_reciprocal(inv: Number) -> Number:
    """Inverse of :func:`reciprocal`; ``0`` maps to ``inf``."""
    if inv == 0:
        return math.inf
    return 1 / inv


def _is_exact(*xs) -> bool:
    return all(isinstance(x, Fraction) for x in xs)


def _coerce(*xs):
    # Mixed exact/float input is evaluated in float throughout.
    xs = [as_exact(x) for x in xs]
    if _is_exact(*xs):
        return xs
    return [float(x) for x in xs]


@dataclass(frozen=True)
class ExponentPoint:
    """A point ``(1/p, s)`` of the smoothness/integrability diagram."""

    inv_p: Number
    s: Number

    def __post_init__(self):
        if not 0 <= self.inv_p < 1:
            raise ValueError(f"inv_p must lie in [0, 1), got {self.inv_p}")
        if not 0 <= self.s <= 1:
            raise ValueError(f"s must lie in [0, 1], got {self.s}")

    @classmethod
    def from_p(cls, p: Number, s: Number) -> "ExponentPoint":
        return cls(reciprocal(p), as_exact(s))

    @property
    def p(self) -> Number:
        return from_reciprocal(self.inv_p)

    def distance_to_critical(self, n: int) -> Number:
        """Horizontal distance ``|1/p - s/n|`` to the line ``sp = n``."""
        return abs(self.inv_p - as_exact(self.s) / n)


@dataclass(frozen=True)
class QCRegularity:
    """Jacobian integrability data ``(n, K, a, C_a, b, C_b)``.

    ``a`` bounds the positive power and ``b`` the negative power of the
    Jacobian on the reference domain.  ``inf`` is allowed for ``a`` and ``b``
    (the conformal case), in which case no integrability is lost.
    """

    n: int
    a: Number = math.inf
    b: Number = math.inf
    C_a: Number = 1
    C_b: Number = 1
    K: Optional[Number] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n}")
        if not self.a > 1:
            raise ValueError(f"a must exceed 1, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not (self.C_a > 0 and self.C_b > 0):
            raise ValueError("C_a and C_b must be positive")
        if self.K is not None and self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        object.__setattr__(self, "a", as_exact(self.a))
        object.__setattr__(self, "b", as_exact(self.b))


def _inv(c: Number) -> Number:
    return reciprocal(c)


def regime_of(s: Number, p: Number, n: int) -> Regime:
    """Classify ``sp`` against ``n`` exactly (compares ``s`` with ``n/p``)."""
    s, inv_p = _coerce(s, reciprocal(p))
    lhs, rhs = s, n * inv_p
    if lhs == rhs:
        return Regime.CRITICAL
    return Regime.SUPERCRITICAL if lhs > rhs else Regime.SUBCRITICAL


def _check_sp(s, p):
    if not 0 <= s <= 1:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")


def target_inv_q(s: Number, p: Number, reg: QCRegularity) -> Number:
    """``1/q = 1/p + (1/c)|s/n - 1/p|`` with ``c = a`` if ``sp >= n`` else ``b``."""
    _check_sp(s, p)
    n = reg.n
    regime = regime_of(s, p, n)
    c = reg.a if regime is not Regime.SUBCRITICAL else reg.b
    s, inv_p, inv_c = _coerce(s, reciprocal(p), _inv(c))
    return inv_p + inv_c * abs(s / n - inv_p)


def target_q(s: Number, p: Number, reg: QCRegularity) -> Union[Number, Rejection]:
    """Target integrability exponent for ``H^{s,p} -> H^{s,q}``.

    Returns a :class:`Rejection` when ``q <= 1``, i.e. when the hypothesis
    ``q > 1`` fails.

    >>> target_q(Fraction(1, 2), 2, QCRegularity(n=2, a=2, b=1))
    Fraction(4, 3)
    """
    inv_q = target_inv_q(s, p, reg)
    if inv_q >= 1:
        return Rejection("q <= 1", inv_q)
    return from_reciprocal(inv_q)


def planar_bounds(K: Number):
    """Critical Jacobian powers ``(K/(K-1), 1/(K-1))`` of a planar K-qc map.

    For ``K = 1`` both are unbounded and returned as ``inf``.
    """
    K = as_exact(K)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if K == 1:
        return math.inf, math.inf
    return K / (K - 1), 1 / (K - 1)


def planar_regularity(K: Number, fraction: Number = Fraction(1, 2), C_a=1, C_b=1) -> QCRegularity:
    """A planar :class:`QCRegularity` strictly inside the critical window.

    ``a`` and ``b`` are placed at ``fraction`` of the way from their lower
    limits (1 and 0) to the critical values.
    """
    a_K, b_K = planar_bounds(K)
    fraction = as_exact(fraction)
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    if math.isinf(a_K):
        return QCRegularity(n=2, K=as_exact(K), C_a=C_a, C_b=C_b)
    a = 1 + fraction * (a_K - 1)
    b = fraction * b_K
    return QCRegularity(n=2, K=as_exact(K), a=a, b=b, C_a=C_a, C_b=C_b)


def lebesgue_q(p: Number, b: Number) -> Number:
    """``1/q = (1/p)(1 + 1/b)``; no restriction ``q > 1`` for Lebesgue spaces."""
    if not b > 0:
        raise ValueError(f"b must be positive, got {b}")
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    inv_p, inv_b = _coerce(reciprocal(p), _inv(b))
    return from_reciprocal(inv_p * (1 + inv_b))


def sobolev_q(p: Number, reg: QCRegularity) -> Union[Number, Rejection]:
    """Target exponent for ``W^{1,p} -> W^{1,q}``.

    The subcritical branch requires ``p >= 1 + (n-1)/(nb+1)``.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    n = reg.n
    regime = regime_of(1, p, n)
    if regime is Regime.CRITICAL:
        return as_exact(p)
    if regime is Regime.SUPERCRITICAL:
        inv_p, inv_a = _coerce(reciprocal(p), _inv(reg.a))
        return from_reciprocal(inv_p + inv_a * (Fraction(1, n) - inv_p))
    inv_p, inv_b = _coerce(reciprocal(p), _inv(reg.b))
    b = reg.b
    threshold = 1 + Fraction(n - 1) / (n * b + 1) if not math.isinf(b) else 1
    if as_exact(p) < threshold:
        return Rejection("p below subcritical admissibility threshold", threshold)
    inv_q = inv_p + inv_b * (inv_p - Fraction(1, n))
    if inv_q >= 1:
        return Rejection("q <= 1", inv_q)
    return from_reciprocal(inv_q)


@dataclass(frozen=True)
class InterpolationIndices:
    """End-point exponents ``(p0, q0)`` (Lebesgue) and ``(p1, q1)`` (Sobolev).

    ``p`` and ``q`` are the exponents actually interpolated.  In the critical
    and supercritical constructions they are perturbations of the input
    (see :func:`interpolation_indices`); ``target_q`` then records the exact
    theorem exponent for comparison.
    """

    p0: Number
    p1: Number
    q0: Number
    q1: Number
    s: Number
    p: Number
    q: Number
    regime: Regime
    epsilon0: Optional[Number] = None
    target_q: Optional[Number] = None
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("q0", "q1"):
            if not getattr(self, name) > 1:
                raise ValueError(f"{name} must exceed 1, got {getattr(self, name)}")
        tol = 1e-12
        s = self.s
        for lhs_name, a0, a1 in (("p", self.p0, self.p1), ("q", self.q0, self.q1)):
            lhs = reciprocal(getattr(self, lhs_name))
            rhs = (1 - s) * reciprocal(a0) + s * reciprocal(a1)
            if abs(float(lhs - rhs)) > tol:
                raise ValueError(f"convex combination for {lhs_name} fails: {lhs} != {rhs}")

    @property
    def inverse(self) -> dict:
        return {k: reciprocal(getattr(self, k)) for k in ("p0", "p1", "q0", "q1")}


def default_epsilon0(s: Number, p: Number, reg: QCRegularity, regime: Regime) -> float:
    """Half the largest perturbation allowed by the constraints of the proofs.

    Constraints: ``eps0 < log 2 / log C_b`` (vacuous when ``C_b <= 1``), in
    the supercritical case ``eps0 < (1/2)|1/(sp) - 1/n| s/(1-s)`` and
    ``eps0 < 1/p``, and in the critical case ``eps0 < 1 - s`` so that
    ``q0 > 1``.
    """
    s_f, inv_p = float(s), float(reciprocal(p))
    bounds = []
    if float(reg.C_b) > 1:
        bounds.append(math.log(2) / math.log(float(reg.C_b)))
    if regime is Regime.SUPERCRITICAL:
        bounds.append(0.5 * abs(inv_p / s_f - 1 / reg.n) * s_f / (1 - s_f))
        bounds.append(inv_p)
    elif regime is Regime.CRITICAL:
        bounds.append(1 - s_f)
    return min(bounds) / 2


def _subcritical_indices(s, p, reg):
    n = reg.n
    inv_q = target_inv_q(s, p, reg)
    if inv_q >= 1:
        raise ValueError("q <= 1: no interpolation couple exists")
    s, inv_p, inv_q = _coerce(s, reciprocal(p), inv_q)

    def endpoint(inv_x, lam):
        return 1 - (n - lam) * (1 - inv_x) / (n - s)

    inv = {
        "p0": endpoint(inv_p, 0),
        "p1": endpoint(inv_p, 1),
        "q0": endpoint(inv_q, 0),
        "q1": endpoint(inv_q, 1),
    }
    q = from_reciprocal(inv_q)
    return InterpolationIndices(
        **{k: from_reciprocal(v) for k, v in inv.items()},
        s=s,
        p=as_exact(p),
        q=q,
        regime=Regime.SUBCRITICAL,
        target_q=q,
    )


def _critical_indices(s, reg, eps0):
    n = reg.n
    s, eps0 = _coerce(s, eps0)
    inv_b = _inv(reg.b)
    if not isinstance(s, Fraction):
        inv_b = float(inv_b)
    # 0 < 1/q - s/n < eps0: take the midpoint.
    inv_q = s / n + eps0 / 2
    inv_p = (inv_q + inv_b * s / n) / (1 + inv_b)
    inv_p0 = Fraction(1, n) - (Fraction(1, n) - inv_p) / (1 - s)
    inv_q0 = Fraction(1, n) - (Fraction(1, n) - inv_q) / (1 - s)
    return InterpolationIndices(
        p0=from_reciprocal(inv_p0),
        p1=as_exact(n),
        q0=from_reciprocal(inv_q0),
        q1=as_exact(n),
        s=s,
        p=from_reciprocal(inv_p),
        q=from_reciprocal(inv_q),
        regime=Regime.CRITICAL,
        epsilon0=eps0,
        target_q=from_reciprocal(s / n),
    )


def _supercritical_indices(s, p, reg, eps0):
    n = reg.n
    s, inv_p, eps0 = _coerce(s, reciprocal(p), eps0)
    inv_a, inv_b = _inv(reg.a), _inv(reg.b)
    if not isinstance(s, Fraction):
        inv_a, inv_b = float(inv_a), float(inv_b)
    if not 0 < eps0 < inv_p:
        raise ValueError("eps0 must lie in (0, 1/p)")
    inv_q0 = eps0 / 2
    inv_p0 = inv_q0 / (1 + inv_b)
    inv_p1 = (inv_p - (1 - s) * inv_p0) / s
    inv_q1 = inv_p1 + inv_a * (Fraction(1, n) - inv_p1)
    inv_q_tilde = (1 - s) * inv_q0 + s * inv_q1
    theorem_inv_q = target_inv_q(s, p, reg)
    bound = eps0 * (1 - s) * (2 - inv_a)
    return InterpolationIndices(
        p0=from_reciprocal(inv_p0),
        p1=from_reciprocal(inv_p1),
        q0=from_reciprocal(inv_q0),
        q1=from_reciprocal(inv_q1),
        s=s,
        p=as_exact(p),
        q=from_reciprocal(inv_q_tilde),
        regime=Regime.SUPERCRITICAL,
        epsilon0=eps0,
        target_q=from_reciprocal(theorem_inv_q),
        extras={
            "q_tilde_gap": abs(inv_q_tilde - theorem_inv_q),
            "q_tilde_gap_bound": bound,
        },
    )


def interpolation_indices(
    s: Number,
    p: Number,
    reg: QCRegularity,
    regime: Optional[Regime] = None,
    epsilon0: Optional[Number] = None,
) -> InterpolationIndices:
    """Lebesgue/Sobolev end-point exponents interpolating to ``(s, p) -> (s, q)``.

    Parameters
    ----------
    s : smoothness in (0, 1)
    p : integrability exponent; ignored in the critical regime (``p = n/s``)
    reg : Jacobian integrability data
    regime : inferred from ``(s, p)`` when omitted
    epsilon0 : perturbation size for the critical and supercritical
        constructions; defaults to :func:`default_epsilon0`

    Notes
    -----
    Subcritical: the end points lie on lines through ``(1, n)`` in the
    ``(1/p, s)`` plane, so ``1/q_j - 1/p_j = (1/b)(1/p_j - j/n)``.

    Critical: ``p1 = q1 = n``; the pair ``(p, q)`` is a subcritical
    approximation with ``0 < 1/q - s/n < eps0``.

    Supercritical: ``1/q0 = eps0/2``; ``p1`` is forced by the convex
    combination and ``q1`` by the Sobolev rule, so the interpolated ``q``
    (``q~``) differs from the theorem exponent by at most
    ``eps0 (1-s)(2a-1)/a``.
    """
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    if regime is None:
        regime = regime_of(s, p, reg.n)
    regime = Regime(regime)
    if regime is Regime.SUBCRITICAL:
        return _subcritical_indices(s, p, reg)
    if epsilon0 is None:
        epsilon0 = default_epsilon0(s, p, reg, regime)
    if regime is Regime.CRITICAL:
        return _critical_indices(s, reg, epsilon0)
    return _supercritical_indices(s, p, reg, epsilon0)


def hk_beta_planar(s: Number, p: Number, K: Number) -> Union[Number, Rejection]:
    """Smoothness ``s - (K-1)(2/p - s)`` reached in the planar subcritical case."""
    s, inv_p, K = _coerce(s, reciprocal(p), K)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if not s < 2 * inv_p:
        raise ValueError("requires sp < 2")
    beta = s - (K - 1) * (2 * inv_p - s)
    if beta <= 0:
        return Rejection("beta <= 0", beta)
    return beta


def alpha_from_b(b: Number) -> Number:
    """Volume-growth exponent ``(b+1)/b`` implied by ``J^{-b}`` integrability."""
    b = as_exact(b)
    if not b > 0:
        raise ValueError("b must be positive")
    return (b + 1) / b


def hk_beta_general(s: Number, q: Number, alpha: Number, n: int) -> Number:
    """``beta = n/q - alpha (n/q - s)`` for maps with ``|phi(B)| >= C|B|^alpha``."""
    s, inv_q, alpha = _coerce(s, reciprocal(q), alpha)
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if s > n * inv_q:
        raise ValueError("requires sq <= n")
    return n * inv_q - alpha * (n * inv_q - s)
