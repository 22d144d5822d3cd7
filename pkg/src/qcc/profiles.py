"""Radial piecewise-power profiles and their exact membership criteria.

A profile is a sum of terms ``coeff * r^exponent`` each active on an
interval ``[lo, hi)`` of radii.  The two extremal families are

* ``f_rho(x) = max(|x|^{-rho} - 1, 0)`` (singular at the origin), and
* ``g_rho(x) = max(1 - |x|^rho, 0)`` (bounded, cusp at the origin),

both supported in the closed unit ball.  Precomposition with a radial
stretch ``phi_k`` maps each family to itself with ``rho -> k rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Tuple

import numpy as np

from .exponents import as_exact, reciprocal
from .radial_maps import RadialStretch, SingularityError

__all__ = [
    "Kind",
    "Membership",
    "PowerPiece",
    "RadialProfile",
    "singular_power",
    "flat_power",
    "constant",
    "custom",
    "evaluate_profile",
    "compose_with_stretch",
    "membership_threshold",
    "membership_oracle",
]


class Kind(str, Enum):
    SINGULAR_POWER = "singular_power"
    FLAT_POWER = "flat_power"
    CUSTOM = "custom"


class Membership(str, Enum):
    MEMBER = "member"
    NON_MEMBER = "non-member"
    BOUNDARY = "boundary"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PowerPiece:
    """``coeff * r^exponent`` on ``lo <= r < hi``."""

    lo: float
    hi: float
    coeff: float
    exponent: float

    def __post_init__(self):
        if not 0 <= self.lo < self.hi:
            raise ValueError(f"bad interval [{self.lo}, {self.hi})")


@dataclass(frozen=True)
class RadialProfile:
    kind: Kind
    rho: float = 0.0
    pieces: Tuple[PowerPiece, ...] = field(default=())

    # -- evaluation -------------------------------------------------------
    def radial(self, r):
        """Profile value at radius ``r`` (vectorised; no singularity check)."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        with np.errstate(divide="ignore", over="ignore"):
            for pc in self.pieces:
                mask = (r >= pc.lo) & (r < pc.hi)
                out = out + np.where(mask, pc.coeff * np.where(mask, r, 1.0) ** pc.exponent, 0.0)
        return out

    def derivative(self, r):
        """Radial derivative ``F'(r)`` away from breakpoints."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for pc in self.pieces:
            if pc.exponent == 0:
                continue
            mask = (r >= pc.lo) & (r < pc.hi)
            rr = np.where(mask, r, 1.0)
            out = out + np.where(mask, pc.coeff * pc.exponent * rr ** (pc.exponent - 1.0), 0.0)
        return out

    def breakpoints(self):
        """Sorted positive radii where the piece structure changes."""
        pts = {pc.lo for pc in self.pieces} | {pc.hi for pc in self.pieces}
        return sorted(x for x in pts if 0 < x < math.inf)

    def segments(self, radius: float):
        """``[(lo, hi, terms)]`` covering ``(0, radius)``; terms merged by exponent."""
        edges = sorted({0.0, float(radius)} | {b for b in self.breakpoints() if b < radius})
        out = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            terms = {}
            for pc in self.pieces:
                if pc.lo <= lo and hi <= pc.hi:
                    terms[pc.exponent] = terms.get(pc.exponent, 0.0) + pc.coeff
            out.append((lo, hi, {e: c for e, c in terms.items() if c != 0.0}))
        return out

    def origin_exponent(self):
        """Smallest exponent with nonzero coefficient next to the origin.

        ``None`` when the profile vanishes near the origin.
        """
        lo, hi, terms = self.segments(max(self.breakpoints() or [1.0]) or 1.0)[0]
        if not terms:
            return None
        return min(terms)

    def pure_power_on(self, radius: float):
        """``(coeff, exponent)`` if on ``(0, radius)`` the profile is
        ``coeff * r^exponent + const`` with a single nonconstant term."""
        segs = self.segments(radius)
        if len(segs) != 1:
            return None
        terms = {e: c for e, c in segs[0][2].items() if e != 0}
        if len(terms) != 1:
            return None
        (e, c), = terms.items()
        return c, e

    @property
    def is_singular(self) -> bool:
        e = self.origin_exponent()
        return e is not None and e < 0


def singular_power(rho) -> RadialProfile:
    """``f_rho = max(r^{-rho} - 1, 0)``."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    return RadialProfile(
        Kind.SINGULAR_POWER,
        rho,
        (PowerPiece(0.0, 1.0, 1.0, -float(rho)), PowerPiece(0.0, 1.0, -1.0, 0.0)),
    )


def flat_power(rho) -> RadialProfile:
    """``g_rho = max(1 - r^rho, 0)``."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    return RadialProfile(
        Kind.FLAT_POWER,
        rho,
        (PowerPiece(0.0, 1.0, 1.0, 0.0), PowerPiece(0.0, 1.0, -1.0, float(rho))),
    )


def constant(value: float = 1.0, radius: float = math.inf) -> RadialProfile:
    return RadialProfile(Kind.CUSTOM, 0.0, (PowerPiece(0.0, radius, float(value), 0.0),))


def custom(pieces) -> RadialProfile:
    """Custom profile from ``(lo, hi, coeff, exponent)`` tuples."""
    return RadialProfile(Kind.CUSTOM, 0.0, tuple(PowerPiece(*map(float, p)) for p in pieces))


def evaluate_profile(prof: RadialProfile, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    if prof.is_singular and np.any(r == 0):
        raise SingularityError("singular profile is infinite at the origin")
    return prof.radial(r)


def compose_with_stretch(prof: RadialProfile, phi: RadialStretch) -> RadialProfile:
    """``prof o phi_k``; exact for the two power families (``rho -> k rho``)."""
    if prof.kind is Kind.SINGULAR_POWER:
        return singular_power(phi.k * prof.rho)
    if prof.kind is Kind.FLAT_POWER:
        return flat_power(phi.k * prof.rho)
    k = float(phi.k)
    return custom(
        (pc.lo ** (1 / k), pc.hi ** (1 / k), pc.coeff, pc.exponent * k) for pc in prof.pieces
    )


def membership_threshold(kind: Kind, s, p, n: int):
    """``n/p - s`` for the singular family, ``s - n/p`` for the flat family."""
    s = as_exact(s)
    np_ = n * reciprocal(p)
    if isinstance(s, float) or isinstance(np_, float):
        s, np_ = float(s), float(np_)
    if Kind(kind) is Kind.SINGULAR_POWER:
        return np_ - s
    if Kind(kind) is Kind.FLAT_POWER:
        return s - np_
    raise ValueError("no analytic membership criterion for custom profiles")


def membership_oracle(prof: RadialProfile, s, p, n: int) -> Membership:
    """Analytic classification of the profile in ``H^{s,p}(R^n)``.

    ``f_rho`` belongs iff ``0 < rho < n/p - s``; ``g_rho`` belongs iff
    ``s - n/p < rho``.  Exact equality with the threshold gives
    ``BOUNDARY``.
    """
    if prof.kind is Kind.CUSTOM:
        raise ValueError("no analytic membership criterion for custom profiles")
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    if not 1 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    thr = membership_threshold(prof.kind, s, p, n)
    rho = as_exact(prof.rho)
    if isinstance(thr, Fraction) and isinstance(rho, float):
        thr = float(thr)
    if rho == thr:
        return Membership.BOUNDARY
    inside = rho < thr if prof.kind is Kind.SINGULAR_POWER else rho > thr
    return Membership.MEMBER if inside else Membership.NON_MEMBER
