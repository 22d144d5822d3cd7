"""Numerical norms of radial profiles and a divergence classifier.

Every estimator works on nested annuli ``D_eps = {eps < |x| < R}`` for a
decreasing sequence of inner cutoffs and records the truncated integrals
(the p-th power of the truncated (semi)norm).  Finiteness is decided from
how fast those integrals grow as the cutoff shrinks:

* the *log slope* is the least-squares slope of ``log(partial)`` against
  ``log(cutoff)``;
* the *decay exponent* is the same fit for the increments between
  consecutive cutoffs.  For a power-law singularity the increments behave
  like ``eps^sigma`` with ``sigma > 0`` exactly when the integral
  converges, so the sign of ``sigma`` is the membership signal.

The fractional seminorm is the Sobolev-Slobodeckij double integral
``int int |f(x)-f(y)|^p / |x-y|^{n+sp}``, computed two independent ways:
a deterministic radial reduction (:func:`gagliardo_seminorm`) and a seeded
Monte Carlo integral of the directional modulus of smoothness
(:func:`modulus_seminorm`).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .profiles import Membership, RadialProfile
from .quadrature import (
    adaptive_integral,
    angular_kernel_leading,
    angular_kernel_ratio,
    gauss_jacobi,
    gauss_legendre,
    geometric_edges,
    panel_nodes,
    sphere_area,
)
from .radial_maps import Ball

__all__ = [
    "DEFAULT_CUTOFFS",
    "SLOPE_THRESHOLD",
    "FIT_POINTS",
    "DEFAULT_SEED",
    "NormEstimate",
    "FractionalNormSpec",
    "worker_count",
    "fit_line",
    "classify_partials",
    "lp_norm",
    "sobolev_seminorm",
    "gagliardo_seminorm",
    "modulus_seminorm",
    "estimate",
    "classify_membership",
]

DEFAULT_CUTOFFS = tuple(2.0 ** -np.arange(2, 13))
SLOPE_THRESHOLD = 0.05
FIT_POINTS = 6
R2_MIN = 0.99
DEFAULT_SEED = 0x5EED_0F_C0_117_E
MC_SAMPLES = 100_000

# Smallest gap 1 - r/t resolved by panels before the Gauss-Jacobi end cell.
TAU_MIN = 2.0**-40
TAU_SPLIT = 0.5


@dataclass
class NormEstimate:
    """A truncated-integral sequence and what it says about finiteness.

    ``partials[j]`` is the integral of the p-th power over ``D_{cutoffs[j]}``.
    ``value`` is the (semi)norm itself: the p-th root of the extrapolated
    integral, ``inf`` when divergent, and the last partial's root when the
    classifier is inconclusive.  ``log_slope`` is fitted to the truncated
    seminorm (``partials ** (1/p)``) against the cutoff, on log-log axes.
    """

    value: float
    cutoffs: np.ndarray
    partials: np.ndarray
    log_slope: float
    r2: float
    decay_exponent: float
    decay_r2: float
    verdict: Membership
    p: float
    method: str
    seed: Optional[int] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def divergent(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> dict:
        def num(x):
            x = float(x)
            return x if math.isfinite(x) else None

        return {
            "value": "divergent" if self.divergent else float(self.value),
            "verdict": self.verdict.value,
            "method": self.method,
            "p": float(self.p),
            "cutoffs": [float(c) for c in self.cutoffs],
            "partials": [float(v) for v in self.partials],
            "log_slope": num(self.log_slope),
            "r2": num(self.r2),
            "decay_exponent": num(self.decay_exponent),
            "decay_r2": num(self.decay_r2),
            "seed": self.seed,
            "mesh": {k: v for k, v in self.diagnostics.items()},
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


@dataclass(frozen=True)
class FractionalNormSpec:
    s: float
    p: float
    n: int = 2
    domain: Ball = Ball(1.0)
    estimator: str = "gagliardo_double_integral"

    def __post_init__(self):
        if not 0 <= self.s <= 1:
            raise ValueError("s must lie in [0, 1]")
        if not 1 < self.p < math.inf:
            raise ValueError("p must lie in (1, inf)")
        if self.estimator not in ("gagliardo_double_integral", "modulus_of_smoothness"):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if not self.domain.is_origin_centered:
            raise ValueError("norm estimation needs an origin-centred ball")


def worker_count() -> int:
    """Thread cap from ``QCC_THREADS`` (default: CPU count, at most 4)."""
    env = os.environ.get("QCC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"QCC_THREADS must be a positive integer, got {env!r}") from None
    return max(1, min(4, os.cpu_count() or 1))


def fit_line(x, y):
    """Least-squares slope and coefficient of determination."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        return math.nan, math.nan
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def classify_partials(
    cutoffs,
    partials,
    p: float,
    slope_threshold: float = SLOPE_THRESHOLD,
    fit_points: int = FIT_POINTS,
):
    """Verdict, value and fit diagnostics from a truncated-integral sequence.

    member: increments decay with exponent above ``slope_threshold``;
    non-member: they grow with exponent below ``-slope_threshold`` and the
    log-log fit has ``R^2 >= 0.99``; otherwise inconclusive.
    """
    cutoffs = np.asarray(cutoffs, dtype=float)
    partials = np.maximum.accumulate(np.asarray(partials, dtype=float))
    logc = np.log(cutoffs)
    out = {"log_slope": 0.0, "r2": 1.0, "decay_exponent": math.inf, "decay_r2": 1.0, "decay_fit": math.inf}

    if partials[-1] == 0.0:
        out.update(verdict=Membership.MEMBER, integral=0.0)
        return out

    tail = slice(-fit_points, None)
    pos = partials > 0
    if pos[tail].all():
        # slope of the truncated seminorm itself, i.e. of partials^(1/p)
        out["log_slope"], out["r2"] = fit_line(logc[tail], np.log(partials[tail]) / p)

    inc = np.diff(partials)
    inc_c = logc[1:]
    window_inc, window_c = inc[tail], inc_c[tail]
    nz = window_inc > 0
    if not nz.any():
        # Nothing is added by shrinking the cutoff: converged.
        out.update(verdict=Membership.MEMBER, integral=float(partials[-1]))
        return out
    if nz.sum() < 3:
        out.update(verdict=Membership.INCONCLUSIVE, integral=float(partials[-1]), decay_exponent=math.nan)
        return out
    sigma_fit, r2 = fit_line(window_c[nz], np.log(window_inc[nz]))
    sigma = sigma_fit
    if nz.all():
        sigma = _accelerated_exponent(window_c, window_inc, sigma_fit)
    out["decay_exponent"], out["decay_r2"], out["decay_fit"] = sigma, r2, sigma_fit

    if sigma > slope_threshold:
        ratio = float(cutoffs[-1] / cutoffs[-2]) ** sigma
        rest = inc[-1] * ratio / (1.0 - ratio)
        out.update(verdict=Membership.MEMBER, integral=float(partials[-1] + rest))
    elif sigma < -slope_threshold and r2 >= R2_MIN:
        out.update(verdict=Membership.NON_MEMBER, integral=math.inf)
    else:
        out.update(verdict=Membership.INCONCLUSIVE, integral=float(partials[-1]))
    return out


def _accelerated_exponent(log_cut, inc, fallback):
    """Limit of the local increment exponents by Aitken extrapolation.

    Local exponents ``log(inc[j+1]/inc[j]) / log(eps[j+1]/eps[j])`` converge
    geometrically (the outer boundary contributes a relative correction
    ``~ eps^{sp}``).  The last three are extrapolated when they move
    monotonically with a contracting step; otherwise ``fallback`` is used.
    """
    loc = np.diff(np.log(inc)) / np.diff(log_cut)
    if len(loc) < 3:
        return fallback
    x0, x1, x2 = loc[-3:]
    d1, d2 = x1 - x0, x2 - x1
    if d1 == 0 or d2 == 0:
        return float(x2)
    ratio = d2 / d1
    if not 0 < ratio < 0.95:
        return fallback
    return float(x2 + d2 * ratio / (1.0 - ratio))


def _finite_or_none(x):
    return float(x) if math.isfinite(x) else None


def _finish(cutoffs, partials, p, method, slope_threshold, seed=None, diagnostics=None, exact_integral=None):
    info = classify_partials(cutoffs, partials, p, slope_threshold)
    integral = info["integral"]
    verdict = info["verdict"]
    if exact_integral is not None:
        integral = exact_integral
        verdict = Membership.NON_MEMBER if math.isinf(exact_integral) else Membership.MEMBER
    value = math.inf if math.isinf(integral) else integral ** (1.0 / p)
    return NormEstimate(
        value=value,
        cutoffs=np.asarray(cutoffs, dtype=float),
        partials=np.asarray(partials, dtype=float),
        log_slope=info["log_slope"],
        r2=info["r2"],
        decay_exponent=info["decay_exponent"],
        decay_r2=info["decay_r2"],
        verdict=verdict,
        p=p,
        method=method,
        seed=seed,
        diagnostics=dict(diagnostics or {}, decay_fit=_finite_or_none(info["decay_fit"])),
    )


def _check_cutoffs(cutoffs, radius):
    cutoffs = np.asarray(cutoffs, dtype=float)
    if np.any(np.diff(cutoffs) >= 0) or cutoffs[0] >= radius or cutoffs[-1] <= 0:
        raise ValueError("cutoffs must decrease strictly inside (0, radius)")
    return cutoffs


def _shell_integrals(h, n, radius, cutoffs, breakpoints, segment_closed_form=None):
    """``|S^{n-1}| int h(r) r^{n-1} dr`` over ``[cutoffs[0], R]`` and each
    ``[cutoffs[j+1], cutoffs[j]]``."""
    edges = [radius] + list(cutoffs)
    out = []
    for hi, lo in zip(edges[:-1], edges[1:]):
        pts = sorted({lo, hi} | {b for b in breakpoints if lo < b < hi})
        pts = sorted(set(pts) | set(geometric_edges(lo, hi).tolist()))
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            closed = segment_closed_form(a, b) if segment_closed_form else None
            if closed is not None:
                total += closed
            else:
                total += adaptive_integral(lambda r: h(r) * r ** (n - 1), a, b, tol=1e-13)
        out.append(sphere_area(n) * total)
    return np.array(out)


def _power_segment_integral(prof_terms, p, n, a, b):
    """Closed form of ``int_a^b |c r^e|^p r^{n-1} dr`` for a single term."""
    (e, c), = prof_terms.items()
    k = e * p + n
    if k == 0:
        return abs(c) ** p * math.log(b / a)
    return abs(c) ** p * (b**k - a**k) / k


def _origin_exponent(terms: dict, derivative: bool):
    if derivative:
        exps = [e - 1 for e, c in terms.items() if e != 0 and c != 0]
    else:
        exps = [e for e, c in terms.items() if c != 0]
    return min(exps) if exps else None


def _radial_norm(prof, p, n, radius, cutoffs, slope_threshold, derivative, method):
    cutoffs = _check_cutoffs(cutoffs, radius)
    segments = prof.segments(radius)
    if derivative:
        def h(r):
            return np.abs(prof.derivative(r)) ** p
    else:
        def h(r):
            return np.abs(prof.radial(r)) ** p

    def closed(a, b):
        for lo, hi, terms in segments:
            if lo <= a and b <= hi:
                if derivative:
                    t = {e - 1: c * e for e, c in terms.items() if e != 0}
                else:
                    t = dict(terms)
                if not t:
                    return 0.0
                if len(t) == 1:
                    return _power_segment_integral(t, p, n, a, b)
                return None
        return None

    shells = _shell_integrals(h, n, radius, cutoffs, prof.breakpoints(), closed)
    partials = np.cumsum(shells)

    # Power-law test at the origin decides finiteness exactly.
    e0 = _origin_exponent(segments[0][2], derivative)
    if e0 is not None and e0 * p + n <= 0:
        exact = math.inf
    else:
        inner = segments[0]
        tail_terms = (
            {e - 1: c * e for e, c in inner[2].items() if e != 0} if derivative else dict(inner[2])
        )
        eps = float(cutoffs[-1])
        if not tail_terms:
            tail = 0.0
        elif len(tail_terms) == 1:
            tail = sphere_area(n) * _power_segment_integral(tail_terms, p, n, 0.0 if e0 * p + n > 0 else eps, eps)
        else:
            tail = _tail_by_shells(h, n, eps)
        exact = float(partials[-1] + tail)
    return _finish(
        cutoffs,
        partials,
        p,
        method,
        slope_threshold,
        diagnostics={"shells": len(shells), "closed_form_origin_test": True},
        exact_integral=exact,
    )


def _tail_by_shells(h, n, eps, floor=1e-12):
    edges = geometric_edges(floor, eps)[::-1]
    shells = [adaptive_integral(lambda r: h(r) * r ** (n - 1), a, b, tol=1e-13) for a, b in zip(edges[:-1], edges[1:])]
    total = math.fsum(shells)
    i_last, i_prev = shells[0], shells[1]
    if i_last > 0 and i_prev > 0:
        mu = math.log2(i_prev / i_last)
        if mu > 0:
            total += i_last / (2.0**mu - 1.0)
    return sphere_area(n) * total


def lp_norm(prof: RadialProfile, p: float, ball: Ball = Ball(1.0), n: int = 2,
            cutoffs: Sequence[float] = DEFAULT_CUTOFFS, slope_threshold: float = SLOPE_THRESHOLD) -> NormEstimate:
    """``||f||_{L^p(B)}`` with truncated integrals over the cutoff annuli."""
    if not ball.is_origin_centered:
        raise ValueError("norm estimation needs an origin-centred ball")
    return _radial_norm(prof, p, n, float(ball.radius), cutoffs, slope_threshold, False, "lp")


def sobolev_seminorm(prof: RadialProfile, p: float, ball: Ball = Ball(1.0), n: int = 2,
                     cutoffs: Sequence[float] = DEFAULT_CUTOFFS,
                     slope_threshold: float = SLOPE_THRESHOLD) -> NormEstimate:
    """``||grad f||_{L^p(B)}`` using ``|grad f|(x) = |F'(|x|)|``."""
    if not ball.is_origin_centered:
        raise ValueError("norm estimation needs an origin-centred ball")
    return _radial_norm(prof, p, n, float(ball.radius), cutoffs, slope_threshold, True, "sobolev")


# ---------------------------------------------------------------------------
# Gagliardo double integral by radial reduction.
#
# With r = |x| < t = |y| and lambda = r/t = 1 - tau, the double integral over
# D_eps x D_eps is
#
#   2 |S^{n-1}| |S^{n-2}| int_eps^R int_{r/R}^1 G(tau) lambda^{sp-1}
#       r^{n-1-sp} |F(r) - F(r/lambda)|^p  dlambda dr,
#
# G being the normalised angular kernel.  Near the diagonal the integrand
# behaves like tau^{p(1-s)-1}.
# ---------------------------------------------------------------------------


def _sphere_pair_constant(n: int) -> float:
    # |S^{n-1}| for the direction of x times |S^{n-2}| for the angle to y.
    return sphere_area(n) * sphere_area(n - 1)


@lru_cache(maxsize=64)
def _upper_mesh(n: int, sp: float, alpha: float, order: int = 24, jac_order: int = 20):
    """Nodes in ``tau`` on ``(0, 1/2]`` with kernel values, graded to 0.

    Returns (tau, weights, G) for the panels and (tau_j, weights_j, G_j)
    for the Gauss-Jacobi end cell where weights absorb ``tau^{alpha-1}``.
    """
    edges = geometric_edges(TAU_MIN, TAU_SPLIT)
    tau, w, _ = panel_nodes(edges, order)
    G = angular_kernel_ratio(tau, n, sp)
    tj, wj = gauss_jacobi(TAU_MIN, alpha - 1.0, jac_order)
    Gj = angular_kernel_ratio(tj, n, sp)
    return tau, w, G, tj, wj, Gj


def _lambda_factor(tau, sp, p, expo):
    """``lambda^{sp-1} |1 - lambda^{-e}|^p`` with ``lambda = 1 - tau``, accurately."""
    log_lam = np.log1p(-tau)
    return np.exp((sp - 1.0) * log_lam) * np.abs(np.expm1(-expo * log_lam)) ** p


def _power_P(a, b, kappa):
    """``int_a^b r^kappa dr`` elementwise (zero where ``b <= a``)."""
    a = np.asarray(a, dtype=float)
    b = np.maximum(np.asarray(b, dtype=float), a)
    if abs(kappa + 1.0) < 1e-14:
        return np.log(b / a)
    k1 = kappa + 1.0
    return (b**k1 - a**k1) / k1


def _gagliardo_pure(coeff, expo, s, p, n, radius, cutoffs, order=24):
    """Shell contributions for ``F = coeff r^expo + const`` on ``(0, R)``."""
    sp = s * p
    alpha = p * (1.0 - s)
    kappa = n - 1.0 - sp + expo * p
    edges = [radius] + list(cutoffs)
    pref = 2.0 * _sphere_pair_constant(n) * abs(coeff) ** p

    tau_u, w_u, G_u, tau_j, w_j, G_j = _upper_mesh(n, sp, alpha)
    # Lower part lambda in [eps_min / R, 1/2]: dyadic panels plus cutoff ratios.
    lam_lo = float(cutoffs[-1]) / radius
    lam_edges = set(geometric_edges(lam_lo, 1.0 - TAU_SPLIT).tolist())
    lam_edges.update(c / radius for c in cutoffs if lam_lo < c / radius < 1.0 - TAU_SPLIT)
    lam, w_l, _ = panel_nodes(sorted(lam_edges), order)
    tau_l = 1.0 - lam
    G_l = angular_kernel_ratio(tau_l, n, sp)

    groups = (
        (1.0 - tau_u, tau_u, w_u * G_u * _lambda_factor(tau_u, sp, p, expo)),
        (1.0 - tau_l, tau_l, w_l * G_l * _lambda_factor(tau_l, sp, p, expo)),
        # Jacobi weights carry tau^{alpha-1}; divide it out of the integrand.
        (1.0 - tau_j, tau_j, w_j * G_j * _lambda_factor(tau_j, sp, p, expo) * tau_j ** (1.0 - alpha)),
    )
    shells = []
    for hi, lo in zip(edges[:-1], edges[1:]):
        total = 0.0
        for lam_k, _, wk in groups:
            P = _power_P(lo, np.minimum(hi, lam_k * radius), kappa)
            total += float(np.dot(wk, P))
        shells.append(pref * total)
    return np.array(shells)


def _gagliardo_general(prof, s, p, n, radius, cutoffs, order=16):
    """Shell contributions by nested quadrature in ``(r, lambda)``."""
    sp = s * p
    alpha = p * (1.0 - s)
    edges = [radius] + list(cutoffs)
    pref = 2.0 * _sphere_pair_constant(n)
    breaks = [b for b in prof.breakpoints() if b < radius]
    tau_u, w_u, G_u, tau_j, w_j, G_j = _upper_mesh(n, sp, alpha)
    F = prof.radial

    def inner(r):
        # lambda in (r/R, 1); kinks where r/lambda hits a breakpoint.
        lam_lo = r / radius
        kinks = [r / b for b in breaks if r < b]
        total = 0.0
        # upper region tau in (0, 1/2]
        split = [1.0 - k for k in kinks if 1.0 - k < TAU_SPLIT and k > lam_lo]
        top = max(lam_lo, 1.0 - TAU_SPLIT)
        if top < 1.0:
            if split or lam_lo > 1.0 - TAU_SPLIT:
                t_edges = sorted(set(geometric_edges(TAU_MIN, 1.0 - top).tolist()) | set(split))
                tt, ww, _ = panel_nodes(t_edges, order)
                GG = angular_kernel_ratio(tt, n, sp)
            else:
                tt, ww, GG = tau_u, w_u, G_u
            lam = 1.0 - tt
            vals = GG * np.exp((sp - 1.0) * np.log1p(-tt)) * np.abs(F(r) - F(r / lam)) ** p
            total += float(np.dot(ww, vals))
            lam = 1.0 - tau_j
            vals = G_j * np.exp((sp - 1.0) * np.log1p(-tau_j)) * np.abs(F(r) - F(r / lam)) ** p
            total += float(np.dot(w_j, vals * tau_j ** (1.0 - alpha)))
        if lam_lo < 1.0 - TAU_SPLIT:
            l_edges = set(geometric_edges(lam_lo, 1.0 - TAU_SPLIT).tolist())
            l_edges.update(k for k in kinks if lam_lo < k < 1.0 - TAU_SPLIT)
            ll, wl, _ = panel_nodes(sorted(l_edges), order)
            GG = angular_kernel_ratio(1.0 - ll, n, sp)
            vals = GG * ll ** (sp - 1.0) * np.abs(F(r) - F(r / ll)) ** p
            total += float(np.dot(wl, vals))
        return total * r ** (n - 1.0 - sp)

    shells = []
    for hi, lo in zip(edges[:-1], edges[1:]):
        pts = sorted(set(geometric_edges(lo, hi).tolist()) | {b for b in breaks if lo < b < hi})
        rr, wr, _ = panel_nodes(pts, order)
        shells.append(pref * sum(w * inner(r) for r, w in zip(rr, wr)))
    return np.array(shells)


def _route_endpoint(prof, spec, cutoffs, slope_threshold):
    if spec.s == 0:
        return lp_norm(prof, spec.p, spec.domain, spec.n, cutoffs, slope_threshold)
    return sobolev_seminorm(prof, spec.p, spec.domain, spec.n, cutoffs, slope_threshold)


def gagliardo_seminorm(prof: RadialProfile, spec: FractionalNormSpec,
                       cutoffs: Sequence[float] = DEFAULT_CUTOFFS,
                       slope_threshold: float = SLOPE_THRESHOLD,
                       force_general: bool = False) -> NormEstimate:
    """Truncated Sobolev-Slobodeckij integrals over ``D_eps x D_eps``.

    Profiles that are a single power plus a constant on the ball use a
    one-dimensional reduction (the radial integral is done in closed form);
    anything else goes through nested ``(r, lambda)`` quadrature.
    ``s`` in ``{0, 1}`` is routed to :func:`lp_norm` / :func:`sobolev_seminorm`.
    """
    if spec.s in (0, 1):
        return _route_endpoint(prof, spec, cutoffs, slope_threshold)
    s, p, n = float(spec.s), float(spec.p), spec.n
    R = float(spec.domain.radius)
    cutoffs = _check_cutoffs(cutoffs, R)
    pure = None if force_general else prof.pure_power_on(R)
    if pure is not None:
        shells = _gagliardo_pure(pure[0], pure[1], s, p, n, R, cutoffs)
        route = "radial_1d"
    elif not prof.segments(R)[0][2] and len(prof.segments(R)) == 1:
        shells = np.zeros(len(cutoffs))
        route = "constant"
    else:
        shells = _gagliardo_general(prof, s, p, n, R, cutoffs)
        route = "radial_2d"
    if np.any(shells < 0) or not np.all(np.isfinite(shells)):
        raise RuntimeError("negative or non-finite shell contribution")
    partials = np.cumsum(shells)
    return _finish(
        cutoffs,
        partials,
        p,
        "gagliardo_double_integral",
        slope_threshold,
        diagnostics={"route": route, "tau_min": TAU_MIN, "shells": len(shells)},
    )


def _log_uniform_ball_samples(rng, n, lo, hi, size):
    u = rng.random(size)
    r = lo * (hi / lo) ** u
    d = rng.standard_normal((size, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return r, d


def modulus_seminorm(prof: RadialProfile, spec: FractionalNormSpec,
                     cutoffs: Sequence[float] = DEFAULT_CUTOFFS,
                     slope_threshold: float = SLOPE_THRESHOLD,
                     seed: int = DEFAULT_SEED,
                     samples: int = MC_SAMPLES,
                     t_order: int = 4,
                     t_floor_ratio: float = 2.0**-6) -> NormEstimate:
    """Integrated directional modulus of smoothness, by seeded Monte Carlo.

    Computes ``int_0^{2R} t^{-sp} w(t)^p dt/t`` where ``w(t)^p`` is
    ``|S^{n-1}|`` times the direction average of ``||f(.+h) - f||_p^p`` on
    the annulus, ``|h| = t``.  Up to ``2R`` (the diameter) this equals the
    Gagliardo double integral, so the two estimators share their expected
    partials but no numerical machinery.

    ``x`` is stratified over the cutoff shells with log-uniform radius;
    pairs are ordered ``|x| < |x + h|`` and counted twice.  The shift scale
    is integrated by Gauss-Legendre in ``log t`` on dyadic panels, with a
    ``t^{p(1-s)}`` tail below the last panel.
    """
    if spec.s in (0, 1):
        return _route_endpoint(prof, spec, cutoffs, slope_threshold)
    s, p, n = float(spec.s), float(spec.p), spec.n
    R = float(spec.domain.radius)
    cutoffs = _check_cutoffs(cutoffs, R)
    edges = np.array([R] + list(cutoffs))
    n_shells = len(edges) - 1
    per_shell = max(samples // n_shells, 1)
    F = prof.radial
    area = sphere_area(n)

    t_hi = 2.0 * R
    t_lo = float(cutoffs[-1]) * t_floor_ratio
    log_edges = np.log(geometric_edges(t_lo, t_hi))[::-1]
    x_ref, w_ref = gauss_legendre(t_order)
    nodes = []
    for a, b in zip(log_edges[:-1], log_edges[1:]):
        half = 0.5 * (b - a)
        nodes.extend((math.exp(0.5 * (a + b) + half * xg), wg * half) for xg, wg in zip(x_ref, w_ref))
    # One independent stream per shift node: results do not depend on
    # the number of worker threads.
    streams = np.random.SeedSequence(seed).spawn(len(nodes))

    def shift_average(i):
        t = nodes[i][0]
        rng = np.random.default_rng(streams[i])
        q = np.zeros(n_shells)
        for j in range(n_shells):
            hi_r, lo_r = edges[j], edges[j + 1]
            r, d = _log_uniform_ball_samples(rng, n, lo_r, hi_r, per_shell)
            omega = rng.standard_normal((per_shell, n))
            omega /= np.linalg.norm(omega, axis=1, keepdims=True)
            ry = np.linalg.norm(d * r[:, None] + t * omega, axis=1)
            keep = (ry > r) & (ry < R)
            diff = np.abs(F(ry) - F(r)) ** p
            weight = area * r**n * math.log(hi_r / lo_r)
            q[j] = 2.0 * float(np.mean(np.where(keep, diff * weight, 0.0)))
        return q

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        qs = list(pool.map(shift_average, range(len(nodes))))
    shells = np.zeros(n_shells)
    for (t, w), q in zip(nodes, qs):
        # dt/t = d(log t); directional average times |S^{n-1}|
        shells += w * area * t ** (-s * p) * q
    i_min = min(range(len(nodes)), key=lambda i: nodes[i][0])
    smallest_t, smallest_t_values = nodes[i_min][0], qs[i_min]
    # Small-shift tail: q(t) ~ C t^p  =>  int_0^{t0} t^{-sp-1} C t^p dt.
    alpha = p * (1.0 - s)
    t0 = math.exp(log_edges[0])
    shells += area * smallest_t_values * smallest_t ** (-p) * t0 ** alpha / alpha
    partials = np.cumsum(shells)
    return _finish(
        cutoffs,
        partials,
        p,
        "modulus_of_smoothness",
        slope_threshold,
        seed=seed,
        diagnostics={
            "samples_per_shift": per_shell * n_shells,
            "shift_nodes": len(nodes),
            "t_range": [t_lo, t_hi],
        },
    )


def estimate(prof: RadialProfile, spec: FractionalNormSpec, **kw) -> NormEstimate:
    """Dispatch on ``spec.estimator``."""
    if spec.estimator == "modulus_of_smoothness":
        return modulus_seminorm(prof, spec, **kw)
    kw.pop("seed", None)
    kw.pop("samples", None)
    return gagliardo_seminorm(prof, spec, **kw)


def classify_membership(prof: RadialProfile, spec: FractionalNormSpec, **kw) -> Membership:
    """Numerical verdict: member, non-member or inconclusive."""
    return estimate(prof, spec, **kw).verdict
