"""Quadrature for radial integrands with power-law singularities.

Everything here reduces integrals over origin-centred balls to one
dimension, ``|S^{n-1}| * int g(r) r^{n-1} dr``.  Singular end points are
handled with geometric meshes (ratio 1/2) down to a floor and a power-law
tail for the last cell.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import gammaln, hyp2f1, roots_jacobi

__all__ = [
    "QuadratureError",
    "sphere_area",
    "ball_volume",
    "gauss_legendre",
    "gauss_jacobi",
    "geometric_edges",
    "panel_nodes",
    "adaptive_integral",
    "radial_integral",
    "angular_kernel",
    "angular_kernel_ratio",
    "angular_kernel_hyp",
    "angular_kernel_leading",
]

RMIN = 1e-12


class QuadratureError(RuntimeError):
    """Adaptive refinement failed to reach the requested tolerance."""


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere ``S^{n-1}`` in ``R^n``."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def ball_volume(n: int, radius: float = 1.0) -> float:
    return sphere_area(n) * radius**n / n


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


@lru_cache(maxsize=None)
def _jacobi_ref(order: int, expo: float):
    return roots_jacobi(order, 0.0, expo)


def gauss_jacobi(h: float, expo: float, order: int = 16):
    """Nodes ``u`` and weights for ``int_0^h u^expo phi(u) du = sum w phi(u)``."""
    x, w = _jacobi_ref(order, float(expo))
    u = 0.5 * h * (1.0 + x)
    return u, w * (0.5 * h) ** (expo + 1.0)


def geometric_edges(lo: float, hi: float, ratio: float = 0.5):
    """Edges ``hi, hi*ratio, hi*ratio^2, ... > lo`` followed by ``lo`` (decreasing)."""
    edges = [hi]
    x = hi * ratio
    while x > lo * (1 + 1e-12):
        edges.append(x)
        x *= ratio
    edges.append(lo)
    return np.array(edges)


def panel_nodes(edges, order: int = 16):
    """Gauss-Legendre nodes and weights on consecutive panels ``edges[i]..edges[i+1]``.

    ``edges`` may be increasing or decreasing; weights are for the
    oriented-positive integral over the union.
    """
    edges = np.sort(np.asarray(edges, dtype=float))
    a, b = edges[:-1], edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel(), (a, b)


def _panel(f, a, b, order):
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    return half * np.dot(w, f(0.5 * (a + b) + half * x))


def adaptive_integral(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 40):
    """Adaptive Gauss-Legendre on ``[a, b]`` (orders 16 vs 32, bisection).

    ``f`` must accept numpy arrays.  Raises :class:`QuadratureError` when a
    panel is still unresolved at ``max_depth``.
    """
    total = 0.0
    stack = [(a, b, 0)]
    scale = abs(_panel(f, a, b, 32)) or 1.0
    while stack:
        lo, hi, depth = stack.pop()
        coarse = _panel(f, lo, hi, 16)
        fine = _panel(f, lo, hi, 32)
        if not np.isfinite(fine):
            raise QuadratureError(f"non-finite integrand on [{lo}, {hi}]")
        if abs(fine - coarse) <= tol * max(scale, abs(fine)) or hi - lo < 1e-15 * max(1.0, abs(hi)):
            total += fine
        elif depth >= max_depth:
            raise QuadratureError(f"no convergence on [{lo}, {hi}] after {depth} bisections")
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    return total


def _tail_from_shells(i_last: float, i_prev: float):
    """Integral over ``[0, h]`` from the last two dyadic shells of a power law.

    If the shell integrals behave like ``C 2^{-m mu}``, the remaining sum is
    ``i_last / (2^mu - 1)``; ``mu <= 0`` means the integral diverges.
    """
    if i_last == 0.0:
        return 0.0, math.inf
    if i_prev == 0.0 or np.sign(i_last) != np.sign(i_prev):
        raise QuadratureError("origin tail is not a clean power law")
    mu = math.log2(i_prev / i_last)
    if mu <= 1e-9:
        return math.inf, mu
    return i_last / (2.0**mu - 1.0), mu


def radial_integral(
    g,
    radius: float,
    n: int,
    breakpoints=(),
    inner: float = 0.0,
    tol: float = 1e-12,
    rmin: float = RMIN,
    with_sphere: bool = True,
):
    """``|S^{n-1}| int_inner^radius g(r) r^{n-1} dr`` for vectorised ``g``.

    With ``inner = 0`` the integral over ``[rmin, radius]`` is taken on a
    dyadic mesh towards the origin and the rest is a power-law tail
    extrapolated from the last two shells.  Returns ``inf`` when that tail
    diverges.  ``breakpoints`` are kinks of ``g`` to place on panel edges.
    """
    lo = max(inner, 0.0)
    # With a singular origin the floor sits on the dyadic ladder from the
    # radius, so the two innermost shells are exact halvings.
    floor = lo if lo > 0 else radius * 2.0 ** -math.ceil(math.log2(radius / rmin))
    edges = set(geometric_edges(floor, radius).tolist())
    edges.update(b for b in breakpoints if floor < b < radius)
    edges = sorted(edges)

    def integrand(r):
        return g(r) * r ** (n - 1)

    shells = [adaptive_integral(integrand, a, b, tol=tol) for a, b in zip(edges[:-1], edges[1:])]
    total = math.fsum(shells)
    if lo == 0.0:
        tail, _ = _tail_from_shells(shells[0], shells[1])
        total += tail
    factor = sphere_area(n) if with_sphere else 1.0
    return factor * total


# ---------------------------------------------------------------------------
# Angular kernel of the radial Gagliardo double integral.
#
#   A(r, t) = int_0^pi sin^{n-2}(th) (r^2 + t^2 - 2 r t cos th)^{-(n+sp)/2} dth
#
# is homogeneous: A(r, t) = max^{-(n+sp)} G(1 - min/max), with
#
#   G(tau) = int_0^pi sin^{n-2}(th) (tau^2 + 4 (1 - tau) sin^2(th/2))^{-beta} dth.
#
# Parametrising by the gap tau = 1 - lambda avoids cancellation near the
# diagonal, where G ~ tau^{-(1+sp)}.
# ---------------------------------------------------------------------------

_HYP_TAU = 0.05


def angular_kernel_hyp(lam, n: int, sp: float):
    """Hypergeometric closed form of ``G`` in terms of ``lambda = min/max``.

    Accurate away from the diagonal only (``1 - lambda`` above ~1e-2).
    """
    lam = np.asarray(lam, dtype=float)
    b = 0.5 * (n + sp)
    z = 4.0 * lam / (1.0 + lam) ** 2
    return beta_fn(0.5, 0.5 * (n - 1)) * (1.0 + lam) ** (-2 * b) * hyp2f1(b, 0.5 * (n - 1), n - 1, z)


def angular_kernel_leading(tau, n: int, sp: float):
    """Leading diagonal asymptotics ``C tau^{-(1+sp)}`` of ``G``."""
    b = 0.5 * (n + sp)
    logc = gammaln(0.5 * (n - 1)) + gammaln(b - 0.5 * (n - 1)) - gammaln(b) - math.log(2.0)
    return math.exp(logc) * np.asarray(tau, dtype=float) ** (-(1.0 + sp))


_THETA_PANELS = 48


def _kernel_quad(tau, n: int, sp: float, order: int = 24):
    """Graded theta-quadrature of ``G`` for small ``tau`` (vectorised).

    Panels ``[0, tau], [tau, 2 tau], ...`` capped at ``pi``; panels past
    ``pi`` collapse to zero width.
    """
    tau = np.asarray(tau, dtype=float)
    b = 0.5 * (n + sp)
    steps = np.concatenate(([0.0], 2.0 ** np.arange(_THETA_PANELS)))
    edges = np.minimum(tau[:, None] * steps[None, :], math.pi)
    edges[:, -1] = math.pi
    x, w = gauss_legendre(order)
    lo, hi = edges[:, :-1], edges[:, 1:]
    half = 0.5 * (hi - lo)
    th = (0.5 * (lo + hi))[..., None] + half[..., None] * x
    d2 = tau[:, None, None] ** 2 + 4.0 * (1.0 - tau[:, None, None]) * np.sin(0.5 * th) ** 2
    vals = d2 ** (-b)
    if n > 2:
        vals = vals * np.sin(th) ** (n - 2)
    return np.einsum("ijk,k,ij->i", vals, w, half)


def angular_kernel_ratio(tau, n: int, sp: float):
    """``G(tau)`` for ``tau = 1 - min/max`` in ``[0, 1]`` (vectorised).

    Uses the hypergeometric form where it is accurate and a graded
    theta-quadrature (panels ``[0, tau], [tau, 2 tau], ...``) near the
    diagonal.  ``G(0) = inf``.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty_like(tau)
    far = tau >= _HYP_TAU
    if far.any():
        out[far] = angular_kernel_hyp(1.0 - tau[far], n, sp)
    near = ~far & (tau > 0)
    if near.any():
        idx = np.flatnonzero(near)
        for chunk in np.array_split(idx, max(1, len(idx) // 256)):
            out[chunk] = _kernel_quad(tau[chunk], n, sp)
    out[tau <= 0] = math.inf
    return out


def angular_kernel(r, t, n: int, sp: float):
    """``A(r, t)``; symmetric in ``(r, t)`` by construction."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    big = np.maximum(r, t)
    small = np.minimum(r, t)
    tau = (big - small) / big
    return big ** (-(n + sp)) * angular_kernel_ratio(tau, n, sp).reshape(np.broadcast(r, t).shape)
