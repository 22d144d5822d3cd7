"""Radial stretches ``phi_k(x) = x |x|^{k-1}`` and their Jacobians."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exponents import as_exact
from .quadrature import ball_volume, radial_integral, sphere_area

__all__ = [
    "Ball",
    "RadialStretch",
    "SingularityError",
    "evaluate",
    "jacobian",
    "inverse",
    "jacobian_power_integral",
    "jacobian_power_integral_quadrature",
    "jacobian_power_integral_mc",
    "admissible_a",
    "admissible_b",
    "change_of_variables_check",
]


class SingularityError(ValueError):
    pass


@dataclass(frozen=True)
class Ball:
    radius: float = 1.0
    center: tuple = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def center_array(self, n: int) -> np.ndarray:
        if self.center is None:
            return np.zeros(n)
        c = np.asarray(self.center, dtype=float)
        if c.shape != (n,):
            raise ValueError(f"center must have {n} coordinates")
        return c

    @property
    def is_origin_centered(self) -> bool:
        return self.center is None or not np.any(np.asarray(self.center, dtype=float))


@dataclass(frozen=True)
class RadialStretch:
    """The map ``x -> x |x|^{k-1}`` on ``R^n``."""

    k: float
    n: int = 2

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"stretch exponent must be positive, got {self.k}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("dimension must be an integer >= 2")

    @property
    def distortion(self) -> float:
        """Quasiconformality constant as stated for the radial stretch.

        ``k^{n-1}`` for ``k >= 1`` and ``(2-k)^n / k`` for ``k < 1``.  The
        second value is an upper bound, not the optimal ``1/k``.
        """
        k, n = float(self.k), self.n
        if k >= 1:
            return k ** (n - 1)
        return (2 - k) ** n / k

    def __call__(self, x):
        return evaluate(self, x)


def evaluate(phi: RadialStretch, x) -> np.ndarray:
    """``x |x|^{k-1}``; points are the last axis of ``x``.  Origin maps to origin."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(r > 0, r ** (float(phi.k) - 1.0), 0.0)
    return x * scale


def jacobian(phi: RadialStretch, x) -> np.ndarray:
    """``k |x|^{n(k-1)}``."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    k, n = float(phi.k), phi.n
    if k < 1 and np.any(r == 0):
        raise SingularityError("Jacobian is infinite at the origin for k < 1")
    return k * r ** (n * (k - 1.0))


def _divergent(phi: RadialStretch, t) -> bool:
    """``n + n(k-1)t <= 0``, decided exactly when ``k`` and ``t`` are rational."""
    k, t = as_exact(phi.k), as_exact(t)
    return 1 + (k - 1) * t <= 0


def inverse(phi: RadialStretch) -> RadialStretch:
    return RadialStretch(1.0 / phi.k, phi.n)


def admissible_a(k: float) -> float:
    """Supremum of positive Jacobian powers for ``phi_k`` (``inf`` when ``k >= 1``)."""
    return 1.0 / (1.0 - k) if k < 1 else math.inf


def admissible_b(k: float) -> float:
    """Supremum of negative Jacobian powers for ``phi_k`` (``inf`` when ``k <= 1``)."""
    return 1.0 / (k - 1.0) if k > 1 else math.inf


def jacobian_power_integral(phi: RadialStretch, ball: Ball, t: float, seed: int = 0, samples: int = 200_000):
    """``int_B J^t`` over a ball; ``inf`` when it diverges.

    Closed form for origin-centred balls.  Off-centre balls not containing
    the origin fall back to a seeded Monte Carlo estimate.
    """
    k, n = float(phi.k), phi.n
    R = float(ball.radius)
    if not ball.is_origin_centered:
        return jacobian_power_integral_mc(phi, ball, t, seed=seed, samples=samples)
    if k == 1.0:
        return ball_volume(n, R)
    if _divergent(phi, t):
        return math.inf
    expo = n + n * (k - 1.0) * t
    return k**t * sphere_area(n) * R**expo / expo


def jacobian_power_integral_quadrature(phi: RadialStretch, ball: Ball, t: float, tol: float = 1e-12):
    """Independent radial quadrature of the same integral (for cross-checks)."""
    k, n, t = float(phi.k), phi.n, float(t)
    if not ball.is_origin_centered:
        raise ValueError("radial quadrature needs an origin-centred ball")
    return radial_integral(lambda r: (k * r ** (n * (k - 1.0))) ** t, float(ball.radius), n, tol=tol)


def jacobian_power_integral_mc(phi: RadialStretch, ball: Ball, t: float, seed: int = 0, samples: int = 200_000):
    n = phi.n
    c = ball.center_array(n)
    R = float(ball.radius)
    if np.linalg.norm(c) <= R:
        if _divergent(phi, t):
            return math.inf
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((samples, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = R * rng.random(samples) ** (1.0 / n)
    x = c + g * rad[:, None]
    return ball_volume(n, R) * float(np.mean(jacobian(phi, x) ** float(t)))


def change_of_variables_check(phi: RadialStretch, profile, ball: Ball, tol: float = 1e-12) -> float:
    """Relative residual of ``int_B f(phi) J_phi = int_{phi(B)} f``.

    Both sides are radial quadratures over origin-centred balls, the image
    of ``B_R`` being ``B_{R^k}``.
    """
    if not ball.is_origin_centered:
        raise ValueError("change of variables check needs an origin-centred ball")
    k, n = float(phi.k), phi.n
    R = float(ball.radius)
    F = profile.radial
    lhs_breaks = [b ** (1.0 / k) for b in profile.breakpoints()]
    lhs = radial_integral(
        lambda r: F(r**k) * k * r ** (n * (k - 1.0)), R, n, breakpoints=lhs_breaks, tol=tol
    )
    rhs = radial_integral(F, R**k, n, breakpoints=profile.breakpoints(), tol=tol)
    if math.isinf(lhs) or math.isinf(rhs):
        raise ValueError("profile is not integrable on the image ball")
    return abs(lhs - rhs) / max(abs(rhs), 1.0)
