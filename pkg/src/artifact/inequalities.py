"""Sampled convexity certificates, support lines, Jensen gaps and Clarkson's inequalities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dyadic import DyadicStepFn, lp_norm

__all__ = [
    "SampledFunction",
    "ConvexityResult",
    "NotConvexError",
    "convexity_certificate",
    "support_line",
    "jensen_gap",
    "clarkson_check",
    "holder_pair",
    "minkowski_pair",
    "subadditive_power_pair",
]

QUOTIENT_TOL = 1e-10


class NotConvexError(ValueError):
    pass


@dataclass(frozen=True)
class SampledFunction:
    points: np.ndarray
    values: np.ndarray

    def __init__(self, points, values):
        pts = np.asarray(points, dtype=float)
        vals = np.asarray(values, dtype=float)
        if pts.ndim != 1 or pts.shape != vals.shape:
            raise ValueError("points and values must be 1-D arrays of equal length")
        if len(pts) < 3:
            raise ValueError("need at least 3 samples")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("abscissae must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, fn: Callable[[np.ndarray], np.ndarray], points) -> "SampledFunction":
        pts = np.asarray(points, dtype=float)
        return cls(pts, fn(pts))

    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.points)

    def __call__(self, x):
        """Piecewise-linear interpolation; convex samples give a convex interpolant."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.points[0] - 1e-12) or np.any(x > self.points[-1] + 1e-12):
            raise ValueError("argument outside the sampled domain")
        return np.interp(x, self.points, self.values)


@dataclass(frozen=True)
class ConvexityResult:
    convex: bool
    violation: tuple[float, float, float] | None = None

    def __bool__(self) -> bool:
        return self.convex


def convexity_certificate(phi: SampledFunction, tol: float = QUOTIENT_TOL) -> ConvexityResult:
    """Checks that difference quotients increase along consecutive sample triples.

    Consecutive triples suffice: if adjacent slopes increase, every chord slope
    comparison follows by chaining.
    """
    s = phi.slopes()
    for i in range(len(s) - 1):
        if s[i] > s[i + 1] + tol * max(1.0, abs(s[i]), abs(s[i + 1])):
            p = phi.points
            return ConvexityResult(False, (float(p[i]), float(p[i + 1]), float(p[i + 2])))
    return ConvexityResult(True)


def support_line(phi: SampledFunction, t: float) -> float:
    """Slope of an affine minorant of the samples touching them at ``t``.

    Returns the midpoint of the interval between the left and right difference
    quotients at ``t``; an endpoint sample uses its single one-sided quotient.
    """
    cert = convexity_certificate(phi)
    if not cert:
        raise NotConvexError(f"samples are not convex; violating triple {cert.violation}")
    idx = np.flatnonzero(np.isclose(phi.points, t, rtol=0, atol=1e-12))
    if idx.size == 0:
        raise ValueError("t must be one of the sample abscissae")
    i = int(idx[0])
    s = phi.slopes()
    left = s[i - 1] if i > 0 else None
    right = s[i] if i < len(s) else None
    if left is None:
        return float(right)
    if right is None:
        return float(left)
    return float(0.5 * (left + right))


def jensen_gap(phi: SampledFunction | float, f: DyadicStepFn) -> float:
    """``avg(phi(f)) - phi(avg f)`` over [0,1).

    ``phi`` is either sampled (evaluated by linear interpolation) or a power ``p >= 1``,
    meaning ``x -> |x|^p``.
    """
    if f.is_complex:
        raise ValueError("Jensen gap needs a real-valued function")
    v = np.asarray(f.values, dtype=float)
    if isinstance(phi, SampledFunction):
        inner = phi(v)
        return float(np.mean(inner) - phi(np.mean(v)))
    p = float(phi)
    if p < 1:
        raise ValueError("power must be at least 1 for convexity")
    return float(np.mean(np.abs(v) ** p) - abs(np.mean(v)) ** p)


def _pnorm(v: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(v) ** p) ** (1.0 / p))


def clarkson_check(x, y, p: float) -> tuple[float, float]:
    """Both sides of Clarkson's inequality for the ``l^p`` norm.

    For ``p >= 2``: ``|(x+y)/2|^p + |(x-y)/2|^p <= (|x|^p + |y|^p)/2``.
    For ``1 < p < 2`` with ``p' = p/(p-1)``:
    ``|(x+y)/2|^{p'} + |(x-y)/2|^{p'} <= ((|x|^p + |y|^p)/2)^{1/(p-1)}``.
    """
    if not 1 < p < np.inf:
        raise ValueError("p must lie in (1, inf)")
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError("vectors must have the same length")
    half_sum = _pnorm((x + y) / 2, p)
    half_diff = _pnorm((x - y) / 2, p)
    mean_p = 0.5 * (_pnorm(x, p) ** p + _pnorm(y, p) ** p)
    if p >= 2:
        return half_sum**p + half_diff**p, mean_p
    q = p / (p - 1)
    return half_sum**q + half_diff**q, mean_p ** (1.0 / (p - 1))


def holder_pair(f: DyadicStepFn, g: DyadicStepFn, p: float) -> tuple[float, float]:
    """``(|int f g|, |f|_p |g|_q)`` with ``q`` conjugate to ``p``."""
    q = np.inf if p == 1 else (1.0 if np.isinf(p) else p / (p - 1))
    return float(abs((f * g).integral())), lp_norm(f, p) * lp_norm(g, q)


def minkowski_pair(f: DyadicStepFn, g: DyadicStepFn, p: float) -> tuple[float, float]:
    return lp_norm(f + g, p), lp_norm(f, p) + lp_norm(g, p)


def subadditive_power_pair(f: DyadicStepFn, g: DyadicStepFn, p: float) -> tuple[float, float]:
    """For ``0 < p < 1`` and nonnegative ``f, g``: ``int (f+g)^p <= int f^p + int g^p``."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return lp_norm(f + g, p) ** p, lp_norm(f, p) ** p + lp_norm(g, p) ** p
