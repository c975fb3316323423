"""Bilinear forms, l^p operator bounds M_p, extremal pairs and log-convexity of M_p
in 1/p, plus the step-function reformulation and linearized maximal operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import DyadicStepFn, haar_analyze, haar_synthesize, HaarExpansion, level_averages
from .hardy import martingale_differences, square
from .inequalities import SampledFunction, convexity_certificate
from .linops import (
    NormEstimate,
    alternating_ascent,
    conjugate_exponent,
    operator_norm,
    vector_pnorm,
)

__all__ = [
    "BilinearForm",
    "mp_norm",
    "ExtremalPair",
    "extremal_pair",
    "interpolated_exponent",
    "riesz_convexity_report",
    "MidpointResult",
    "midpoint_convexity_upgrade",
    "log_mp_profile",
    "expectation_matrix",
    "haar_mask_matrix",
    "stepfn_operator_interp",
    "linearize_maximal",
    "linearize_square",
    "brute_force_endpoint",
]


@dataclass(frozen=True)
class BilinearForm:
    """``A(x, y) = sum_{j,k} y_j a_{jk} x_k`` (no conjugation)."""

    a: np.ndarray

    def __call__(self, x, y):
        return np.asarray(y) @ self.a @ np.asarray(x)


def _real_or_complex_start(rng, n, cplx):
    x = rng.standard_normal(n)
    return x + 1j * rng.standard_normal(n) if cplx else x


def mp_norm(a, p: float, budget: int = 8, rng: np.random.Generator | None = None,
            real: bool = False) -> NormEstimate:
    """``M_p = max |A(x, y)|`` over ``|x|_p <= 1``, ``|y|_{p'} <= 1``, i.e. the
    ``l^p -> l^p`` norm of ``a``.

    Exact for ``p`` in {1, 2, inf} (largest column sum, largest singular value, largest
    row sum).  Otherwise a lower bound from ``budget`` restarts of the alternating
    Hölder-equality iteration; ``real=True`` restricts the search to real vectors.
    """
    if not p >= 1:
        raise ValueError("p must lie in [1, inf]")
    a = np.atleast_2d(np.asarray(a))
    if p == 1:
        return NormEstimate(float(np.abs(a).sum(axis=0).max()), True)
    if np.isinf(p):
        return NormEstimate(float(np.abs(a).sum(axis=1).max()), True)
    if p == 2 and not real:
        return NormEstimate(float(np.linalg.norm(a, 2)), True)
    pair = extremal_pair(a, p, budget=budget, rng=rng, real=real)
    return NormEstimate(pair.value, False, pair.x)


@dataclass
class ExtremalPair:
    x: np.ndarray
    y: np.ndarray
    value: float
    mu: float
    nu: float
    residual_mu: float
    residual_nu: float
    history: list


def extremal_pair(a, r: float, budget: int = 8, rng: np.random.Generator | None = None,
                  real: bool = False, iters: int = 20000) -> ExtremalPair:
    """Best pair found by the alternating iteration, with stationarity residuals.

    At a maximiser ``|(a x)_j| = mu |y_j|^{r'-1}`` and ``|(y a)_k| = nu |x_k|^{r-1}``
    with ``mu = nu = M_r``; ``residual_*`` are the sup-norm violations of these identities.
    """
    if not 1 < r < np.inf:
        raise ValueError("r must lie in (1, inf)")
    a = np.atleast_2d(np.asarray(a))
    if not np.any(a):
        raise ValueError("zero matrix has no extremal pair")
    rng = np.random.default_rng(0) if rng is None else rng
    cplx = np.iscomplexobj(a) and not real
    work = a if cplx else a.real if real else a
    best = None
    for _ in range(max(1, budget)):
        x0 = _real_or_complex_start(rng, a.shape[1], cplx)
        x, y, hist = alternating_ascent(work, r, r, x0, iters=iters)
        val = float(abs(y @ work @ x))
        if best is None or val > best[2]:
            best = (x, y, val, hist)
    x, y, val, hist = best
    rp = conjugate_exponent(r)
    u = np.abs(work @ x)
    v = np.abs(y @ work)
    res_mu = float(np.max(np.abs(u - val * np.abs(y) ** (rp - 1))))
    res_nu = float(np.max(np.abs(v - val * np.abs(x) ** (r - 1))))
    return ExtremalPair(x, y, val, val, val, res_mu, res_nu, hist)


def interpolated_exponent(p: float, q: float, t: float) -> float:
    """``r`` with ``1/r = t/p + (1-t)/q``."""
    inv = t / p + (1 - t) / q
    return np.inf if inv == 0 else 1.0 / inv


def riesz_convexity_report(a, p: float, q: float, t: float, budget: int = 8,
                           rng: np.random.Generator | None = None) -> dict:
    """Both sides of ``M_r <= M_p^t M_q^{1-t}``; the left side is exact or a lower bound."""
    if not (1 <= p < q <= np.inf) or not 0 < t < 1:
        raise ValueError("need 1 <= p < q <= inf and 0 < t < 1")
    r = interpolated_exponent(p, q, t)
    mr = mp_norm(a, r, budget, rng)
    mp_, mq = mp_norm(a, p, budget, rng), mp_norm(a, q, budget, rng)
    return {"r": r, "lhs": mr.value, "lhs_exact": mr.exact,
            "rhs": mp_.value**t * mq.value ** (1 - t), "endpoints_exact": mp_.exact and mq.exact}


def brute_force_endpoint(a, p: float) -> float:
    """``M_1`` or ``M_inf`` by trying every extreme point of the unit ball.

    For ``p = 1`` the extreme points are the basis vectors (phases do not change ``|a x|_1``);
    for ``p = inf`` the norm is attained at the vector of conjugate phases of a row.
    """
    a = np.atleast_2d(np.asarray(a))
    if p == 1:
        return max(vector_pnorm(a @ e, 1) for e in np.eye(a.shape[1]))
    if np.isinf(p):
        best = 0.0
        for row in a:
            x = np.where(row != 0, np.conj(row) / np.where(row != 0, np.abs(row), 1), 0)
            best = max(best, vector_pnorm(a @ x, np.inf))
        return best
    raise ValueError("brute force is available for p = 1 and p = inf only")


# ---------------------------------------------------------------- convexity upgrade

@dataclass
class MidpointResult:
    hypothesis: bool
    convex: bool
    witness: tuple | None

    @property
    def ok(self) -> bool:
        """The implication 'weak convexity hypothesis => convexity' holds on the samples."""
        return (not self.hypothesis) or self.convex


def midpoint_convexity_upgrade(xs, fs, tol: float = 1e-10) -> MidpointResult:
    """Checks that some-interior-point convexity upgrades to full convexity on a grid.

    The hypothesis asks, for each pair of grid points, for at least one grid point
    strictly between them lying on or below the chord.  Pairs of adjacent points have
    nothing between them and are skipped.
    """
    xs = np.asarray(xs, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if len(xs) < 3:
        raise ValueError("need at least 3 samples")
    n = len(xs)
    witness = None
    hyp = True
    for i in range(n):
        for j in range(i + 2, n):
            lam = (xs[j] - xs[i + 1:j]) / (xs[j] - xs[i])
            chord = lam * fs[i] + (1 - lam) * fs[j]
            if not np.any(fs[i + 1:j] <= chord + tol * max(1.0, np.max(np.abs(chord)))):
                hyp = False
                witness = (float(xs[i]), float(xs[j]))
                break
        if not hyp:
            break
    cert = convexity_certificate(SampledFunction(xs, fs))
    return MidpointResult(hyp, bool(cert), witness if not hyp else cert.violation)


def log_mp_profile(a, s_values, budget: int = 8, rng=None) -> np.ndarray:
    """``log M_{1/s}`` at each ``s`` in [0, 1] (``s = 0`` meaning ``p = inf``)."""
    out = []
    for s in s_values:
        p = np.inf if s == 0 else 1.0 / s
        out.append(np.log(mp_norm(a, p, budget, rng).value))
    return np.array(out)


# ---------------------------------------------------------------- step-function operators

def expectation_matrix(m: int, k: int) -> np.ndarray:
    """Matrix of ``E_k`` acting on resolution-``m`` value vectors."""
    n = 2**m
    k = min(k, m)
    block = 2 ** (m - k)
    mat = np.zeros((n, n))
    for start in range(0, n, block):
        mat[start:start + block, start:start + block] = 1.0 / block
    return mat


def haar_mask_matrix(m: int, keep) -> np.ndarray:
    """Matrix of 'drop the Haar coefficients where ``keep`` is False'.

    ``keep`` has ``2**m`` booleans ordered as ``c0`` followed by generations ``0..m-1``.
    """
    keep = np.asarray(keep, dtype=bool)
    n = 2**m
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        h = haar_analyze(DyadicStepFn(m, e))
        flat = np.concatenate([[h.c0]] + h.levels) * keep
        levels, pos = [], 1
        for g in range(m):
            levels.append(flat[pos:pos + 2**g])
            pos += 2**g
        cols.append(haar_synthesize(HaarExpansion(m, flat[0], levels)).values)
    return np.array(cols).T


def stepfn_operator_interp(T, p: float, q: float, t: float, trials: int = 100,
                           rng: np.random.Generator | None = None) -> dict:
    """Interpolation for an operator on resolution-``m`` step functions.

    The normalisation ``2^{-m}`` in the integral cancels in ``|Tf|_p / |f|_p``, so the
    ``L^p`` operator norm equals the ``l^p`` matrix norm.  Reports the largest observed
    ``|Tf|_r / |f|_r`` against ``N_p^t N_q^{1-t}`` over ``trials`` random ``f``.
    """
    T = np.asarray(T)
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] & (T.shape[0] - 1):
        raise ValueError("operator must be a square matrix of size 2^m")
    rng = np.random.default_rng(0) if rng is None else rng
    n_p = operator_norm(T, p, p)
    n_q = operator_norm(T, q, q)
    r = interpolated_exponent(p, q, t)
    bound = n_p.value**t * n_q.value ** (1 - t)
    worst = 0.0
    for _ in range(trials):
        f = rng.standard_normal(T.shape[0]) * rng.exponential(1.0, T.shape[0])
        nf = vector_pnorm(f, r)
        if nf > 0:
            worst = max(worst, vector_pnorm(T @ f, r) / nf)
    return {"r": r, "N_p": n_p.value, "N_q": n_q.value, "exact": n_p.exact and n_q.exact,
            "worst_ratio": worst, "bound": bound}


# ---------------------------------------------------------------- linearization

def linearize_maximal(f: DyadicStepFn) -> tuple[np.ndarray, DyadicStepFn]:
    """Selector ``alpha`` (smallest level attaining ``M(f)`` at each cell) and ``E_alpha f``."""
    avgs = level_averages(f)
    stack = np.array([np.repeat(a, 2 ** (f.m - k)) for k, a in enumerate(avgs)])
    mags = np.abs(stack)
    alpha = np.argmax(mags, axis=0)
    recon = stack[alpha, np.arange(2**f.m)]
    return alpha, DyadicStepFn(f.m, recon)


def linearize_square(f: DyadicStepFn) -> tuple[np.ndarray, DyadicStepFn]:
    """Unit ``l^2`` coefficients ``c_j(x)`` with ``sum_j c_j(x) d_j(x) = S(f)(x)``."""
    d = np.array(martingale_differences(f))
    s = square(f).values
    safe = np.where(s > 0, s, 1.0)
    c = np.where(s > 0, np.conj(d) / safe, 0.0)
    c[0] = np.where(s > 0, c[0], 1.0)
    return c, DyadicStepFn(f.m, np.real_if_close(np.sum(c * d, axis=0)))
