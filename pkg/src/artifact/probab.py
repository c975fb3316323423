"""Rademacher functions, Khintchine inequalities, lacunary fourth moments, convolution
operators on finite commutative groups, and moments of linear functions."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from math import gamma, pi, sqrt

import numpy as np

from .dyadic import DyadicStepFn, lp_norm

__all__ = [
    "FiniteAbelianGroup",
    "GroupFunction",
    "rademacher",
    "rademacher_product_integral",
    "rademacher_sum",
    "khintchine_report",
    "khintchine_fourth_moment",
    "khintchine_constant",
    "lacunary_fourth",
    "lacunary_quadrature",
    "group_convolution",
    "characters",
    "convolution_norm2",
    "walsh_pullback",
    "linear_moment_constants",
    "gaussian_moment",
]


def rademacher(j: int, m: int | None = None) -> DyadicStepFn:
    """``r_j = (-1)^i`` on ``[i 2^-j, (i+1) 2^-j)``, stored at resolution ``m >= j``."""
    m = j if m is None else m
    if j < 1:
        raise ValueError("Rademacher index starts at 1")
    if m < j:
        raise ValueError(f"resolution {m} too coarse for r_{j}")
    idx = np.arange(2**m) >> (m - j)
    return DyadicStepFn(m, np.where(idx % 2 == 0, 1.0, -1.0))


def rademacher_product_integral(indices) -> int:
    """``int prod r_{j}`` over a multiset of indices: 1 iff every index occurs evenly often."""
    return int(all(c % 2 == 0 for c in Counter(indices).values()))


def rademacher_sum(alpha, m: int | None = None) -> DyadicStepFn:
    alpha = np.asarray(alpha)
    n = len(alpha)
    m = max(n, 1) if m is None else m
    vals = np.zeros(2**m, dtype=alpha.dtype if np.iscomplexobj(alpha) else float)
    for j, a in enumerate(alpha, start=1):
        vals = vals + a * rademacher(j, m).values
    return DyadicStepFn(m, vals)


def khintchine_fourth_moment(alpha) -> float:
    """``int (sum a_j r_j)^4 = 3 (sum a_j^2)^2 - 2 sum a_j^4`` for real coefficients.

    Only index quadruples pairing up survive; ``(i,i,k,k)`` patterns with ``i != k`` occur
    in 3 orders and ``(i,i,i,i)`` once.
    """
    a = np.asarray(alpha, dtype=float)
    s2 = float(np.sum(a**2))
    return 3 * s2**2 - 2 * float(np.sum(a**4))


def khintchine_report(alpha, p: float) -> dict:
    """Exact ``p``-norm of ``sum a_j r_j`` by quadrature over its ``2^n`` constant pieces."""
    if not p > 0:
        raise ValueError("p must be positive")
    alpha = np.asarray(alpha, dtype=float)
    f = rademacher_sum(alpha)
    norm_p = lp_norm(f, p)
    l2 = float(np.sqrt(np.sum(alpha**2)))
    out = {"norm_p": norm_p, "l2": l2, "ratio": norm_p / l2 if l2 else float("nan")}
    if p == 4:
        out["fourth_moment"] = float(np.mean(f.values**4))
        out["pairing_formula"] = khintchine_fourth_moment(alpha)
    return out


def khintchine_constant(p: float) -> float:
    """Sandwich constant ``C(p)`` with ``C(p)^{-1} <= |sum a r|_p / |a|_2 <= C(p)``.

    ``C(4) = 3^{1/4}`` from the fourth moment.  For ``p < 2`` Hölder with
    ``1/2 = a/p + (1-a)/4`` gives ``C(p) = C(4)^{(1-a)/a}``; at ``p = 1`` that is
    ``a = 1/3`` and ``C(1) = 3^{1/2}``.  For ``2 <= p <= 4`` the bound is ``C(4)``.
    """
    c4 = 3 ** 0.25
    if p == 2:
        return 1.0
    if 2 < p <= 4:
        return c4
    if 0 < p < 2:
        a = (1 / 2 - 1 / 4) / (1 / p - 1 / 4)
        return c4 ** ((1 - a) / a)
    raise ValueError("constant implemented for 0 < p <= 4")


def lacunary_fourth(c) -> tuple[float, float]:
    """``(int |sum_j c_j e^{2 pi i 2^j x}|^4, 2 (sum |c_j|^2)^2)``.

    The integral is ``sum c_{j1} c_{j2} conj(c_{j3} c_{j4})`` over quadruples with
    ``2^{j1} + 2^{j2} = 2^{j3} + 2^{j4}``, enumerated directly.
    """
    c = np.asarray(c, dtype=complex)
    n = len(c)
    total = 0j
    for j1, j2, j3, j4 in itertools.product(range(n), repeat=4):
        if 2**j1 + 2**j2 == 2**j3 + 2**j4:
            total += c[j1] * c[j2] * np.conj(c[j3]) * np.conj(c[j4])
    return float(total.real), 2 * float(np.sum(np.abs(c) ** 2)) ** 2


def lacunary_quadrature(c, points: int | None = None) -> float:
    """Riemann sum of ``|phi|^4`` on an equispaced grid; exact once the grid resolves the
    highest frequency of ``|phi|^4`` (trigonometric polynomial)."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    points = 8 * 2 ** max(n, 1) if points is None else points
    x = np.arange(points) / points
    phi = sum(cj * np.exp(2j * pi * 2**j * x) for j, cj in enumerate(c))
    return float(np.mean(np.abs(phi) ** 4))


# ---------------------------------------------------------------- groups

@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``cyclic(n)`` (integers mod n) or ``signs(l)`` (l-tuples of +-1 under coordinatewise product).

    Elements are indexed ``0..order-1``; for ``signs(l)`` bit ``i`` of the index set means
    coordinate ``i`` is -1.
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("cyclic", "signs"):
            raise ValueError("kind must be 'cyclic' or 'signs'")
        if self.size < 1 if self.kind == "cyclic" else self.size < 0:
            raise ValueError("invalid group size")

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls("cyclic", n)

    @classmethod
    def signs(cls, l: int) -> "FiniteAbelianGroup":
        return cls("signs", l)

    @property
    def order(self) -> int:
        return self.size if self.kind == "cyclic" else 2**self.size

    @property
    def identity(self) -> int:
        return 0

    def mul(self, g: int, h: int) -> int:
        return (g + h) % self.size if self.kind == "cyclic" else g ^ h

    def inv(self, g: int) -> int:
        return (-g) % self.size if self.kind == "cyclic" else g

    def table(self) -> np.ndarray:
        n = self.order
        return np.array([[self.mul(g, h) for h in range(n)] for g in range(n)])

    def element(self, g: int):
        if self.kind == "cyclic":
            return g
        return tuple(-1 if (g >> i) & 1 else 1 for i in range(self.size))


@dataclass(frozen=True)
class GroupFunction:
    group: FiniteAbelianGroup
    values: np.ndarray

    def __init__(self, group: FiniteAbelianGroup, values):
        v = np.asarray(values, dtype=complex)
        if v.shape != (group.order,):
            raise ValueError(f"expected {group.order} values")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "values", v)


def group_convolution(group: FiniteAbelianGroup, a, side: str = "left") -> np.ndarray:
    """Matrix of ``f -> sum_h a(h) f(h^{-1} g)`` (``left``) or ``f -> sum_h a(h) f(g h)`` (``right``)."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    a = np.asarray(a, dtype=complex)
    n = group.order
    if a.shape != (n,):
        raise ValueError(f"kernel must have {n} entries")
    mat = np.zeros((n, n), dtype=complex)
    for g in range(n):
        for h in range(n):
            src = group.mul(group.inv(h), g) if side == "left" else group.mul(g, h)
            mat[g, src] += a[h]
    return mat


def characters(group: FiniteAbelianGroup) -> list[GroupFunction]:
    """All characters: ``j -> alpha^j`` for the n-th roots of unity ``alpha`` (cyclic), or the
    Walsh products ``W_I = prod_{i in I} rho_i`` of coordinate functions (signs)."""
    n = group.order
    out = []
    if group.kind == "cyclic":
        for a in range(n):
            alpha = np.exp(2j * pi * a / n)
            out.append(GroupFunction(group, alpha ** np.arange(n)))
    else:
        for mask in range(n):
            vals = [(-1) ** bin(mask & g).count("1") for g in range(n)]
            out.append(GroupFunction(group, vals))
    return out


def convolution_norm2(group: FiniteAbelianGroup, a) -> float:
    """``max_chi |sum_h a(h) chi(h^{-1})|``, the l2 operator norm of left convolution by ``a``."""
    a = np.asarray(a, dtype=complex)
    inv = [group.inv(h) for h in range(group.order)]
    return float(max(abs(np.sum(a * chi.values[inv])) for chi in characters(group)))


def walsh_pullback(l: int, mask: int) -> DyadicStepFn:
    """``W_I`` composed with the binary-digit map ``[0,1) -> signs(l)`` at resolution ``l``.

    Point ``x`` in cell ``c`` has binary digits ``d_1 d_2 ... d_l``; coordinate ``i`` of its
    image is ``(-1)^{d_{i+1}}``.
    """
    vals = []
    for cell in range(2**l):
        digits = [(cell >> (l - 1 - i)) & 1 for i in range(l)]
        g = sum(d << i for i, d in enumerate(digits))
        vals.append((-1) ** bin(mask & g).count("1"))
    return DyadicStepFn(l, np.array(vals, dtype=float))


# ---------------------------------------------------------------- linear functions

def gaussian_moment(p: float) -> float:
    """``(1/sqrt(pi)) int |z|^p e^{-z^2} dz = Gamma((p+1)/2) / Gamma(1/2)``."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    return gamma((p + 1) / 2) / sqrt(pi)


def linear_moment_constants(n: int, p: float, samples: int = 10**6,
                            rng: np.random.Generator | None = None) -> dict:
    """Average of ``|x_1|^p`` over the unit sphere in ``R^n`` (Monte Carlo with standard
    error, exact for ``n = 1``) and the Gaussian moment; also the same average for
    ``<x, u>`` with a random unit ``u`` (rotation invariance check)."""
    if n < 1 or p < 0:
        raise ValueError("need n >= 1 and p >= 0")
    rng = np.random.default_rng(0) if rng is None else rng
    out = {"gaussian": gaussian_moment(p)}
    if n == 1:
        out.update(sphere=1.0, sphere_se=0.0, rotated=1.0, rotated_se=0.0)
        return out
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    chunk = 100_000
    acc, acc2, racc, racc2, seen = 0.0, 0.0, 0.0, 0.0, 0
    while seen < samples:
        k = min(chunk, samples - seen)
        x = rng.standard_normal((k, n))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        v = np.abs(x[:, 0]) ** p
        w = np.abs(x @ u) ** p
        acc += v.sum()
        acc2 += (v**2).sum()
        racc += w.sum()
        racc2 += (w**2).sum()
        seen += k
    mean, rmean = acc / seen, racc / seen
    out.update(
        sphere=mean, sphere_se=sqrt(max(acc2 / seen - mean**2, 0.0) / seen),
        rotated=rmean, rotated_se=sqrt(max(racc2 / seen - rmean**2, 0.0) / seen),
    )
    return out
