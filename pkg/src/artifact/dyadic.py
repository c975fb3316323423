"""Dyadic intervals, dyadic step functions, conditional expectations and the Haar system.

A step function of resolution ``m`` is stored as the ``2**m`` values it takes on the
intervals ``[i 2^-m, (i+1) 2^-m)``.  Every operation here is exact up to floating point
rounding because integrals over dyadic pieces are finite sums of the stored values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "DyadicInterval",
    "DyadicStepFn",
    "HaarExpansion",
    "EmptySelectionError",
    "ResolutionError",
    "dyadic_partition",
    "all_intervals",
    "maximal_disjoint",
    "expectation",
    "level_averages",
    "haar",
    "haar_analyze",
    "haar_synthesize",
    "lp_norm",
    "indicator",
    "constant",
    "random_step",
]


class EmptySelectionError(ValueError):
    """Raised when a maximal subfamily is requested from an empty collection."""


class ResolutionError(ValueError):
    """Raised when a resolution is too coarse to represent the requested object."""


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """The half-open interval ``[j 2^-k, (j+1) 2^-k)``."""

    k: int
    j: int

    def __post_init__(self) -> None:
        if self.k < 0 or self.j < 0:
            raise ValueError(f"generation and index must be nonnegative, got ({self.k}, {self.j})")
        if self.j >= 2**self.k:
            raise ValueError(f"index {self.j} out of range for generation {self.k}")

    @property
    def length(self) -> float:
        return 2.0 ** (-self.k)

    @property
    def left(self) -> float:
        return self.j * 2.0 ** (-self.k)

    @property
    def right(self) -> float:
        return (self.j + 1) * 2.0 ** (-self.k)

    def parent(self) -> "DyadicInterval":
        if self.k == 0:
            raise ValueError("[0,1) has no parent")
        return DyadicInterval(self.k - 1, self.j // 2)

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return DyadicInterval(self.k + 1, 2 * self.j), DyadicInterval(self.k + 1, 2 * self.j + 1)

    def ancestors(self) -> list["DyadicInterval"]:
        """All dyadic intervals containing this one, itself included, from [0,1) down."""
        return [DyadicInterval(g, self.j >> (self.k - g)) for g in range(self.k + 1)]

    def contains(self, other: "DyadicInterval") -> bool:
        return other.k >= self.k and (other.j >> (other.k - self.k)) == self.j

    def disjoint(self, other: "DyadicInterval") -> bool:
        return not (self.contains(other) or other.contains(self))

    def cells(self, m: int) -> slice:
        """Slice of the resolution-``m`` value array covered by this interval."""
        if m < self.k:
            raise ResolutionError(f"resolution {m} is coarser than generation {self.k}")
        width = 2 ** (m - self.k)
        return slice(self.j * width, (self.j + 1) * width)

    def as_pair(self) -> list[int]:
        return [self.k, self.j]


def dyadic_partition(k: int) -> list[DyadicInterval]:
    """The ``2**k`` intervals of generation ``k``, left to right."""
    if k < 0:
        raise ValueError("generation must be nonnegative")
    return [DyadicInterval(k, j) for j in range(2**k)]


def all_intervals(max_k: int) -> list[DyadicInterval]:
    """Every dyadic interval of generation ``0..max_k``."""
    return [I for k in range(max_k + 1) for I in dyadic_partition(k)]


def maximal_disjoint(collection: Iterable[DyadicInterval]) -> list[DyadicInterval]:
    """Inclusion-maximal members of a collection of dyadic intervals.

    Since two dyadic intervals are nested or disjoint, the maximal members are pairwise
    disjoint and have the same union as the whole collection.
    """
    members = set(collection)
    if not members:
        raise EmptySelectionError("cannot select maximal intervals from an empty collection")
    keep = []
    for I in members:
        if not any(A in members for A in I.ancestors()[:-1]):
            keep.append(I)
    return sorted(keep, key=lambda I: (I.left, I.k))


class DyadicStepFn:
    """A function on [0,1) constant on each generation-``m`` dyadic interval."""

    __slots__ = ("m", "values")

    def __init__(self, m: int, values: Sequence | np.ndarray):
        if m < 0:
            raise ValueError("resolution must be nonnegative")
        arr = np.array(values)
        if arr.dtype.kind not in "fc":
            arr = arr.astype(float)
        if arr.ndim != 1 or arr.shape[0] != 2**m:
            raise ValueError(f"expected {2**m} values for resolution {m}, got shape {arr.shape}")
        if arr.dtype.kind == "c" and np.all(arr.imag == 0):
            arr = arr.real.copy()
        arr.setflags(write=False)
        self.m = int(m)
        self.values = arr

    def __repr__(self) -> str:
        return f"DyadicStepFn(m={self.m}, values={self.values.tolist()!r})"

    @property
    def is_complex(self) -> bool:
        return self.values.dtype.kind == "c"

    def integral(self) -> complex | float:
        return self.values.sum() * 2.0 ** (-self.m)

    def average_on(self, I: DyadicInterval) -> complex | float:
        if I.k > self.m:
            return self.values[I.j >> (I.k - self.m)]
        return self.values[I.cells(self.m)].mean()

    def integral_on(self, I: DyadicInterval) -> complex | float:
        return self.average_on(I) * I.length

    def value_at(self, x: float) -> complex | float:
        if not 0.0 <= x < 1.0:
            raise ValueError("point outside [0,1)")
        return self.values[int(np.floor(x * 2**self.m))]

    def refine(self, m: int) -> "DyadicStepFn":
        if m < self.m:
            raise ResolutionError("refine target must not be coarser")
        return DyadicStepFn(m, np.repeat(self.values, 2 ** (m - self.m)))

    def coarsen(self, m: int) -> "DyadicStepFn":
        """Averages onto resolution ``m``; inverse of :meth:`refine` on refined inputs."""
        if m > self.m:
            raise ResolutionError("coarsen target must not be finer")
        return DyadicStepFn(m, self.values.reshape(2**m, -1).mean(axis=1))

    def _lift(self, other: "DyadicStepFn | complex | float") -> tuple[np.ndarray, np.ndarray, int]:
        if isinstance(other, DyadicStepFn):
            m = max(self.m, other.m)
            return self.refine(m).values, other.refine(m).values, m
        return self.values, np.asarray(other), self.m

    def __add__(self, other):
        a, b, m = self._lift(other)
        return DyadicStepFn(m, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, m = self._lift(other)
        return DyadicStepFn(m, a - b)

    def __rsub__(self, other):
        a, b, m = self._lift(other)
        return DyadicStepFn(m, b - a)

    def __mul__(self, other):
        a, b, m = self._lift(other)
        return DyadicStepFn(m, a * b)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return DyadicStepFn(self.m, self.values / scalar)

    def __neg__(self):
        return DyadicStepFn(self.m, -self.values)

    def __abs__(self):
        return DyadicStepFn(self.m, np.abs(self.values))

    def __pow__(self, p):
        return DyadicStepFn(self.m, self.values**p)

    def conj(self) -> "DyadicStepFn":
        return DyadicStepFn(self.m, np.conj(self.values))

    def allclose(self, other: "DyadicStepFn", atol: float = 1e-12) -> bool:
        a, b, _ = self._lift(other)
        return bool(np.allclose(a, b, rtol=0.0, atol=atol))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicStepFn):
            return NotImplemented
        a, b, _ = self._lift(other)
        return bool(np.array_equal(a, b))

    __hash__ = None  # type: ignore[assignment]


def constant(c: complex | float, m: int = 0) -> DyadicStepFn:
    return DyadicStepFn(m, np.full(2**m, c))


def indicator(I: DyadicInterval, m: int | None = None) -> DyadicStepFn:
    m = I.k if m is None else m
    vals = np.zeros(2**m)
    vals[I.cells(m)] = 1.0
    return DyadicStepFn(m, vals)


def random_step(rng: np.random.Generator, m: int, complex_valued: bool = False,
                nonnegative: bool = False) -> DyadicStepFn:
    """A random step function with heavy-ish tails so stopping times are exercised."""
    n = 2**m
    vals = rng.standard_normal(n) * rng.exponential(1.0, n)
    if complex_valued:
        vals = vals + 1j * rng.standard_normal(n) * rng.exponential(1.0, n)
    if nonnegative:
        vals = np.abs(vals)
    return DyadicStepFn(m, vals)


def level_averages(f: DyadicStepFn) -> list[np.ndarray]:
    """``out[k][j]`` is the average of ``f`` over ``DyadicInterval(k, j)`` for ``k = 0..m``."""
    out = [np.asarray(f.values)]
    cur = out[0]
    for _ in range(f.m):
        cur = 0.5 * (cur[0::2] + cur[1::2])
        out.append(cur)
    return out[::-1]


def expectation(f: DyadicStepFn, k: int) -> DyadicStepFn:
    """``E_k f``: the average of ``f`` over the generation-``k`` interval containing each point.

    The result keeps the resolution of ``f`` so it can be compared pointwise.
    """
    if k < 0:
        raise ValueError("generation must be nonnegative")
    if k >= f.m:
        return f
    means = f.values.reshape(2**k, -1).mean(axis=1)
    return DyadicStepFn(f.m, np.repeat(means, 2 ** (f.m - k)))


def haar(which: DyadicInterval | str | None, m: int) -> DyadicStepFn:
    """The Haar function ``h_I`` (or ``h_0`` for ``which`` in {None, "h0"}) at resolution ``m``.

    ``h_I`` is ``-|I|^{-1/2}`` on the left half of ``I`` and ``+|I|^{-1/2}`` on the right half,
    so it has integral 0 and unit L2 norm.
    """
    if which is None or which == "h0":
        return constant(1.0, m)
    if not isinstance(which, DyadicInterval):
        raise TypeError("expected a DyadicInterval or 'h0'")
    if m < which.k + 1:
        raise ResolutionError(f"resolution {m} cannot represent h_I for generation {which.k}")
    vals = np.zeros(2**m)
    cells = which.cells(m)
    half = (cells.stop - cells.start) // 2
    amp = 2.0 ** (which.k / 2)
    vals[cells.start:cells.start + half] = -amp
    vals[cells.start + half:cells.stop] = amp
    return DyadicStepFn(m, vals)


@dataclass
class HaarExpansion:
    """Coefficients of a resolution-``m`` step function in the Haar basis.

    ``levels[k][j]`` is the coefficient of ``h_I`` for ``I = DyadicInterval(k, j)``,
    ``k = 0..m-1``; together with ``c0`` that is ``2**m`` numbers.
    """

    m: int
    c0: complex | float
    levels: list[np.ndarray]

    @property
    def coeffs(self) -> dict[DyadicInterval, complex | float]:
        return {DyadicInterval(k, j): c for k, lev in enumerate(self.levels) for j, c in enumerate(lev)}

    @classmethod
    def from_mapping(cls, m: int, c0, coeffs: Mapping[DyadicInterval, complex | float]) -> "HaarExpansion":
        dtype = complex if any(isinstance(v, complex) for v in coeffs.values()) or isinstance(c0, complex) else float
        levels = [np.zeros(2**k, dtype=dtype) for k in range(m)]
        for I, c in coeffs.items():
            if I.k >= m:
                raise ResolutionError(f"coefficient for generation {I.k} exceeds resolution {m}")
            levels[I.k][I.j] = c
        return cls(m, c0, levels)

    def count(self) -> int:
        return 1 + sum(len(lev) for lev in self.levels)

    def energy(self) -> float:
        return float(abs(self.c0) ** 2 + sum(np.sum(np.abs(lev) ** 2) for lev in self.levels))

    def truncate(self, k: int) -> "HaarExpansion":
        """Keeps ``c0`` and the coefficients of intervals with ``|I| >= 2^{-k+1}``."""
        levels = [lev.copy() if g < k else np.zeros_like(lev) for g, lev in enumerate(self.levels)]
        return HaarExpansion(self.m, self.c0, levels)


def haar_analyze(f: DyadicStepFn) -> HaarExpansion:
    avgs = level_averages(f)
    levels = []
    for k in range(f.m):
        child = avgs[k + 1]
        # <f, h_I> = |I|^{1/2}/2 * (avg over right half - avg over left half)
        levels.append((child[1::2] - child[0::2]) * (2.0 ** (-k / 2) / 2.0))
    return HaarExpansion(f.m, avgs[0][0], levels)


def haar_synthesize(e: HaarExpansion, m: int | None = None) -> DyadicStepFn:
    """Inverse of :func:`haar_analyze`; ``m`` defaults to the expansion's resolution."""
    m = e.m if m is None else m
    if m < e.m and any(np.any(lev != 0) for lev in e.levels[m:]):
        raise ResolutionError("nonzero coefficients finer than the requested resolution")
    cur = np.array([e.c0], dtype=complex if np.iscomplexobj(e.c0) or any(np.iscomplexobj(l) for l in e.levels) else float)
    for k in range(m):
        d = e.levels[k] * 2.0 ** (k / 2) if k < e.m else np.zeros(2**k)
        nxt = np.empty(2 ** (k + 1), dtype=np.result_type(cur, d))
        nxt[0::2] = cur - d
        nxt[1::2] = cur + d
        cur = nxt
    return DyadicStepFn(m, cur)


def lp_norm(f: DyadicStepFn, p: float) -> float:
    """``(int |f|^p)^{1/p}``, or the sup for ``p = inf``; any ``p > 0`` is accepted."""
    if not p > 0:
        raise ValueError("exponent must be positive")
    a = np.abs(f.values)
    top = float(a.max())
    if np.isinf(p) or top == 0:
        return top
    # scale by the sup so large exponents do not overflow
    return top * float(np.mean((a / top) ** p) ** (1.0 / p))
