"""Cantor sets K(r), the address-preserving maps between them, and empirical
quasisymmetry moduli."""

from __future__ import annotations

from dataclasses import dataclass
from math import log, log2

import numpy as np

__all__ = [
    "CantorSystem",
    "PointAddress",
    "ModulusTable",
    "cantor_level",
    "point_of_address",
    "endpoints",
    "h_map",
    "h_map_endpoints",
    "TwoFifths",
    "two_fifths_map",
    "eta_empirical",
    "eta_inverse",
    "measure_step_constants",
    "power_envelope",
    "envelope",
    "envelope_dominates",
    "envelope_dominates_samples",
    "radial_map",
    "spiral_map",
    "MAX_DEPTH",
]

MAX_DEPTH = 24
BUCKETS_PER_DECADE = 4


def _check_ratio(r: float) -> None:
    if not 0 < r < 1:
        raise ValueError("ratio r must lie in (0, 1)")


def cantor_level(r: float, j: int) -> np.ndarray:
    """The ``2^j`` closed intervals of generation ``j`` as a ``(2^j, 2)`` array, left to right.

    Each interval ``[a, b]`` of length ``L`` has children ``[a, a + L(1-r)/2]`` and
    ``[b - L(1-r)/2, b]``.
    """
    _check_ratio(r)
    if j < 0:
        raise ValueError("generation must be nonnegative")
    cur = np.array([[0.0, 1.0]])
    for _ in range(j):
        a, b = cur[:, 0], cur[:, 1]
        c = (b - a) * (1 - r) / 2
        nxt = np.empty((2 * len(cur), 2))
        nxt[0::2, 0], nxt[0::2, 1] = a, a + c
        nxt[1::2, 0], nxt[1::2, 1] = b - c, b
        cur = nxt
    return cur


@dataclass(frozen=True)
class PointAddress:
    """A finite left(0)/right(1) descent through the Cantor construction."""

    bits: str

    def __post_init__(self):
        if any(c not in "01" for c in self.bits):
            raise ValueError("address must be a 0/1 string")
        if len(self.bits) > MAX_DEPTH:
            raise ValueError(f"address longer than {MAX_DEPTH}")


@dataclass
class CantorSystem:
    r: float
    depth: int

    def __post_init__(self):
        _check_ratio(self.r)
        if not 0 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must lie in [0, {MAX_DEPTH}]")

    def level(self, j: int) -> np.ndarray:
        if j > self.depth:
            raise ValueError("level beyond depth")
        return cantor_level(self.r, j)

    @property
    def intervals(self) -> list[np.ndarray]:
        return [cantor_level(self.r, j) for j in range(self.depth + 1)]


def _addressed_interval(r: float, bits: str) -> tuple[float, float]:
    a, length = 0.0, 1.0
    for b in bits:
        child = length * (1 - r) / 2
        if b == "1":
            a += length - child
        length = child
    return a, a + length


def point_of_address(system: CantorSystem | float, address: PointAddress | str, end: str = "left") -> float:
    """Left (or right) endpoint of the interval reached by following ``address``."""
    r = system.r if isinstance(system, CantorSystem) else float(system)
    _check_ratio(r)
    bits = address.bits if isinstance(address, PointAddress) else PointAddress(address).bits
    if isinstance(system, CantorSystem) and len(bits) > system.depth:
        raise ValueError("address longer than the system depth")
    lo, hi = _addressed_interval(r, bits)
    if end not in ("left", "right"):
        raise ValueError("end must be 'left' or 'right'")
    return lo if end == "left" else hi


def endpoints(r: float, depth: int) -> np.ndarray:
    """All interval endpoints at ``depth``, sorted (``2^{depth+1}`` points)."""
    return cantor_level(r, depth).ravel()


def h_map(r_src: float, r_dst: float, address: str, end: str = "left") -> tuple[float, float]:
    """The point of ``K(r_src)`` with the given address end and its image in ``K(r_dst)``."""
    return point_of_address(r_src, address, end), point_of_address(r_dst, address, end)


def h_map_endpoints(r_src: float, r_dst: float, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Source and image of every depth-``depth`` endpoint, in left-to-right source order."""
    return endpoints(r_src, depth), endpoints(r_dst, depth)


# ---------------------------------------------------------------- two-fifths construction

_HAT_CHILDREN = ((0.0, 1 / 3), (2 / 3, 7 / 9), (8 / 9, 1.0))
_FIFTH_CHILDREN = ((0.0, 0.2), (0.4, 0.6), (0.8, 1.0))


def _three_split(level: np.ndarray, pattern) -> np.ndarray:
    a, b = level[:, 0], level[:, 1]
    length = b - a
    out = np.empty((3 * len(level), 2))
    for i, (lo, hi) in enumerate(pattern):
        out[i::3, 0] = a + lo * length
        out[i::3, 1] = a + hi * length
    out[2::3, 1] = b
    return out


@dataclass
class TwoFifths:
    hat: np.ndarray
    fifths: np.ndarray
    sandwich: bool
    source: np.ndarray
    target: np.ndarray


def _contained(inner: np.ndarray, outer: np.ndarray, tol: float = 1e-12) -> bool:
    """Every interval of ``inner`` lies inside some interval of ``outer``."""
    idx = np.searchsorted(outer[:, 0], inner[:, 0] + tol, side="right") - 1
    if np.any(idx < 0):
        return False
    return bool(np.all(inner[:, 1] <= outer[idx, 1] + tol) and np.all(inner[:, 0] >= outer[idx, 0] - tol))


def two_fifths_map(l: int) -> TwoFifths:
    """Generation ``l`` of the merged middle-thirds construction (three children
    ``[0,1/3], [2/3,7/9], [8/9,1]`` per step) and of the construction removing
    ``(1/5,2/5)`` and ``(3/5,4/5)``, with the endpoint correspondence between them."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    hat = np.array([[0.0, 1.0]])
    fifths = np.array([[0.0, 1.0]])
    for _ in range(l):
        hat = _three_split(hat, _HAT_CHILDREN)
        fifths = _three_split(fifths, _FIFTH_CHILDREN)
    sandwich = _contained(cantor_level(1 / 3, 2 * l), hat) and _contained(hat, cantor_level(1 / 3, l))
    return TwoFifths(hat, fifths, sandwich, hat.ravel(), fifths.ravel())


# ---------------------------------------------------------------- moduli

@dataclass
class ModulusTable:
    """Per-bucket statistics of distance ratios.

    Bucket ``i`` covers ``t`` in ``[t_lo[i], t_hi[i])``.  ``eta`` is the largest image ratio
    seen in the bucket, ``eta_hat`` its regularisation ``inf_{s >= t} eta(s)`` and
    ``eta_upper`` the running maximum (an upper envelope of every observed ratio with
    smaller ``t``).
    """

    t_lo: np.ndarray
    t_hi: np.ndarray
    eta: np.ndarray
    eta_hat: np.ndarray
    eta_upper: np.ndarray
    counts: np.ndarray
    sample_t: np.ndarray | None = None
    sample_ratio: np.ndarray | None = None

    def bucket_of(self, t: float) -> int:
        return int(np.searchsorted(self.t_hi, t, side="right"))

    def upper_at(self, t: float) -> float:
        """Running-max envelope at ``t`` (inf beyond the sampled range)."""
        i = self.bucket_of(t)
        if i >= len(self.t_hi):
            return float("inf")
        return float(self.eta_upper[i]) if t >= self.t_lo[0] else float(self.eta_upper[0])

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.t_hi.tolist(), self.eta_hat.tolist()))


def _distances(pts: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    d = pts[i] - pts[j]
    return np.abs(d) if d.ndim == 1 else np.linalg.norm(d, axis=1)


def eta_empirical(source, target, triple_samples: int = 200_000,
                  rng: np.random.Generator | None = None, exhaustive: bool = False) -> ModulusTable:
    """Empirical distortion modulus of the map ``source[i] -> target[i]``.

    For triples ``(x, y, z)`` it buckets ``t = |y-x| / |z-x|`` into quarter-decade bins and
    records the largest ``|f(y)-f(x)| / |f(z)-f(x)|`` per bin.
    """
    src = np.asarray(source, dtype=float)
    tgt = np.asarray(target, dtype=float)
    if len(src) != len(tgt):
        raise ValueError("source and target must have equal length")
    if len(src) < 3:
        raise ValueError("need at least 3 points")
    flat = src if src.ndim == 1 else src.reshape(len(src), -1)
    if len(np.unique(flat, axis=0)) != len(src):
        raise ValueError("repeated source points")
    n = len(src)
    rng = np.random.default_rng(0) if rng is None else rng
    if exhaustive:
        xi, yi, zi = np.array([(x, y, z) for x in range(n) for y in range(n) for z in range(n)
                               if x != y and x != z and y != z]).T
    else:
        xi = rng.integers(0, n, triple_samples)
        yi = rng.integers(0, n, triple_samples)
        zi = rng.integers(0, n, triple_samples)
        keep = (xi != yi) & (xi != zi) & (yi != zi)
        xi, yi, zi = xi[keep], yi[keep], zi[keep]
    t = _distances(src, yi, xi) / _distances(src, zi, xi)
    den = _distances(tgt, zi, xi)
    if np.any(den == 0):
        raise ValueError("map is not injective on the samples")
    ratio = _distances(tgt, yi, xi) / den
    b = np.floor(np.log10(t) * BUCKETS_PER_DECADE + 1e-12).astype(int)
    lo_b, hi_b = int(b.min()), int(b.max())
    nb = hi_b - lo_b + 1
    eta = np.full(nb, -np.inf)
    np.maximum.at(eta, b - lo_b, ratio)
    counts = np.bincount(b - lo_b, minlength=nb)
    present = counts > 0
    edges = 10.0 ** (np.arange(lo_b, hi_b + 2) / BUCKETS_PER_DECADE)
    t_lo, t_hi = edges[:-1][present], edges[1:][present]
    eta = eta[present]
    eta_hat = np.minimum.accumulate(eta[::-1])[::-1]
    eta_upper = np.maximum.accumulate(eta)
    order = np.argsort(t, kind="stable")
    return ModulusTable(t_lo, t_hi, eta, eta_hat, eta_upper, counts[present], t[order], ratio[order])


def eta_inverse(t, eta, eps: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Modulus ``alpha(s) = 1 / eta^{-1}(1/s)`` of the inverse map, tabulated.

    ``eta`` is bumped to ``eta + eps t`` first, which must make it strictly increasing.
    At ``s = 1/eta(t_i)`` the inverse is exact: ``alpha(s) = 1/t_i``.
    """
    t = np.asarray(t, dtype=float)
    theta = np.asarray(eta, dtype=float) + eps * t
    if np.any(np.diff(theta) <= 0) or np.any(theta <= 0) or np.any(t <= 0):
        raise ValueError("table must be positive and strictly increasing")
    s = 1.0 / theta[::-1]
    alpha = 1.0 / t[::-1]
    return s, alpha


def measure_step_constants(table: ModulusTable) -> tuple[float, float]:
    """``(t1, L)`` read off the sampled triples: ``t1`` is the largest sampled ``t`` such that
    every triple with a smaller or equal ``t`` has image ratio at most 1/2, and ``L`` is the
    largest image ratio among triples with ``t <= 2`` (at least 1)."""
    if table.sample_t is None:
        raise ValueError("table carries no raw samples")
    t, ratio = table.sample_t, table.sample_ratio
    run = np.maximum.accumulate(ratio)
    ok = np.flatnonzero(run <= 0.5)
    if len(ok) == 0:
        raise ValueError("smallest sampled triple already exceeds 1/2")
    t1 = float(min(t[ok[-1]], 1.0))
    if t[-1] < 2.0:
        raise ValueError("samples do not reach t = 2")
    L = float(max(1.0, ratio[t <= 2.0].max()))
    return t1, L


def power_envelope(t1: float, L: float) -> tuple[float, float, float]:
    """``(C, a1, a2)`` with ``C = max(2, L)``, ``a1 = ln 2 / ln(1/t1)``, ``a2 = log2 L``."""
    if not 0 < t1 <= 1:
        raise ValueError("t1 must lie in (0, 1]")
    if L < 1:
        raise ValueError("L must be at least 1")
    a1 = log(2) / log(1 / t1) if t1 < 1 else float("inf")
    return float(max(2.0, L)), a1, log2(L)


def envelope(t, C: float, a1: float, a2: float) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.where(t <= 1, C * t**a1, C * t**a2)


def envelope_dominates(table: ModulusTable, C: float, a1: float, a2: float,
                       which: str = "eta_hat", at: str = "key") -> tuple[bool, float]:
    """Whether ``C t^a`` bounds the table, and the worst ratio value/envelope.

    ``at="key"`` evaluates the envelope at each row's key ``t_hi`` (every triple of the row
    has ``t < t_hi``); ``at="lower"`` uses ``t_lo``, which also bounds the row's values by
    the envelope at every ``t`` inside the bucket.
    """
    if at not in ("key", "lower"):
        raise ValueError("at must be 'key' or 'lower'")
    vals = getattr(table, which)
    env = envelope(table.t_hi if at == "key" else table.t_lo, C, a1, a2)
    worst = float(np.max(vals / env))
    return worst <= 1.0, worst


def envelope_dominates_samples(table: ModulusTable, C: float, a1: float, a2: float) -> tuple[bool, float]:
    """Pointwise version on the raw triples: ratio <= C t^a at the triple's own ``t``."""
    if table.sample_t is None:
        raise ValueError("table carries no raw samples")
    worst = float(np.max(table.sample_ratio / envelope(table.sample_t, C, a1, a2)))
    return worst <= 1.0, worst


# ---------------------------------------------------------------- maps of R^n

def radial_map(b: float, x) -> np.ndarray:
    """``x -> |x|^{b-1} x`` (0 fixed); ``x`` may be one vector or an array of them."""
    if b <= 0:
        raise ValueError("b must be positive")
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x, axis=-1, keepdims=True) if x.ndim else np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norm > 0, norm ** (b - 1), 0.0)
    return scale * x


def spiral_map(c: float, x) -> np.ndarray:
    """Rotation of ``x`` in the plane by angle ``c log|x|`` (0 fixed)."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    ang = np.where(r > 0, c * np.log(np.where(r > 0, r, 1.0)), 0.0)
    cs, sn = np.cos(ang), np.sin(ang)
    return np.stack([cs * x[..., 0] - sn * x[..., 1], sn * x[..., 0] + cs * x[..., 1]], axis=-1)
