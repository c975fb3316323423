"""Dyadic maximal and square functions, stopping-time flattenings and the inequalities
connecting them.

Every level set and stopping family is computed exactly by enumerating the dyadic
intervals of generation at most ``f.m``; beyond that resolution all averages repeat.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dyadic import (
    DyadicInterval,
    DyadicStepFn,
    constant,
    expectation,
    level_averages,
    maximal_disjoint,
)

__all__ = [
    "LevelSetReport",
    "Flattening",
    "maximal",
    "maximal_level_set",
    "lp_maximal_report",
    "square",
    "square_partial",
    "martingale_differences",
    "cz_flatten_m",
    "cz_flatten_s",
    "cz_m_checks",
    "cz_s_checks",
    "distribution_integral",
    "p4_decomposition",
    "duality_pairing",
    "interval_prune",
    "max_coverage",
    "weak_type_s_report",
    "s_by_m_constant",
    "m_by_s_constant",
    "f_by_s_constant_q4",
    "P4_CONSTANT",
    "vector_maximal_constant",
    "vector_expectation_report",
]


@dataclass
class LevelSetReport:
    lambda_: float
    intervals: list[DyadicInterval]
    measure: float
    bound: float
    refined_bound: float | None = None

    def to_json(self) -> dict:
        return {"lambda": self.lambda_, "intervals": [I.as_pair() for I in self.intervals],
                "measure": self.measure, "bound": self.bound}


def _levels(f: DyadicStepFn, l: int | None) -> list[np.ndarray]:
    """Averages per generation ``0..min(l, m)``, each expanded to resolution ``m``."""
    avgs = level_averages(f)
    top = f.m if l is None else min(l, f.m)
    return [np.repeat(avgs[k], 2 ** (f.m - k)) for k in range(top + 1)]


def maximal(f: DyadicStepFn, l: int | None = None) -> DyadicStepFn:
    """``M(f) = sup_k |E_k f|`` (or ``M_l``, with ``k <= l``) at the resolution of ``f``."""
    lv = _levels(f, l)
    return DyadicStepFn(f.m, np.max(np.abs(np.array(lv)), axis=0))


def martingale_differences(f: DyadicStepFn, l: int | None = None) -> list[np.ndarray]:
    """``[E_0 f, E_1 f - E_0 f, ..., E_top f - E_{top-1} f]`` as resolution-``m`` arrays."""
    lv = _levels(f, l)
    return [lv[0]] + [lv[k] - lv[k - 1] for k in range(1, len(lv))]


def square(f: DyadicStepFn, l: int | None = None) -> DyadicStepFn:
    d = martingale_differences(f, l)
    return DyadicStepFn(f.m, np.sqrt(sum(np.abs(x) ** 2 for x in d)))


def square_partial(f: DyadicStepFn, l: int) -> DyadicStepFn:
    """``(|E_0 f|^2 + sum_{j=1}^{l} |E_j f - E_{j-1} f|^2)^{1/2}``; same as ``square(f, l)``."""
    return square(f, l)


def _all_averages(f: DyadicStepFn) -> list[tuple[DyadicInterval, complex | float]]:
    avgs = level_averages(f)
    return [(DyadicInterval(k, j), a) for k, lev in enumerate(avgs) for j, a in enumerate(lev)]


def _measure(intervals) -> float:
    return float(sum(I.length for I in intervals))


def _mask(intervals, m: int) -> np.ndarray:
    out = np.zeros(2**m, dtype=bool)
    for I in intervals:
        out[I.cells(m)] = True
    return out


def maximal_level_set(f: DyadicStepFn, lam: float) -> LevelSetReport:
    """``{M(f) > lam}`` as maximal dyadic intervals on which ``|avg f| > lam``.

    ``bound`` is ``(1/lam) int |f|``; ``refined_bound`` restricts the integral to the
    level set.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    big = [I for I, a in _all_averages(f) if abs(a) > lam]
    chosen = maximal_disjoint(big) if big else []
    absf = np.abs(f.values)
    refined = float(absf[_mask(chosen, f.m)].sum() * 2.0 ** (-f.m) / lam)
    return LevelSetReport(lam, chosen, _measure(chosen), float(absf.mean() / lam), refined)


def lp_maximal_report(f: DyadicStepFn, p: float) -> tuple[float, float]:
    """``(int M(f)^p, 2^p p/(p-1) int |f|^p)``."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    mf = maximal(f).values
    return float(np.mean(mf**p)), float(2**p * p / (p - 1) * np.mean(np.abs(f.values) ** p))


# ---------------------------------------------------------------- stopping times

@dataclass
class Flattening:
    """Result of replacing ``f`` by its averages on a disjoint family of dyadic intervals."""

    flattened: DyadicStepFn
    family: list[DyadicInterval]
    selected: list[DyadicInterval] = field(default_factory=list)
    degenerate: bool = False


def _flatten(f: DyadicStepFn, family: list[DyadicInterval]) -> DyadicStepFn:
    vals = np.array(f.values, copy=True)
    for L in family:
        sl = L.cells(f.m)
        vals[sl] = f.values[sl].mean()
    return DyadicStepFn(f.m, vals)


def _parents_then_maximal(selected: list[DyadicInterval]) -> list[DyadicInterval]:
    return maximal_disjoint({I.parent() for I in selected})


def cz_flatten_m(f: DyadicStepFn, lam: float) -> Flattening:
    """Flattening of ``f`` at height ``lam`` driven by large dyadic averages.

    Select the maximal dyadic intervals with ``|avg f| > lam``, pass to their parents,
    keep the maximal parents and replace ``f`` by its average on each of them.
    When nothing is selected ``f`` is returned unchanged.  When ``[0,1)`` itself is
    selected the family is ``{[0,1)}`` and the flattened function is identically 0
    (flagged as ``degenerate``).
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    big = [I for I, a in _all_averages(f) if abs(a) > lam]
    if not big:
        return Flattening(f, [], [])
    top = maximal_disjoint(big)
    if DyadicInterval(0, 0) in top:
        return Flattening(constant(0.0, f.m), [DyadicInterval(0, 0)], top, True)
    family = _parents_then_maximal(top)
    return Flattening(_flatten(f, family), family, top)


def _s_level_set_intervals(f: DyadicStepFn, lam: float) -> list[DyadicInterval]:
    """Maximal dyadic intervals contained in ``{S(f) > lam}``.

    An interval lies inside the set iff all its resolution-``m`` cells do; a cell-level
    bottom-up pass finds the maximal ones.
    """
    inside = square(f).values > lam
    chosen = []
    cur = inside
    full = [cur]
    for _ in range(f.m):
        cur = cur[0::2] & cur[1::2]
        full.append(cur)
    full = full[::-1]  # full[k][j]: DyadicInterval(k, j) is inside the set
    for k, lev in enumerate(full):
        for j in np.flatnonzero(lev):
            if k == 0 or not full[k - 1][j // 2]:
                chosen.append(DyadicInterval(k, int(j)))
    return sorted(chosen, key=lambda I: I.left)


def cz_flatten_s(f: DyadicStepFn, lam: float) -> Flattening:
    """Flattening of ``f`` driven by the level set ``{S(f) > lam}``.

    Empty level set: ``f`` unchanged.  Level set equal to ``[0,1)``: family ``{[0,1)}``
    and the flattened function is identically 0 (``degenerate``).
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    top = _s_level_set_intervals(f, lam)
    if not top:
        return Flattening(f, [], [])
    if top == [DyadicInterval(0, 0)]:
        return Flattening(constant(0.0, f.m), [DyadicInterval(0, 0)], top, True)
    family = _parents_then_maximal(top)
    return Flattening(_flatten(f, family), family, top)


def _complement_intervals_preserved(f: DyadicStepFn, g: DyadicStepFn, family, tol) -> float:
    """Largest average discrepancy over dyadic intervals not contained in a family member."""
    af, ag = level_averages(f), level_averages(g)
    covered = [np.zeros(2**k, dtype=bool) for k in range(f.m + 1)]
    for L in family:
        for k in range(L.k, f.m + 1):
            covered[k][L.cells(k)] = True
    worst = 0.0
    for k in range(f.m + 1):
        free = ~covered[k]
        if free.any():
            worst = max(worst, float(np.max(np.abs(af[k][free] - ag[k][free]))))
    return worst


def cz_m_checks(f: DyadicStepFn, lam: float, flat: Flattening | None = None, tol: float = 1e-10) -> dict:
    """Verifies the properties of :func:`cz_flatten_m`; returns named ``(lhs, rhs)`` pairs
    meant to satisfy ``lhs <= rhs`` (equalities appear as a discrepancy vs. ``tol``)."""
    flat = cz_flatten_m(f, lam) if flat is None else flat
    g = flat.flattened
    mf = maximal(f).values
    off = ~_mask(flat.family, f.m)
    s_diff = np.abs(square(f).values - square(g).values)[off]
    level = maximal_level_set(f, lam)
    return {
        "bounded_by_min_lambda_M": (float(np.max(np.abs(g.values) - np.minimum(lam, mf))), tol),
        "l1_contraction": (float(np.mean(np.abs(g.values))), float(np.mean(np.abs(f.values))) + tol),
        "family_measure": (_measure(flat.family), 2 * level.measure + tol),
        "square_unchanged_off_family": (float(s_diff.max()) if s_diff.size else 0.0, tol),
        "averages_preserved": (
            0.0 if flat.degenerate else _complement_intervals_preserved(f, g, flat.family, tol), tol),
    }


def cz_s_checks(f: DyadicStepFn, lam: float, flat: Flattening | None = None, tol: float = 1e-10) -> dict:
    flat = cz_flatten_s(f, lam) if flat is None else flat
    sf = square(f).values
    sg = square(flat.flattened).values
    level = float(np.mean(sf > lam))
    union_selected = _mask(flat.selected, f.m)
    return {
        "level_set_is_dyadic_union": (float(np.sum(union_selected != (sf > lam))), 0.0),
        "square_bounded_by_min": (float(np.max(sg - np.minimum(lam, sf))), tol),
        "family_measure": (_measure(flat.family), 2 * level + tol),
    }


# ---------------------------------------------------------------- distribution functions

def distribution_integral(g: DyadicStepFn, p: float) -> tuple[float, float]:
    """``(int_0^inf p t^{p-1} |{g > t}| dt, int g^p)``.

    The distribution function is a step function of ``t``; on ``[v_{i-1}, v_i)`` it equals
    the measure of ``{g >= v_i}``, so each piece integrates to
    ``(v_i^p - v_{i-1}^p) |{g >= v_i}|``.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    v = np.asarray(g.values)
    if np.iscomplexobj(v) or np.any(v < 0):
        raise ValueError("distribution integral needs a nonnegative function")
    cell = 2.0 ** (-g.m)
    levels = np.unique(v)
    total, prev = 0.0, 0.0
    for lvl in levels:
        if lvl <= 0:
            continue
        total += (lvl**p - prev**p) * np.count_nonzero(v >= lvl) * cell
        prev = lvl
    return float(total), float(np.mean(v**p))


# ---------------------------------------------------------------- p = 4 and duality

# |d_j| <= 2 M(f) and M(f)^2 <= M(|f|^2) give A <= 4 int S^2 M(|f|^2); B <= int S^2 M(|f|^2)
P4_CONSTANT = 6.0


def _cond_var(f_vals: np.ndarray, m: int, k: int) -> np.ndarray:
    """``E_k(|f - E_k f|^2)`` at resolution ``m``."""
    f = DyadicStepFn(m, f_vals)
    ek = expectation(f, k).values
    return expectation(DyadicStepFn(m, np.abs(f_vals - ek) ** 2), k).values


def p4_decomposition(f: DyadicStepFn) -> dict:
    """``int S^4 = A + 2B`` with

    ``A = int |E_0 f|^4 + sum_j int |d_j|^4`` and
    ``B = int |E_0 f|^2 E_0(|f - E_0 f|^2) + sum_j int |d_j|^2 E_j(|f - E_j f|^2)``,
    where ``d_j = E_j f - E_{j-1} f``.  Also reports both sides of
    ``int S^4 <= C int S^2 M(|f|^2)``.
    """
    d = martingale_differences(f)
    s2 = sum(np.abs(x) ** 2 for x in d)
    s4 = float(np.mean(s2**2))
    a = float(sum(np.mean(np.abs(x) ** 4) for x in d))
    b = float(sum(np.mean(np.abs(x) ** 2 * _cond_var(f.values, f.m, k)) for k, x in enumerate(d)))
    m_sq = maximal(DyadicStepFn(f.m, np.abs(f.values) ** 2)).values
    return {"S4": s4, "A": a, "B": b, "bound": P4_CONSTANT * float(np.mean(s2 * m_sq))}


def duality_pairing(f1: DyadicStepFn, f2: DyadicStepFn) -> tuple:
    """``(int f1 f2, sum_j int d_j(f1) d_j(f2), int S(f1) S(f2))`` with ``d_0 = E_0``."""
    m = max(f1.m, f2.m)
    f1, f2 = f1.refine(m), f2.refine(m)
    direct = (f1 * f2).integral()
    d1, d2 = martingale_differences(f1), martingale_differences(f2)
    mart = sum(np.mean(x * y) for x, y in zip(d1, d2))
    ss = float(np.mean(square(f1).values * square(f2).values))
    return direct, mart, ss


# ---------------------------------------------------------------- interval pruning

def max_coverage(intervals) -> int:
    """Largest number of the closed intervals sharing a common point."""
    pts = sorted({x for iv in intervals for x in iv})
    probes = set(pts)
    for a, b in zip(pts, pts[1:]):
        probes.add(0.5 * (a + b))
    return max((sum(1 for lo, hi in intervals if lo <= x <= hi) for x in probes), default=0)


def interval_prune(intervals) -> list[tuple[float, float]]:
    """Drops redundant closed intervals until no point lies in more than two of them.

    An interval is redundant when it is contained in another one, or in the union of two
    others that overlap each other.  The union never changes.
    """
    ivs = [(float(a), float(b)) for a, b in intervals]
    for a, b in ivs:
        if a > b:
            raise ValueError(f"bad interval ({a}, {b})")
    changed = True
    while changed:
        changed = False
        for i, (a, b) in enumerate(ivs):
            others = ivs[:i] + ivs[i + 1:]
            if _covered(a, b, others):
                ivs.pop(i)
                changed = True
                break
    return ivs


def _covered(a: float, b: float, others) -> bool:
    for lo, hi in others:
        if lo <= a and b <= hi:
            return True
    for u in range(len(others)):
        for v in range(len(others)):
            if u == v:
                continue
            (l1, h1), (l2, h2) = others[u], others[v]
            if l1 <= a and b <= h2 and l2 <= h1:
                return True
    return False


# ---------------------------------------------------------------- weak type for S

def weak_type_s_report(f: DyadicStepFn, lam: float) -> dict:
    """``|{S(f) > lam}| <= (3/lam) int |f|`` together with the modified maximal estimate
    ``|{M(f) > 2 lam}| <= (1/lam) int_{|f| > lam} |f|``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    absf = np.abs(f.values)
    s_meas = float(np.mean(square(f).values > lam))
    m_meas = float(np.mean(maximal(f).values > 2 * lam))
    return {
        "square": (s_meas, float(3.0 / lam * absf.mean())),
        "modified_maximal": (m_meas, float(np.sum(absf[absf > lam]) * 2.0 ** (-f.m) / lam)),
    }


# ---------------------------------------------------------------- proof constants

def s_by_m_constant(p: float) -> float:
    """Constant in ``int S^p <= C int M^p`` for ``0 < p < 2``: ``2 + 2/(2-p)``."""
    if not 0 < p < 2:
        raise ValueError("p must lie in (0, 2)")
    return 2.0 + 2.0 / (2.0 - p)


def m_by_s_constant(p: float) -> float:
    """Constant in ``int M^p <= C int S^p`` for ``0 < p < 2``: ``2 + 16/(2-p)``.

    Uses the ``p = 2`` maximal bound constant 8.
    """
    if not 0 < p < 2:
        raise ValueError("p must lie in (0, 2)")
    return 2.0 + 8.0 * 2.0 / (2.0 - p)


def f_by_s_constant_q4() -> float:
    """Constant in ``int |f|^4 <= C int S^4`` obtained by duality from ``p = 4/3``.

    With ``p = 4/3``: ``|S(g)|_p <= K |g|_p`` where
    ``K = (s_by_m_constant(p) 2^p p/(p-1))^{1/p}``; then ``|f|_4 <= K |S(f)|_4``.
    """
    p = 4.0 / 3.0
    k = (s_by_m_constant(p) * 2**p * p / (p - 1)) ** (1 / p)
    return k**4


def vector_maximal_constant(p: float = 1.5) -> float:
    """Constant for ``|(sum |E_j b_j|^2)^{1/2}|_p <= C |(sum |b_j|^2)^{1/2}|_p`` with ``1 < p < 2``.

    The bound for ``p`` equals the bound for the conjugate exponent ``P = p/(p-1) > 2``.
    There, pairing ``sum |E_j b_j|^2`` with ``h >= 0`` and moving ``E_j`` onto ``h`` gives
    ``M(h)``, whose ``L^s`` norm (``s`` conjugate to ``P/2``) is at most
    ``(2^s s/(s-1))^{1/s} |h|_s``.  Taking square roots yields ``C = (2^s s/(s-1))^{1/(2s)}``.
    """
    if not 1 < p < 2:
        raise ValueError("p must lie in (1, 2)")
    big = p / (p - 1)
    s = (big / 2) / (big / 2 - 1)
    return (2**s * s / (s - 1)) ** (1 / (2 * s))


def vector_expectation_report(betas: list[DyadicStepFn], p: float) -> tuple[float, float]:
    """``(|(sum_j |E_j b_j|^2)^{1/2}|_p, |(sum_j |b_j|^2)^{1/2}|_p)``; ``b_j`` paired with ``E_j``."""
    m = max(b.m for b in betas)
    lhs = np.zeros(2**m)
    rhs = np.zeros(2**m)
    for j, b in enumerate(betas):
        b = b.refine(m)
        lhs += np.abs(expectation(b, j).values) ** 2
        rhs += np.abs(b.values) ** 2
    return float(np.mean(lhs ** (p / 2)) ** (1 / p)), float(np.mean(rhs ** (p / 2)) ** (1 / p))
