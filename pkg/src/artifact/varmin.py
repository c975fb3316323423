"""p-variation seminorms on finite lattice domains and their Dirichlet minimisers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import optimize, sparse
from scipy.sparse import linalg as splinalg

__all__ = [
    "GridDomain",
    "GridFn",
    "vp_seminorm",
    "vp_energy",
    "quadratic_form_matrix",
    "minimize_vp",
    "truncate",
    "maximum_principle_report",
    "v1_monotone_check",
    "interior_norm_rank_deficiency",
    "box_domain",
    "random_domain",
]

IRLS_EPS = 1e-10


@dataclass(frozen=True)
class GridDomain:
    """A finite set ``U`` of points of ``Z^n``.

    ``interior`` holds the points all of whose ``2n`` lattice neighbours lie in ``U``;
    ``boundary`` is the rest of ``U``.
    """

    n: int
    points: tuple
    index: dict = field(repr=False, compare=False)
    interior: tuple = field(repr=False, compare=False)
    boundary: tuple = field(repr=False, compare=False)
    edges: np.ndarray = field(repr=False, compare=False)

    def __init__(self, n: int, points):
        pts = sorted({tuple(int(c) for c in p) for p in points})
        if any(len(p) != n for p in pts):
            raise ValueError(f"every point needs {n} coordinates")
        index = {p: i for i, p in enumerate(pts)}
        interior, boundary, edges = [], [], []
        for p in pts:
            nbrs = _neighbours(p)
            if all(q in index for q in nbrs):
                interior.append(p)
                edges.extend((index[p], index[q]) for q in nbrs)
            else:
                boundary.append(p)
        if not interior:
            raise ValueError("domain has empty interior")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "interior", tuple(interior))
        object.__setattr__(self, "boundary", tuple(boundary))
        object.__setattr__(self, "edges", np.array(edges, dtype=int).reshape(-1, 2))

    @property
    def size(self) -> int:
        return len(self.points)

    def interior_mask(self) -> np.ndarray:
        m = np.zeros(self.size, dtype=bool)
        m[[self.index[p] for p in self.interior]] = True
        return m

    def to_json(self) -> dict:
        return {"n": self.n, "points": [list(p) for p in self.points]}


def _neighbours(p: tuple) -> list[tuple]:
    out = []
    for i in range(len(p)):
        for s in (-1, 1):
            q = list(p)
            q[i] += s
            out.append(tuple(q))
    return out


@dataclass
class GridFn:
    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.domain.size,):
            raise ValueError(f"expected {self.domain.size} values")

    def at(self, p) -> complex | float:
        return self.values[self.domain.index[tuple(p)]]


def box_domain(shape) -> GridDomain:
    """All lattice points of ``[0, s_1) x ... x [0, s_n)``."""
    axes = [np.arange(s) for s in shape]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(shape))
    return GridDomain(len(shape), [tuple(p) for p in pts])


def random_domain(rng: np.random.Generator, max_points: int = 200, n: int | None = None) -> GridDomain:
    """Random union of boxes in dimension 1-3 with at most ``max_points`` points and a
    nonempty interior."""
    n = int(rng.integers(1, 4)) if n is None else n
    while True:
        pts = set()
        for _ in range(int(rng.integers(1, 4))):
            side = {1: (3, 40), 2: (3, 9), 3: (3, 5)}[n]
            shape = rng.integers(side[0], side[1] + 1, size=n)
            off = rng.integers(0, 4, size=n)
            axes = [np.arange(o, o + s) for o, s in zip(off, shape)]
            for p in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n):
                pts.add(tuple(int(c) for c in p))
        if len(pts) > max_points:
            continue
        try:
            return GridDomain(n, pts)
        except ValueError:
            continue


# ---------------------------------------------------------------- seminorms

def vp_energy(f: GridFn | np.ndarray, domain: GridDomain, p: float) -> float:
    """``V_p(f)^p``: sum over interior ``x`` and neighbours ``y`` of ``|f(x) - f(y)|^p``."""
    v = f.values if isinstance(f, GridFn) else np.asarray(f)
    e = domain.edges
    return float(np.sum(np.abs(v[e[:, 0]] - v[e[:, 1]]) ** p))


def vp_seminorm(f: GridFn, p: float) -> float:
    if not p >= 1:
        raise ValueError("p must be at least 1")
    return vp_energy(f, f.domain, p) ** (1.0 / p)


def quadratic_form_matrix(domain: GridDomain) -> np.ndarray:
    """Matrix ``A_0`` on interior points with ``<A_0 f, f> = V_2(f)^2`` for ``f = 0`` on the
    boundary.

    Each directed edge ``(x, y)`` contributes ``(e_x - e_y)(e_x - e_y)^T`` with boundary
    coordinates dropped, so interior pairs appear twice.
    """
    inner = {p: i for i, p in enumerate(domain.interior)}
    pos = {domain.index[p]: i for p, i in inner.items()}
    k = len(inner)
    a0 = np.zeros((k, k))
    for x, y in domain.edges:
        i = pos[x]
        a0[i, i] += 1
        j = pos.get(int(y))
        if j is not None:
            a0[j, j] += 1
            a0[i, j] -= 1
            a0[j, i] -= 1
    return a0


def interior_norm_rank_deficiency(domain: GridDomain) -> int:
    """Dimension of the space of interior-supported ``f`` with ``V_p(f) = 0``."""
    a0 = quadratic_form_matrix(domain)
    return int(a0.shape[0] - np.linalg.matrix_rank(a0))


# ---------------------------------------------------------------- minimisation

def _split(domain: GridDomain, boundary_values: Mapping) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns ``(interior_idx, boundary_idx, b)`` with ``b`` aligned to ``boundary_idx``."""
    bidx, bvals = [], []
    for p in domain.boundary:
        key = tuple(p)
        if key not in boundary_values:
            raise ValueError(f"boundary value missing at {key}")
        bidx.append(domain.index[key])
        bvals.append(boundary_values[key])
    iidx = np.array([domain.index[p] for p in domain.interior], dtype=int)
    return iidx, np.array(bidx, dtype=int), np.array(bvals)


def _edge_weights(domain: GridDomain) -> tuple[np.ndarray, np.ndarray]:
    """Undirected edges with multiplicity (2 for interior-interior, 1 for interior-boundary)."""
    e = np.sort(domain.edges, axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    return uniq, counts.astype(float)


def _weighted_solve(domain, edges, w, iidx, bidx, bvals):
    """Minimises ``sum w_e |f_a - f_b|^2`` with ``f = b`` on the boundary (sparse solve)."""
    n = domain.size
    rows = np.concatenate([edges[:, 0], edges[:, 1], edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 0], edges[:, 1], edges[:, 1], edges[:, 0]])
    vals = np.concatenate([w, w, -w, -w])
    lap = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    l_ii = lap[iidx][:, iidx].tocsc()
    l_ib = lap[iidx][:, bidx]
    rhs = -(l_ib @ bvals)
    sol = splinalg.spsolve(l_ii, rhs)
    f = np.zeros(n, dtype=np.result_type(bvals, float))
    f[bidx] = bvals
    f[iidx] = sol
    return f


def minimize_vp(domain: GridDomain, boundary_values: Mapping, p: float, tol: float = 1e-13,
                init=None, max_iter: int = 5000) -> GridFn:
    """Function equal to ``b`` on the boundary with least ``V_p``.

    ``p = 2`` solves the weighted Laplace system; ``1 < p < inf`` uses damped
    iteratively reweighted least squares on ``sum (|d|^2 + eps^2)^{p/2}``; ``p = 1`` is a
    linear program (real data only).  ``init`` seeds the interior for ``p != 1, 2``.
    """
    if not p >= 1:
        raise ValueError("p must be at least 1")
    iidx, bidx, bvals = _split(domain, boundary_values)
    edges, mult = _edge_weights(domain)
    if p == 2:
        return GridFn(domain, _weighted_solve(domain, edges, mult, iidx, bidx, bvals))
    if p == 1:
        return GridFn(domain, _solve_p1(domain, edges, mult, iidx, bidx, bvals))
    return GridFn(domain, _solve_irls(domain, edges, mult, iidx, bidx, bvals, p, tol, init, max_iter))


def _smoothed_energy(f, edges, mult, p):
    d = np.abs(f[edges[:, 0]] - f[edges[:, 1]]) ** 2
    return float(np.sum(mult * (d + IRLS_EPS**2) ** (p / 2)))


def _solve_irls(domain, edges, mult, iidx, bidx, bvals, p, tol, init, max_iter):
    f = _weighted_solve(domain, edges, mult, iidx, bidx, bvals)
    if init is not None:
        f = f.astype(np.result_type(f, np.asarray(init)))
        f[iidx] = np.asarray(init)
    energy = _smoothed_energy(f, edges, mult, p)
    for _ in range(max_iter):
        d2 = np.abs(f[edges[:, 0]] - f[edges[:, 1]]) ** 2
        w = mult * (d2 + IRLS_EPS**2) ** ((p - 2) / 2)
        target = _weighted_solve(domain, edges, w, iidx, bidx, bvals)
        step = 1.0
        while True:
            cand = f + step * (target - f)
            e_new = _smoothed_energy(cand, edges, mult, p)
            if e_new <= energy or step < 1e-6:
                break
            step *= 0.5
        move = float(np.max(np.abs(cand - f)))
        f = cand
        done = energy - e_new <= tol * max(energy, 1e-300) and move <= 1e-12 * max(1.0, float(np.max(np.abs(f))))
        energy = min(energy, e_new)
        if done:
            break
    return f


def _solve_p1(domain, edges, mult, iidx, bidx, bvals):
    if np.iscomplexobj(bvals):
        raise ValueError("p = 1 minimisation supports real boundary data only")
    n_int, n_e = len(iidx), len(edges)
    col = {int(g): i for i, g in enumerate(iidx)}
    fixed = dict(zip(bidx.tolist(), bvals.tolist()))
    # variables: interior values then one slack t_e >= |f_a - f_b| per edge
    cost = np.concatenate([np.zeros(n_int), mult])
    rows, b_ub = [], []
    for e, (a, b) in enumerate(edges):
        for sign in (1, -1):
            row = np.zeros(n_int + n_e)
            const = 0.0
            for node, coef in ((int(a), sign), (int(b), -sign)):
                if node in col:
                    row[col[node]] += coef
                else:
                    const += coef * fixed[node]
            row[n_int + e] = -1
            rows.append(row)
            b_ub.append(-const)
    res = optimize.linprog(cost, A_ub=np.array(rows), b_ub=np.array(b_ub),
                           bounds=[(None, None)] * n_int + [(0, None)] * n_e, method="highs")
    if not res.success:
        raise RuntimeError(f"linear program failed: {res.message}")
    f = np.zeros(domain.size)
    f[bidx] = bvals
    f[iidx] = res.x[:n_int]
    return f


# ---------------------------------------------------------------- truncations

def truncate(f: GridFn, kind: str, param) -> GridFn:
    """Pointwise truncation.

    ``floor``: ``max(s, c)``; ``cap``: ``min(s, d)``; ``disc``: radial projection onto the
    closed disc of radius ``r``; ``halfplane``: orthogonal projection onto
    ``{z : Re(conj(u) z) <= c}`` for ``param = (u, c)``.
    """
    v = f.values
    if kind in ("floor", "cap"):
        if np.iscomplexobj(v):
            raise ValueError(f"{kind} truncation needs real values")
        out = np.maximum(v, param) if kind == "floor" else np.minimum(v, param)
    elif kind == "disc":
        r = float(param)
        if r <= 0:
            raise ValueError("radius must be positive")
        a = np.abs(v)
        out = np.where(a > r, r * v / np.where(a > 0, a, 1), v)
    elif kind == "halfplane":
        u, c = param
        u = complex(u)
        if u == 0:
            raise ValueError("half-plane normal must be nonzero")
        s = (np.conj(u) * v).real
        out = np.where(s > c, v - (s - c) * u / abs(u) ** 2, v)
    else:
        raise ValueError(f"unknown truncation {kind!r}")
    return GridFn(f.domain, out)


# ---------------------------------------------------------------- reports

def maximum_principle_report(domain: GridDomain, boundary_values: Mapping, p: float,
                             tol: float = 1e-8, solution: GridFn | None = None) -> dict:
    """Checks that the minimiser stays within the range (real) or the closed disc of
    radius ``max |b|`` and the convex hull of the boundary values (complex)."""
    f = minimize_vp(domain, boundary_values, p) if solution is None else solution
    _, bidx, bvals = _split(domain, boundary_values)
    vals = f.values
    if not np.iscomplexobj(vals) and not np.iscomplexobj(bvals):
        lo, hi = float(np.min(bvals)), float(np.max(bvals))
        ok = bool(np.all(vals >= lo - tol) and np.all(vals <= hi + tol))
        return {"ok": ok, "min": float(vals.min()), "max": float(vals.max()), "lo": lo, "hi": hi}
    radius = float(np.max(np.abs(bvals)))
    in_disc = bool(np.all(np.abs(vals) <= radius + tol))
    from .linops import ConvexBody, separate  # local import keeps module load light

    body = ConvexBody(np.column_stack([np.real(bvals), np.imag(bvals)]))
    outside = 0
    for z in vals:
        try:
            sep = separate(body, [z.real, z.imag])
        except ValueError:
            continue
        if np.linalg.norm(sep.functional) > tol:
            outside += 1
    return {"ok": in_disc and outside == 0, "max_abs": float(np.max(np.abs(vals))),
            "radius": radius, "outside_hull": outside}


def v1_monotone_check(values) -> dict:
    """Relates total variation, ``|f(b) - f(a)|`` and monotonicity on an integer segment.

    ``variation`` counts each edge once, where ``variation == |f(b) - f(a)|`` holds exactly
    for monotone ``f``.  ``v1`` is the seminorm ``V_1`` on the segment, which counts edges
    between two interior points twice; it agrees with ``variation`` when the segment has a
    single interior point and is always at least ``|f(b) - f(a)|``.
    """
    f = np.asarray(values, dtype=float)
    if len(f) < 3:
        raise ValueError("segment needs at least 3 points")
    steps = np.diff(f)
    variation = float(np.sum(np.abs(steps)))
    ends = abs(float(f[-1] - f[0]))
    v1 = float(np.sum(np.abs(f[1:-1] - f[:-2])) + np.sum(np.abs(f[1:-1] - f[2:])))
    equal = abs(variation - ends) <= 1e-12 * max(1.0, ends)
    monotone = bool(np.all(steps >= 0) or np.all(steps <= 0))
    return {"equality": bool(equal), "monotone": monotone, "agree": bool(equal) == monotone,
            "variation": variation, "v1": v1, "endpoint_gap": ends}
