"""Finite-dimensional normed and inner-product space computations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

__all__ = [
    "ComplexMatrix",
    "Subspace",
    "ConvexBody",
    "NormEstimate",
    "conjugate_exponent",
    "vector_pnorm",
    "dual_extremal",
    "holder_partner",
    "operator_norm",
    "alternating_ascent",
    "neumann_inverse",
    "log_power_norm",
    "spectral_radius",
    "adjoint",
    "c_star_report",
    "schmidt_decompose",
    "hilbert_schmidt_norm",
    "orthogonal_projection",
    "simultaneous_diagonalize",
    "numerical_range",
    "quotient_norm",
    "hahn_banach_extend",
    "separate",
    "cone_dual_check",
    "unit_ball_maximizer",
    "self_adjoint_report",
]


# ---------------------------------------------------------------- data types

@dataclass(frozen=True)
class ComplexMatrix:
    """A rows x cols complex matrix with the JSON layout used by the CLI."""

    rows: int
    cols: int
    entries: tuple

    @classmethod
    def from_array(cls, a) -> "ComplexMatrix":
        a = np.atleast_2d(np.asarray(a, dtype=complex))
        return cls(a.shape[0], a.shape[1], tuple(a.ravel().tolist()))

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex).reshape(self.rows, self.cols)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[float(z.real), float(z.imag)] for z in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "ComplexMatrix":
        try:
            rows, cols, raw = int(obj["rows"]), int(obj["cols"]), obj["entries"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"matrix JSON needs rows, cols, entries: {exc}") from exc
        vals = []
        for i, e in enumerate(raw):
            if isinstance(e, (int, float)):
                vals.append(complex(e))
            elif isinstance(e, (list, tuple)) and len(e) == 2:
                vals.append(complex(float(e[0]), float(e[1])))
            else:
                raise ValueError(f"entries[{i}]: expected number or [re, im]")
        return cls(rows, cols, tuple(vals))

    def adjoint(self) -> "ComplexMatrix":
        return ComplexMatrix.from_array(self.array.conj().T)


@dataclass(frozen=True)
class Subspace:
    """Span of linearly independent vectors in C^n (or R^n)."""

    n: int
    basis: np.ndarray = field(repr=False)

    def __init__(self, n: int, basis: Sequence):
        b = np.asarray(basis)
        if b.size == 0:
            b = np.zeros((0, n))
        b = np.atleast_2d(b)
        if b.shape[1] != n:
            raise ValueError("basis vectors must have the ambient dimension")
        if b.shape[0]:
            q, r = np.linalg.qr(b.T)
            if np.min(np.abs(np.diag(r))) <= 1e-10:
                raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def orthonormal(self) -> np.ndarray:
        """Columns form an orthonormal basis."""
        if self.dim == 0:
            return np.zeros((self.n, 0))
        q, _ = np.linalg.qr(self.basis.T)
        return q


@dataclass(frozen=True)
class ConvexBody:
    """Convex hull (``kind='hull'``) or convex cone (``kind='cone'``) of finitely many points."""

    generators: np.ndarray
    kind: str = "hull"

    def __init__(self, generators, kind: str = "hull"):
        g = np.atleast_2d(np.asarray(generators, dtype=float))
        if g.size == 0:
            raise ValueError("a convex body needs at least one generator")
        if kind not in ("hull", "cone"):
            raise ValueError("kind must be 'hull' or 'cone'")
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "kind", kind)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    exact: bool
    maximizer: np.ndarray | None = None


# ---------------------------------------------------------------- vector norms

def conjugate_exponent(p: float) -> float:
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _check_exponent(p: float) -> None:
    if not (p >= 1):
        raise ValueError(f"exponent must be in [1, inf], got {p}")


def vector_pnorm(v, p: float) -> float:
    _check_exponent(p)
    a = np.abs(np.asarray(v))
    if a.size == 0:
        return 0.0
    if np.isinf(p):
        return float(a.max())
    if p == 1:
        return float(a.sum())
    scale = a.max()
    if scale == 0:
        return 0.0
    return float(scale * np.sum((a / scale) ** p) ** (1.0 / p))


def dual_extremal(w, p: float) -> np.ndarray:
    """A vector ``v`` with ``sum_j w_j v_j = |w|_q |v|_p`` (``q`` conjugate to ``p``).

    For ``p > 1`` this is ``v_j = conj(w_j) |w_j|^{q-2}`` (zero where ``w_j = 0``);
    for ``p = 1`` it is the unit vector at a largest ``|w_k|`` times the conjugate phase.
    """
    _check_exponent(p)
    w = np.asarray(w)
    if not np.any(w != 0):
        raise ValueError("w must be nonzero")
    a = np.abs(w)
    phase = np.where(a > 0, np.conj(w) / np.where(a > 0, a, 1), 0)
    if p == 1:
        k = int(np.argmax(a))
        v = np.zeros_like(phase)
        v[k] = phase[k]
        return v if np.iscomplexobj(w) else v.real
    q = conjugate_exponent(p)
    v = phase * np.where(a > 0, a, 0) ** (q - 1)
    return v if np.iscomplexobj(w) else v.real


def holder_partner(w, p: float) -> np.ndarray:
    """``dual_extremal`` normalised so that ``|v|_p = 1`` and ``sum w_j v_j = |w|_q``."""
    v = dual_extremal(w, p)
    return v / vector_pnorm(v, p)


# ---------------------------------------------------------------- operator norms

def alternating_ascent(a: np.ndarray, p_in: float, p_out: float, x0: np.ndarray,
                       iters: int = 500, tol: float = 1e-14, xtol: float = 1e-13):
    """Alternating Hölder-equality iteration for ``max |y^T a x|`` with ``|x|_{p_in} = 1``
    and ``|y|_{p_out'} = 1``.

    Each half step maximises the bilinear form exactly in one argument, so the value
    ``|y^T a x|`` never decreases.  Stops when both the value gain and the change in
    ``x`` fall below tolerance.  Returns ``(x, y, history)``.
    """
    q_out = conjugate_exponent(p_out)
    x = x0 / vector_pnorm(x0, p_in)
    history = []
    y = None
    for _ in range(iters):
        u = a @ x
        if not np.any(np.abs(u) > 0):
            break
        y = holder_partner(u, q_out)
        v = y @ a
        if not np.any(np.abs(v) > 0):
            break
        x_new = holder_partner(v, p_in)
        step = float(np.max(np.abs(x_new - x)))
        x = x_new
        history.append(float(abs(y @ a @ x)))
        if len(history) > 1 and history[-1] - history[-2] <= tol * max(1.0, history[-1]) and step <= xtol:
            break
    if y is None:
        y = np.zeros(a.shape[0], dtype=a.dtype)
    return x, y, history


def operator_norm(a, p_in: float, p_out: float, budget: int = 8,
                  rng: np.random.Generator | None = None) -> NormEstimate:
    """Norm of ``a`` from ``l^{p_in}`` to ``l^{p_out}``.

    Exact for ``p_in = 1`` (largest column ``p_out``-norm), ``(inf, inf)`` (largest row
    sum) and ``(2, 2)`` (largest singular value).  Other pairs get a lower bound from
    ``budget`` random restarts of :func:`alternating_ascent`.
    """
    _check_exponent(p_in)
    _check_exponent(p_out)
    a = np.atleast_2d(np.asarray(a))
    if p_in == 1:
        return NormEstimate(max(vector_pnorm(a[:, k], p_out) for k in range(a.shape[1])), True)
    if np.isinf(p_in) and np.isinf(p_out):
        return NormEstimate(float(np.abs(a).sum(axis=1).max()), True)
    if p_in == 2 and p_out == 2:
        return NormEstimate(float(np.linalg.norm(a, 2)), True)
    rng = np.random.default_rng(0) if rng is None else rng
    best, best_x = 0.0, None
    cplx = np.iscomplexobj(a)
    for _ in range(max(1, budget)):
        x0 = rng.standard_normal(a.shape[1])
        if cplx:
            x0 = x0 + 1j * rng.standard_normal(a.shape[1])
        x, _, _ = alternating_ascent(a, p_in, p_out, x0)
        val = vector_pnorm(a @ x, p_out) / vector_pnorm(x, p_in)
        if val > best:
            best, best_x = val, x
    return NormEstimate(best, False, best_x)


def neumann_inverse(a, tol: float = 1e-14, max_terms: int = 100000) -> np.ndarray:
    """``(I - a)^{-1}`` as the partial sum of ``sum_n a^n``, stopped when a term's norm < tol."""
    a = np.asarray(a)
    norm = np.linalg.norm(a, 2)
    if norm >= 1:
        raise ValueError(f"Neumann series needs |a| < 1, got {norm}")
    n = a.shape[0]
    total = np.eye(n, dtype=a.dtype)
    term = np.eye(n, dtype=a.dtype)
    for _ in range(max_terms):
        term = term @ a
        if np.linalg.norm(term, 2) < tol:
            break
        total = total + term
    return total


def log_power_norm(a, n: int) -> float:
    """``log |a^n|_2`` by binary powering with renormalisation (no overflow)."""
    a = np.asarray(a, dtype=complex)
    result, result_log = np.eye(a.shape[0], dtype=complex), 0.0
    base, base_log = a, 0.0
    e = n
    while e:
        if e & 1:
            result = result @ base
            s = np.linalg.norm(result, 2)
            if s == 0:
                return -np.inf
            result, result_log = result / s, result_log + base_log + np.log(s)
        e >>= 1
        if e:
            base = base @ base
            s = np.linalg.norm(base, 2)
            if s == 0:
                return -np.inf
            base, base_log = base / s, 2 * base_log + np.log(s)
    return result_log


def spectral_radius(a, n_max: int = 64) -> tuple[float, float]:
    """``(|a^n_max|^{1/n_max}, max |eigenvalue|)``."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("spectral radius needs a square matrix")
    lg = log_power_norm(a, n_max)
    gelfand = 0.0 if np.isneginf(lg) else float(np.exp(lg / n_max))
    eig = float(np.max(np.abs(np.linalg.eigvals(a))))
    return gelfand, eig


def adjoint(a) -> np.ndarray:
    return np.asarray(a).conj().T


def c_star_report(a) -> tuple[float, float]:
    """``(|a* a|, |a|^2)`` in the operator 2-norm."""
    a = np.asarray(a)
    return float(np.linalg.norm(adjoint(a) @ a, 2)), float(np.linalg.norm(a, 2) ** 2)


def schmidt_decompose(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns ``(u, w, s)`` with ``a v = sum_j <v, u_j> w_j``.

    ``u`` has orthonormal columns that are eigenvectors of ``a* a`` (ascending
    eigenvalue), ``w_j = a u_j`` are mutually orthogonal, and ``s_j = |w_j|``.
    """
    a = np.asarray(a)
    evals, u = np.linalg.eigh(adjoint(a) @ a)
    w = a @ u
    return u, w, np.linalg.norm(w, axis=0)


def hilbert_schmidt_norm(a) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(a)) ** 2)))


def orthogonal_projection(s: Subspace) -> np.ndarray:
    q = s.orthonormal()
    return q @ q.conj().T


def _commutator_norm(a, b) -> float:
    return float(np.linalg.norm(a @ b - b @ a, 2))


def simultaneous_diagonalize(mats: Sequence, rng: np.random.Generator | None = None,
                             attempts: int = 8) -> np.ndarray:
    """Common orthonormal eigenbasis (as columns) of commuting normal matrices.

    A random combination ``H = sum c_i A_i + conj(c_i) A_i*`` is Hermitian, and for
    generic complex ``c`` its eigenspaces coincide with the joint eigenspaces.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    for i, a in enumerate(mats):
        if a.shape != (n, n):
            raise ValueError("matrices must be square and of equal size")
        if _commutator_norm(a, a.conj().T) > 1e-10 * max(1.0, np.linalg.norm(a, 2)):
            raise ValueError(f"matrix {i} is not normal")
        for j in range(i):
            if _commutator_norm(a, mats[j]) > 1e-10:
                raise ValueError(f"matrices {j} and {i} do not commute")
    rng = np.random.default_rng(12345) if rng is None else rng
    for _ in range(attempts):
        c = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
        h = sum(ci * a + np.conj(ci) * a.conj().T for ci, a in zip(c, mats))
        _, q = np.linalg.eigh((h + h.conj().T) / 2)
        if all(_offdiag(q.conj().T @ a @ q) <= 1e-8 for a in mats):
            return q
    raise RuntimeError("failed to find a common eigenbasis")


def _offdiag(d: np.ndarray) -> float:
    return float(np.max(np.abs(d - np.diag(np.diag(d))))) if d.size else 0.0


def numerical_range(a, sample_count: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Values ``<a v, v>`` for ``sample_count`` random unit vectors ``v``."""
    a = np.asarray(a, dtype=complex)
    rng = np.random.default_rng(0) if rng is None else rng
    n = a.shape[0]
    v = rng.standard_normal((sample_count, n)) + 1j * rng.standard_normal((sample_count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return np.einsum("si,ij,sj->s", v.conj(), a, v)


def self_adjoint_report(a) -> tuple[float, float]:
    """``(max |Im eigenvalue|, max |<v_i, v_j>|)`` over eigenvectors with distinct eigenvalues."""
    a = np.asarray(a, dtype=complex)
    evals, vecs = np.linalg.eig(a)
    imag = float(np.max(np.abs(evals.imag)))
    worst = 0.0
    for i in range(len(evals)):
        for j in range(i):
            if abs(evals[i] - evals[j]) > 1e-6:
                worst = max(worst, float(abs(np.vdot(vecs[:, i], vecs[:, j]))))
    return imag, worst


# ---------------------------------------------------------------- quotient norms and extension

def _as_real_problem(basis: np.ndarray, v: np.ndarray):
    """Stacks real and imaginary parts so complex-linear combinations become real ones."""
    if np.iscomplexobj(basis) or np.iscomplexobj(v):
        b = np.asarray(basis, dtype=complex)
        cols = np.concatenate([b.T, 1j * b.T], axis=1)
        return cols, np.asarray(v, dtype=complex), True
    return np.asarray(basis, dtype=float).T, np.asarray(v, dtype=float), False


def _min_norm_affine(cols: np.ndarray, v: np.ndarray, p: float, restarts: int = 4,
                     rng: np.random.Generator | None = None) -> tuple[float, np.ndarray]:
    """``min_c |v + cols c|_p`` over real ``c``; LP for real data with ``p in {1, inf}``."""
    d = cols.shape[1]
    if d == 0:
        return vector_pnorm(v, p), np.zeros(0)
    if p == 2:
        c, *_ = np.linalg.lstsq(cols, -v, rcond=None)
        c = c.real
        return vector_pnorm(v + cols @ c, 2), c
    real = not np.iscomplexobj(cols) and not np.iscomplexobj(v)
    n = len(v)
    if real and p in (1, np.inf):
        if p == 1:
            # variables (c, s): minimise sum s with -s <= v + B c <= s
            cost = np.concatenate([np.zeros(d), np.ones(n)])
            a_ub = np.block([[cols, -np.eye(n)], [-cols, -np.eye(n)]])
        else:
            cost = np.concatenate([np.zeros(d), [1.0]])
            a_ub = np.block([[cols, -np.ones((n, 1))], [-cols, -np.ones((n, 1))]])
        b_ub = np.concatenate([-v, v])
        res = optimize.linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * d + [(0, None)] * (len(cost) - d),
                               method="highs")
        if not res.success:
            raise RuntimeError(f"linear program failed: {res.message}")
        c = res.x[:d]
        return vector_pnorm(v + cols @ c, p), c
    rng = np.random.default_rng(0) if rng is None else rng

    def obj(c):
        return vector_pnorm(v + cols @ c, p)

    c_ls, *_ = np.linalg.lstsq(cols, -v, rcond=None)
    starts = [np.real(c_ls)] + [rng.standard_normal(d) * (1 + np.abs(np.real(c_ls)).max()) for _ in range(restarts)]
    best_val, best_c = np.inf, None
    for c0 in starts:
        r = optimize.minimize(obj, c0, method="Powell", options={"xtol": 1e-12, "ftol": 1e-14, "maxfev": 40000})
        r = optimize.minimize(obj, r.x, method="Nelder-Mead",
                              options={"xatol": 1e-13, "fatol": 1e-15, "maxfev": 40000})
        if r.fun < best_val:
            best_val, best_c = float(r.fun), r.x
    return best_val, best_c


def quotient_norm(w: Subspace, v, p: float) -> float:
    """``inf_{u in W} |v + u|_p``."""
    _check_exponent(p)
    v = np.asarray(v)
    cols, vv, _ = _as_real_problem(w.basis, v)
    val, _ = _min_norm_affine(cols, vv, p)
    return min(val, vector_pnorm(v, p))


def hahn_banach_extend(w: Subspace, mu_values, p: float, budget: int = 4,
                       rng: np.random.Generator | None = None, tol: float = 1e-7) -> np.ndarray:
    """Extends a functional of norm at most 1 on ``W`` to the whole space.

    ``mu_values[i]`` is ``mu`` applied to ``w.basis[i]``.  Returns ``l`` with
    ``lambda(v) = sum_j l_j v_j``.  The space is enlarged one direction ``z`` at a time
    and ``mu(z)`` is set to the midpoint of the admissible interval
    ``[sup_u(-mu(u) - |u+z|), inf_u(-mu(u) + |u+z|)]``.  Complex scalars are handled by
    extending the real part and then taking ``h(v) - i h(i v)``.
    """
    _check_exponent(p)
    n = w.n
    if n > 8:
        raise ValueError("extension is limited to ambient dimension 8")
    mu = np.asarray(mu_values)
    rng = np.random.default_rng(0) if rng is None else rng
    basis = np.asarray(w.basis)
    if len(mu) != w.dim:
        raise ValueError("one functional value per basis vector is required")
    complex_case = np.iscomplexobj(basis) or np.iscomplexobj(mu)

    if w.dim:
        samples = [basis[i] for i in range(w.dim)]
        samples += list(rng.standard_normal((16, w.dim)) @ basis)
        for s in samples:
            coeff = np.linalg.lstsq(basis.T, s, rcond=None)[0]
            if abs(coeff @ mu) > vector_pnorm(s, p) * (1 + 1e-9) + 1e-12:
                raise ValueError("functional has norm greater than 1 on the subspace")

    if p == 2:
        # inner-product case: compose with the orthogonal projection
        coeff_map = np.linalg.pinv(basis.T) if w.dim else np.zeros((0, n))
        return (mu @ coeff_map) if w.dim else np.zeros(n, dtype=complex if complex_case else float)

    if not complex_case:
        return _extend_real(basis.astype(float), mu.astype(float), n, p, budget, rng, tol,
                            lambda vec: vector_pnorm(vec, p), use_lp=p in (1, np.inf))

    # real version of C^n: coordinates (Re v, Im v); the norm is the complex p-norm
    def real_norm(vec):
        return vector_pnorm(vec[:n] + 1j * vec[n:], p)

    rb, rmu = [], []
    for b, m_ in zip(basis.astype(complex), mu.astype(complex)):
        rb.append(np.concatenate([b.real, b.imag]))
        rmu.append(m_.real)
        ib = 1j * b
        rb.append(np.concatenate([ib.real, ib.imag]))
        rmu.append((1j * m_).real)
    rb = np.array(rb) if rb else np.zeros((0, 2 * n))
    h = _extend_real(rb, np.array(rmu), 2 * n, p, budget, rng, tol, real_norm, use_lp=False, split=n)
    # h(v) = hx.Re v + hy.Im v, so h(v) - i h(iv) = (hx - i hy).v
    hx, hy = h[:n], h[n:]
    return hx - 1j * hy


def _extend_real(basis, mu, n, p, budget, rng, tol, norm, use_lp, split=None) -> np.ndarray:
    cur_basis = [b for b in basis]
    cur_mu = [float(m) for m in mu]
    for e in np.eye(n):
        mat = np.array(cur_basis) if cur_basis else np.zeros((0, n))
        if mat.shape[0] and np.linalg.matrix_rank(np.vstack([mat, e]), tol=1e-10) == mat.shape[0]:
            continue
        lo, hi = _alpha_interval(mat, np.array(cur_mu), e, p, budget, rng, norm, use_lp, split)
        if lo > hi + tol * max(1.0, abs(lo), abs(hi)):
            raise RuntimeError(f"empty extension interval [{lo}, {hi}]")
        alpha = 0.5 * (lo + hi) if lo <= hi else lo
        cur_basis.append(e)
        cur_mu.append(alpha)
        if len(cur_basis) == n:
            break
    full = np.array(cur_basis)
    return np.linalg.solve(full, np.array(cur_mu))


def _alpha_interval(mat, mu, z, p, budget, rng, norm, use_lp, split=None):
    """``[sup_c(-mu.c - |B^T c + z|), inf_c(-mu.c + |B^T c + z|)]``."""
    d = mat.shape[0]
    if d == 0:
        nz = norm(z)
        return -nz, nz
    lo = -_min_linear_plus_norm(mat, mu, z, p, budget, rng, norm, use_lp, split)
    hi = _min_linear_plus_norm(mat, -mu, z, p, budget, rng, norm, use_lp, split)
    return lo, hi


def _epigraph_min(mat, mu, z, p, split, c0) -> float:
    """``min_c mu.c + |w|`` for the complex 1- or sup-norm of ``w = B^T c + z`` written in
    real coordinates (``w_j = x_j + i x_{j+split}``), via smooth modulus-epigraph constraints."""
    d = mat.shape[0]
    m = split

    def moduli_sq(c):
        w = mat.T @ c + z
        return w[:m] ** 2 + w[m:] ** 2

    def jac_moduli_sq(c):
        w = mat.T @ c + z
        return 2 * (w[:m, None] * mat.T[:m] + w[m:, None] * mat.T[m:])

    w0 = np.sqrt(moduli_sq(c0))
    if np.isinf(p):
        x0 = np.concatenate([c0, [w0.max() + 1e-3]])
        cost = np.concatenate([mu, [1.0]])
        cons = {"type": "ineq", "fun": lambda x: x[d] ** 2 - moduli_sq(x[:d]),
                "jac": lambda x: np.hstack([-jac_moduli_sq(x[:d]), np.full((m, 1), 2 * x[d])])}
        bounds = [(None, None)] * d + [(0, None)]
    else:
        x0 = np.concatenate([c0, w0 + 1e-3])
        cost = np.concatenate([mu, np.ones(m)])
        cons = {"type": "ineq", "fun": lambda x: x[d:] ** 2 - moduli_sq(x[:d]),
                "jac": lambda x: np.hstack([-jac_moduli_sq(x[:d]), np.diag(2 * x[d:])])}
        bounds = [(None, None)] * d + [(0, None)] * m
    r = optimize.minimize(lambda x: cost @ x, x0, jac=lambda x: cost, method="SLSQP",
                          constraints=[cons], bounds=bounds, options={"ftol": 1e-15, "maxiter": 1000})
    c = r.x[:d]
    w = np.sqrt(moduli_sq(c))
    return float(mu @ c + (w.max() if np.isinf(p) else w.sum()))


def _min_linear_plus_norm(mat, mu, z, p, budget, rng, norm, real_lp, split=None) -> float:
    """``min_c mu.c + |B^T c + z|`` (bounded below because ``|mu| <= 1`` on the span)."""
    d, n = mat.shape
    if real_lp:
        if p == 1:
            cost = np.concatenate([mu, np.ones(n)])
            a_ub = np.block([[mat.T, -np.eye(n)], [-mat.T, -np.eye(n)]])
        else:
            cost = np.concatenate([mu, [1.0]])
            a_ub = np.block([[mat.T, -np.ones((n, 1))], [-mat.T, -np.ones((n, 1))]])
        b_ub = np.concatenate([-z, z])
        res = optimize.linprog(cost, A_ub=a_ub, b_ub=b_ub,
                               bounds=[(None, None)] * d + [(0, None)] * (len(cost) - d), method="highs")
        if not res.success:
            raise RuntimeError(f"linear program failed: {res.message}")
        return float(res.fun)

    def obj(c):
        return float(mu @ c + norm(mat.T @ c + z))

    best = np.inf
    starts = [np.zeros(d)] + [rng.standard_normal(d) for _ in range(max(1, budget))]
    for c0 in starts:
        r = optimize.minimize(obj, c0, method="Powell", options={"xtol": 1e-12, "ftol": 1e-15, "maxfev": 40000})
        r = optimize.minimize(obj, r.x, method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-15, "maxfev": 40000})
        best = min(best, float(r.fun))
        if split is not None and p in (1, np.inf):
            best = min(best, _epigraph_min(mat, mu, z, p, split, r.x))
    return best


# ---------------------------------------------------------------- convex sets

def _affine_minimizer(pts: np.ndarray) -> np.ndarray:
    """Weights (summing to 1) of the least-norm point in the affine hull of ``pts``."""
    k = len(pts)
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = pts @ pts.T
    kkt[:k, k] = kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    return np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]


def _nearest_in_hull(gens: np.ndarray, x: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Euclidean projection of ``x`` onto the convex hull of the rows of ``gens``
    (Wolfe's minimum-norm-point active-set method on ``gens - x``)."""
    pts = gens - x
    scale = max(float(np.max(np.sum(pts**2, axis=1))), 1e-300)
    corral = [int(np.argmin(np.sum(pts**2, axis=1)))]
    w = np.array([1.0])
    for _ in range(100 * len(pts) + 100):
        y = w @ pts[corral]
        j = int(np.argmin(pts @ y))
        if y @ y - pts[j] @ y <= tol * scale or j in corral:
            break
        corral.append(j)
        w = np.append(w, 0.0)
        while True:
            v = _affine_minimizer(pts[corral])
            if np.all(v > tol):
                w = v
                break
            drop = v <= tol
            shrink = drop & (w > v)
            theta = float(np.min(w[shrink] / (w[shrink] - v[shrink]))) if shrink.any() else 1.0
            w = theta * v + (1 - theta) * w
            keep = w > tol
            corral = [c for c, kp in zip(corral, keep) if kp]
            w = w[keep] / w[keep].sum()
    return w @ gens[corral]


@dataclass(frozen=True)
class Separation:
    nearest: np.ndarray
    functional: np.ndarray
    threshold: float
    support_value: float


def separate(body: ConvexBody, x) -> Separation:
    """Strictly separates ``x`` from a convex hull.

    ``functional = x - q`` where ``q`` is the nearest point of the hull, and the threshold
    sits halfway between ``functional(q)`` (the supporting value) and ``functional(x)``.
    """
    if body.kind != "hull":
        raise ValueError("separate expects a convex hull")
    x = np.asarray(x, dtype=float)
    q = _nearest_in_hull(body.generators, x)
    lam = x - q
    if np.linalg.norm(lam) <= 1e-9:
        raise ValueError("point lies in the convex hull")
    support = float(lam @ q)
    return Separation(q, lam, 0.5 * (support + float(lam @ x)), support)


@dataclass(frozen=True)
class ConeMembership:
    inside: bool
    residual: float
    functional: np.ndarray | None


def cone_dual_check(cone: ConvexBody, v) -> ConeMembership:
    """Membership of ``v`` in a finitely generated cone via nonnegative least squares.

    When ``v`` lies outside, ``q - v`` (``q`` the projection onto the cone) is
    nonnegative on the cone and negative at ``v``, so ``v`` is outside the second dual.
    """
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return ConeMembership(True, 0.0, None)
    gens = cone.generators
    # bounded least squares; the residual is recomputed rather than trusted
    coeff = optimize.lsq_linear(gens.T, v, bounds=(0, np.inf), method="bvls", tol=1e-14).x
    q = gens.T @ coeff
    resid = float(np.linalg.norm(q - v))
    if resid <= 1e-8:
        return ConeMembership(True, resid, None)
    return ConeMembership(False, float(resid), q - v)


# ---------------------------------------------------------------- strict convexity

def unit_ball_maximizer(w, p: float, rng: np.random.Generator, restarts: int = 1) -> np.ndarray:
    """Numerically maximises ``sum w_j v_j`` over the real unit ``p``-ball (``1 < p < inf``)
    from a random start; independent of the closed form in :func:`holder_partner`."""
    w = np.asarray(w, dtype=float)
    n = len(w)
    best, best_v = -np.inf, None
    for _ in range(restarts):
        v0 = rng.standard_normal(n)
        v0 /= vector_pnorm(v0, p) * 2
        res = optimize.minimize(lambda v: -w @ v, v0, jac=lambda v: -w, method="SLSQP",
                                constraints=[{"type": "ineq",
                                              "fun": lambda v: 1 - np.sum(np.abs(v) ** p),
                                              "jac": lambda v: -p * np.sign(v) * np.abs(v) ** (p - 1)}],
                                options={"ftol": 1e-16, "maxiter": 2000})
        if -res.fun > best:
            best, best_v = -res.fun, res.x
    return best_v
