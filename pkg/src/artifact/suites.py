"""Seeded invariant batteries, one per module, used by ``run_suite``.

Every case is recorded as ``lhs <= rhs + tol``; identities are recorded as
``|a - b| <= 0 + tol``.  All randomness comes from the generator handed to each suite,
so a seed fixes every case.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from math import isfinite

import numpy as np

from . import dyadic as dy
from . import hardy as hd
from . import inequalities as iq
from . import interp as ip
from . import linops as lo
from . import probab as pb
from . import quasisym as qs
from . import varmin as vm

SUITES = ("dyadic", "inequalities", "linops", "hardy", "probab", "interp", "varmin", "quasisym")
SIZES = {"small": 1, "medium": 4}


@dataclass
class Case:
    case: str
    lhs: float
    rhs: float
    tol: float

    @property
    def passed(self) -> bool:
        return isfinite(self.lhs) and isfinite(self.rhs) and self.lhs <= self.rhs + self.tol


@dataclass
class SuiteReport:
    suite: str
    seed: int
    size: str
    results: list[Case] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def cases(self) -> int:
        return len(self.results)

    @property
    def violations(self) -> list[Case]:
        return [c for c in self.results if not c.passed]

    @property
    def ok(self) -> bool:
        return not self.violations


class Battery:
    def __init__(self, report: SuiteReport):
        self.report = report

    def le(self, case: str, lhs, rhs, tol: float = 0.0) -> None:
        self.report.results.append(Case(case, float(np.real(lhs)), float(np.real(rhs)), float(tol)))

    def close(self, case: str, a, b, tol: float) -> None:
        self.le(case, float(np.max(np.abs(np.asarray(a) - np.asarray(b)))), 0.0, tol)

    def rel(self, case: str, a, b, tol: float) -> None:
        a, b = float(a), float(b)
        self.le(case, abs(a - b), 0.0, tol * max(abs(a), abs(b), 1e-300))

    def true(self, case: str, cond: bool) -> None:
        self.le(case, 0.0 if cond else 1.0, 0.0, 0.0)


def _step(rng, m_max: int = 8, cplx=None, nonneg=False) -> dy.DyadicStepFn:
    m = int(rng.integers(0, m_max + 1))
    c = bool(rng.integers(0, 2)) if cplx is None else cplx
    return dy.random_step(rng, m, complex_valued=c and not nonneg, nonnegative=nonneg)


# ---------------------------------------------------------------- dyadic

def suite_dyadic(b: Battery, rng, scale: int) -> None:
    n = 250 * scale
    ivs = dy.all_intervals(5 + scale // 2)
    bad = sum(1 for I, J in itertools.combinations(ivs, 2)
              if not (I.contains(J) or J.contains(I) or I.disjoint(J)))
    b.le("nesting_trichotomy", bad, 0)
    b.true("ancestor_count", all(len(I.ancestors()) == I.k + 1 for I in ivs))
    for k in range(4):
        part = dy.dyadic_partition(k)
        b.close(f"partition_measure/k={k}", sum(I.length for I in part), 1.0, 1e-15)

    m = 6
    basis = [dy.haar("h0", m).values] + [dy.haar(I, m).values for I in dy.all_intervals(m - 1)]
    gram = np.array(basis) @ np.array(basis).T / 2**m
    b.close("haar_orthonormal/m=6", gram, np.eye(len(basis)), 1e-12)
    b.le("haar_count/m=6", abs(len(basis) - 2**m), 0)

    for i in range(n):
        f = _step(rng, 10)
        e = dy.haar_analyze(f)
        b.close(f"parseval/{i}", e.energy(), dy.lp_norm(f, 2) ** 2, 1e-12)
        b.close(f"reconstruct/{i}", dy.haar_synthesize(e).values, f.values, 1e-12)
        b.le(f"coeff_count/{i}", abs(e.count() - 2**f.m), 0)
        if f.m >= 1:
            k = int(rng.integers(0, f.m))
            b.close(f"truncation_is_expectation/{i}", dy.haar_synthesize(e.truncate(k)).values,
                    dy.expectation(f, k).values, 1e-12)
        b.close(f"refine_coarsen/{i}", f.refine(f.m + 2).coarsen(f.m).values, f.values, 1e-14)

    for i in range(n // 5):
        f = _step(rng, 8)
        j, k = rng.integers(0, 9, size=2)
        b.close(f"tower/{i}", dy.expectation(dy.expectation(f, int(k)), int(j)).values,
                dy.expectation(f, int(min(j, k))).values, 1e-12)
        g, h = _step(rng, 6, nonneg=True), _step(rng, 6, nonneg=True)
        p = float(rng.uniform(1.05, 4.0))
        lhs, rhs = iq.holder_pair(g, h, p)
        b.le(f"holder/{i}", lhs, rhs, 1e-12)
        lhs, rhs = iq.minkowski_pair(g, h, p)
        b.le(f"minkowski/{i}", lhs, rhs, 1e-12)
        q = float(rng.uniform(0.1, 0.95))
        lhs, rhs = iq.subadditive_power_pair(g, h, q)
        b.le(f"power_subadditive/{i}", lhs, rhs, 1e-12)
        b.le(f"norm_monotone/{i}", dy.lp_norm(g, 1), dy.lp_norm(g, p), 1e-12)


# ---------------------------------------------------------------- inequalities

def suite_inequalities(b: Battery, rng, scale: int) -> None:
    n = 500 * scale
    for i in range(n):
        f = _step(rng, 6, cplx=False)
        p = float(rng.uniform(1.0, 5.0))
        b.le(f"jensen/{i}", 0.0, iq.jensen_gap(p, DyadicStepFn_abs(f)), 1e-12)
    for i in range(n // 10):
        xs = np.sort(rng.uniform(-3, 3, int(rng.integers(3, 12))))
        if np.any(np.diff(xs) <= 1e-6):
            continue
        coeffs = rng.uniform(0.1, 2.0, 3)
        phi = iq.SampledFunction.of(lambda x: coeffs[0] * x**2 + coeffs[1] * np.abs(x - coeffs[2]), xs)
        b.true(f"convex_certified/{i}", bool(iq.convexity_certificate(phi)))
        t = float(xs[int(rng.integers(0, len(xs)))])
        a = iq.support_line(phi, t)
        minor = phi(t) + a * (xs - t) - phi.values
        b.le(f"support_minorizes/{i}", float(np.max(minor)), 0.0, 1e-10)
    for i in range(n // 5):
        x, y = rng.standard_normal(5), rng.standard_normal(5)
        lhs, rhs = iq.clarkson_check(x, y, 2.0)
        b.rel(f"parallelogram/{i}", lhs, rhs, 1e-12)
        p = float(rng.uniform(1.1, 6.0))
        lhs, rhs = iq.clarkson_check(x, y, p)
        b.le(f"clarkson/{i}", lhs, rhs, 1e-12 * max(1.0, rhs))


def DyadicStepFn_abs(f: dy.DyadicStepFn) -> dy.DyadicStepFn:
    return dy.DyadicStepFn(f.m, np.abs(f.values))


# ---------------------------------------------------------------- linops

def _cmat(rng, r, c):
    return rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))


def _random_normal(rng, n):
    q, _ = np.linalg.qr(_cmat(rng, n, n))
    return q @ np.diag(_cmat(rng, n, 1).ravel()) @ q.conj().T


def suite_linops(b: Battery, rng, scale: int) -> None:
    n = 20 * scale
    for i in range(n):
        w = _cmat(rng, 4, 1).ravel()
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0, np.inf]))
        q = lo.conjugate_exponent(p)
        v = lo.dual_extremal(w, p)
        b.rel(f"dual_extremal/{i}", abs(np.sum(w * v)), lo.vector_pnorm(w, q) * lo.vector_pnorm(v, p), 1e-10)
        samples = _cmat(rng, 2000, 4)
        norms = np.array([lo.vector_pnorm(s, p) for s in samples])
        sampled = float(np.max(np.abs(samples @ w) / norms))
        b.le(f"dual_norm_sampled/{i}", sampled, lo.vector_pnorm(w, q), 1e-10)

    for i in range(n):
        a, u = _cmat(rng, 4, 4), _cmat(rng, 4, 4)
        for p in (1.0, 2.0, np.inf):
            na = lo.operator_norm(a, p, p).value
            nt = lo.operator_norm(a.conj().T, lo.conjugate_exponent(p), lo.conjugate_exponent(p)).value
            b.rel(f"transpose_norm/p={p}/{i}", na, nt, 1e-12)
            b.le(f"submultiplicative/p={p}/{i}", lo.operator_norm(u @ a, p, p).value,
                 lo.operator_norm(u, p, p).value * na, 1e-10 * na)
        x, y = lo.c_star_report(a)
        b.rel(f"c_star/{i}", x, y, 1e-9)
        t = _random_normal(rng, 4)
        nt = np.linalg.norm(t, 2)
        for l in range(1, 9):
            b.rel(f"normal_power/l={l}/{i}", np.linalg.norm(np.linalg.matrix_power(t, l), 2), nt**l, 1e-8)

    for i in range(50):
        a = rng.standard_normal((5, 5))
        g, e = lo.spectral_radius(a, 64)
        b.le(f"gelfand/{i}", abs(g - e), max(0.05 * e, 1e-6))
        b.le(f"radius_below_norm/{i}", e, np.linalg.norm(a, 2), 1e-12)

    for i in range(n):
        a = _cmat(rng, 4, 4)
        a *= 0.9 / np.linalg.norm(a, 2)
        inv = lo.neumann_inverse(a)
        b.close(f"neumann/{i}", (np.eye(4) - a) @ inv, np.eye(4), 1e-10)
        b.le(f"neumann_bound/{i}", np.linalg.norm(inv, 2), 1 / (1 - 0.9), 1e-9)

        m = _cmat(rng, 3, 4)
        u, w, s = lo.schmidt_decompose(m)
        b.close(f"schmidt/{i}", w @ u.conj().T, m, 1e-9)
        gram = w.conj().T @ w
        b.close(f"schmidt_orthogonal/{i}", gram - np.diag(np.diag(gram)), 0, 1e-9)
        hs, op = lo.hilbert_schmidt_norm(m), np.linalg.norm(m, 2)
        b.le(f"hs_lower/{i}", op, hs, 1e-12)
        b.le(f"hs_upper/{i}", hs, np.sqrt(3) * op, 1e-12)
        q, _ = np.linalg.qr(_cmat(rng, 3, 3))
        b.rel(f"hs_unitary/{i}", lo.hilbert_schmidt_norm(q @ m), hs, 1e-12)

        sub = lo.Subspace(4, _cmat(rng, 2, 4))
        pm = lo.orthogonal_projection(sub)
        b.close(f"projection_idempotent/{i}", pm @ pm, pm, 1e-12)
        b.close(f"projection_selfadjoint/{i}", pm, pm.conj().T, 1e-12)
        b.rel(f"projection_norm/{i}", np.linalg.norm(pm, 2), 1.0, 1e-12)

        h = _cmat(rng, 4, 4)
        h = h + h.conj().T
        ev, _ = lo.self_adjoint_report(h)
        b.le(f"selfadjoint_real_eig/{i}", ev, 0.0, 1e-10)
        pts = lo.numerical_range(h, 200, rng)
        lam = np.linalg.eigvalsh(h)
        b.le(f"numerical_range_real/{i}", float(np.max(np.abs(pts.imag))), 0.0, 1e-9)
        b.le(f"numerical_range_interval/{i}", float(np.max(pts.real)) - lam[-1], 0.0, 1e-9)
        b.le(f"numerical_range_interval_low/{i}", lam[0] - float(np.min(pts.real)), 0.0, 1e-9)

        nrm = _random_normal(rng, 3)
        basis = lo.simultaneous_diagonalize([nrm, nrm.conj().T, nrm @ nrm])
        b.close(f"simultaneous_unitary/{i}", basis.conj().T @ basis, np.eye(3), 1e-9)
        for k, mat in enumerate((nrm, nrm.conj().T)):
            d = basis.conj().T @ mat @ basis
            b.close(f"simultaneous_diagonal/{k}/{i}", d - np.diag(np.diag(d)), 0, 1e-8)

    for i in range(n // 2):
        sub = lo.Subspace(3, rng.standard_normal((1, 3)))
        v = rng.standard_normal(3)
        for p in (1.0, 2.0, 3.0, np.inf):
            b.le(f"quotient_below_norm/p={p}/{i}", lo.quotient_norm(sub, v, p), lo.vector_pnorm(v, p), 1e-9)
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0, np.inf]))
        sub = lo.Subspace(4, rng.standard_normal((2, 4)))
        mu_raw = rng.standard_normal(2)
        basis = sub.basis
        # normalise mu so that its norm on W is at most 1, estimated over many samples
        coefs = rng.standard_normal((4000, 2))
        vals = coefs @ mu_raw
        norms = np.array([lo.vector_pnorm(c @ basis, p) for c in coefs])
        mu = mu_raw / (np.max(np.abs(vals) / norms) * 1.02)
        lam = lo.hahn_banach_extend(sub, mu, p, rng=rng)
        b.close(f"hahn_banach_restriction/p={p}/{i}", basis @ lam, mu, 1e-8)
        b.le(f"hahn_banach_norm/p={p}/{i}", lo.vector_pnorm(lam, lo.conjugate_exponent(p)), 1.0, 1e-4)

    for i in range(n // 2):
        w = rng.standard_normal(3)
        p = float(rng.uniform(1.3, 4.0))
        x1 = lo.unit_ball_maximizer(w, p, rng)
        x2 = lo.unit_ball_maximizer(w, p, rng)
        b.close(f"strict_convexity_unique/{i}", x1, x2, 1e-5)
    # l1 and l-infinity balls: two distinct maximisers with equal value
    w = np.array([1.0, 1.0, 0.0])
    b.rel("l1_ball_tie", w @ np.array([1.0, 0, 0]), w @ np.array([0, 1.0, 0]), 0)
    w = np.array([1.0, 0.0])
    b.rel("linf_ball_tie", w @ np.array([1.0, 1.0]), w @ np.array([1.0, -1.0]), 0)

    for i in range(n // 2):
        gens = rng.standard_normal((5, 2))
        x = rng.standard_normal(2) * 4
        try:
            sep = lo.separate(lo.ConvexBody(gens), x)
        except ValueError:
            continue
        b.le(f"separate_generators/{i}", float(np.max(gens @ sep.functional)), sep.threshold, 1e-9)
        b.le(f"separate_point/{i}", sep.threshold, float(x @ sep.functional), -1e-12)
        cone = lo.ConvexBody(np.abs(rng.standard_normal((3, 3))), "cone")
        v = rng.standard_normal(3)
        res = lo.cone_dual_check(cone, v)
        if not res.inside:
            b.le(f"cone_functional_nonneg/{i}", -float(np.min(cone.generators @ res.functional)), 0.0, 1e-10)
            b.le(f"cone_functional_separates/{i}", float(v @ res.functional), 0.0, -1e-12)


# ---------------------------------------------------------------- hardy

def suite_hardy(b: Battery, rng, scale: int) -> None:
    n = 100 * scale
    for i in range(n):
        f = _step(rng, 8)
        mf = hd.maximal(f)
        absint = float(np.mean(np.abs(f.values)))
        for lam in np.geomspace(0.05, 3.0, 20) * max(absint, 1e-3):
            rep = hd.maximal_level_set(f, float(lam))
            meas = float(np.mean(mf.values > lam))
            b.close(f"level_set_union/{i}/{lam:.4g}", rep.measure, meas, 1e-15)
            b.le(f"weak_M/{i}/{lam:.4g}", rep.measure, rep.bound, 1e-12)
            b.le(f"weak_M_refined/{i}/{lam:.4g}", rep.measure, rep.refined_bound, 1e-12)
            ws = hd.weak_type_s_report(f, float(lam))
            b.le(f"weak_S/{i}/{lam:.4g}", *ws["square"], 1e-12)
            b.le(f"modified_weak_M/{i}/{lam:.4g}", *ws["modified_maximal"], 1e-12)
        for p in (1.5, 2.0, 3.0):
            lhs, rhs = hd.lp_maximal_report(f, p)
            b.le(f"lp_maximal/p={p}/{i}", lhs, rhs, 1e-10)
        b.rel(f"square_l2/{i}", np.mean(hd.square(f).values ** 2), np.mean(np.abs(f.values) ** 2), 1e-10)
        sf = hd.square(f).values
        for p in (1.0, 1.5):
            b.le(f"S_by_M/p={p}/{i}", np.mean(sf**p), hd.s_by_m_constant(p) * np.mean(mf.values**p), 1e-12)
            b.le(f"M_by_S/p={p}/{i}", np.mean(mf.values**p), hd.m_by_s_constant(p) * np.mean(sf**p), 1e-12)
        b.le(f"f_by_S_q4/{i}", np.mean(np.abs(f.values) ** 4), hd.f_by_s_constant_q4() * np.mean(sf**4), 1e-12)
        b.close(f"maximal_stable/{i}", hd.maximal(f, f.m + 2).values, mf.values, 0)
        b.close(f"square_stable/{i}", hd.square(f, f.m + 2).values, sf, 0)
        l = int(rng.integers(0, f.m + 1))
        b.close(f"maximal_cutoff/{i}", hd.maximal(f, l).values, hd.maximal(dy.expectation(f, l)).values, 1e-12)

    for i in range(n):
        f = _step(rng, 8)
        d = hd.p4_decomposition(f)
        b.rel(f"p4_identity/{i}", d["S4"], d["A"] + 2 * d["B"], 1e-9)
        b.le(f"p4_bound/{i}", d["S4"], d["bound"], 1e-10)
        g = _step(rng, 8)
        direct, mart, ss = hd.duality_pairing(f, g)
        b.close(f"duality_identity/{i}", direct, mart, 1e-10)
        b.le(f"duality_bound/{i}", abs(direct), ss, 1e-10)
        gabs = DyadicStepFn_abs(f)
        p = float(rng.uniform(0.3, 4.0))
        x, y = hd.distribution_integral(gabs, p)
        b.rel(f"distribution/{i}", x, y, 1e-12)
        lam = float(rng.uniform(0.1, 2.0)) * max(float(np.max(np.abs(f.values))), 1e-3)
        for name, (lhs, rhs) in hd.cz_m_checks(f, lam).items():
            b.le(f"cz_M/{name}/{i}", lhs, rhs)
        for name, (lhs, rhs) in hd.cz_s_checks(f, lam).items():
            b.le(f"cz_S/{name}/{i}", lhs, rhs)

    c = hd.vector_maximal_constant(1.5)
    for i in range(n // 2):
        l = int(rng.integers(1, 6))
        betas = [_step(rng, 7) for _ in range(l + 1)]
        lhs, rhs = hd.vector_expectation_report(betas, 1.5)
        b.le(f"vector_maximal/{i}", lhs, c * rhs, 1e-12)

    for i in range(n // 2):
        k = int(rng.integers(1, 12))
        lo_ = rng.uniform(0, 10, k)
        ivs = [(a, a + w) for a, w in zip(lo_, rng.uniform(0.1, 4, k))]
        pruned = hd.interval_prune(ivs)
        b.le(f"prune_coverage/{i}", hd.max_coverage(pruned), 2)
        probes = rng.uniform(-1, 15, 400)
        inside = lambda s: np.array([any(a <= x <= bb for a, bb in s) for x in probes])
        b.true(f"prune_union/{i}", bool(np.all(inside(ivs) == inside(pruned))))


# ---------------------------------------------------------------- probab

def suite_probab(b: Battery, rng, scale: int) -> None:
    n = 200 * scale
    c1, c4 = pb.khintchine_constant(1), pb.khintchine_constant(4)
    for i in range(n):
        k = int(rng.integers(1, 11))
        alpha = rng.standard_normal(k)
        r2 = pb.khintchine_report(alpha, 2)
        b.close(f"khintchine_p2/{i}", r2["ratio"], 1.0, 1e-12)
        r4 = pb.khintchine_report(alpha, 4)
        b.close(f"khintchine_pairing/{i}", r4["fourth_moment"], r4["pairing_formula"], 1e-10 * max(1, r4["pairing_formula"]))
        b.le(f"khintchine_p4_upper/{i}", r4["ratio"] ** 4, 3.0, 1e-12)
        b.le(f"khintchine_sandwich4/{i}", 1 / c4, r4["ratio"], 1e-12)
        b.le(f"khintchine_sandwich4_up/{i}", r4["ratio"], c4, 1e-12)
        r1 = pb.khintchine_report(alpha, 1)
        b.le(f"khintchine_sandwich1/{i}", 1 / c1, r1["ratio"], 1e-12)
        b.le(f"khintchine_sandwich1_up/{i}", r1["ratio"], c1, 1e-12)
    for i in range(n // 4):
        k = int(rng.integers(1, 7))
        c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        exact, bound = pb.lacunary_fourth(c)
        b.le(f"lacunary_bound/{i}", exact, bound, 1e-12)
        b.close(f"lacunary_quadrature/{i}", exact, pb.lacunary_quadrature(c), 1e-6)
    for i in range(n // 10):
        idx = list(rng.integers(1, 5, int(rng.integers(1, 6))))
        prod = dy.constant(1.0, 4)
        for j in idx:
            prod = prod * pb.rademacher(int(j), 4)
        b.close(f"rademacher_products/{i}", prod.integral(), pb.rademacher_product_integral(idx), 1e-15)

    groups = [pb.FiniteAbelianGroup.cyclic(k) for k in (1, 2, 3, 4, 6, 8)] + \
             [pb.FiniteAbelianGroup.signs(l) for l in (0, 1, 2, 3, 4)]
    for G in groups:
        tag = f"{G.kind}{G.size}"
        t = G.table()
        o = G.order
        assoc = all(t[t[g, h], k] == t[g, t[h, k]] for g in range(o) for h in range(o) for k in range(o))
        b.true(f"group_assoc/{tag}", assoc)
        b.true(f"group_identity/{tag}", bool(np.all(t[0] == np.arange(o))))
        b.true(f"group_inverse/{tag}", all(t[g, G.inv(g)] == 0 for g in range(o)))
        chars = np.array([c.values for c in pb.characters(G)])
        b.close(f"character_orthogonality/{tag}", chars @ chars.conj().T, o * np.eye(o), 1e-10)
        b.close(f"character_modulus/{tag}", np.abs(chars), 1.0, 1e-12)
        for i in range(3 * scale):
            a = rng.standard_normal(o) + 1j * rng.standard_normal(o)
            s = pb.group_convolution(G, a)
            b.close(f"conv_l1/{tag}/{i}", np.abs(s).sum(axis=0).max(), np.abs(a).sum(), 1e-10)
            b.rel(f"conv_l2/{tag}/{i}", pb.convolution_norm2(G, a), np.linalg.norm(s, 2), 1e-9)
            b.le(f"conv_l2_by_l1/{tag}/{i}", pb.convolution_norm2(G, a), np.abs(a).sum(), 1e-10)
            b.rel(f"conv_hs/{tag}/{i}", np.linalg.norm(s), np.sqrt(o) * np.linalg.norm(a), 1e-12)
    for l in range(1, 6):
        for mask in range(2**l):
            prod = dy.constant(1.0, l)
            for i in range(l):
                if mask >> i & 1:
                    prod = prod * pb.rademacher(i + 1, l)
            b.close(f"walsh_rademacher/l={l}/{mask}", pb.walsh_pullback(l, mask).values, prod.values, 0)

    for n_dim, p in ((2, 1.0), (3, 2.0), (5, 3.0)):
        r = pb.linear_moment_constants(n_dim, p, 50_000 * scale, rng)
        se = np.hypot(r["sphere_se"], r["rotated_se"])
        b.le(f"rotation_invariance/n={n_dim}/p={p}", abs(r["sphere"] - r["rotated"]), 3 * se)


# ---------------------------------------------------------------- interp

def suite_interp(b: Battery, rng, scale: int) -> None:
    n = 25 * scale
    pairs = [(1.0, 2.0), (2.0, np.inf), (1.0, np.inf)]
    for i in range(n):
        a = _cmat(rng, 4, 4)
        for p, q in pairs:
            for t in (0.25, 0.5, 0.75):
                rep = ip.riesz_convexity_report(a, p, q, t, budget=4, rng=rng)
                b.le(f"riesz/{p}-{q}/t={t}/{i}", rep["lhs"], rep["rhs"] * (1 + 1e-9))
        b.close(f"schur_m1/{i}", ip.mp_norm(a, 1).value, ip.brute_force_endpoint(a, 1), 1e-12)
        b.close(f"schur_minf/{i}", ip.mp_norm(a, np.inf).value, ip.brute_force_endpoint(a, np.inf), 1e-12)
        for p in (1.0, 2.0, np.inf):
            b.rel(f"mp_duality/p={p}/{i}", ip.mp_norm(a, p).value,
                  ip.mp_norm(a.conj().T, lo.conjugate_exponent(p)).value, 1e-12)
    for i in range(n):
        a = _cmat(rng, 3, 3)
        r = float(rng.uniform(1.2, 4.0))
        pair = ip.extremal_pair(a, r, budget=2, rng=rng)
        b.le(f"extremal_residual_mu/{i}", pair.residual_mu, 1e-6)
        b.le(f"extremal_residual_nu/{i}", pair.residual_nu, 1e-6)
        hist = np.asarray(pair.history)
        b.le(f"ascent_monotone/{i}", float(np.max(hist[:-1] - hist[1:], initial=0.0)), 0.0, 1e-12 * max(1.0, hist[-1]))
        b.rel(f"extremal_unit_x/{i}", lo.vector_pnorm(pair.x, r), 1.0, 1e-9)
        b.rel(f"extremal_unit_y/{i}", lo.vector_pnorm(pair.y, lo.conjugate_exponent(r)), 1.0, 1e-9)
    for i in range(n // 5):
        a = _cmat(rng, 4, 4)
        s = np.array([0, 0.25, 0.5, 0.75, 1.0])
        res = ip.midpoint_convexity_upgrade(s, ip.log_mp_profile(a, s, budget=4, rng=rng))
        b.true(f"log_mp_upgrade/{i}", res.ok)
    for i in range(n // 5):
        m = int(rng.integers(1, 5))
        mats = [ip.expectation_matrix(m, int(rng.integers(0, m + 1))),
                ip.haar_mask_matrix(m, rng.integers(0, 2, 2**m).astype(bool)),
                rng.standard_normal((2**m, 2**m))]
        for k, T in enumerate(mats):
            rep = ip.stepfn_operator_interp(T, 1.0, np.inf, float(rng.uniform(0.1, 0.9)), trials=30, rng=rng)
            b.le(f"stepfn_interp/{k}/{i}", rep["worst_ratio"], rep["bound"], 1e-12 * rep["bound"])
        f = _step(rng, 7)
        _, recon = ip.linearize_maximal(f)
        b.close(f"linearize_maximal/{i}", np.abs(recon.values), hd.maximal(f).values, 1e-12)
        _, recon = ip.linearize_square(f)
        b.close(f"linearize_square/{i}", recon.values, hd.square(f).values, 1e-12)


# ---------------------------------------------------------------- varmin

def suite_varmin(b: Battery, rng, scale: int) -> None:
    n = 100 * scale
    for i in range(n):
        dom = vm.random_domain(rng, 200)
        bv = {pt: float(rng.standard_normal()) for pt in dom.boundary}
        f2 = vm.minimize_vp(dom, bv, 2)
        a0 = vm.quadratic_form_matrix(dom)
        inner = [dom.index[pt] for pt in dom.interior]
        bvec = np.zeros(dom.size)
        for pt, v in bv.items():
            bvec[dom.index[pt]] = v
        # dense oracle: gradient of V_2^2 in the interior values vanishes
        rhs = np.array([-_polar_pair(dom, j, bvec) for j in inner])
        dense = np.linalg.solve(a0, rhs)
        b.close(f"p2_dense/{i}", f2.values[inner], dense, 1e-8)
        rep = vm.maximum_principle_report(dom, bv, 2, solution=f2)
        b.le(f"max_principle_p2/{i}", rep["max"], rep["hi"], 1e-8)
        b.le(f"min_principle_p2/{i}", rep["lo"], rep["min"], 1e-8)
        if i % 10 == 0:
            fp = vm.minimize_vp(dom, bv, 1.5, init=3 * rng.standard_normal(len(inner)))
            fq = vm.minimize_vp(dom, bv, 1.5, init=3 * rng.standard_normal(len(inner)))
            b.close(f"p1.5_unique/{i}", fp.values, fq.values, 1e-5)
            e_star = vm.vp_energy(fp, dom, 1.5)
            for k in range(5):
                g = fp.values.copy()
                g[inner] += 0.1 * rng.standard_normal(len(inner))
                b.le(f"p1.5_competitor/{i}/{k}", e_star, vm.vp_energy(g, dom, 1.5), 1e-9 * e_star)
            rep = vm.maximum_principle_report(dom, bv, 1.5, solution=fp)
            b.le(f"max_principle_p1.5/{i}", rep["max"], rep["hi"], 1e-8)
            b.le(f"min_principle_p1.5/{i}", rep["lo"], rep["min"], 1e-8)

    for i in range(n // 5):
        dom = vm.random_domain(rng, 120)
        f = vm.GridFn(dom, rng.standard_normal(dom.size))
        g = vm.GridFn(dom, rng.standard_normal(dom.size))
        c = float(rng.standard_normal())
        for p in (1.0, 1.5, 2.0, 3.0):
            vf, vg = vm.vp_seminorm(f, p), vm.vp_seminorm(g, p)
            b.le(f"vp_triangle/p={p}/{i}", vm.vp_seminorm(vm.GridFn(dom, f.values + g.values), p), vf + vg, 1e-10)
            b.rel(f"vp_homogeneous/p={p}/{i}", vm.vp_seminorm(vm.GridFn(dom, c * f.values), p), abs(c) * vf, 1e-10)
            for kind, param in (("floor", 0.0), ("cap", 0.5), ("disc", 0.7)):
                b.le(f"truncation_contracts/{kind}/p={p}/{i}", vm.vp_seminorm(vm.truncate(f, kind, param), p), vf, 1e-12)
        b.close(f"vp_constant/{i}", vm.vp_seminorm(vm.GridFn(dom, np.full(dom.size, c)), 2.0), 0.0, 1e-12)
        inner = [dom.index[pt] for pt in dom.interior]
        h = np.zeros(dom.size)
        h[inner] = rng.standard_normal(len(inner))
        b.rel(f"quadratic_form/{i}", h[inner] @ vm.quadratic_form_matrix(dom) @ h[inner],
              vm.vp_energy(h, dom, 2.0), 1e-10)
        touched = set(dom.edges.ravel().tolist())
        far = [k for k in range(dom.size) if k not in touched]
        if far:
            moved = f.values.copy()
            moved[far] += 5.0
            b.close(f"far_points_irrelevant/{i}", vm.vp_energy(moved, dom, 1.5), vm.vp_energy(f, dom, 1.5), 1e-12)
        b.le(f"interior_norm/{i}", vm.interior_norm_rank_deficiency(dom), 0)

    for i in range(n // 5):
        dom = vm.random_domain(rng, 60, n=1)
        bv = {pt: float(rng.standard_normal()) for pt in dom.boundary}
        f1 = vm.minimize_vp(dom, bv, 1)
        f2 = vm.minimize_vp(dom, bv, 1.001)
        e1 = vm.vp_energy(f1, dom, 1)
        b.le(f"p1_optimal/{i}", e1, vm.vp_energy(f2, dom, 1), 1e-9 * max(1, e1))
        t = float(rng.uniform())
        mix = t * f1.values + (1 - t) * f2.values
        b.le(f"p1_convex_combination/{i}", vm.vp_energy(mix, dom, 1),
             t * e1 + (1 - t) * vm.vp_energy(f2, dom, 1), 1e-9 * max(1, e1))
        seg = rng.standard_normal(int(rng.integers(3, 9)))
        if rng.integers(0, 2):
            seg = np.sort(seg)
        b.true(f"v1_monotone/{i}", vm.v1_monotone_check(seg)["agree"])

    for i in range(max(2, n // 25)):
        dom = vm.random_domain(rng, 80, n=2)
        bv = {pt: complex(np.exp(2j * np.pi * rng.uniform())) for pt in dom.boundary}
        f = vm.minimize_vp(dom, bv, 2)
        rep = vm.maximum_principle_report(dom, bv, 2, solution=f)
        b.le(f"complex_disc/{i}", rep["max_abs"], rep["radius"], 1e-8)
        b.le(f"complex_hull/{i}", rep["outside_hull"], 0)


def _polar_pair(dom: vm.GridDomain, j: int, bvec: np.ndarray) -> float:
    """``B(e_j, b)``: the mixed term of ``V_2^2`` between an interior unit vector and the
    boundary data, by polarisation."""
    e = np.zeros(dom.size)
    e[j] = 1.0
    q = lambda v: vm.vp_energy(v, dom, 2.0)
    return 0.5 * (q(e + bvec) - q(e) - q(bvec))


# ---------------------------------------------------------------- quasisym

def suite_quasisym(b: Battery, rng, scale: int) -> None:
    for r in (1 / 3, 0.5, 0.2, 0.7):
        prev = None
        for j in range(9):
            lev = qs.cantor_level(r, j)
            b.le(f"cantor_count/r={r:.3g}/j={j}", abs(len(lev) - 2**j), 0)
            b.close(f"cantor_length/r={r:.3g}/j={j}", lev[:, 1] - lev[:, 0], ((1 - r) / 2) ** j, 1e-14)
            b.true(f"cantor_disjoint/r={r:.3g}/j={j}", bool(np.all(lev[1:, 0] > lev[:-1, 1])))
            if prev is not None:
                par = np.repeat(prev, 2, axis=0)
                b.true(f"cantor_nested/r={r:.3g}/j={j}",
                       bool(np.all(lev[:, 0] >= par[:, 0] - 1e-15) and np.all(lev[:, 1] <= par[:, 1] + 1e-15)))
            prev = lev
    src, img = qs.h_map_endpoints(1 / 3, 0.5, 10)
    b.le("h_map_inversions", int(np.sum(np.diff(img) <= 0)), 0)
    b.close("h_map_fixes_ends", [img[0], img[-1]], [0.0, 1.0], 1e-15)
    s5, i5 = qs.h_map_endpoints(1 / 3, 0.5, 5)
    lefts = i5[0::2]
    sl = s5[0::2]
    second = (lefts[2:] - lefts[1:-1]) / (sl[2:] - sl[1:-1]) - (lefts[1:-1] - lefts[:-2]) / (sl[1:-1] - sl[:-2])
    b.le("h_map_not_affine", -float(np.min(np.abs(second))), 0.0, -1e-12)
    for l in range(5):
        b.true(f"two_fifths_sandwich/l={l}", qs.two_fifths_map(l).sandwich)

    samples = 100_000 * scale
    tab = qs.eta_empirical(src, img, samples, rng)
    b.true("h_map_eta_finite", bool(np.all(np.isfinite(tab.eta_hat))))
    b.le("h_map_eta_monotone", float(np.max(tab.eta_hat[:-1] - tab.eta_hat[1:], initial=0.0)), 0.0)
    b.le("eta_hat_below_eta", float(np.max(tab.eta_hat - tab.eta)), 0.0)
    b.le("h_map_admissible", float(tab.eta_hat[0]), 2 * float(tab.t_hi[0]))
    t1, L = qs.measure_step_constants(tab)
    C, a1, a2 = qs.power_envelope(t1, L)
    b.le("h_map_envelope_table", qs.envelope_dominates(tab, C, a1, a2)[1], 1.0)
    b.le("h_map_envelope_samples", qs.envelope_dominates_samples(tab, C, a1, a2)[1], 1.0)
    s_inv, alpha = qs.eta_inverse(tab.t_hi, tab.eta_hat, eps=1e-9)
    b.true("inverse_finite_increasing", bool(np.all(np.isfinite(alpha)) and np.all(np.diff(alpha) > 0)))

    x = np.sort(rng.uniform(0, 1, 50))
    ident = qs.eta_empirical(x, x, exhaustive=True)
    b.le("identity_within_bucket_low", float(np.max(ident.t_lo - ident.eta_hat)), 0.0, 1e-12)
    b.le("identity_within_bucket_high", float(np.max(ident.eta_hat - ident.t_hi)), 0.0, 1e-12)
    sim = qs.eta_empirical(x, 3.5 * x - 2.0, exhaustive=True)
    b.close("similarity_eta", sim.eta_hat, ident.eta_hat, 1e-10)
    s_id, a_id = qs.eta_inverse(ident.t_hi, ident.t_hi)
    b.close("identity_inverse", a_id, s_id, 1e-12)

    pts = rng.uniform(-1, 1, (60, 2))
    for bexp in (0.5, 2.0):
        f = qs.radial_map(bexp, pts)
        b.le(f"radial_injective/b={bexp}", 0, len(np.unique(f.round(14), axis=0)) - len(pts))
        tb = qs.eta_empirical(pts, f, 50_000 * scale, rng)
        b.true(f"radial_eta_finite/b={bexp}", bool(np.all(np.isfinite(tb.eta_hat))))
    samples = 50_000 * scale
    seed = int(rng.integers(2**31))
    f = qs.radial_map(2.0, pts)
    b.le("composition_radial", _composition_worst(pts, f, qs.radial_map(1.5, f), samples, seed), 1.0, 1e-12)
    sp = qs.spiral_map(0.7, f)
    b.le("composition_spiral", _composition_worst(pts, f, sp, samples, seed), 1.0, 1e-12)
    ts = qs.eta_empirical(pts, sp, samples, rng)
    b.true("spiral_eta_finite", bool(np.all(np.isfinite(ts.eta_hat))))


def _composition_worst(x, fx, gfx, samples: int, seed: int) -> float:
    """Largest ratio of the sampled modulus of ``g o f`` to ``eta_g(eta_f(t))``.

    All three tables use the same seed and point count, hence the same triples, which makes
    the bound exact with running-maximum envelopes."""
    ef = qs.eta_empirical(x, fx, samples, np.random.default_rng(seed))
    eg = qs.eta_empirical(fx, gfx, samples, np.random.default_rng(seed))
    egf = qs.eta_empirical(x, gfx, samples, np.random.default_rng(seed))
    worst = 0.0
    for t, val in zip(egf.t_hi, egf.eta):
        worst = max(worst, val / eg.upper_at(ef.upper_at(t * (1 - 1e-12))))
    return worst


RUNNERS = {
    "dyadic": suite_dyadic,
    "inequalities": suite_inequalities,
    "linops": suite_linops,
    "hardy": suite_hardy,
    "probab": suite_probab,
    "interp": suite_interp,
    "varmin": suite_varmin,
    "quasisym": suite_quasisym,
}


def run_suite(name: str, seed: int = 1, size: str = "small") -> list[SuiteReport]:
    """Runs one suite (or all of them, each with its own stream derived from ``seed``)."""
    if size not in SIZES:
        raise ValueError(f"unknown size {size!r}")
    names = SUITES if name == "all" else (name,)
    for nm in names:
        if nm not in RUNNERS:
            raise KeyError(nm)
    streams = np.random.SeedSequence(seed).spawn(len(SUITES))
    out = []
    for nm in names:
        rng = np.random.default_rng(streams[SUITES.index(nm)])
        rep = SuiteReport(nm, seed, size)
        start = time.perf_counter()
        RUNNERS[nm](Battery(rep), rng, SIZES[size])
        rep.wall_time = time.perf_counter() - start
        out.append(rep)
    return out
