import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from artifact.varmin import (
    GridDomain,
    GridFn,
    box_domain,
    interior_norm_rank_deficiency,
    maximum_principle_report,
    minimize_vp,
    quadratic_form_matrix,
    random_domain,
    truncate,
    v1_monotone_check,
    vp_energy,
    vp_seminorm,
)

SEG = GridDomain(1, [(0,), (1,), (2,)])
seeds = st.integers(0, 2**32 - 1)


def direct_energy(domain, values, p):
    """Double sum over interior points and their neighbours, written out point by point."""
    total = 0.0
    for x in domain.interior:
        fx = values[domain.index[x]]
        for i in range(domain.n):
            for s in (-1, 1):
                y = list(x)
                y[i] += s
                total += abs(fx - values[domain.index[tuple(y)]]) ** p
    return total


def boundary_data(domain, rng, cplx=False):
    vals = rng.standard_normal(len(domain.boundary))
    if cplx:
        vals = vals + 1j * rng.standard_normal(len(domain.boundary))
    return dict(zip(domain.boundary, vals))


class TestDomain:
    def test_interior_and_boundary(self):
        assert SEG.interior == ((1,),) and SEG.boundary == ((0,), (2,))
        box = box_domain((3, 3))
        assert box.interior == ((1, 1),) and len(box.boundary) == 8
        with pytest.raises(ValueError):
            GridDomain(1, [(0,), (1,)])
        with pytest.raises(ValueError):
            GridDomain(2, [(0,)])

    @given(seeds)
    def test_random_domain_partition(self, seed):
        d = random_domain(np.random.default_rng(seed))
        assert d.size <= 200 and d.interior
        assert set(d.interior) | set(d.boundary) == set(d.points)
        assert not set(d.interior) & set(d.boundary)


class TestSeminorm:
    def test_examples(self):
        f = GridFn(SEG, [0.0, 1.0, 2.0])
        assert vp_seminorm(f, 1) == 2
        assert vp_seminorm(f, 2) == pytest.approx(2**0.5)
        assert vp_seminorm(GridFn(SEG, [3.0, 3.0, 3.0]), 1.5) == 0
        with pytest.raises(ValueError):
            vp_seminorm(f, 0.5)

    @settings(max_examples=40)
    @given(seeds, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
    def test_seminorm_axioms(self, seed, p):
        rng = np.random.default_rng(seed)
        d = random_domain(rng, 80)
        f = GridFn(d, rng.standard_normal(d.size) + 1j * rng.standard_normal(d.size))
        g = GridFn(d, rng.standard_normal(d.size))
        assert vp_energy(f, d, p) == pytest.approx(direct_energy(d, f.values, p), rel=1e-12)
        c = complex(*rng.standard_normal(2))
        assert vp_seminorm(GridFn(d, c * f.values), p) == pytest.approx(abs(c) * vp_seminorm(f, p), rel=1e-10)
        fg = GridFn(d, f.values + g.values)
        assert vp_seminorm(fg, p) <= vp_seminorm(f, p) + vp_seminorm(g, p) + 1e-10
        diff = GridFn(d, f.values - g.values)
        assert abs(vp_seminorm(f, p) - vp_seminorm(g, p)) <= vp_seminorm(diff, p) + 1e-10

    @given(seeds)
    def test_points_away_from_interior_do_not_matter(self, seed):
        rng = np.random.default_rng(seed)
        d = random_domain(rng, 120)
        near = {q for x in d.interior for q in d.points if sum(abs(a - b) for a, b in zip(q, x)) <= 1}
        far = [d.index[q] for q in d.points if q not in near]
        v = rng.standard_normal(d.size)
        w = v.copy()
        w[far] += rng.standard_normal(len(far)) * 100
        assert vp_energy(v, d, 1.5) == vp_energy(w, d, 1.5)


class TestQuadraticForm:
    def test_examples(self):
        assert quadratic_form_matrix(SEG).tolist() == [[2.0]]
        assert quadratic_form_matrix(box_domain((3, 3))).tolist() == [[4.0]]

    @settings(max_examples=30)
    @given(seeds)
    def test_matches_polarization_oracle(self, seed):
        rng = np.random.default_rng(seed)
        d = random_domain(rng, 60)
        a0 = quadratic_form_matrix(d)
        inner = [d.index[x] for x in d.interior]
        k = len(inner)

        def energy_of(u):
            v = np.zeros(d.size)
            v[inner] = u
            return direct_energy(d, v, 2)

        eye = np.eye(k)
        for i in range(min(k, 6)):
            for j in range(min(k, 6)):
                polar = (energy_of(eye[i] + eye[j]) - energy_of(eye[i] - eye[j])) / 4
                assert a0[i, j] == pytest.approx(polar, abs=1e-12)
        u = rng.standard_normal(k)
        assert u @ a0 @ u == pytest.approx(energy_of(u), rel=1e-10)
        assert np.allclose(a0, a0.T)
        assert np.min(np.linalg.eigvalsh(a0)) >= -1e-10
        assert energy_of(np.zeros(k)) == 0

    @given(seeds)
    def test_norm_on_interior_supported_functions(self, seed):
        # boxes are edge-connected: the only interior-supported f with V_p(f) = 0 is 0
        rng = np.random.default_rng(seed)
        shape = rng.integers(3, 7, size=int(rng.integers(1, 4)))
        assert interior_norm_rank_deficiency(box_domain(shape)) == 0


class TestMinimize:
    def test_examples(self):
        f = minimize_vp(SEG, {(0,): 0.0, (2,): 2.0}, 2)
        assert f.at((1,)) == pytest.approx(1) and vp_seminorm(f, 2) == pytest.approx(2**0.5)
        d = box_domain((4, 5))
        for p in (1, 1.5, 2, 3):
            f = minimize_vp(d, {b: 0.7 for b in d.boundary}, p)
            assert np.allclose(f.values, 0.7, atol=1e-6) and vp_seminorm(f, p) < 1e-5
        f = minimize_vp(SEG, {(0,): 0.0, (2,): 2.0}, 1)
        assert 0 <= f.at((1,)) <= 2 and vp_seminorm(f, 1) == pytest.approx(2)
        with pytest.raises(ValueError):
            minimize_vp(SEG, {(0,): 0.0}, 2)
        with pytest.raises(ValueError):
            minimize_vp(SEG, {(0,): 0.0, (2,): 2.0}, 0.5)

    @settings(max_examples=20, deadline=None)
    @given(seeds, st.booleans())
    def test_p2_matches_dense_solve(self, seed, cplx):
        rng = np.random.default_rng(seed)
        d = random_domain(rng)
        b = boundary_data(d, rng, cplx)
        f = minimize_vp(d, b, 2)
        # dense oracle: gradient of the energy in the interior variables vanishes
        inner = [d.index[x] for x in d.interior]
        v0 = np.zeros(d.size, dtype=complex)
        for x, val in b.items():
            v0[d.index[x]] = val
        a0 = quadratic_form_matrix(d)
        k = len(inner)
        # linear term of the energy in the interior variables, by symmetric differences
        lin = np.zeros(k, dtype=complex)
        for i in range(k):
            for unit in (1, 1j):
                e = np.zeros(d.size, dtype=complex)
                e[inner[i]] = unit
                lin[i] += unit * (direct_energy(d, v0 + e, 2) - direct_energy(d, v0 - e, 2)) / 4
        sol = np.linalg.solve(a0, -lin)
        assert np.max(np.abs(f.values[inner] - sol)) <= 1e-8
        assert all(f.at(x) == pytest.approx(val) for x, val in b.items())
        for _ in range(20):
            g = f.values.copy()
            g[inner] += rng.standard_normal(k) * 0.1
            assert vp_energy(f, d, 2) <= vp_energy(g, d, 2) + 1e-10

    @settings(max_examples=10, deadline=None)
    @given(seeds, st.sampled_from([1.5, 3.0]))
    def test_general_p_optimal_and_unique(self, seed, p):
        rng = np.random.default_rng(seed)
        d = random_domain(rng, 60)
        b = boundary_data(d, rng)
        inner = [d.index[x] for x in d.interior]
        f1 = minimize_vp(d, b, p, init=rng.standard_normal(len(inner)))
        f2 = minimize_vp(d, b, p, init=rng.standard_normal(len(inner)) * 3)
        assert np.max(np.abs(f1.values - f2.values)) <= 1e-5
        base = f1.values.copy()

        def energy(u):
            v = base.copy()
            v[inner] = u
            return vp_energy(v, d, p)

        oracle = optimize.minimize(energy, np.zeros(len(inner)), method="L-BFGS-B",
                                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 5000})
        assert vp_energy(f1, d, p) <= oracle.fun * (1 + 1e-7) + 1e-12
        for _ in range(100):
            g = base.copy()
            g[inner] += rng.standard_normal(len(inner)) * rng.choice([1e-3, 1e-1, 1])
            assert vp_energy(f1, d, p) <= vp_energy(g, d, p) * (1 + 1e-9)

    @settings(max_examples=15, deadline=None)
    @given(seeds, st.integers(3, 30))
    def test_p1_segment_value(self, seed, n):
        rng = np.random.default_rng(seed)
        d = GridDomain(1, [(i,) for i in range(n)])
        a, b = rng.standard_normal(2)
        f = minimize_vp(d, {(0,): a, (n - 1,): b}, 1)
        # every interior path crosses at least one weight-1 edge: the optimum is |b - a|
        assert vp_energy(f, d, 1) == pytest.approx(abs(b - a), rel=1e-9, abs=1e-12)

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_p1_minimizers_form_convex_set(self, seed):
        rng = np.random.default_rng(seed)
        d = random_domain(rng, 60, n=2)
        b = boundary_data(d, rng)
        f1 = minimize_vp(d, b, 1)
        inner = [d.index[x] for x in d.interior]
        opt = vp_energy(f1, d, 1)
        # a second minimizer: the p = 1 solution from the data flattened to the first one's range
        f2 = truncate(f1, "cap", float(np.max(list(b.values()))))
        assert vp_energy(f2, d, 1) <= opt + 1e-9
        for t in np.linspace(0, 1, 6):
            mix = t * f1.values + (1 - t) * f2.values
            assert vp_energy(mix, d, 1) == pytest.approx(opt, rel=1e-9, abs=1e-12)
        for _ in range(100):
            g = f1.values.copy()
            g[inner] += rng.standard_normal(len(inner)) * 0.1
            assert opt <= vp_energy(g, d, 1) + 1e-9

    def test_p1_complex_rejected(self):
        with pytest.raises(ValueError):
            minimize_vp(SEG, {(0,): 1j, (2,): 0.0}, 1)


class TestTruncation:
    def test_examples(self):
        f = GridFn(SEG, [-1.0, 2.0, 0.5])
        assert truncate(f, "floor", 0).values.tolist() == [0, 2, 0.5]
        assert truncate(f, "cap", 1).values.tolist() == [-1, 1, 0.5]
        z = GridFn(SEG, [2.0 + 0j, 0.5j, -3.0])
        assert truncate(z, "disc", 1).values == pytest.approx([1, 0.5j, -1])
        h = truncate(GridFn(SEG, [2 + 1j, 0j, 1 + 5j]), "halfplane", (1, 1))
        assert h.values == pytest.approx([1 + 1j, 0, 1 + 5j])
        for kind, param in [("disc", 0), ("halfplane", (0, 1)), ("spin", 1)]:
            with pytest.raises(ValueError):
                truncate(z, kind, param)
        with pytest.raises(ValueError):
            truncate(z, "floor", 0)

    @settings(max_examples=40)
    @given(seeds, st.sampled_from([1.0, 1.5, 2.0, 4.0]))
    def test_contractions(self, seed, p):
        rng = np.random.default_rng(seed)
        d = random_domain(rng, 80)
        real = GridFn(d, rng.standard_normal(d.size) * 2)
        cplx = GridFn(d, rng.standard_normal(d.size) + 1j * rng.standard_normal(d.size))
        cases = [(real, "floor", 0.1), (real, "cap", -0.2), (cplx, "disc", 0.7),
                 (cplx, "halfplane", (complex(*rng.standard_normal(2)), 0.3))]
        for f, kind, param in cases:
            g = truncate(f, kind, param)
            assert vp_seminorm(g, p) <= vp_seminorm(f, p) * (1 + 1e-12) + 1e-12
            i, j = rng.integers(0, d.size, 2)
            assert abs(g.values[i] - g.values[j]) <= abs(f.values[i] - f.values[j]) + 1e-12


class TestMaximumPrinciple:
    def test_examples(self, rng):
        d = box_domain((5, 5))
        b = {x: float(rng.uniform(0, 2)) for x in d.boundary}
        rep = maximum_principle_report(d, b, 2)
        assert rep["ok"] and 0 <= rep["min"] and rep["max"] <= 2
        rep = maximum_principle_report(d, {x: 1.25 for x in d.boundary}, 1.5)
        assert rep["ok"] and rep["min"] == pytest.approx(1.25) and rep["max"] == pytest.approx(1.25)
        phases = {x: np.exp(2j * np.pi * rng.uniform()) for x in d.boundary}
        rep = maximum_principle_report(d, phases, 2)
        assert rep["ok"] and rep["max_abs"] <= 1 + 1e-8

    @settings(max_examples=15, deadline=None)
    @given(seeds, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
    def test_random(self, seed, p):
        rng = np.random.default_rng(seed)
        d = random_domain(rng, 100)
        assert maximum_principle_report(d, boundary_data(d, rng), p)["ok"]


class TestV1Monotone:
    def test_examples(self):
        r = v1_monotone_check([0, 1, 2])
        assert r["equality"] and r["monotone"] and r["v1"] == 2
        r = v1_monotone_check([0, 2, 1])
        assert not r["equality"] and not r["monotone"] and r["v1"] == 3 and r["endpoint_gap"] == 1
        assert v1_monotone_check([4, 4, 4, 4])["monotone"]
        with pytest.raises(ValueError):
            v1_monotone_check([1, 2])

    @given(st.lists(st.integers(-5, 5), min_size=3, max_size=12))
    def test_equivalence(self, vals):
        r = v1_monotone_check(vals)
        assert r["agree"]
        assert r["v1"] >= r["endpoint_gap"] - 1e-12
