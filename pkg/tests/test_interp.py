import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.dyadic import DyadicInterval, constant, indicator, random_step
from artifact.hardy import maximal, square
from artifact.interp import (
    BilinearForm,
    brute_force_endpoint,
    expectation_matrix,
    extremal_pair,
    haar_mask_matrix,
    interpolated_exponent,
    linearize_maximal,
    linearize_square,
    log_mp_profile,
    midpoint_convexity_upgrade,
    mp_norm,
    riesz_convexity_report,
    stepfn_operator_interp,
)
from artifact.linops import adjoint, conjugate_exponent, vector_pnorm

A = np.array([[1.0, -2.0], [3.0, 4.0]])
seeds = st.integers(0, 2**32 - 1)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_bilinear_form_is_bilinear(rng):
    a = crandn(rng, 3, 3)
    form = BilinearForm(a)
    x, x2, y, y2 = (crandn(rng, 3) for _ in range(4))
    c = 2 - 1j
    assert form(x + c * x2, y) == pytest.approx(form(x, y) + c * form(x2, y))
    assert form(x, y + c * y2) == pytest.approx(form(x, y) + c * form(x, y2))
    assert form(np.eye(3)[1], np.eye(3)[0]) == a[0, 1]


class TestMp:
    def test_examples(self):
        assert mp_norm(A, 1).value == 6 and mp_norm(A, 1).exact
        assert mp_norm(A, np.inf).value == 7
        for p in (1, 1.5, 2, 3, np.inf):
            assert mp_norm(np.eye(3), p).value == pytest.approx(1)
        assert mp_norm([[0, 2], [1, 0]], 2).value == pytest.approx(2)
        with pytest.raises(ValueError):
            mp_norm(A, 0.5)

    @given(seeds)
    def test_schur_formulas_match_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        a = crandn(rng, 4, 4)
        assert mp_norm(a, 1).value == pytest.approx(brute_force_endpoint(a, 1), rel=1e-14)
        assert mp_norm(a, np.inf).value == pytest.approx(brute_force_endpoint(a, np.inf), rel=1e-14)
        # real case: signed basis vectors and all sign vectors
        r = a.real
        assert mp_norm(r, 1).value == max(vector_pnorm(r @ (s * e), 1) for e in np.eye(4) for s in (-1, 1))
        signs = [np.array(v) for v in itertools.product([-1.0, 1.0], repeat=4)]
        assert mp_norm(r, np.inf).value == pytest.approx(max(vector_pnorm(r @ s, np.inf) for s in signs))

    @given(seeds, st.sampled_from([1.0, 2.0, np.inf]))
    def test_duality(self, seed, p):
        a = crandn(np.random.default_rng(seed), 3, 3)
        assert mp_norm(a, p).value == pytest.approx(mp_norm(adjoint(a), conjugate_exponent(p)).value, rel=1e-12)

    def test_zero_only_for_zero(self, rng):
        for p in (1, 2, np.inf):
            assert mp_norm(np.zeros((2, 2)), p).value == 0
        a = np.zeros((3, 3))
        a[1, 2] = 1e-3
        assert all(mp_norm(a, p).value > 0 for p in (1, 2, np.inf))


class TestExtremalPair:
    def test_examples(self):
        pair = extremal_pair(np.eye(3), 3)
        assert pair.value == pytest.approx(1) and pair.mu == pytest.approx(1)
        pair = extremal_pair(np.diag([2.0, 1.0]), 3)
        assert pair.mu == pytest.approx(2)
        assert np.allclose(np.abs(pair.x), [1, 0], atol=1e-6)
        with pytest.raises(ValueError):
            extremal_pair(np.zeros((2, 2)), 2)
        with pytest.raises(ValueError):
            extremal_pair(A, 1)

    @settings(max_examples=15, deadline=None)
    @given(seeds, st.sampled_from([1.5, 3.0]))
    def test_stationarity_and_monotone_ascent(self, seed, r):
        rng = np.random.default_rng(seed)
        a = crandn(rng, 3, 3)
        pair = extremal_pair(a, r, budget=3, rng=rng)
        assert vector_pnorm(pair.x, r) == pytest.approx(1)
        assert vector_pnorm(pair.y, conjugate_exponent(r)) == pytest.approx(1)
        assert abs(pair.y @ a @ pair.x) == pytest.approx(pair.value)
        assert pair.residual_mu <= 1e-6 and pair.residual_nu <= 1e-6
        h = np.array(pair.history)
        assert np.all(np.diff(h) >= -1e-12 * h[1:])


class TestRiesz:
    def test_examples(self):
        rep = riesz_convexity_report(np.eye(3), 1, np.inf, 0.3)
        assert rep["lhs"] == pytest.approx(1) and rep["rhs"] == pytest.approx(1)
        rep = riesz_convexity_report(A, 1, np.inf, 0.5)
        assert rep["r"] == 2 and rep["lhs"] == pytest.approx(np.linalg.norm(A, 2))
        assert rep["rhs"] == pytest.approx(42**0.5)
        with pytest.raises(ValueError):
            riesz_convexity_report(A, 2, 1, 0.5)
        with pytest.raises(ValueError):
            riesz_convexity_report(A, 1, 2, 1.0)

    def test_interpolated_exponent(self):
        assert interpolated_exponent(1, np.inf, 0.5) == 2
        assert interpolated_exponent(2, 4, 0.5) == pytest.approx(8 / 3)

    @settings(max_examples=10, deadline=None)
    @given(seeds, st.sampled_from([(1, 2), (2, np.inf), (1, np.inf)]), st.floats(0.05, 0.95))
    def test_convexity(self, seed, pq, t):
        rng = np.random.default_rng(seed)
        rep = riesz_convexity_report(crandn(rng, 4, 4), *pq, t, budget=2, rng=rng)
        assert rep["endpoints_exact"]
        assert rep["lhs"] <= rep["rhs"] * (1 + 1e-9)


class TestMidpointUpgrade:
    def test_examples(self, rng):
        xs = np.linspace(-1, 1, 21)
        assert midpoint_convexity_upgrade(xs, xs**2).ok
        s = np.array([0, 0.25, 0.5, 0.75, 1.0])
        prof = log_mp_profile(crandn(rng, 4, 4), s, budget=4, rng=rng)
        res = midpoint_convexity_upgrade(s, prof, tol=1e-9)
        assert res.hypothesis and res.convex
        concave = midpoint_convexity_upgrade(xs, -(xs**2))
        assert not concave.hypothesis and concave.witness is not None and concave.ok
        with pytest.raises(ValueError):
            midpoint_convexity_upgrade([0, 1], [0, 1])

    @given(st.lists(st.floats(-5, 5), min_size=3, max_size=12))
    def test_implication(self, ys):
        xs = np.arange(len(ys), dtype=float)
        assert midpoint_convexity_upgrade(xs, np.array(ys)).ok


class TestStepOperators:
    def test_expectation_matrix(self):
        for p, q in [(1, 2), (2, np.inf), (1, np.inf)]:
            rep = stepfn_operator_interp(expectation_matrix(4, 2), p, q, 0.5, trials=50)
            assert rep["N_p"] == pytest.approx(1) and rep["N_q"] == pytest.approx(1)
            assert rep["worst_ratio"] <= rep["bound"] * (1 + 1e-12)
        f = random_step(np.random.default_rng(1), 4)
        from artifact.dyadic import expectation
        assert np.allclose(expectation_matrix(4, 2) @ f.values, expectation(f, 2).values)

    def test_haar_truncation_and_random(self, rng):
        keep = np.zeros(16, dtype=bool)
        keep[:4] = True
        mat = haar_mask_matrix(4, keep)
        assert np.allclose(mat, expectation_matrix(4, 2), atol=1e-12)
        keep = rng.integers(0, 2, 16).astype(bool)
        for T in (haar_mask_matrix(4, keep), rng.standard_normal((16, 16))):
            rep = stepfn_operator_interp(T, 1, np.inf, 0.4, trials=100, rng=rng)
            assert rep["exact"] and rep["worst_ratio"] <= rep["bound"] * (1 + 1e-12)
        with pytest.raises(ValueError):
            stepfn_operator_interp(np.eye(3), 1, 2, 0.5)


class TestLinearization:
    def test_examples(self):
        q = indicator(DyadicInterval(2, 0), 2)
        alpha, recon = linearize_maximal(q)
        assert alpha.tolist() == [2, 1, 0, 0]
        assert recon.allclose(maximal(q), 0)
        alpha, _ = linearize_maximal(constant(3.0, 3))
        assert np.all(alpha == 0)

    @given(seeds, st.integers(0, 7), st.booleans())
    def test_reconstruction(self, seed, m, cplx):
        f = random_step(np.random.default_rng(seed), m, complex_valued=cplx)
        alpha, recon = linearize_maximal(f)
        assert np.allclose(np.abs(recon.values), maximal(f).values, rtol=0, atol=1e-13)
        c, s = linearize_square(f)
        assert np.allclose(np.sum(np.abs(c) ** 2, axis=0), 1)
        assert np.allclose(s.values, square(f).values, atol=1e-12)
