from fractions import Fraction
from math import log, log2

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.quasisym import (
    MAX_DEPTH,
    CantorSystem,
    PointAddress,
    cantor_level,
    endpoints,
    envelope,
    envelope_dominates,
    envelope_dominates_samples,
    eta_empirical,
    eta_inverse,
    h_map,
    h_map_endpoints,
    measure_step_constants,
    point_of_address,
    power_envelope,
    radial_map,
    spiral_map,
    two_fifths_map,
)

THIRD = 1 / 3
bits = st.text(alphabet="01", max_size=12)


def exact_left(r: Fraction, address: str) -> Fraction:
    a, length = Fraction(0), Fraction(1)
    for b in address:
        child = length * (1 - r) / 2
        if b == "1":
            a += length - child
        length = child
    return a


class TestCantor:
    def test_examples(self):
        assert np.allclose(cantor_level(THIRD, 1), [[0, 1 / 3], [2 / 3, 1]])
        assert np.allclose(cantor_level(0.5, 1), [[0, 0.25], [0.75, 1]])
        assert cantor_level(0.3, 0).tolist() == [[0, 1]]
        for bad in (0, 1, -0.2):
            with pytest.raises(ValueError):
                cantor_level(bad, 1)

    @given(st.floats(0.05, 0.95), st.integers(0, 9))
    def test_structure(self, r, j):
        lev = cantor_level(r, j)
        assert lev.shape == (2**j, 2)
        assert np.allclose(lev[:, 1] - lev[:, 0], ((1 - r) / 2) ** j)
        assert np.all(lev[1:, 0] > lev[:-1, 1])
        if j:
            parent = cantor_level(r, j - 1)
            assert np.allclose(lev[0::2, 0], parent[:, 0]) and np.allclose(lev[1::2, 1], parent[:, 1])

    def test_middle_thirds_ternary_digits(self):
        # left endpoints of K(1/3) are exactly the ternary numbers with digits 0 and 2
        lev = cantor_level(THIRD, 6)
        want = sorted(sum(d * 3.0 ** -(i + 1) for i, d in enumerate(ds))
                      for ds in np.array(np.meshgrid(*[[0, 2]] * 6)).T.reshape(-1, 6))
        assert np.allclose(lev[:, 0], want, atol=1e-15)

    def test_address_examples(self):
        assert point_of_address(THIRD, "") == 0
        assert point_of_address(THIRD, "1") == pytest.approx(2 / 3)
        assert point_of_address(0.5, "01") == pytest.approx(3 / 16)
        with pytest.raises(ValueError):
            point_of_address(CantorSystem(THIRD, 2), "010")
        with pytest.raises(ValueError):
            PointAddress("012")
        with pytest.raises(ValueError):
            PointAddress("0" * (MAX_DEPTH + 1))
        with pytest.raises(ValueError):
            CantorSystem(0.5, MAX_DEPTH + 1)

    @given(st.fractions(Fraction(1, 20), Fraction(19, 20)), bits)
    def test_address_matches_exact_arithmetic(self, r, address):
        got = point_of_address(float(r), address)
        assert got == pytest.approx(float(exact_left(r, address)), abs=1e-14)
        right = point_of_address(float(r), address, "right")
        assert right - got == pytest.approx(float(((1 - r) / 2) ** len(address)), abs=1e-14)

    @given(st.floats(0.05, 0.95), st.integers(0, 10))
    def test_endpoints_in_each_level(self, r, depth):
        pts = endpoints(r, depth)
        for j in range(depth + 1):
            lev = cantor_level(r, j)
            idx = np.searchsorted(lev[:, 0], pts + 1e-12, side="right") - 1
            assert np.all(pts <= lev[idx, 1] + 1e-12)


class TestHMap:
    def test_examples(self):
        assert h_map(THIRD, 0.5, "0", "right") == pytest.approx((1 / 3, 1 / 4))
        assert h_map(THIRD, 0.5, "1") == pytest.approx((2 / 3, 3 / 4))
        assert h_map(THIRD, 0.5, "") == (0, 0)
        assert h_map(THIRD, 0.5, "", "right") == (1, 1)
        src, img = h_map_endpoints(0.4, 0.4, 6)
        assert np.array_equal(src, img)

    def test_order_preserving_depth10(self):
        src, img = h_map_endpoints(THIRD, 0.5, 10)
        assert np.all(np.diff(src) > 0) and np.all(np.diff(img) > 0)
        assert len(np.unique(img)) == len(img)

    @given(bits, st.sampled_from("01"))
    def test_refinement_compatible(self, address, extra):
        # the left end of the ...0 child is the parent's left end, and ...1 shares the right end
        end = "left" if extra == "0" else "right"
        assert h_map(THIRD, 0.5, address + extra, end) == pytest.approx(h_map(THIRD, 0.5, address, end))

    def test_not_affine(self):
        src, img = h_map_endpoints(THIRD, 0.5, 5)
        for i in range(len(src) - 2):
            slope1 = (img[i + 1] - img[i]) / (src[i + 1] - src[i])
            slope2 = (img[i + 2] - img[i + 1]) / (src[i + 2] - src[i + 1])
            assert abs(slope1 - slope2) > 1e-9


class TestTwoFifths:
    def test_level_one(self):
        tf = two_fifths_map(1)
        assert np.allclose(tf.hat, [[0, 1 / 3], [2 / 3, 7 / 9], [8 / 9, 1]])
        assert np.allclose(tf.fifths, [[0, 0.2], [0.4, 0.6], [0.8, 1]])
        assert tf.sandwich

    def test_level_zero_and_three(self):
        tf = two_fifths_map(0)
        assert tf.hat.tolist() == [[0, 1]] == tf.fifths.tolist()
        tf = two_fifths_map(3)
        assert tf.sandwich and len(tf.fifths) == 27
        assert np.allclose(tf.fifths[:, 1] - tf.fifths[:, 0], 5.0**-3)
        assert np.all(np.diff(tf.source) >= 0) and np.all(np.diff(tf.target) >= 0)
        with pytest.raises(ValueError):
            two_fifths_map(-1)


class TestModulus:
    def test_identity_and_similarity(self, rng):
        x = np.sort(rng.uniform(0, 1, 50))
        for target in (x, 3.5 * x - 2):
            tab = eta_empirical(x, target, exhaustive=True)
            assert np.all(tab.t_lo * (1 - 1e-12) <= tab.eta_hat)
            assert np.all(tab.eta_hat <= tab.t_hi * (1 + 1e-12))
            assert np.all(np.diff(tab.eta_hat) >= 0)

    def test_rejects(self):
        with pytest.raises(ValueError):
            eta_empirical([0, 1], [0, 1])
        with pytest.raises(ValueError):
            eta_empirical([0, 1, 1], [0, 1, 2])
        with pytest.raises(ValueError):
            eta_empirical([0, 1, 2], [0, 1, 1], exhaustive=True)

    @given(st.integers(0, 2**32 - 1))
    def test_regularisation(self, seed):
        rng = np.random.default_rng(seed)
        x = np.sort(rng.uniform(-2, 2, 30))
        tab = eta_empirical(x, x**3 + x, triple_samples=5000, rng=rng)
        assert np.all(tab.eta_hat <= tab.eta) and np.all(np.diff(tab.eta_hat) >= 0)
        assert np.all(np.isfinite(tab.eta_hat))
        # brute-force regularisation
        want = [min(tab.eta[i:]) for i in range(len(tab.eta))]
        assert np.array_equal(tab.eta_hat, want)
        # every sampled ratio is below the running max of its bucket
        for t, r in zip(tab.sample_t[::97], tab.sample_ratio[::97]):
            assert r <= tab.upper_at(t)

    def test_cantor_map_table(self):
        src, img = h_map_endpoints(THIRD, 0.5, 10)
        tab = eta_empirical(src, img, 200_000, np.random.default_rng(3))
        assert np.all(np.isfinite(tab.eta_hat)) and np.all(np.diff(tab.eta_hat) >= 0)
        # admissible: smallest bucket stays within twice the identity baseline
        assert tab.eta_hat[0] <= 2 * tab.t_hi[0]
        t1, L = measure_step_constants(tab)
        C, a1, a2 = power_envelope(t1, L)
        assert envelope_dominates(tab, C, a1, a2)[0]
        assert envelope_dominates_samples(tab, C, a1, a2)[0]

    def test_composition(self):
        seed = 11
        x, fx = h_map_endpoints(THIRD, 0.5, 8)
        _, gfx = h_map_endpoints(THIRD, 0.25, 8)
        tf = eta_empirical(x, fx, 50_000, np.random.default_rng(seed))
        tg = eta_empirical(fx, gfx, 50_000, np.random.default_rng(seed))
        tgf = eta_empirical(x, gfx, 50_000, np.random.default_rng(seed))
        # identical triples: the image ratio of f is the source ratio seen by g
        assert len(tgf.sample_t) == len(tf.sample_t)
        for t, r in zip(tgf.sample_t[::53], tgf.sample_ratio[::53]):
            assert r <= tg.upper_at(tf.upper_at(t)) * (1 + 1e-12)

    def test_inverse_examples(self):
        t = np.array([0.1, 0.5, 1.0, 2.0])
        s, alpha = eta_inverse(t, t)
        assert np.allclose(s, alpha)
        s, alpha = eta_inverse(t, 4 * t)
        assert np.allclose(alpha, 4 * s)
        with pytest.raises(ValueError):
            eta_inverse(t, [1, 1, 2, 3])
        s, alpha = eta_inverse(t, [1, 1, 2, 3], eps=1e-3)
        assert np.all(np.diff(alpha) > 0)

    def test_inverse_of_cantor_table(self):
        src, img = h_map_endpoints(THIRD, 0.5, 8)
        tab = eta_empirical(src, img, 50_000, np.random.default_rng(5))
        s, alpha = eta_inverse(tab.t_hi, tab.eta_hat, eps=1e-9)
        assert np.all(np.isfinite(alpha)) and np.all(np.diff(alpha) > 0)
        assert alpha[0] < 1 and s[0] > 0
        # exact at the nodes: alpha(1 / theta(t_i)) = 1 / t_i
        theta = tab.eta_hat + 1e-9 * tab.t_hi
        assert np.allclose(1 / s[::-1], theta) and np.allclose(1 / alpha[::-1], tab.t_hi)


class TestEnvelope:
    def test_examples(self):
        assert power_envelope(0.5, 2) == pytest.approx((2, 1, 1))
        assert power_envelope(0.25, 3) == pytest.approx((3, 0.5, log2(3)))
        assert power_envelope(0.5, 4) == pytest.approx((4, 1, 2))
        assert isinstance(power_envelope(0.5, 3)[0], float)
        with pytest.raises(ValueError):
            power_envelope(1.5, 2)
        with pytest.raises(ValueError):
            power_envelope(0.5, 0.5)

    @given(st.floats(0.01, 0.99), st.floats(1, 50), st.integers(0, 12))
    def test_dominates_iterated_steps(self, t1, L, k):
        C, a1, a2 = power_envelope(t1, L)
        assert envelope(t1**k, C, a1, a2) >= 2.0**-k * (1 - 1e-9)
        assert envelope(2.0**k, C, a1, a2) >= L**k * (1 - 1e-9)
        assert a1 == pytest.approx(log(2) / log(1 / t1))


class TestMapsOfRn:
    def test_radial_examples(self, rng):
        x = rng.standard_normal((5, 3))
        assert np.allclose(radial_map(1, x), x)
        assert np.allclose(radial_map(2, [3.0, 4.0]), [15, 20])
        assert radial_map(0.5, 4.0) == pytest.approx(2)
        assert np.array_equal(radial_map(0.7, np.zeros(2)), [0, 0])
        with pytest.raises(ValueError):
            radial_map(0, x)

    @pytest.mark.parametrize("b", [0.5, 2.0])
    def test_radial_quasisymmetric_samples(self, b, rng):
        x = rng.standard_normal((300, 2))
        fx = radial_map(b, x)
        assert len(np.unique(fx.round(14), axis=0)) == 300
        tab = eta_empirical(x, fx, 100_000, rng)
        assert np.all(np.isfinite(tab.eta_hat)) and np.all(np.diff(tab.eta_hat) >= 0)
        assert tab.eta_hat[0] < 1

    def test_spiral_is_bilipschitz_on_annulus(self, rng):
        r = rng.uniform(1, 2, 400)
        th = rng.uniform(0, 2 * np.pi, 400)
        x = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
        fx = spiral_map(0.7, x)
        assert np.allclose(np.linalg.norm(fx, axis=1), r)
        d0 = np.linalg.norm(x[:, None] - x[None], axis=-1)
        d1 = np.linalg.norm(fx[:, None] - fx[None], axis=-1)
        mask = d0 > 0
        ratio = d1[mask] / d0[mask]
        assert ratio.max() / ratio.min() < 10
