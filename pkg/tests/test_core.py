import numpy as np
import pytest

from owlreg import (
    WeightVector,
    min_gap,
    oscar_weights,
    owl_norm,
    pigou_dalton_transfer,
    prox_owl,
    slope_weights,
)
from oracles import owl_norm_direct, prox_reference, std_normal_quantile_mp


def random_weights(rng, p, allow_zero_tail=True):
    w = np.sort(rng.uniform(0.0 if allow_zero_tail else 0.05, 2.0, size=p))[::-1].copy()
    w[0] = max(w[0], 1e-3)
    return WeightVector(w)


class TestOwlNorm:
    def test_zero_vector(self):
        assert owl_norm([0.0, 0.0, 0.0], WeightVector([3.0, 2.0, 1.0])) == 0.0

    def test_sorted_magnitudes(self):
        # |x| sorted is (3, 2, 1); dot with (3, 2, 1) gives 14
        assert owl_norm([-3.0, 1.0, 2.0], WeightVector([3.0, 2.0, 1.0])) == 14.0

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.3])
    def test_uniform_weights_reduce_to_l1(self, c):
        assert owl_norm([5.0, -7.0], WeightVector([c, c])) == pytest.approx(12.0 * c, rel=1e-14)

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.3])
    def test_top_weight_only_reduces_to_linf(self, c):
        assert owl_norm([5.0, -7.0], WeightVector([c, 0.0])) == pytest.approx(7.0 * c, rel=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            owl_norm([1.0, 2.0], WeightVector([1.0, 0.5, 0.25]))

    def test_norm_axioms(self):
        rng = np.random.default_rng(101)
        for _ in range(500):
            p = int(rng.integers(1, 12))
            w = random_weights(rng, p)
            x = rng.normal(size=p) * 3
            y = rng.normal(size=p) * 3
            alpha = rng.normal() * 2
            nx = owl_norm(x, w)
            assert owl_norm(alpha * x, w) == pytest.approx(abs(alpha) * nx, rel=1e-12, abs=1e-12)
            assert owl_norm(x + y, w) <= nx + owl_norm(y, w) + 1e-12
            assert nx > 0.0 or not np.any(x)
        assert owl_norm(np.zeros(5), random_weights(rng, 5)) == 0.0

    def test_sandwiches(self):
        rng = np.random.default_rng(102)
        for _ in range(2000):
            p = int(rng.integers(1, 10))
            w = random_weights(rng, p)
            x = rng.normal(size=p) * 5
            om = owl_norm(x, w)
            l1 = np.abs(x).sum()
            assert w.max * np.abs(x).max() <= om + 1e-12
            assert w.mean * l1 <= om + 1e-12
            assert om <= w.max * l1 + 1e-12

    def test_signed_permutation_invariance(self):
        rng = np.random.default_rng(103)
        for _ in range(200):
            p = int(rng.integers(1, 10))
            w = random_weights(rng, p)
            x = rng.normal(size=p) * 2
            perm = rng.permutation(p)
            signs = rng.choice([-1.0, 1.0], size=p)
            assert owl_norm(signs * x[perm], w) == pytest.approx(owl_norm(x, w), rel=1e-14)


class TestProx:
    def test_spec_examples(self):
        np.testing.assert_allclose(
            prox_owl([4.0, 1.0], WeightVector([2.0, 1.0])), [2.0, 0.0], atol=1e-15
        )
        np.testing.assert_allclose(
            prox_owl([3.0, 3.5], WeightVector([2.0, 1.0])), [1.75, 1.75], atol=1e-15
        )
        np.testing.assert_allclose(
            prox_owl([0.5, -0.3], WeightVector([2.0, 1.0])), [0.0, 0.0], atol=0.0
        )

    def test_examples_against_subgradient_oracle(self):
        w = np.array([2.0, 1.0])
        for u, expected in [([4.0, 1.0], [2.0, 0.0]), ([3.0, 3.5], [1.75, 1.75])]:
            ref = prox_reference(np.array(u), w, n_steps=200_000)
            np.testing.assert_allclose(ref, expected, atol=2e-5)

    def test_uniform_weights_soft_threshold(self):
        rng = np.random.default_rng(104)
        for _ in range(100):
            p = int(rng.integers(1, 15))
            lam = rng.uniform(0.05, 2.0)
            u = rng.normal(size=p) * 3
            soft = np.sign(u) * np.maximum(np.abs(u) - lam, 0.0)
            np.testing.assert_array_equal(prox_owl(u, WeightVector(np.full(p, lam))), soft)

    def test_all_below_threshold_gives_zero(self):
        x = prox_owl([0.5, -0.3], WeightVector([2.0, 1.0]))
        assert np.all(x == 0.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            prox_owl([1.0, 2.0, 3.0], WeightVector([1.0, 0.5]))

    def test_optimality_against_random_candidates(self):
        rng = np.random.default_rng(105)
        for _ in range(5):
            p = int(rng.integers(2, 9))
            w = random_weights(rng, p)
            u = rng.normal(size=p) * 3
            xh = prox_owl(u, w)
            f_hat = 0.5 * np.sum((xh - u) ** 2) + owl_norm(xh, w)
            for _ in range(1000):
                cand = xh + rng.normal(size=p) * rng.choice([1e-6, 1e-3, 0.3, 2.0])
                f_cand = 0.5 * np.sum((cand - u) ** 2) + owl_norm(cand, w)
                assert f_hat <= f_cand + 1e-12

    def test_nonexpansive(self):
        rng = np.random.default_rng(106)
        for _ in range(300):
            p = int(rng.integers(1, 12))
            w = random_weights(rng, p)
            u = rng.normal(size=p) * 3
            v = rng.normal(size=p) * 3
            lhs = np.linalg.norm(prox_owl(u, w) - prox_owl(v, w))
            assert lhs <= np.linalg.norm(u - v) + 1e-12

    def test_commutes_with_signed_permutations(self):
        rng = np.random.default_rng(107)
        for _ in range(200):
            p = int(rng.integers(2, 10))
            w = random_weights(rng, p)
            u = rng.normal(size=p) * 2
            perm = rng.permutation(p)
            signs = rng.choice([-1.0, 1.0], size=p)
            lhs = prox_owl(signs * u[perm], w)
            rhs = signs * prox_owl(u, w)[perm]
            np.testing.assert_allclose(lhs, rhs, atol=1e-14)

    def test_preserves_magnitude_ordering(self):
        rng = np.random.default_rng(108)
        for _ in range(200):
            p = int(rng.integers(2, 10))
            w = random_weights(rng, p)
            u = rng.normal(size=p) * 2
            x = prox_owl(u, w)
            au, ax = np.abs(u), np.abs(x)
            for i in range(p):
                for j in range(p):
                    if au[i] > au[j]:
                        assert ax[i] >= ax[j]

    def test_equal_input_magnitudes_stay_equal(self):
        w = WeightVector([1.5, 1.0, 0.5, 0.25])
        x = prox_owl([2.0, -2.0, 0.7, 0.7], w)
        assert abs(x[0]) == abs(x[1])
        assert abs(x[2]) == abs(x[3])


class TestWeights:
    def test_weight_vector_caches(self):
        w = WeightVector([3.0, 2.0, 1.0])
        assert w.delta == 1.0 and w.mean == 2.0 and w.max == 3.0 and w.p == 3

    def test_single_weight_gap_is_w1(self):
        assert WeightVector([0.7]).delta == 0.7

    @pytest.mark.parametrize(
        "bad", [[1.0, 2.0], [1.0, -0.1], [0.0, 0.0], [-1.0], [], [[1.0, 2.0]]]
    )
    def test_invalid_weights(self, bad):
        with pytest.raises(ValueError):
            WeightVector(bad)

    def test_weights_immutable(self):
        w = WeightVector([2.0, 1.0])
        with pytest.raises(ValueError):
            w.w[0] = 5.0

    def test_oscar_example(self):
        w = oscar_weights(4, 1.0, 0.5)
        np.testing.assert_allclose(w.w, [2.5, 2.0, 1.5, 1.0])
        assert w.delta == 0.5

    def test_oscar_pure_l1(self):
        w = oscar_weights(3, 2.0, 0.0)
        np.testing.assert_allclose(w.w, [2.0, 2.0, 2.0])
        assert w.delta == 0.0

    def test_oscar_errors(self):
        with pytest.raises(ValueError):
            oscar_weights(1, 0.0, 1.0)  # single weight would be zero
        with pytest.raises(ValueError):
            oscar_weights(4, 0.0, 0.0)
        with pytest.raises(ValueError):
            oscar_weights(0, 1.0, 1.0)

    def test_oscar_delta_is_lam2(self):
        assert min_gap(oscar_weights(5, 0.0, 0.25)) == 0.25

    def test_slope_values(self):
        np.testing.assert_allclose(slope_weights(1, 0.1).w, [1.6448536269514722], atol=1e-9)
        np.testing.assert_allclose(
            slope_weights(2, 0.5).w, [1.1503493803760079, 0.6744897501960817], atol=1e-9
        )

    def test_slope_against_mpmath(self):
        pytest.importorskip("mpmath")
        for p, q in [(1, 0.1), (2, 0.5), (7, 0.3), (25, 0.05)]:
            w = slope_weights(p, q).w
            ref = [std_normal_quantile_mp(1.0 - i * q / (2.0 * p)) for i in range(1, p + 1)]
            np.testing.assert_allclose(w, ref, atol=1e-9)

    def test_slope_strictly_decreasing(self):
        rng = np.random.default_rng(109)
        for _ in range(30):
            p = int(rng.integers(1, 40))
            q = float(rng.uniform(0.01, 0.99))
            w = slope_weights(p, q).w
            assert np.all(np.diff(w) < 0.0) or p == 1
            assert np.all(w > 0.0)

    def test_slope_errors(self):
        for q in (0.0, 1.0, -0.3, 2.0):
            with pytest.raises(ValueError):
                slope_weights(4, q)

    def test_min_gap_examples(self):
        assert min_gap(WeightVector([3.0, 2.0, 1.0])) == 1.0
        assert min_gap(WeightVector([2.0, 2.0, 2.0])) == 0.0

    def test_scaled(self):
        w = oscar_weights(3, 1.0, 0.5)
        w2 = w.scaled(2.0)
        np.testing.assert_allclose(w2.w, 2.0 * w.w)
        with pytest.raises(ValueError):
            w.scaled(0.0)


class TestPigouDalton:
    def test_example(self):
        z = pigou_dalton_transfer(np.array([4.0, 1.0, 0.0]), 0, 1, 1.0)
        np.testing.assert_array_equal(z, [3.0, 2.0, 0.0])

    def test_eps_too_large(self):
        with pytest.raises(ValueError):
            pigou_dalton_transfer(np.array([4.0, 1.0, 0.0]), 0, 1, 2.0)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            pigou_dalton_transfer(np.array([1.0, 4.0]), 0, 1, 0.5)  # x[i] <= x[j]
        with pytest.raises(ValueError):
            pigou_dalton_transfer(np.array([4.0, -1.0]), 0, 1, 0.5)  # negative entry
        with pytest.raises(ValueError):
            pigou_dalton_transfer(np.array([4.0, 1.0]), 0, 0, 0.5)  # i == j

    def test_equality_case(self):
        # transfer of 1 between (4, 1) with weights (3, 1): drop is exactly delta * eps
        w = WeightVector([3.0, 1.0])
        x = np.array([4.0, 1.0])
        z = pigou_dalton_transfer(x, 0, 1, 1.0)
        assert owl_norm(x, w) == 13.0 and owl_norm(z, w) == 11.0
        assert owl_norm(x, w) - owl_norm(z, w) == pytest.approx(w.delta * 1.0)

    def test_norm_drop_at_least_delta_eps(self):
        rng = np.random.default_rng(110)
        for _ in range(2000):
            p = int(rng.integers(2, 10))
            w = random_weights(rng, p)
            x = rng.uniform(0.0, 4.0, size=p)
            i, j = rng.choice(p, size=2, replace=False)
            if x[i] < x[j]:
                i, j = j, i
            gap = x[i] - x[j]
            if gap <= 1e-9:
                continue
            eps = rng.uniform(0.0, 0.5) * gap / 2.0
            if eps <= 0.0:
                continue
            z = pigou_dalton_transfer(x, int(i), int(j), eps)
            drop = owl_norm_direct(x, w.w) - owl_norm_direct(z, w.w)
            assert drop >= w.delta * eps - 1e-12
