import numpy as np
from django.test import SimpleTestCase

from decomposition.exceptions import BadTruncation, DimMismatch, NonMonotoneWeights
from decomposition.tensor_algebra import fro_norm, identity_tensor, t_product
from decomposition.tensor_types import Tensor3
from decomposition.tsvd import (
    WeightMatrix,
    pstnn_weights,
    t_svd,
    t_svt,
    tnn,
    tubal_rank,
    weighted_t_svt,
    weighted_tnn,
)

from .oracles import slice_svals


def diag_tensor(*values):
    return Tensor3(np.diag(values).reshape(len(values), len(values), 1))


def prox_objective(l, a, tau):
    return 0.5 * fro_norm(l - a) ** 2 + tau * tnn(l)


class TSvdTests(SimpleTestCase):
    def test_identity_spectrum(self):
        factors = t_svd(identity_tensor(2, 3))
        np.testing.assert_allclose(factors.svals, np.ones((2, 3)))
        self.assertEqual(factors.r, 2)

    def test_reconstruction_and_slice_oracle(self):
        a = Tensor3(np.random.default_rng(0).standard_normal((5, 4, 3)))
        factors = t_svd(a)
        self.assertLess(fro_norm(factors.reconstruct() - a), 1e-10)
        np.testing.assert_allclose(factors.svals, slice_svals(a.data), atol=1e-10)

    def test_factors_are_orthonormal_per_slice(self):
        factors = t_svd(Tensor3(np.random.default_rng(1).standard_normal((4, 3, 5))))
        for k in range(5):
            u = factors.u_hat.data[:, :, k]
            v = factors.v_hat.data[:, :, k]
            self.assertLess(np.linalg.norm(u.conj().T @ u - np.eye(3)), 1e-8)
            self.assertLess(np.linalg.norm(v.conj().T @ v - np.eye(3)), 1e-8)

    def test_svals_are_nonnegative_and_nonincreasing(self):
        svals = t_svd(Tensor3(np.random.default_rng(2).standard_normal((4, 6, 4)))).svals
        self.assertTrue(np.all(svals >= 0))
        self.assertTrue(np.all(np.diff(svals, axis=0) <= 1e-12))

    def test_low_rank_product_has_small_tail(self):
        rng = np.random.default_rng(3)
        a = t_product(Tensor3(rng.standard_normal((10, 2, 4))), Tensor3(rng.standard_normal((2, 10, 4))))
        svals = t_svd(a).svals
        self.assertTrue(np.all(svals[2:, :] < 1e-8))


class TubalRankTests(SimpleTestCase):
    def test_zero_tensor(self):
        self.assertEqual(tubal_rank(Tensor3.zeros(3, 3, 2)), 0)

    def test_identity(self):
        self.assertEqual(tubal_rank(identity_tensor(3, 2)), 3)

    def test_rank_three_product(self):
        rng = np.random.default_rng(4)
        p = Tensor3(rng.normal(0, np.sqrt(1 / 20), (20, 3, 6)))
        q = Tensor3(rng.normal(0, np.sqrt(1 / 20), (3, 20, 6)))
        self.assertEqual(tubal_rank(t_product(p, q), 1e-6), 3)


class NuclearNormTests(SimpleTestCase):
    def test_zero_and_identity(self):
        self.assertEqual(tnn(Tensor3.zeros(2, 2, 3)), 0.0)
        self.assertAlmostEqual(tnn(identity_tensor(4, 3)), 4.0, places=12)

    def test_matches_slice_oracle(self):
        a = Tensor3(np.random.default_rng(5).standard_normal((4, 4, 3)))
        expected = np.sum(slice_svals(a.data)) / 3
        self.assertLess(abs(tnn(a) - expected) / expected, 1e-10)

    def test_weighted_reductions(self):
        a = Tensor3(np.random.default_rng(6).standard_normal((3, 4, 2)))
        self.assertAlmostEqual(weighted_tnn(a, WeightMatrix.ones(3, 2)), tnn(a), places=12)
        self.assertEqual(weighted_tnn(a, WeightMatrix(np.zeros((3, 2)))), 0.0)

    def test_pstnn_skips_leading_values(self):
        eye = identity_tensor(3, 2)
        self.assertAlmostEqual(weighted_tnn(eye, pstnn_weights(3, 3, 2, 1)), 2.0, places=12)

    def test_weighted_dimension_mismatch(self):
        with self.assertRaises(DimMismatch):
            weighted_tnn(Tensor3.zeros(3, 4, 2), WeightMatrix.ones(4, 2))


class PstnnWeightTests(SimpleTestCase):
    def test_extremes(self):
        np.testing.assert_array_equal(pstnn_weights(3, 5, 2, 0).w, np.ones((3, 2)))
        np.testing.assert_array_equal(pstnn_weights(3, 5, 2, 3).w, np.zeros((3, 2)))

    def test_columns(self):
        w = pstnn_weights(4, 4, 2, 2)
        for k in range(2):
            np.testing.assert_array_equal(w.w[:, k], [0, 0, 1, 1])
        self.assertTrue(w.is_monotone())

    def test_bad_truncation(self):
        with self.assertRaises(BadTruncation):
            pstnn_weights(3, 4, 2, 4)
        with self.assertRaises(BadTruncation):
            pstnn_weights(3, 4, 2, -1)

    def test_negative_weights_rejected(self):
        with self.assertRaises(ValueError):
            WeightMatrix(-np.ones((2, 2)))


class SingularValueThresholdingTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_zero_threshold_is_identity(self):
        a = Tensor3(self.rng.standard_normal((4, 3, 5)))
        l, _ = t_svt(a, 0.0)
        self.assertLess(fro_norm(l - a), 1e-10)

    def test_large_threshold_zeroes(self):
        a = Tensor3(self.rng.standard_normal((4, 3, 5)))
        l, factors = t_svt(a, float(np.max(t_svd(a).svals)) + 1.0)
        self.assertEqual(fro_norm(l), 0.0)
        self.assertEqual(factors.r, 0)
        self.assertEqual(factors.u_hat.dims, (4, 0, 5))
        self.assertEqual(factors.v_hat.dims, (3, 0, 5))
        self.assertEqual(factors.svals.shape, (0, 5))
        self.assertEqual(fro_norm(factors.reconstruct()), 0.0)

    def test_matrix_case(self):
        l, factors = t_svt(diag_tensor(3.0, 1.0), 2.0)
        np.testing.assert_allclose(l.data[:, :, 0], np.diag([1.0, 0.0]), atol=1e-12)
        self.assertEqual(factors.r, 1)
        np.testing.assert_allclose(factors.svals, [[1.0]])

    def test_prox_optimality_against_perturbations(self):
        a = Tensor3(self.rng.standard_normal((3, 3, 4)))
        tau = 0.7
        l, _ = t_svt(a, tau)
        best = prox_objective(l, a, tau)
        for eps in (1e-3, 1e-2):
            for _ in range(200):
                moved = Tensor3(l.data + eps * self.rng.standard_normal(l.dims))
                self.assertLessEqual(best, prox_objective(moved, a, tau) + 1e-12)

    def test_nonexpansive(self):
        for _ in range(10):
            a = Tensor3(self.rng.standard_normal((4, 4, 3)))
            b = Tensor3(self.rng.standard_normal((4, 4, 3)))
            la, _ = t_svt(a, 0.5)
            lb, _ = t_svt(b, 0.5)
            self.assertLessEqual(fro_norm(la - lb), fro_norm(a - b) + 1e-12)

    def test_shrinks_nuclear_norm(self):
        a = Tensor3(self.rng.standard_normal((4, 5, 3)))
        l, _ = t_svt(a, 0.3)
        self.assertLess(tnn(l), tnn(a))

    def test_weighted_with_ones_matches_plain(self):
        a = Tensor3(self.rng.standard_normal((4, 3, 5)))
        plain, _ = t_svt(a, 0.8)
        weighted, _ = weighted_t_svt(a, 0.8, WeightMatrix.ones(3, 5))
        np.testing.assert_array_equal(weighted.data, plain.data)
        zero_k, _ = weighted_t_svt(a, 0.8, pstnn_weights(4, 3, 5, 0))
        np.testing.assert_array_equal(zero_k.data, plain.data)

    def test_weighted_full_truncation_keeps_input(self):
        a = Tensor3(self.rng.standard_normal((3, 4, 2)))
        l, _ = weighted_t_svt(a, 5.0, pstnn_weights(3, 4, 2, 3))
        self.assertLess(fro_norm(l - a), 1e-10)

    def test_weighted_matrix_case(self):
        l, _ = weighted_t_svt(diag_tensor(3.0, 1.0), 2.0, WeightMatrix(np.array([[0.0], [1.0]])))
        np.testing.assert_allclose(l.data[:, :, 0], np.diag([3.0, 0.0]), atol=1e-12)

    def test_weighted_rejects_decreasing_column(self):
        with self.assertRaises(NonMonotoneWeights):
            weighted_t_svt(diag_tensor(3.0, 1.0), 1.0, WeightMatrix(np.array([[1.0], [0.0]])))
