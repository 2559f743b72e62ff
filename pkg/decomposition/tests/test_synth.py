import numpy as np
from django.test import SimpleTestCase

from decomposition.exceptions import BadSpec, ZeroGroundTruth
from decomposition.synth import (
    SynthSpec,
    corrupt_image,
    gaussian,
    make_instance,
    make_low_rank_image,
    rel_errors,
)
from decomposition.tensor_algebra import fro_norm
from decomposition.tensor_types import Tensor3
from decomposition.tsvd import tubal_rank


def spec(**overrides):
    params = dict(n1=40, n2=40, n3=30, r=3, rho=0.1, sigma=0.01, seed=1)
    params.update(overrides)
    return SynthSpec.build(**params)


class SynthSpecTests(SimpleTestCase):
    def test_invalid_specs(self):
        for overrides in ({'r': 41}, {'rho': 0.6}, {'sigma': -1.0}, {'seed': -1}, {'n3': 0}):
            with self.subTest(overrides=overrides), self.assertRaises(BadSpec):
                spec(**overrides)

    def test_make_instance_requires_spec(self):
        with self.assertRaises(BadSpec):
            make_instance({'n1': 2})


class MakeInstanceTests(SimpleTestCase):
    def test_noiseless_instance_is_low_rank(self):
        inst = make_instance(spec(n1=12, n2=10, n3=5, r=2, rho=0.0, sigma=0.0))
        np.testing.assert_array_equal(inst.x.data, inst.l0.data)
        self.assertLessEqual(tubal_rank(inst.l0, 1e-6), 2)

    def test_sparse_support_fraction(self):
        for seed in range(1, 11):
            s0 = make_instance(spec(seed=seed)).s0.data
            self.assertTrue(set(np.unique(s0)) <= {-1.0, 0.0, 1.0})
            fraction = np.count_nonzero(s0) / s0.size
            self.assertGreaterEqual(fraction, 0.18)
            self.assertLessEqual(fraction, 0.22)

    def test_sum_of_components(self):
        inst = make_instance(spec(n1=6, n2=5, n3=4, r=2))
        np.testing.assert_array_equal(inst.x.data, inst.l0.data + inst.s0.data + inst.e0.data)

    def test_low_rank_energy(self):
        # E||l0||_F^2 = r * n3^2 for entries of P ~ N(0, 1/n1), Q ~ N(0, 1/n2)
        r, n3 = 2, 4
        energies = [
            fro_norm(make_instance(spec(n1=6, n2=5, n3=n3, r=r, rho=0.0, sigma=0.0, seed=s)).l0) ** 2
            for s in range(200)
        ]
        self.assertLess(abs(np.mean(energies) - r * n3 ** 2) / (r * n3 ** 2), 0.15)

    def test_reproducible(self):
        a = make_instance(spec(n1=8, n2=8, n3=4, seed=123))
        b = make_instance(spec(n1=8, n2=8, n3=4, seed=123))
        for left, right in zip(a, b):
            np.testing.assert_array_equal(left.data, right.data)

    def test_seeds_differ(self):
        a = make_instance(spec(n1=10, n2=10, n3=6, seed=1)).x.data
        b = make_instance(spec(n1=10, n2=10, n3=6, seed=2)).x.data
        self.assertGreater(np.mean(a != b), 0.99)

    def test_box_muller_moments(self):
        samples = gaussian(np.random.default_rng(0), (200000,), std=2.0)
        self.assertAlmostEqual(float(np.mean(samples)), 0.0, delta=0.02)
        self.assertAlmostEqual(float(np.std(samples)), 2.0, delta=0.02)


class RelErrorsTests(SimpleTestCase):
    def setUp(self):
        self.inst = make_instance(spec(n1=6, n2=6, n3=3, r=2))

    def test_exact_recovery(self):
        self.assertEqual(rel_errors(self.inst.l0, self.inst.s0, self.inst.l0, self.inst.s0), (0.0, 0.0))

    def test_zero_estimate(self):
        err_l, _ = rel_errors(Tensor3.zeros(6, 6, 3), self.inst.s0, self.inst.l0, self.inst.s0)
        self.assertEqual(err_l, 1.0)

    def test_scaled_estimate(self):
        err_l, _ = rel_errors(self.inst.l0.scaled(1.1), self.inst.s0, self.inst.l0, self.inst.s0)
        self.assertAlmostEqual(err_l, 0.1, places=12)

    def test_zero_ground_truth(self):
        with self.assertRaises(ZeroGroundTruth):
            rel_errors(self.inst.l0, self.inst.s0, self.inst.l0, Tensor3.zeros(6, 6, 3))


class ImageSynthesisTests(SimpleTestCase):
    def test_low_rank_image_range(self):
        img = make_low_rank_image(16, 20, 2, seed=3)
        self.assertEqual(img.dims, (16, 20, 3))
        self.assertEqual(img.data.min(), 0.0)
        self.assertAlmostEqual(img.data.max(), 255.0, places=9)

    def test_bad_rank(self):
        with self.assertRaises(BadSpec):
            make_low_rank_image(8, 8, 9, seed=0)

    def test_no_corruption_is_identity(self):
        img = make_low_rank_image(12, 12, 2, seed=0)
        np.testing.assert_array_equal(corrupt_image(img, 0.0, 0.0, seed=5).data, img.data)

    def test_sparse_corruption_hits_whole_pixels(self):
        img = Tensor3(np.full((30, 30, 3), 128.0))
        out = corrupt_image(img, 0.1, 0.0, seed=1).data
        changed = np.any(out != 128.0, axis=2)
        self.assertAlmostEqual(changed.mean(), 0.1, delta=0.05)
        self.assertTrue(np.all((out >= 0) & (out <= 255)))

    def test_corruption_is_seeded(self):
        img = make_low_rank_image(10, 10, 2, seed=0)
        np.testing.assert_array_equal(
            corrupt_image(img, 0.2, 1e-3, seed=9).data,
            corrupt_image(img, 0.2, 1e-3, seed=9).data,
        )

    def test_invalid_levels(self):
        img = make_low_rank_image(10, 10, 2, seed=0)
        with self.assertRaises(BadSpec):
            corrupt_image(img, 1.5)
        with self.assertRaises(BadSpec):
            corrupt_image(img, 0.1, -1.0)
