import math
import unittest

import torch

from gildrl.numerics import ops
from gildrl.tools.exceptions import NonFiniteError, ShapeMismatchError


class TestPrimitives(unittest.TestCase):
    def test_softplus_zero(self):
        self.assertAlmostEqual(float(ops.softplus(ops.tensor(0.))), 0.6931471805599453, places=15)

    def test_softplus_overflow_safe(self):
        x = ops.tensor([-1000., -30., 0., 30., 1000.])
        y = ops.softplus(x)
        self.assertTrue(bool(torch.isfinite(y).all()))
        self.assertGreaterEqual(float(y.min()), 0.)
        self.assertEqual(float(y[-1]), 1000.)

    def test_tanh(self):
        self.assertEqual(float(ops.tanh(ops.tensor(0.))), 0.)
        y = ops.tanh(ops.tensor([-1e4, 1e4]))
        self.assertEqual(y.tolist(), [-1., 1.])

    def test_clip(self):
        self.assertEqual(float(ops.clip(ops.tensor(0.7), -0.5, 0.5)), 0.5)
        self.assertEqual(float(ops.clip(ops.tensor(-0.7), -0.5, 0.5)), -0.5)
        self.assertEqual(float(ops.clip(ops.tensor(0.2), -0.5, 0.5)), 0.2)

    def test_elementwise(self):
        a = ops.tensor([1., -2., 3.])
        b = ops.tensor([2., 2., 2.])
        self.assertEqual(ops.add(a, b).tolist(), [3., 0., 5.])
        self.assertEqual(ops.sub(a, b).tolist(), [-1., -4., 1.])
        self.assertEqual(ops.mul(a, b).tolist(), [2., -4., 6.])
        self.assertEqual(ops.minimum(a, b).tolist(), [1., -2., 2.])
        self.assertEqual(ops.neg(a).tolist(), [-1., 2., -3.])
        self.assertEqual(ops.abs(a).tolist(), [1., 2., 3.])
        self.assertEqual(ops.square(a).tolist(), [1., 4., 9.])
        self.assertEqual(ops.relu(a).tolist(), [1., 0., 3.])
        self.assertEqual(float(ops.sum(a)), 2.)
        self.assertAlmostEqual(float(ops.mean(a)), 2. / 3., places=15)
        self.assertAlmostEqual(float(ops.log(ops.exp(ops.tensor(1.5)))), 1.5, places=15)

    def test_bias_row_broadcast(self):
        x = torch.ones(4, 3, dtype=ops.DTYPE)
        b = ops.tensor([1., 2., 3.])
        self.assertEqual(ops.add(x, b).shape, (4, 3))

    def test_matmul(self):
        a = torch.ones(4, 3, dtype=ops.DTYPE)
        w = torch.ones(3, 2, dtype=ops.DTYPE)
        self.assertEqual(ops.matmul(a, w).tolist(), [[3., 3.]] * 4)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeMismatchError) as ctx:
            ops.add(torch.ones(2, 3, dtype=ops.DTYPE), torch.ones(2, 4, dtype=ops.DTYPE))
        msg = str(ctx.exception)
        self.assertIn('add', msg)
        self.assertIn('(2, 3)', msg)
        self.assertIn('(2, 4)', msg)

        with self.assertRaises(ShapeMismatchError) as ctx:
            ops.matmul(torch.ones(4, 3, dtype=ops.DTYPE), torch.ones(2, 2, dtype=ops.DTYPE))
        self.assertEqual(ctx.exception.primitive, 'matmul')

    def test_non_finite_aborts(self):
        with self.assertRaises(NonFiniteError) as ctx:
            ops.log(ops.tensor([1., 0.]))
        self.assertEqual(ctx.exception.operation, 'log')

    def test_gaussian_log_density(self):
        zero = ops.tensor([[0.]])
        value = ops.gaussian_log_density(zero, zero, zero)
        self.assertAlmostEqual(float(value), -0.5 * math.log(2 * math.pi), places=14)
        self.assertEqual(value.shape, (1, 1))

        x = ops.tensor([[0.3, -1.2]])
        mean = ops.tensor([[0.1, 0.4]])
        log_std = ops.tensor([[-0.5, 0.7]])
        expected = 0.
        for xi, mi, si in zip([0.3, -1.2], [0.1, 0.4], [-0.5, 0.7]):
            std = math.exp(si)
            expected += -0.5 * ((xi - mi) / std) ** 2 - si - 0.5 * math.log(2 * math.pi)
        self.assertAlmostEqual(float(ops.gaussian_log_density(x, mean, log_std)), expected, places=12)

    def test_log_one_minus_tanh_sq(self):
        u = ops.tensor([-3., -0.5, 0., 0.5, 3.])
        reference = torch.log(1 - torch.tanh(u) ** 2)
        self.assertTrue(torch.allclose(ops.log_one_minus_tanh_sq(u), reference, rtol=1e-12, atol=1e-12))
        saturated = ops.log_one_minus_tanh_sq(ops.tensor([60., -60.]))
        self.assertTrue(bool(torch.isfinite(saturated).all()))

    def test_concat(self):
        a = torch.zeros(2, 1, dtype=ops.DTYPE)
        b = torch.ones(2, 2, dtype=ops.DTYPE)
        self.assertEqual(ops.concat(a, b).tolist(), [[0., 1., 1.], [0., 1., 1.]])
        with self.assertRaises(ShapeMismatchError):
            ops.concat(a, torch.ones(3, 2, dtype=ops.DTYPE))

    def test_constant_blocks_gradient(self):
        w = ops.tensor(2., requires_grad=True)
        y = ops.add(ops.square(w), ops.constant(ops.square(w)))
        g, = torch.autograd.grad(y, w)
        self.assertEqual(float(g), 4.)
