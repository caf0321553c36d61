import threading
import unittest

import torch

from gildrl.nets.mlp import MlpSpec, init_network, mlp_forward
from gildrl.numerics import ops
from gildrl.numerics.tape import Tape, current_tape


class TestTape(unittest.TestCase):
    def setUp(self):
        gen = torch.Generator().manual_seed(3)
        self.spec = MlpSpec(3, (8, 8), 2)
        self.params = init_network(self.spec, gen)
        self.x = torch.randn(5, 3, generator=gen, dtype=ops.DTYPE)

    def test_replay_is_bit_exact(self):
        with Tape() as tape:
            y = ops.mean(ops.square(mlp_forward(self.params, self.spec, self.x)))
        self.assertGreater(len(tape), 0)
        self.assertTrue(tape.replay_matches())
        self.assertTrue(torch.equal(tape.replay()[-1], y))

    def test_leaves_are_frozen(self):
        x = self.x.clone()
        with Tape() as tape:
            y = ops.sum(ops.tanh(x))
        x.add_(1.0)
        self.assertTrue(torch.equal(tape.replay()[-1], y))

    def test_adjoints(self):
        w = ops.tensor(3., requires_grad=True)
        with Tape() as tape:
            unused = ops.exp(w)
            inner = ops.square(w)
            y = ops.square(inner)
        adjoints = tape.backward(y, create_graph=True)
        self.assertEqual(float(adjoints[tape.slot_of(unused)]), 0.)
        inner_adjoint = adjoints[tape.slot_of(inner)]
        self.assertEqual(float(inner_adjoint), 18.)
        # the adjoint is itself differentiable
        g, = torch.autograd.grad(inner_adjoint, w)
        self.assertEqual(float(g), 12.)

    def test_tape_is_thread_local(self):
        seen = []
        with Tape() as tape:
            thread = threading.Thread(target=lambda: seen.append(current_tape()))
            thread.start()
            thread.join()
            self.assertIs(current_tape(), tape)
        self.assertEqual(seen, [None])
        self.assertIsNone(current_tape())

    def test_nested_tapes(self):
        with Tape() as outer:
            ops.exp(ops.tensor(1.))
            with Tape() as inner:
                ops.exp(ops.tensor(2.))
            ops.exp(ops.tensor(3.))
        self.assertEqual(len(outer), 2)
        self.assertEqual(len(inner), 1)
