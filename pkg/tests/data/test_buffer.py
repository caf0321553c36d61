import unittest

import numpy as np
from scipy.stats import chisquare

from gildrl.data.buffer import ReplayBuffer, Transition
from gildrl.tools.exceptions import DimensionMismatchError, EmptyBufferError


def transition(i: float) -> Transition:
    return Transition(np.array([i, -i]), np.array([0.5 * i]), float(i), np.array([i + 1, -i - 1]), i % 3 == 0)


def same(a: Transition, b: Transition) -> bool:
    return np.array_equal(a.s, b.s) and np.array_equal(a.a, b.a) and a.r == b.r and \
        np.array_equal(a.s_next, b.s_next) and a.done == b.done


class TestReplayBuffer(unittest.TestCase):
    def setUp(self):
        self.buffer = ReplayBuffer(2, 1, capacity=2)

    def test_push(self):
        self.buffer.push(transition(0))
        self.assertEqual(len(self.buffer), 1)

    def test_overwrite_oldest(self):
        for i in range(3):
            self.buffer.push(transition(i))
        self.assertEqual(len(self.buffer), 2)
        self.assertTrue(same(self.buffer.get(0), transition(1)))
        self.assertTrue(same(self.buffer.get(1), transition(2)))

    def test_single_element_round_trip(self):
        self.buffer.push(transition(4))
        batch = self.buffer.sample(3, np.random.default_rng(0))
        self.assertEqual(batch.states.shape, (3, 2))
        self.assertEqual(batch.rewards.shape, (3, 1))
        self.assertEqual(batch.dones.shape, (3, 1))
        for k in range(3):
            self.assertEqual(batch.states[k].tolist(), [4., -4.])
            self.assertEqual(batch.actions[k].tolist(), [2.])
            self.assertEqual(float(batch.rewards[k]), 4.)
            self.assertEqual(batch.next_states[k].tolist(), [5., -5.])
            self.assertEqual(float(batch.dones[k]), 0.)

    def test_empty(self):
        with self.assertRaises(EmptyBufferError):
            self.buffer.sample(1, np.random.default_rng(0))
        with self.assertRaises(EmptyBufferError):
            self.buffer.sample_states(1, np.random.default_rng(0))

    def test_dimension_check(self):
        with self.assertRaises(DimensionMismatchError):
            self.buffer.push(Transition(np.zeros(3), np.zeros(1), 0., np.zeros(3), False))
        with self.assertRaises(DimensionMismatchError):
            self.buffer.push(Transition(np.zeros(2), np.zeros(2), 0., np.zeros(2), False))

    def test_matches_list_model(self):
        rng = np.random.default_rng(21)
        for capacity in (1, 5, 7, 1500):
            buffer = ReplayBuffer(2, 1, capacity=capacity)
            model = []
            for i in range(int(rng.integers(1, 4000))):
                t = transition(float(i))
                buffer.push(t)
                model.append(t)
                if len(model) > capacity:
                    model.pop(0)
            self.assertEqual(len(buffer), len(model))
            for k in range(len(model)):
                self.assertTrue(same(buffer.get(k), model[k]))

    def test_deterministic_sampling(self):
        self.buffer = ReplayBuffer(2, 1, capacity=100)
        for i in range(20):
            self.buffer.push(transition(i))
        a = self.buffer.sample(64, np.random.default_rng(9))
        b = self.buffer.sample(64, np.random.default_rng(9))
        self.assertTrue(a.states.equal(b.states))
        self.assertTrue(a.rewards.equal(b.rewards))

    def test_uniform_sampling(self):
        buffer = ReplayBuffer(2, 1, capacity=10)
        for i in range(10):
            buffer.push(transition(i))
        rewards = buffer.sample(100_000, np.random.default_rng(2024)).rewards.reshape(-1).numpy()
        counts = np.bincount(rewards.astype(int), minlength=10)
        self.assertEqual(counts.sum(), 100_000)
        self.assertGreater(chisquare(counts).pvalue, 1e-3)
