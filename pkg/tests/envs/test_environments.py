import itertools
import math
import unittest
from typing import Optional

import numpy as np

from gildrl.envs.abstract import Environment, StepResult
from gildrl.envs.mass2d import Mass2D
from gildrl.envs.point2d import Point2D
from gildrl.envs.registry import ENVIRONMENT_IDS, dense_id, make_env, split_env_id
from gildrl.envs.sparse import Sparsify
from gildrl.tools.exceptions import MissingProgressCoordinateError, UnknownEnvironmentError


class Line(Environment):
    """One dimensional walker whose action is the signed displacement of the step."""
    name = 'line'
    state_dim = 1
    action_dim = 1

    def __init__(self):
        super(Line, self).__init__(horizon=50, action_scale=10.)

    @property
    def has_progress(self) -> bool:
        return True

    @property
    def progress(self) -> float:
        return float(self.state[0])

    def _initial_state(self, rng: Optional[np.random.Generator]) -> np.ndarray:
        return np.zeros(1)

    def _transition(self, action: np.ndarray) -> StepResult:
        old = float(self.state[0])
        self.state = self.state + action
        return StepResult(self.state.copy(), 0., float(self.state[0]) - old, False)


def walk(env: Sparsify, positions):
    rewards = []
    current = 0.
    for p in positions:
        rewards.append(env.step([p - current]).reward_sparse)
        current = p
    return rewards


class TestPoint2D(unittest.TestCase):
    def setUp(self):
        self.env = Point2D()
        self.env.reset()

    def test_first_step(self):
        result = self.env.step([0.1, 0.1])
        np.testing.assert_allclose(result.next_state, [0.1, 0.1])
        self.assertAlmostEqual(result.reward_dense, -1.2727922061357855, places=12)
        self.assertEqual(result.reward_sparse, 0.)
        self.assertFalse(result.done)

    def test_at_goal(self):
        self.env.state = np.array([1., 1.])
        result = self.env.step([0., 0.])
        self.assertEqual(result.reward_dense, 0.)
        self.assertEqual(result.reward_sparse, 1.)
        self.assertTrue(result.done)

    def test_clipping(self):
        result = self.env.step([1., 0.])
        np.testing.assert_array_equal(result.next_state, [0.1, 0.])

    def test_horizon(self):
        for t in range(99):
            self.assertFalse(self.env.step([0., 0.]).done)
        self.assertTrue(self.env.step([0., 0.]).done)
        self.assertEqual(self.env.step_count, 100)

    def test_goal_on_last_step_is_terminal(self):
        env = Point2D(horizon=10)
        env.reset()
        for t in range(9):
            result = env.step([0.1, 0.1])
            self.assertFalse(result.done or result.terminal)
        result = env.step([0.1, 0.1])
        self.assertTrue(result.done)
        self.assertTrue(result.terminal)

    def test_time_limit_is_not_terminal(self):
        env = Point2D(horizon=10)
        env.reset()
        for t in range(10):
            result = env.step([0., 0.])
        self.assertTrue(result.done)
        self.assertFalse(result.terminal)

    def test_greedy_is_best_discretized_policy(self):
        moves = [np.array([dx, dy]) * 0.1 for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]
        env = Point2D(horizon=3)

        def episode_return(actions):
            env.reset()
            return sum(env.step(a).reward_dense for a in actions)

        best = max(episode_return(seq) for seq in itertools.product(moves, repeat=3))
        greedy = episode_return([np.array([0.1, 0.1])] * 3)
        self.assertAlmostEqual(best, greedy, places=12)


class TestMass2D(unittest.TestCase):
    def setUp(self):
        self.env = Mass2D()
        self.env.reset()

    def test_rest(self):
        result = self.env.step([0., 0.])
        self.assertEqual(result.reward_dense, 0.)
        self.assertEqual(len(result.next_state), 4)

    def test_full_speed(self):
        self.env.state = np.array([0., 0., 0.5, 0.])
        for _ in range(5):
            self.assertAlmostEqual(self.env.step([0., 0.]).reward_dense, 0.05, places=15)

    def test_clipping(self):
        clipped = Mass2D()
        clipped.reset()
        a = self.env.step([2., 0.])
        b = clipped.step([1., 0.])
        np.testing.assert_array_equal(a.next_state, b.next_state)

    def test_speed_limit(self):
        for _ in range(50):
            self.env.step([1., -1.])
        np.testing.assert_allclose(self.env.state[2:], [0.5, -0.5])

    def test_horizon(self):
        done = [self.env.step([1., 0.]).done for _ in range(200)]
        self.assertFalse(any(done[:-1]))
        self.assertTrue(done[-1])

    def test_reset_reproduces_trajectory(self):
        actions = np.random.default_rng(3).uniform(-1.5, 1.5, size=(200, 2))
        trajectories = []
        for _ in range(2):
            env = make_env('mass2d-sparse')
            env.reset(np.random.default_rng(11))
            trajectories.append([(r.next_state.tobytes(), r.reward_sparse, r.reward_dense)
                                 for r in (env.step(a) for a in actions)])
        self.assertEqual(trajectories[0], trajectories[1])


class TestSparsify(unittest.TestCase):
    def setUp(self):
        self.env = Sparsify(Line(), 1.0)
        self.env.reset()

    def test_first_crossing(self):
        self.assertEqual(walk(self.env, [0.4, 0.9, 1.1]), [0., 0., 1.])

    def test_multiple_crossings(self):
        self.assertEqual(walk(self.env, [2.05]), [2.])

    def test_wrong_direction(self):
        self.assertEqual(walk(self.env, [-1., -2.5, -4.]), [0., 0., 0.])

    def test_no_reward_for_recrossing(self):
        self.assertEqual(walk(self.env, [1.2, 0.5, 1.5, 2.2]), [1., 0., 0., 1.])

    def test_monotone_episode_total(self):
        rng = np.random.default_rng(5)
        for threshold in (0.3, 1.0, 2.5):
            env = Sparsify(Line(), threshold)
            env.reset()
            positions = np.cumsum(rng.uniform(0., 0.8, size=40))
            total = sum(walk(env, positions))
            self.assertEqual(total, math.floor(positions[-1] / threshold))

    def test_dense_pass_through(self):
        result = self.env.step([0.7])
        self.assertAlmostEqual(result.reward_dense, 0.7, places=15)

    def test_reset_clears_counter(self):
        walk(self.env, [1.5])
        self.env.reset()
        self.assertEqual(walk(self.env, [0.5, 1.2]), [0., 1.])

    def test_requires_progress(self):
        with self.assertRaises(MissingProgressCoordinateError):
            Sparsify(Point2D(), 1.0)


class TestRegistry(unittest.TestCase):
    def test_ids(self):
        self.assertEqual(set(ENVIRONMENT_IDS), {'point2d-dense', 'point2d-sparse', 'mass2d-dense', 'mass2d-sparse'})
        for env_id in ENVIRONMENT_IDS:
            env = make_env(env_id)
            self.assertEqual(env.channel, split_env_id(env_id)[1])

    def test_dense_id(self):
        self.assertEqual(dense_id('mass2d-sparse'), 'mass2d-dense')

    def test_unknown(self):
        for env_id in ('hopper-sparse', 'point2d', 'point2d-medium'):
            with self.assertRaises(UnknownEnvironmentError):
                make_env(env_id)

    def test_mass2d_threshold(self):
        env = make_env('mass2d-sparse', sparse_threshold=0.02)
        env.reset()
        env.state[2] = 0.5
        self.assertEqual(env.step([0., 0.]).reward_sparse, 2.)
