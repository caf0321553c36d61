import math
from typing import Optional

import numpy as np

from gildrl.envs.abstract import Environment, StepResult
from gildrl.log import create_logger
from gildrl.tools.exceptions import MissingProgressCoordinateError

log = create_logger(__name__)


class Sparsify(Environment):
    def __init__(self, env: Environment, threshold: float = 1.0):
        """
        Replace the sparse channel of `env` by a progress threshold signal: a reward of 1 each time
        the maximum progress of the episode crosses the next multiple of `threshold`. The dense
        channel is passed through.

        Args:
            -env: environment exposing a progress coordinate
            -threshold: progress units between two rewards
        """
        if not env.has_progress:
            raise MissingProgressCoordinateError(env.name)
        self.env = env
        self.name = f'{env.name}-sparse'
        self.state_dim = env.state_dim
        self.action_dim = env.action_dim
        self.threshold = threshold
        self.horizon = env.horizon
        self.action_scale = env.action_scale
        self.channel = 'sparse'
        self._origin = 0.
        self._max_progress = 0.
        self._crossings = 0

    @property
    def has_progress(self) -> bool:
        return True

    @property
    def progress(self) -> float:
        return self.env.progress - self._origin

    @property
    def state(self) -> np.ndarray:
        return self.env.state

    @property
    def step_count(self) -> int:
        return self.env.step_count

    def reset(self, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        state = self.env.reset(rng)
        self._origin = self.env.progress
        self._max_progress = 0.
        self._crossings = 0
        return state

    def step(self, action) -> StepResult:
        result = self.env.step(action)
        self._max_progress = max(self._max_progress, self.progress)
        crossings = math.floor(self._max_progress / self.threshold)
        result.reward_sparse = float(crossings - self._crossings)
        self._crossings = crossings
        return result

    def _initial_state(self, rng):
        return self.env._initial_state(rng)

    def _transition(self, action):
        return self.env._transition(action)
