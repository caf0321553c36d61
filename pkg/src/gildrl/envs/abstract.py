from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gildrl.log import create_logger
from gildrl.tools.exceptions import MissingProgressCoordinateError

log = create_logger(__name__)


@dataclass(slots=True)
class StepResult:
    next_state: np.ndarray
    reward_sparse: float
    reward_dense: float
    done: bool
    # true only on a terminal condition of the environment, never on the time limit
    terminal: bool = False

    def reward(self, channel: str) -> float:
        return self.reward_sparse if channel == 'sparse' else self.reward_dense


class Environment(ABC):
    name: str = 'environment'
    state_dim: int = 0
    action_dim: int = 0

    def __init__(self, horizon: int, action_scale: float):
        """
        Resettable simulator with a sparse and a dense reward channel.

        Actions are clipped to [-action_scale, action_scale] per dimension, never rejected. An
        episode ends when `step_count` reaches `horizon` or on a terminal condition.

        Args:
            -horizon: maximum number of steps per episode
            -action_scale: per dimension action bound
        """
        self.horizon = horizon
        self.action_scale = np.full(self.action_dim, action_scale, dtype=np.float64)
        self.state = np.zeros(self.state_dim, dtype=np.float64)
        self.step_count = 0
        self.channel = 'dense'

    @property
    def has_progress(self) -> bool:
        return False

    @property
    def progress(self) -> float:
        """Scalar coordinate along the rewarded direction."""
        raise MissingProgressCoordinateError(self.name)

    def clip(self, action) -> np.ndarray:
        return np.clip(np.asarray(action, dtype=np.float64).reshape(self.action_dim),
                       -self.action_scale, self.action_scale)

    def reset(self, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        self.step_count = 0
        self.state = self._initial_state(rng)
        return self.state.copy()

    def step(self, action) -> StepResult:
        self.step_count += 1
        result = self._transition(self.clip(action))
        if self.step_count >= self.horizon:
            result.done = True
        return result

    @abstractmethod
    def _initial_state(self, rng: Optional[np.random.Generator]) -> np.ndarray:
        pass

    @abstractmethod
    def _transition(self, action: np.ndarray) -> StepResult:
        pass
