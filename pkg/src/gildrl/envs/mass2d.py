from typing import Optional

import numpy as np

from gildrl.envs.abstract import Environment, StepResult


class Mass2D(Environment):
    """Double integrator on the plane, rewarded for moving along +x.

    State is (position, velocity). The dense reward is the x displacement of the step, the raw
    sparse channel is always 0 and is provided by `Sparsify`.
    """
    name = 'mass2d'
    state_dim = 4
    action_dim = 2

    def __init__(self, horizon: int = 200, accel: float = 0.05, max_speed: float = 0.5, dt: float = 0.1):
        super(Mass2D, self).__init__(horizon, 1.0)
        self.accel = accel
        self.max_speed = max_speed
        self.dt = dt

    @property
    def has_progress(self) -> bool:
        return True

    @property
    def progress(self) -> float:
        return float(self.state[0])

    def _initial_state(self, rng: Optional[np.random.Generator]) -> np.ndarray:
        return np.zeros(4, dtype=np.float64)

    def _transition(self, action: np.ndarray) -> StepResult:
        position = self.state[:2]
        velocity = np.clip(self.state[2:] + self.accel * action, -self.max_speed, self.max_speed)
        new_position = position + self.dt * velocity
        reward = float(new_position[0] - position[0])
        self.state = np.concatenate([new_position, velocity])
        return StepResult(self.state.copy(), 0.0, reward, False)
