from typing import Optional

import numpy as np

from gildrl.envs.abstract import Environment, StepResult


class Point2D(Environment):
    """Point mass moving on the plane from (0, 0) toward the goal (1, 1).

    The dense reward is the negative distance to the goal, the sparse reward is 1 inside the goal
    radius. Reaching the goal ends the episode.
    """
    name = 'point2d'
    state_dim = 2
    action_dim = 2

    def __init__(self, horizon: int = 100, max_move: float = 0.1,
                 goal=(1.0, 1.0), goal_radius: float = 0.1):
        super(Point2D, self).__init__(horizon, max_move)
        self.goal = np.asarray(goal, dtype=np.float64)
        self.goal_radius = goal_radius

    def _initial_state(self, rng: Optional[np.random.Generator]) -> np.ndarray:
        return np.zeros(2, dtype=np.float64)

    def _transition(self, action: np.ndarray) -> StepResult:
        self.state = self.state + action
        distance = float(np.linalg.norm(self.state - self.goal))
        reached = distance < self.goal_radius
        return StepResult(self.state.copy(), 1.0 if reached else 0.0, 0.0 - distance, reached, reached)
