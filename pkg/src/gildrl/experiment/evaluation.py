from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List

import numpy as np
import torch

from gildrl.data.rng import RngRegistry
from gildrl.envs.registry import dense_id, make_env
from gildrl.log import create_logger
from gildrl.nets.actors import Actor
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams

log = create_logger(__name__)


@dataclass
class EvalResult:
    returns: List[float]
    goal_rate: float

    @property
    def mean(self) -> float:
        return float(np.mean(self.returns))

    @property
    def std(self) -> float:
        return float(np.std(self.returns))


def run_episode(actor: Actor, params: NetworkParams, env_id: str, rng: np.random.Generator,
                sparse_threshold: float = 1.0):
    """Exploit-mode episode on the dense channel.

    Returns:
        -dense return
        -True when the sparse channel rewarded the episode at least once
    """
    env = make_env(dense_id(env_id), sparse_threshold)
    state = env.reset(rng)
    total = 0.
    sparse = 0.
    done = False
    with torch.no_grad():
        while not done:
            s = torch.as_tensor(state, dtype=ops.DTYPE).reshape(1, -1)
            action = actor.act(params, s).reshape(-1).numpy()
            result = env.step(action)
            total += result.reward_dense
            sparse += result.reward_sparse
            state = result.next_state
            done = result.done
    return total, sparse > 0


def evaluate(actor: Actor, params: NetworkParams, env_id: str, episodes: int, rng: RngRegistry,
             workers: int = 1, sparse_threshold: float = 1.0) -> EvalResult:
    """Evaluate a policy over `episodes` exploit episodes on the dense channel.

    Episode i resets its own environment with the i-th child of the `eval` stream, so results
    do not depend on `workers`.
    """
    def episode(i):
        return run_episode(actor, params, env_id, rng.child('eval', i).np, sparse_threshold)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(episode, range(episodes)))
    else:
        outcomes = [episode(i) for i in range(episodes)]
    returns = [r for r, _ in outcomes]
    goal_rate = sum(1 for _, reached in outcomes if reached) / max(episodes, 1)
    return EvalResult(returns, goal_rate)
