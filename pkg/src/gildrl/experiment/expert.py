import os
from typing import List, Optional

import numpy as np
import torch

from gildrl.data.checkpoint import Checkpoint, CheckpointRecord, read_checkpoint_index
from gildrl.data.demos import DemonstrationSet
from gildrl.data.rng import RngRegistry
from gildrl.envs.registry import dense_id, make_env
from gildrl.experiment.config import RunConfig, Variant
from gildrl.log import create_logger
from gildrl.nets.actors import Actor, actor_from_dict
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams
from gildrl.rl.config import Algo
from gildrl.simulation import Trainer
from gildrl.tools.exceptions import NoQualifyingCheckpointError, RunConfigError

log = create_logger(__name__)

DEFAULT_RHO = 0.45


def train_expert(env_id: str, algo: Algo, seed: int, output_dir: str, **overrides) -> List[CheckpointRecord]:
    """Train vanilla RL on the dense channel of `env_id`.

    Returns:
        -the checkpoint series, the last checkpoint is the expert
    """
    cfg = RunConfig(env_id=dense_id(env_id), algo=Algo(algo), variant=Variant.VANILLA, seed=seed,
                    output_dir=output_dir, **overrides)
    trainer = Trainer(cfg)
    summary = trainer.run()
    log.info(f"Expert max average return {summary['max_avg_return']}")
    return read_checkpoint_index(output_dir)


def selection_threshold(returns, rho: float) -> float:
    """rho * best return, measured from the worst checkpoint when some returns are negative."""
    best = max(returns)
    worst = min(returns)
    if worst < 0:
        return worst + rho * (best - worst)
    return rho * best


def select_behavior(records: List[CheckpointRecord], rho: float = DEFAULT_RHO) -> CheckpointRecord:
    """First checkpoint whose evaluation return reaches rho times the expert return."""
    if not records:
        raise RunConfigError('the checkpoint series is empty')
    if rho >= 1.0:
        log.warning(f'rho = {rho}: the behavior policy is the expert itself')
    returns = [r.eval_return for r in records]
    threshold = selection_threshold(returns, rho)
    for record in records:
        if record.eval_return >= threshold:
            log.info(f'Behavior checkpoint at step {record.step}, return {record.eval_return:.4f} '
                     f'(expert {max(returns):.4f})')
            return record
    raise NoQualifyingCheckpointError(rho, threshold, max(returns))


def load_actor(path: str):
    ckpt = Checkpoint.load(path)
    actor = actor_from_dict(ckpt.spec['actor'])
    return actor, ckpt.networks['actor'], ckpt


def resolve_checkpoint(path: str, rho: float = DEFAULT_RHO) -> str:
    """A checkpoint file, or the behavior checkpoint of an expert run directory."""
    if os.path.isdir(path):
        return select_behavior(read_checkpoint_index(path), rho).path
    return path


def collect_demos(actor: Actor, params: NetworkParams, env_id: str, n_samples: int = 1000,
                  rng: Optional[np.random.Generator] = None, metadata: Optional[dict] = None) -> DemonstrationSet:
    """Roll exploit episodes on the dense channel and record (s, a) pairs until n_samples.

    The behavior return is the mean dense return of the completed episodes, or the partial
    return when no episode completed.
    """
    env = make_env(dense_id(env_id))
    states, actions, returns = [], [], []
    state = env.reset(rng)
    episode_return = 0.
    with torch.no_grad():
        while len(states) < n_samples:
            s = torch.as_tensor(state, dtype=ops.DTYPE).reshape(1, -1)
            action = actor.act(params, s).reshape(-1).numpy().copy()
            states.append(state.copy())
            actions.append(action)
            result = env.step(action)
            episode_return += result.reward_dense
            if result.done:
                returns.append(episode_return)
                episode_return = 0.
                state = env.reset(rng)
            else:
                state = result.next_state
    behavior_return = float(np.mean(returns)) if returns else episode_return
    meta = dict(metadata or {})
    meta.update(env_id=env_id, behavior_return=behavior_return)
    return DemonstrationSet(np.asarray(states, dtype=np.float64).reshape(-1, env.state_dim),
                            np.asarray(actions, dtype=np.float64).reshape(-1, env.action_dim), meta)


def collect_demos_from_checkpoint(checkpoint: str, env_id: str, n_samples: int = 1000, seed: int = 0,
                                  rho: float = DEFAULT_RHO) -> DemonstrationSet:
    path = resolve_checkpoint(checkpoint, rho)
    actor, params, ckpt = load_actor(path)
    return collect_demos(actor, params, env_id, n_samples, RngRegistry(seed)['demo'].np,
                         {'checkpoint': os.path.abspath(path), 'checkpoint_step': ckpt.step})
