import csv
import json
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch
from torch.distributions import Normal, kl_divergence

from gildrl.data.checkpoint import Checkpoint, read_checkpoint_index
from gildrl.data.demos import DemonstrationSet
from gildrl.experiment.config import RunConfig
from gildrl.log import create_logger
from gildrl.nets.actors import Actor, GaussianActor, actor_from_dict
from gildrl.numerics.params import NetworkParams, flatten
from gildrl.tools.exceptions import NonPositiveExpertReturnError, RunConfigError, UnsupportedActorError

log = create_logger(__name__)


# Normalized scores

def normalized_score(run_return: float, expert_return: float) -> float:
    """100 * run / expert, rounded to 2 decimals."""
    if expert_return <= 0:
        raise NonPositiveExpertReturnError(expert_return)
    return round(100.0 * run_return / expert_return, 2)


def normalized_scores(table: Dict[str, Tuple[float, float]], expert_return: float) -> Dict[str, str]:
    """Format `mean±std` cells normalized by the expert return.

    Args:
        -table: method name -> (mean max average return, std) over seeds
        -expert_return: max average return of the expert

    Returns:
        -method name -> formatted normalized cell
    """
    return {name: f'{normalized_score(mean, expert_return):.2f}±{normalized_score(std, expert_return):.2f}'
            for name, (mean, std) in table.items()}


# KL to the behavior policy

def kl_to_behavior(learner: Actor, learner_params: NetworkParams,
                   behavior: Actor, behavior_params: NetworkParams,
                   states: torch.Tensor) -> float:
    """Mean over states of KL(learner || behavior) between the pre-squash Gaussians."""
    for actor in (learner, behavior):
        if not isinstance(actor, GaussianActor):
            raise UnsupportedActorError('KL divergence', actor)
    with torch.no_grad():
        m1, log_std1 = learner.distribution(learner_params, states)
        m2, log_std2 = behavior.distribution(behavior_params, states)
        kl = kl_divergence(Normal(m1, log_std1.exp()), Normal(m2, log_std2.exp())).sum(dim=-1)
    return float(kl.mean())


def _run_config(run_dir: str) -> RunConfig:
    return RunConfig.from_file(os.path.join(run_dir, 'config.txt'))


def kl_series(run_dir: str, behavior_checkpoint: Optional[str] = None, demo_path: Optional[str] = None) -> List[Tuple[int, float]]:
    """KL of every checkpoint of a run to the behavior policy on the demonstration states, written to kl.csv."""
    cfg = _run_config(run_dir)
    behavior_checkpoint = behavior_checkpoint or cfg.behavior_checkpoint
    demo_path = demo_path or cfg.demo_path
    if not demo_path:
        raise RunConfigError(f'{run_dir} has no demo_path, the KL analysis needs demonstration states')
    demos = DemonstrationSet.load(demo_path)
    if not behavior_checkpoint:
        behavior_checkpoint = demos.metadata.get('checkpoint', '')
    if not behavior_checkpoint:
        raise RunConfigError(f'{run_dir} has no behavior_checkpoint')
    behavior_ckpt = Checkpoint.load(behavior_checkpoint)
    behavior = actor_from_dict(behavior_ckpt.spec['actor'])
    states = torch.as_tensor(demos.states, dtype=torch.float64)

    rows = []
    for record in read_checkpoint_index(run_dir):
        ckpt = Checkpoint.load(record.path)
        learner = actor_from_dict(ckpt.spec['actor'])
        rows.append((record.step, kl_to_behavior(learner, ckpt.networks['actor'],
                                                 behavior, behavior_ckpt.networks['actor'], states)))
    with open(os.path.join(run_dir, 'kl.csv'), 'w', newline='') as f:
        writer = csv.writer(f, delimiter=',')
        writer.writerow(['step', 'kl'])
        writer.writerows([(step, repr(kl)) for step, kl in rows])
    return rows


# PCA of the parameter path

@dataclass
class PcaResult:
    coords: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    rank: int


def _leading_eigenvector(operator, start: np.ndarray, tol: float, max_iter: int,
                         orthogonal_to: Optional[np.ndarray] = None) -> Tuple[np.ndarray, float]:
    v = start / np.linalg.norm(start)
    eigenvalue = 0.
    for _ in range(max_iter):
        if orthogonal_to is not None:
            v = v - orthogonal_to * (orthogonal_to @ v)
            v /= np.linalg.norm(v)
        w = operator(v)
        eigenvalue = float(v @ w)
        norm = np.linalg.norm(w)
        if norm == 0.:
            return v, 0.
        residual = np.linalg.norm(w - eigenvalue * v)
        v = w / norm
        if residual <= tol * max(abs(eigenvalue), 1e-300):
            break
    if orthogonal_to is not None:
        v = v - orthogonal_to * (orthogonal_to @ v)
        v /= np.linalg.norm(v)
    return v, float(v @ operator(v))


def _sign_convention(v: np.ndarray) -> np.ndarray:
    return v if v[np.argmax(np.abs(v))] >= 0 else -v


def _start_vector(x: np.ndarray) -> Optional[np.ndarray]:
    norms = np.linalg.norm(x, axis=1)
    if norms.max() <= 1e-12 * max(1., np.abs(x).max(initial=0.)):
        return None
    return x[int(np.argmax(norms))].copy()


def pca_param_path(snapshots: Sequence[np.ndarray], tol: float = 1e-10, max_iter: int = 10_000) -> PcaResult:
    """Project a series of flattened parameter vectors on their top-2 principal components.

    The covariance is never formed: the power method applies v -> X^T (X v) / (k - 1) to the
    centered snapshots X, the second component is found after deflating the first. When fewer
    than two directions carry variance the missing component and its coordinates are zero.
    """
    x = np.asarray(snapshots, dtype=np.float64)
    k = x.shape[0]
    if k < 3:
        raise RunConfigError(f'the PCA path needs at least 3 snapshots, got {k}')
    x = x - x.mean(axis=0)
    total = float((x ** 2).sum()) / (k - 1)

    def covariance(v):
        return x.T @ (x @ v) / (k - 1)

    components = np.zeros((2, x.shape[1]))
    eigenvalues = np.zeros(2)
    rank = 0
    start = _start_vector(x)
    if start is not None:
        v1, l1 = _leading_eigenvector(covariance, start, tol, max_iter)
        components[0] = _sign_convention(v1)
        eigenvalues[0] = l1
        rank = 1
        residual = x - np.outer(x @ components[0], components[0])
        start = _start_vector(residual)
        if start is not None and np.linalg.norm(residual) > 1e-9 * np.linalg.norm(x):
            def deflated(v):
                return covariance(v) - l1 * components[0] * (components[0] @ v)
            v2, l2 = _leading_eigenvector(deflated, start, tol, max_iter, orthogonal_to=components[0])
            components[1] = _sign_convention(v2)
            eigenvalues[1] = float(components[1] @ covariance(components[1]))
            rank = 2
    if rank < 2:
        log.warning(f'Parameter path has rank {rank}, the second component is empty')
    coords = x @ components.T
    explained = eigenvalues / total if total > 0 else np.zeros(2)
    return PcaResult(coords, components, explained, rank)


def load_actor_snapshots(run_dir: str) -> Tuple[List[int], List[np.ndarray]]:
    steps, snapshots = [], []
    for record in read_checkpoint_index(run_dir):
        ckpt = Checkpoint.load(record.path)
        steps.append(record.step)
        snapshots.append(flatten(ckpt.networks['actor']).numpy())
    return steps, snapshots


def pca_path(run_dir: str) -> PcaResult:
    """PCA of the actor checkpoints of a run, written to pca_path.csv and pca_variance.json."""
    steps, snapshots = load_actor_snapshots(run_dir)
    result = pca_param_path(snapshots)
    with open(os.path.join(run_dir, 'pca_path.csv'), 'w', newline='') as f:
        writer = csv.writer(f, delimiter=',')
        if result.rank >= 2:
            writer.writerow(['snapshot_step', 'pc1', 'pc2'])
            writer.writerows([(s, repr(float(c[0])), repr(float(c[1]))) for s, c in zip(steps, result.coords)])
        else:
            writer.writerow(['snapshot_step', 'pc1'])
            writer.writerows([(s, repr(float(c[0]))) for s, c in zip(steps, result.coords)])
    with open(os.path.join(run_dir, 'pca_variance.json'), 'w') as f:
        json.dump({'explained_variance': result.explained_variance.tolist(), 'rank': result.rank}, f, indent=2)
    return result
