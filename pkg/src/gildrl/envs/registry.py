from typing import Callable, Dict

from gildrl.envs.abstract import Environment
from gildrl.envs.mass2d import Mass2D
from gildrl.envs.point2d import Point2D
from gildrl.envs.sparse import Sparsify
from gildrl.tools.exceptions import UnknownEnvironmentError


def _point2d(channel: str, threshold: float) -> Environment:
    env = Point2D()
    env.channel = channel
    return env


def _mass2d(channel: str, threshold: float) -> Environment:
    env = Sparsify(Mass2D(), threshold)
    env.channel = channel
    return env


_FAMILIES: Dict[str, Callable[[str, float], Environment]] = {
    'point2d': _point2d,
    'mass2d': _mass2d,
}

ENVIRONMENT_IDS = tuple(f'{family}-{channel}' for family in _FAMILIES for channel in ('dense', 'sparse'))


def split_env_id(env_id: str):
    family, _, channel = env_id.rpartition('-')
    if family not in _FAMILIES or channel not in ('dense', 'sparse'):
        raise UnknownEnvironmentError(env_id, ENVIRONMENT_IDS)
    return family, channel


def make_env(env_id: str, sparse_threshold: float = 1.0) -> Environment:
    """Build a fresh environment; its `channel` names the reward the agent is trained on."""
    family, channel = split_env_id(env_id)
    return _FAMILIES[family](channel, sparse_threshold)


def dense_id(env_id: str) -> str:
    family, _ = split_env_id(env_id)
    return f'{family}-dense'
