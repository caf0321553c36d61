from typing import Sequence

from gildrl.data.rng import RngRegistry
from gildrl.rl.abstract import ActorCriticAgent
from gildrl.rl.config import Algo, AlgoConfig
from gildrl.rl.ddpg import DDPGAgent
from gildrl.rl.sac import SACAgent
from gildrl.rl.td3 import TD3Agent

AGENTS = {Algo.DDPG: DDPGAgent,
          Algo.TD3: TD3Agent,
          Algo.SAC: SACAgent}


def make_agent(cfg: AlgoConfig, state_dim: int, action_dim: int,
               action_scale: Sequence[float], rng: RngRegistry) -> ActorCriticAgent:
    return AGENTS[cfg.algo](cfg, state_dim, action_dim, action_scale, rng)
