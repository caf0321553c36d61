from dataclasses import dataclass
from enum import Enum

from gildrl.tools.exceptions import RunConfigError


class Algo(Enum):
    DDPG = 'ddpg'
    TD3 = 'td3'
    SAC = 'sac'


class CriticOptimizer(Enum):
    SGD = 'sgd'
    ADAM = 'adam'


@dataclass
class AlgoConfig:
    """Hyperparameters of the actor-critic algorithms.

    `policy_delay` is the actor / target delay of TD3 and the target update interval of SAC.
    `beta` and `w_il` weight the RL + IL objective.
    """
    algo: Algo = Algo.TD3
    lr: float = 3e-4
    gamma: float = 0.99
    tau: float = 5e-3
    batch_size: int = 256
    expl_noise: float = 0.2
    policy_noise: float = 0.2
    noise_clip: float = 0.5
    policy_delay: int = 2
    alpha_ent: float = 0.2
    beta: float = 2.5
    w_il: float = 1.0
    hidden_units: int = 256
    critic_optimizer: CriticOptimizer = CriticOptimizer.SGD

    def __post_init__(self):
        if isinstance(self.algo, str):
            self.algo = Algo(self.algo)
        if isinstance(self.critic_optimizer, str):
            self.critic_optimizer = CriticOptimizer(self.critic_optimizer)
        for name in ('lr', 'gamma', 'tau', 'batch_size', 'policy_delay', 'beta', 'hidden_units'):
            if getattr(self, name) <= 0:
                raise RunConfigError(f'{name} must be positive, got {getattr(self, name)}')
        for name in ('expl_noise', 'policy_noise', 'noise_clip', 'alpha_ent', 'w_il'):
            if getattr(self, name) < 0:
                raise RunConfigError(f'{name} must be nonnegative, got {getattr(self, name)}')
        if self.tau > 1:
            raise RunConfigError(f'tau must lie in (0, 1], got {self.tau}')
        if self.gamma > 1:
            raise RunConfigError(f'gamma must lie in (0, 1], got {self.gamma}')
