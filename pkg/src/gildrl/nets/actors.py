from abc import ABC, abstractmethod
from typing import Dict, Sequence, Tuple

import torch

from gildrl.log import create_logger
from gildrl.nets.mlp import Activation, MlpSpec, init_network, linear, mlp_forward, mlp_hidden
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams

log = create_logger(__name__)

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
ATANH_EPS = 1e-6


class Actor(ABC):
    def __init__(self, state_dim: int, action_dim: int, action_scale: Sequence[float]):
        """
        Policy network. The architecture lives in the actor, the parameters are plain values
        passed to every method so that updated copies can be evaluated without touching
        `self.params`.

        Args:
            -state_dim: dimension of the states
            -action_dim: dimension of the actions
            -action_scale: per dimension bound, actions lie in [-scale, scale]
        """
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.action_scale = ops.tensor(action_scale).reshape(action_dim)
        self.params: NetworkParams = dict()

    @abstractmethod
    def init(self, generator: torch.Generator) -> NetworkParams:
        pass

    @abstractmethod
    def act(self, params: NetworkParams, states: torch.Tensor) -> torch.Tensor:
        """Deterministic (exploitation) action."""
        pass

    @abstractmethod
    def to_dict(self) -> Dict:
        pass

    def clip_action(self, action: torch.Tensor) -> torch.Tensor:
        return ops.clip(action, ops.neg(self.action_scale), self.action_scale)


class DeterministicActor(Actor):
    def __init__(self, state_dim: int, action_dim: int, hidden_dims: Sequence[int], action_scale: Sequence[float]):
        super(DeterministicActor, self).__init__(state_dim, action_dim, action_scale)
        self.spec = MlpSpec(state_dim, tuple(hidden_dims), action_dim, Activation.RELU, Activation.TANH)

    def init(self, generator: torch.Generator) -> NetworkParams:
        self.params = init_network(self.spec, generator)
        return self.params

    def act(self, params: NetworkParams, states: torch.Tensor) -> torch.Tensor:
        return ops.mul(mlp_forward(params, self.spec, states), self.action_scale)

    def to_dict(self) -> Dict:
        return {'type': 'deterministic',
                'spec': self.spec.to_dict(),
                'action_scale': self.action_scale.tolist()}


class GaussianActor(Actor):
    def __init__(self, state_dim: int, action_dim: int, hidden_dims: Sequence[int], action_scale: Sequence[float]):
        """
        Tanh squashed diagonal Gaussian policy. The trunk output layer is the mean head, a second
        linear head `log_std` reads the same hidden features.
        """
        super(GaussianActor, self).__init__(state_dim, action_dim, action_scale)
        self.spec = MlpSpec(state_dim, tuple(hidden_dims), action_dim, Activation.RELU, Activation.IDENTITY)

    def init(self, generator: torch.Generator) -> NetworkParams:
        params = init_network(self.spec, generator)
        fan_in = self.spec.hidden_dims[-1]
        bound = fan_in ** -0.5
        u = torch.rand((fan_in, self.action_dim), generator=generator, dtype=ops.DTYPE)
        params['log_std.weight'] = (2.0 * u - 1.0) * bound
        params['log_std.bias'] = torch.zeros(self.action_dim, dtype=ops.DTYPE)
        self.params = params
        return params

    def distribution(self, params: NetworkParams, states: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """Pre-squash mean and clamped log standard deviation."""
        h = mlp_hidden(params, self.spec, states)
        mean = linear(params, 'out', h)
        log_std = ops.clip(linear(params, 'log_std', h), LOG_STD_MIN, LOG_STD_MAX)
        return mean, log_std

    def _squashed_log_prob(self, u, mean, log_std) -> torch.Tensor:
        base = ops.gaussian_log_density(u, mean, log_std)
        correction = ops.sum(ops.log_one_minus_tanh_sq(u), dim=-1, keepdim=True)
        return ops.sub(ops.sub(base, correction), ops.sum(ops.log(self.action_scale)))

    def rsample(self, params: NetworkParams, states: torch.Tensor,
                generator: torch.Generator) -> Tuple[torch.Tensor, torch.Tensor]:
        """Reparameterized action sample and its log-probability (shape [batch, 1])."""
        mean, log_std = self.distribution(params, states)
        eps = torch.randn(mean.shape, generator=generator, dtype=ops.DTYPE)
        u = ops.add(mean, ops.mul(ops.exp(log_std), eps))
        action = ops.mul(ops.tanh(u), self.action_scale)
        return action, self._squashed_log_prob(u, mean, log_std)

    def log_prob(self, params: NetworkParams, states: torch.Tensor, actions: torch.Tensor) -> torch.Tensor:
        """Log-probability of given in-bound actions, the inverse squash is kept 1e-6 inside +-1."""
        mean, log_std = self.distribution(params, states)
        ratio = ops.clip(ops.mul(actions, 1.0 / self.action_scale), -1.0 + ATANH_EPS, 1.0 - ATANH_EPS)
        u = ops.atanh(ratio)
        return self._squashed_log_prob(u, mean, log_std)

    def act(self, params: NetworkParams, states: torch.Tensor) -> torch.Tensor:
        mean, _ = self.distribution(params, states)
        return ops.mul(ops.tanh(mean), self.action_scale)

    def to_dict(self) -> Dict:
        return {'type': 'gaussian',
                'spec': self.spec.to_dict(),
                'action_scale': self.action_scale.tolist()}


def actor_from_dict(data: Dict) -> Actor:
    spec = MlpSpec.from_dict(data['spec'])
    cls = GaussianActor if data['type'] == 'gaussian' else DeterministicActor
    return cls(spec.input_dim, spec.output_dim, spec.hidden_dims, data['action_scale'])
