from typing import Dict, Sequence

import torch

from gildrl.nets.mlp import Activation, MlpSpec, init_network, mlp_forward
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams


class Critic(object):
    def __init__(self, state_dim: int, action_dim: int, hidden_dims: Sequence[int]):
        """
        Action-value network Q(s, a) over the concatenation [s | a], output shape [batch, 1].

        Args:
            -state_dim: dimension of the states
            -action_dim: dimension of the actions
            -hidden_dims: hidden layer widths
        """
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.spec = MlpSpec(state_dim + action_dim, tuple(hidden_dims), 1, Activation.RELU, Activation.IDENTITY)

    def init(self, generator: torch.Generator) -> NetworkParams:
        return init_network(self.spec, generator)

    def q(self, params: NetworkParams, states: torch.Tensor, actions: torch.Tensor) -> torch.Tensor:
        return mlp_forward(params, self.spec, ops.concat(states, actions))

    def to_dict(self) -> Dict:
        return {'spec': self.spec.to_dict()}
