from typing import Dict, Sequence

import torch

from gildrl.log import create_logger
from gildrl.nets.mlp import Activation, MlpSpec, init_network, mlp_forward
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams
from gildrl.tools.exceptions import DimensionMismatchError

log = create_logger(__name__)


class GildNet(object):
    def __init__(self, state_dim: int, action_dim: int, hidden_dims: Sequence[int] = (256, 256)):
        """
        Learned imitation loss f(s_d, a_d, a_pi) >= 0.

        The input is the concatenation [s_d | a_d | a_pi] in that order, the output layer is a
        softplus so that every per-sample loss is nonnegative.

        Args:
            -state_dim: dimension of the states
            -action_dim: dimension of the actions
            -hidden_dims: hidden layer widths
        """
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.spec = MlpSpec(state_dim + 2 * action_dim, tuple(hidden_dims), 1,
                            Activation.RELU, Activation.SOFTPLUS)

    def init(self, generator: torch.Generator) -> NetworkParams:
        return init_network(self.spec, generator)

    def policy_input_rows(self) -> slice:
        start = self.state_dim + self.action_dim
        return slice(start, start + self.action_dim)

    def forward(self, params: NetworkParams, s_d: torch.Tensor, a_d: torch.Tensor, a_pi: torch.Tensor) -> torch.Tensor:
        """Per-sample loss, shape [batch, 1]."""
        if s_d.shape[-1] != self.state_dim:
            raise DimensionMismatchError('gild state input', self.state_dim, s_d.shape[-1])
        for name, a in (('demo action', a_d), ('policy action', a_pi)):
            if a.shape[-1] != self.action_dim:
                raise DimensionMismatchError(f'gild {name} input', self.action_dim, a.shape[-1])
        if not (s_d.shape[:-1] == a_d.shape[:-1] == a_pi.shape[:-1]):
            raise DimensionMismatchError('gild batch size', s_d.shape[:-1], (a_d.shape[:-1], a_pi.shape[:-1]))
        return mlp_forward(params, self.spec, ops.concat(s_d, a_d, a_pi))

    def loss(self, params: NetworkParams, s_d: torch.Tensor, a_d: torch.Tensor, a_pi: torch.Tensor) -> torch.Tensor:
        return ops.mean(self.forward(params, s_d, a_d, a_pi))

    def zero_policy_input(self, params: NetworkParams) -> NetworkParams:
        """Copy of `params` whose output does not depend on the policy action."""
        out = {k: v.detach().clone() for k, v in params.items()}
        first = self.spec.layers()[0][0]
        out[f'{first}.weight'][self.policy_input_rows()] = 0.0
        return out

    def to_dict(self) -> Dict:
        return {'spec': self.spec.to_dict()}


def gild_forward(omega: NetworkParams, net: GildNet, s_d: torch.Tensor, a_d: torch.Tensor, a_pi: torch.Tensor) -> torch.Tensor:
    return net.forward(omega, s_d, a_d, a_pi)
