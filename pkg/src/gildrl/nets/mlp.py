from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

import torch

from gildrl.log import create_logger
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams
from gildrl.tools.exceptions import DimensionMismatchError, NetworkSpecError

log = create_logger(__name__)


class Activation(Enum):
    RELU = 'relu'
    TANH = 'tanh'
    SOFTPLUS = 'softplus'
    IDENTITY = 'identity'

    def apply(self, x: torch.Tensor) -> torch.Tensor:
        if self is Activation.RELU:
            return ops.relu(x)
        if self is Activation.TANH:
            return ops.tanh(x)
        if self is Activation.SOFTPLUS:
            return ops.softplus(x)
        return x


@dataclass(frozen=True)
class MlpSpec:
    """Fully connected network layout.

    Layers are named `hidden0`, `hidden1`, ... and `out`, each with a `weight` of shape
    [fan_in, fan_out] and a `bias` of shape [fan_out].
    """
    input_dim: int
    hidden_dims: Tuple[int, ...]
    output_dim: int
    hidden_activation: Activation = Activation.RELU
    output_activation: Activation = Activation.IDENTITY
    prefix: str = field(default='')

    def __post_init__(self):
        object.__setattr__(self, 'hidden_dims', tuple(int(h) for h in self.hidden_dims))
        if len(self.hidden_dims) < 1:
            raise NetworkSpecError('at least one hidden layer is required')
        for name, dim in [('input_dim', self.input_dim), ('output_dim', self.output_dim)] + \
                         [(f'hidden_dims[{i}]', h) for i, h in enumerate(self.hidden_dims)]:
            if int(dim) < 1:
                raise NetworkSpecError(f'{name} must be >= 1, got {dim}')
        if self.hidden_activation is not Activation.RELU:
            raise NetworkSpecError(f'unsupported hidden activation {self.hidden_activation.value}')

    def layers(self) -> Tuple[Tuple[str, int, int], ...]:
        """(name, fan_in, fan_out) of every layer, input to output."""
        dims = (self.input_dim,) + self.hidden_dims + (self.output_dim,)
        names = [f'{self.prefix}hidden{i}' for i in range(len(self.hidden_dims))] + [f'{self.prefix}out']
        return tuple((n, dims[i], dims[i + 1]) for i, n in enumerate(names))

    def to_dict(self) -> Dict:
        return {'input_dim': self.input_dim,
                'hidden_dims': list(self.hidden_dims),
                'output_dim': self.output_dim,
                'hidden_activation': self.hidden_activation.value,
                'output_activation': self.output_activation.value,
                'prefix': self.prefix}

    @classmethod
    def from_dict(cls, data: Dict) -> "MlpSpec":
        return cls(input_dim=int(data['input_dim']),
                   hidden_dims=tuple(data['hidden_dims']),
                   output_dim=int(data['output_dim']),
                   hidden_activation=Activation(data.get('hidden_activation', 'relu')),
                   output_activation=Activation(data.get('output_activation', 'identity')),
                   prefix=data.get('prefix', ''))


def init_network(spec: MlpSpec, generator: torch.Generator) -> NetworkParams:
    """Draw the parameters of `spec`.

    Weights are uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases are zero. The result only
    depends on the spec and on the state of `generator`.
    """
    params = dict()
    for name, fan_in, fan_out in spec.layers():
        bound = fan_in ** -0.5
        u = torch.rand((fan_in, fan_out), generator=generator, dtype=ops.DTYPE)
        params[f'{name}.weight'] = (2.0 * u - 1.0) * bound
        params[f'{name}.bias'] = torch.zeros(fan_out, dtype=ops.DTYPE)
    return params


def linear(params: NetworkParams, name: str, x: torch.Tensor) -> torch.Tensor:
    return ops.add(ops.matmul(x, params[f'{name}.weight']), params[f'{name}.bias'])


def mlp_hidden(params: NetworkParams, spec: MlpSpec, x: torch.Tensor) -> torch.Tensor:
    """Features after the last hidden layer."""
    if x.shape[-1] != spec.input_dim:
        raise DimensionMismatchError(f'{spec.prefix or "network"} input', spec.input_dim, x.shape[-1])
    h = x
    for name, _, _ in spec.layers()[:-1]:
        h = spec.hidden_activation.apply(linear(params, name, h))
    return h


def mlp_forward(params: NetworkParams, spec: MlpSpec, x: torch.Tensor) -> torch.Tensor:
    h = mlp_hidden(params, spec, x)
    name = spec.layers()[-1][0]
    return spec.output_activation.apply(linear(params, name, h))
