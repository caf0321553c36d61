from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import torch

from gildrl.nets.gild_net import GildNet
from gildrl.numerics.params import NetworkParams


class MetaLossVariant(Enum):
    DIFFERENCE_TANH = 'difference_tanh'
    INTUITIVE = 'intuitive'


class MetaSign(Enum):
    MAXIMIZE_SUPERIORITY = 'maximize_superiority'
    DESCEND_META_LOSS = 'descend_meta_loss'

    @property
    def factor(self) -> float:
        return -1.0 if self is MetaSign.MAXIMIZE_SUPERIORITY else 1.0


@dataclass
class RetainedPath:
    """Differentiable link between the GILD network and the actor produced by one GILD step.

    `phi_new` = `phi` - `inner_lr` * (g_rl + `g_gild`) where `g_gild` was computed with
    `create_graph=True` at (`phi`, `omega`).
    """
    phi: NetworkParams
    omega: NetworkParams
    g_gild: NetworkParams
    phi_new: NetworkParams
    inner_lr: float


@dataclass
class GildState:
    net: GildNet
    omega: NetworkParams
    inner_lr: float = 3e-4
    meta_lr_outer: float = 3e-4
    meta_loss_variant: MetaLossVariant = MetaLossVariant.DIFFERENCE_TANH
    meta_sign: MetaSign = MetaSign.MAXIMIZE_SUPERIORITY
    warm_start_fraction: float = 0.01
    total_steps: int = 100_000
    frozen: bool = False
    active: bool = True
    retained: Optional[RetainedPath] = field(default=None, repr=False)

    @classmethod
    def create(cls, net: GildNet, generator: torch.Generator, zero_policy_input: bool = False, **kwargs) -> "GildState":
        omega = net.init(generator)
        if zero_policy_input:
            omega = net.zero_policy_input(omega)
        return cls(net, omega, **kwargs)
