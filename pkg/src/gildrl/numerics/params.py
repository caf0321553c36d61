from typing import Dict

import torch

from gildrl.tools.exceptions import DimensionMismatchError, ShapeMismatchError

NetworkParams = Dict[str, torch.Tensor]


def leaf_copy(params: NetworkParams, requires_grad: bool = True) -> NetworkParams:
    """Detached copies of the parameters, sharing no autograd history with the originals."""
    return {k: v.detach().clone().requires_grad_(requires_grad) for k, v in params.items()}


def param_count(params: NetworkParams) -> int:
    return sum(v.numel() for v in params.values())


def flatten(params: NetworkParams) -> torch.Tensor:
    if not params:
        return torch.zeros(0, dtype=torch.float64)
    return torch.cat([v.reshape(-1) for v in params.values()])


def check_same_layout(a: NetworkParams, b: NetworkParams, what: str = 'parameters'):
    if list(a.keys()) != list(b.keys()):
        raise DimensionMismatchError(what, list(a.keys()), list(b.keys()))
    for k in a:
        if a[k].shape != b[k].shape:
            raise ShapeMismatchError(f'{what}[{k}]', a[k].shape, b[k].shape)


def params_equal(a: NetworkParams, b: NetworkParams) -> bool:
    """Bit-exact equality of two parameter sets."""
    return list(a.keys()) == list(b.keys()) and all(torch.equal(a[k].detach(), b[k].detach()) for k in a)
