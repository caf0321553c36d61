from typing import Callable, Union

import torch

from gildrl.log import create_logger
from gildrl.numerics.params import NetworkParams, flatten, leaf_copy, param_count
from gildrl.tools.exceptions import DimensionMismatchError, NonFiniteError, NonScalarOutputError

log = create_logger(__name__)


def gradients(output: torch.Tensor,
              wrt: NetworkParams,
              create_graph: bool = False,
              retain_graph: bool = None) -> NetworkParams:
    """Gradient of a scalar tensor with respect to every tensor of `wrt`.

    Args:
        -output: scalar (single element) tensor
        -wrt: parameters the output was computed from
        -create_graph: keep the gradient differentiable (one more level of differentiation)
        -retain_graph: keep the graph of `output` alive, defaults to `create_graph`

    Returns:
        -gradient per parameter name, exact zeros for parameters the output does not use
    """
    if output.numel() != 1:
        raise NonScalarOutputError(output.shape)
    names = list(wrt.keys())
    tensors = [wrt[k] for k in names]
    if output.requires_grad:
        grads = torch.autograd.grad(output.reshape(()), tensors,
                                    create_graph=create_graph,
                                    retain_graph=retain_graph,
                                    allow_unused=True)
    else:
        grads = [None] * len(tensors)
    result = {k: (torch.zeros_like(t) if g is None else g) for k, t, g in zip(names, tensors, grads)}
    for k, g in result.items():
        if not bool(torch.isfinite(g).all()):
            raise NonFiniteError(f'gradient of {k}')
    return result


def _diagnose(scalar_fn: Callable, leaves: NetworkParams) -> str:
    """Replay a failing gradient under anomaly detection to name the backward function at fault."""
    with torch.autograd.detect_anomaly(check_nan=True):
        try:
            copies = leaf_copy(leaves)
            out = scalar_fn(copies)
            torch.autograd.grad(out.reshape(()), list(copies.values()), allow_unused=True)
        except (RuntimeError, NonFiniteError) as err:
            return str(err).splitlines()[0]
    return 'unknown operation'


def grad(scalar_fn: Callable[[NetworkParams], torch.Tensor], at: NetworkParams) -> NetworkParams:
    """Gradient of `scalar_fn` at the parameter values `at`.

    The parameters are copied, `at` is never modified and does not need `requires_grad`.
    """
    leaves = leaf_copy(at)
    out = scalar_fn(leaves)
    try:
        return gradients(out, leaves)
    except NonFiniteError as err:
        culprit = _diagnose(scalar_fn, at)
        log.error(f'Non finite gradient: {culprit}')
        raise NonFiniteError(culprit, str(err)) from err


def mixed_vjp(first_gradient: NetworkParams,
              outer: Union[torch.Tensor, NetworkParams],
              wrt: NetworkParams) -> NetworkParams:
    """Differentiate `outer . first_gradient` with respect to `wrt`.

    `first_gradient` must have been produced with `create_graph=True`; `outer` is treated as a
    constant. When `first_gradient` is the gradient of L with respect to phi, this is the
    vector / mixed-Jacobian product outer . d2L/(dphi dwrt).
    """
    vector = flatten(outer) if isinstance(outer, dict) else outer.reshape(-1)
    expected = param_count(first_gradient)
    if vector.numel() != expected:
        raise DimensionMismatchError('outer vector length', expected, vector.numel())
    flat = flatten(first_gradient)
    expression = torch.dot(vector.detach(), flat)
    return gradients(expression, wrt)


def grad_of_grad_expression(outer_vec: torch.Tensor,
                            inner_scalar_fn: Callable[[NetworkParams, NetworkParams], torch.Tensor],
                            phi: NetworkParams,
                            omega: NetworkParams) -> NetworkParams:
    """d/domega [outer_vec . dL/dphi] evaluated at (phi, omega), with L = inner_scalar_fn(phi, omega)."""
    if outer_vec.numel() != param_count(phi):
        raise DimensionMismatchError('outer vector length', param_count(phi), outer_vec.numel())
    phi_leaves = leaf_copy(phi)
    omega_leaves = leaf_copy(omega)
    inner = inner_scalar_fn(phi_leaves, omega_leaves)
    first = gradients(inner, phi_leaves, create_graph=True)
    return mixed_vjp(first, outer_vec, omega_leaves)
