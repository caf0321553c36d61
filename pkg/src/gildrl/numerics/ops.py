"""Differentiable primitives on 64-bit tensors.

Every primitive checks the shapes of its operands, refuses to produce NaN or Inf and records
itself on the active `Tape` if there is one. Broadcasting is limited to what the networks need:
identical shapes, a single-element operand, or an operand matching the trailing dimensions of
the other (bias rows).
"""
import math
from typing import Optional, Union

import torch
import torch.nn.functional as F
from torch.distributions import Normal

from gildrl.numerics.tape import current_tape
from gildrl.tools.exceptions import NonFiniteError, ShapeMismatchError

DTYPE = torch.float64

Operand = Union[torch.Tensor, float, int]

_LOG_2 = math.log(2.0)


def tensor(data, requires_grad: bool = False) -> torch.Tensor:
    """Build a float64 tensor from nested sequences, numpy arrays or scalars."""
    out = torch.as_tensor(data, dtype=DTYPE).clone()
    if requires_grad:
        out.requires_grad_(True)
    return out


def _as_tensor(x: Operand) -> torch.Tensor:
    if isinstance(x, torch.Tensor):
        return x
    return torch.tensor(x, dtype=DTYPE)


def _check_finite(name: str, out: torch.Tensor):
    if not bool(torch.isfinite(out).all()):
        n_bad = int((~torch.isfinite(out)).sum())
        raise NonFiniteError(name, f"{n_bad} of {out.numel()} values")


def _apply(name: str, fn, *operands, **kwargs) -> torch.Tensor:
    out = fn(*operands, **kwargs)
    _check_finite(name, out)
    tape = current_tape()
    if tape is not None:
        tape.record(name, fn, operands, kwargs, out)
    return out


def _compatible(a: torch.Size, b: torch.Size) -> bool:
    if a == b:
        return True
    if math.prod(a) == 1 or math.prod(b) == 1:
        return True
    if len(b) <= len(a) and a[len(a) - len(b):] == b:
        return True
    if len(a) <= len(b) and b[len(b) - len(a):] == a:
        return True
    return False


def _binary(name: str, fn, a: Operand, b: Operand) -> torch.Tensor:
    a = _as_tensor(a)
    b = _as_tensor(b)
    if not _compatible(a.shape, b.shape):
        raise ShapeMismatchError(name, a.shape, b.shape)
    return _apply(name, fn, a, b)


def matmul(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    if b.dim() != 2 or a.dim() < 1 or a.shape[-1] != b.shape[0]:
        raise ShapeMismatchError('matmul', a.shape, b.shape)
    return _apply('matmul', torch.matmul, a, b)


def add(a: Operand, b: Operand) -> torch.Tensor:
    return _binary('add', torch.add, a, b)


def sub(a: Operand, b: Operand) -> torch.Tensor:
    return _binary('sub', torch.sub, a, b)


def mul(a: Operand, b: Operand) -> torch.Tensor:
    return _binary('mul', torch.mul, a, b)


def minimum(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    return _binary('minimum', torch.minimum, a, b)


def neg(x: torch.Tensor) -> torch.Tensor:
    return _apply('neg', torch.neg, x)


def mean(x: torch.Tensor, dim: Optional[int] = None, keepdim: bool = False) -> torch.Tensor:
    if dim is None:
        return _apply('mean', torch.mean, x)
    return _apply('mean', torch.mean, x, dim=dim, keepdim=keepdim)


def sum(x: torch.Tensor, dim: Optional[int] = None, keepdim: bool = False) -> torch.Tensor:
    if dim is None:
        return _apply('sum', torch.sum, x)
    return _apply('sum', torch.sum, x, dim=dim, keepdim=keepdim)


def clip(x: torch.Tensor, low: Operand, high: Operand) -> torch.Tensor:
    low = _as_tensor(low)
    high = _as_tensor(high)
    for bound in (low, high):
        if not _compatible(x.shape, bound.shape):
            raise ShapeMismatchError('clip', x.shape, bound.shape)
    return _apply('clip', torch.clamp, x, low, high)


def relu(x: torch.Tensor) -> torch.Tensor:
    return _apply('relu', torch.relu, x)


def tanh(x: torch.Tensor) -> torch.Tensor:
    return _apply('tanh', torch.tanh, x)


def _softplus(x):
    # log(1 + e^x) is returned as x beyond 50, the remainder is below float64 resolution there
    return F.softplus(x, beta=1.0, threshold=50.0)


def softplus(x: torch.Tensor) -> torch.Tensor:
    return _apply('softplus', _softplus, x)


def exp(x: torch.Tensor) -> torch.Tensor:
    return _apply('exp', torch.exp, x)


def log(x: torch.Tensor) -> torch.Tensor:
    return _apply('log', torch.log, x)


def square(x: torch.Tensor) -> torch.Tensor:
    return _apply('square', torch.square, x)


def abs(x: torch.Tensor) -> torch.Tensor:
    return _apply('abs', torch.abs, x)


def atanh(x: torch.Tensor) -> torch.Tensor:
    return _apply('atanh', torch.atanh, x)


def concat(*tensors: torch.Tensor) -> torch.Tensor:
    lead = tensors[0].shape[:-1]
    for t in tensors[1:]:
        if t.shape[:-1] != lead:
            raise ShapeMismatchError('concat', tensors[0].shape, t.shape)
    return _apply('concat', _concat_last, *tensors)


def _concat_last(*tensors):
    return torch.cat(tensors, dim=-1)


def _gaussian_log_density(x, mean, log_std):
    dist = Normal(mean, torch.exp(log_std), validate_args=False)
    return dist.log_prob(x).sum(dim=-1, keepdim=True)


def gaussian_log_density(x: torch.Tensor, mean: torch.Tensor, log_std: torch.Tensor) -> torch.Tensor:
    """Log-density of a diagonal Gaussian, summed over the last dimension (kept)."""
    for name, other in (('mean', mean), ('log_std', log_std)):
        if not _compatible(x.shape, other.shape):
            raise ShapeMismatchError(f'gaussian_log_density[{name}]', x.shape, other.shape)
    return _apply('gaussian_log_density', _gaussian_log_density, x, mean, log_std)


def _log_one_minus_tanh_sq(u):
    return 2.0 * (_LOG_2 - u - F.softplus(-2.0 * u, beta=1.0, threshold=50.0))


def log_one_minus_tanh_sq(u: torch.Tensor) -> torch.Tensor:
    """log(1 - tanh(u)^2) in a form that stays finite for saturated u."""
    return _apply('log_one_minus_tanh_sq', _log_one_minus_tanh_sq, u)


def constant(x: torch.Tensor) -> torch.Tensor:
    """Mark a value as constant: it is excluded from every later differentiation."""
    return _apply('constant', torch.Tensor.detach, x)
