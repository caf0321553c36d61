from .params import NetworkParams
from .tape import Tape
from .autodiff import grad, gradients, grad_of_grad_expression, mixed_vjp
