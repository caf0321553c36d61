from gildrl.numerics.params import NetworkParams, check_same_layout
from gildrl.tools.exceptions import RunConfigError


def soft_update(target: NetworkParams, online: NetworkParams, tau: float) -> NetworkParams:
    """tau * online + (1 - tau) * target, elementwise. Returns a new detached parameter set."""
    if not 0.0 < tau <= 1.0:
        raise RunConfigError(f'target update rate must lie in (0, 1], got {tau}')
    check_same_layout(target, online, 'target network')
    if tau == 1.0:
        return {k: v.detach().clone() for k, v in online.items()}
    return {k: (tau * online[k].detach() + (1.0 - tau) * target[k].detach()) for k in target}


def hard_copy(online: NetworkParams) -> NetworkParams:
    return {k: v.detach().clone() for k, v in online.items()}
