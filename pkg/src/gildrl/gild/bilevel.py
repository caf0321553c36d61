"""Bi-level GILD updates.

Lower level: the actor takes a step on the RL loss plus the GILD loss, keeping the GILD part of
the gradient differentiable with respect to the GILD parameters. Upper level: the GILD
parameters move along the derivative of the meta-loss through that step.
"""
from dataclasses import dataclass
from typing import Callable, Tuple

import torch

from gildrl.data.buffer import Batch
from gildrl.data.rng import RngStream
from gildrl.gild.state import GildState, MetaLossVariant, RetainedPath
from gildrl.log import create_logger
from gildrl.numerics import ops
from gildrl.numerics.autodiff import gradients, mixed_vjp
from gildrl.numerics.params import NetworkParams, leaf_copy
from gildrl.rl.abstract import ActorCriticAgent
from gildrl.tools.exceptions import MissingRetainedPathError

log = create_logger(__name__)


@dataclass(slots=True)
class GateDecision:
    use_gild: bool
    use_vanilla: bool


def warmstart_gate(step: int, total_steps: int, warm_start_fraction: float) -> GateDecision:
    """GILD is used while `step` < fraction * total_steps, vanilla RL afterwards."""
    use_gild = warm_start_fraction >= 1.0 or step < warm_start_fraction * total_steps
    return GateDecision(use_gild, not use_gild)


def gild_actor_update(agent: ActorCriticAgent,
                      state: GildState,
                      phi: NetworkParams,
                      batch: Batch,
                      s_d: torch.Tensor,
                      a_d: torch.Tensor,
                      policy_stream: RngStream,
                      gild_stream: RngStream) -> Tuple[NetworkParams, RetainedPath, float, float]:
    """Actor step on rl_actor_loss + L_GILD.

    The RL gradient is a constant with respect to omega, the GILD gradient keeps its graph. The
    retained path is stored in `state` for the meta step that must follow.

    Returns:
        -new live actor parameters (detached leaves)
        -retained path
        -RL actor loss
        -GILD loss
    """
    lr = state.inner_lr
    rl_leaves = leaf_copy(phi)
    rl_loss = agent.rl_actor_loss(rl_leaves, batch.states, policy_stream)
    g_rl = gradients(rl_loss, rl_leaves)

    phi_leaves = leaf_copy(phi)
    omega_leaves = leaf_copy(state.omega)
    a_pi = agent.gild_policy_action(phi_leaves, s_d, gild_stream)
    gild_loss = state.net.loss(omega_leaves, s_d, a_d, a_pi)
    g_gild = gradients(gild_loss, phi_leaves, create_graph=True)

    phi_new = {k: phi_leaves[k].detach() - lr * (ops.constant(g_rl[k]) + g_gild[k]) for k in phi_leaves}
    retained = RetainedPath(phi_leaves, omega_leaves, g_gild, phi_new, lr)
    state.retained = retained
    live = {k: v.detach().requires_grad_(True) for k, v in phi_new.items()}
    return live, retained, float(rl_loss.detach()), float(gild_loss.detach())


def meta_loss(agent: ActorCriticAgent,
              phi_new: NetworkParams,
              phi_hat: NetworkParams,
              val_states: torch.Tensor,
              variant: MetaLossVariant = MetaLossVariant.DIFFERENCE_TANH) -> torch.Tensor:
    """Superiority of the GILD-updated actor over the pseudo-updated one on validation states.

    Both actors act deterministically (tanh of the mean for the Gaussian actor).
    """
    q_new = agent.meta_q(agent.critics, val_states, agent.actor.act(phi_new, val_states))
    if variant is MetaLossVariant.INTUITIVE:
        return ops.mean(q_new)
    q_hat = agent.meta_q(agent.critics, val_states, agent.actor.act(phi_hat, val_states))
    return ops.mean(ops.tanh(ops.sub(q_new, ops.constant(q_hat))))


def gild_meta_update(state: GildState,
                     meta_loss_fn: Callable[[NetworkParams], torch.Tensor]) -> Tuple[NetworkParams, float]:
    """Move omega along the meta-gradient through the retained actor step.

    With v = dL_meta/dphi_new and m = v . d2L_GILD/(dphi domega), the update is
    omega + sign * meta_lr_outer * inner_lr * m. The retained path is consumed.

    Args:
        -state: GILD state holding the retained path of the actor step just performed
        -meta_loss_fn: meta-loss as a function of the new actor parameters

    Returns:
        -updated omega (unchanged when the GILD network is frozen)
        -meta-loss value
    """
    retained = state.retained
    if retained is None:
        raise MissingRetainedPathError()
    state.retained = None

    phi_new = {k: v.detach().requires_grad_(True) for k, v in retained.phi_new.items()}
    loss = meta_loss_fn(phi_new)
    v = gradients(loss, phi_new)
    m = mixed_vjp(retained.g_gild, v, retained.omega)

    if not state.frozen:
        scale = state.meta_sign.factor * state.meta_lr_outer * retained.inner_lr
        state.omega = {k: (state.omega[k].detach() + scale * m[k]).detach() for k in state.omega}
    return state.omega, float(loss.detach())
