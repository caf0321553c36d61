from abc import ABC, abstractmethod
from typing import Dict, List, Sequence, Tuple

import numpy as np
import torch

from gildrl.data.buffer import Batch
from gildrl.data.rng import RngRegistry, RngStream
from gildrl.log import create_logger
from gildrl.nets.actors import Actor
from gildrl.nets.critic import Critic
from gildrl.nets.target import hard_copy, soft_update
from gildrl.numerics import ops
from gildrl.numerics.autodiff import gradients
from gildrl.numerics.params import NetworkParams, leaf_copy
from gildrl.rl.config import AlgoConfig, CriticOptimizer

log = create_logger(__name__)

W_RL_FLOOR = 1e-8


def sgd_step(params: NetworkParams, grads: NetworkParams, lr: float) -> NetworkParams:
    """Plain gradient step returning fresh leaves, `params` is left untouched."""
    return {k: (params[k].detach() - lr * grads[k].detach()).requires_grad_(True) for k in params}


class ActorCriticAgent(ABC):
    n_critics: int = 1
    uses_actor_target: bool = True

    def __init__(self, cfg: AlgoConfig, state_dim: int, action_dim: int,
                 action_scale: Sequence[float], rng: RngRegistry):
        """
        Off-policy actor-critic agent.

        The agent owns the live actor parameters, the critic parameters and the target copies.
        Loss methods take the actor parameters as an argument so that copies (pseudo-update,
        GILD step) can be evaluated against the live critics.

        Args:
            -cfg: hyperparameters
            -state_dim: dimension of the states
            -action_dim: dimension of the actions
            -action_scale: per dimension action bound
            -rng: random streams, `init` draws the initial parameters
        """
        self.cfg = cfg
        self.state_dim = state_dim
        self.action_dim = action_dim
        hidden = (cfg.hidden_units, cfg.hidden_units)
        self.actor = self._make_actor(state_dim, action_dim, hidden, action_scale)
        self.critic = Critic(state_dim, action_dim, hidden)

        init = rng['init'].torch
        self.actor.params = leaf_copy(self.actor.init(init))
        self.critics: List[NetworkParams] = [leaf_copy(self.critic.init(init)) for _ in range(self.n_critics)]
        self.actor_target = hard_copy(self.actor.params) if self.uses_actor_target else None
        self.critic_targets = [hard_copy(p) for p in self.critics]
        self._optimizers = [self._make_optimizer(p) for p in self.critics]
        self._warned_demo_clamp = False

    @abstractmethod
    def _make_actor(self, state_dim, action_dim, hidden, action_scale) -> Actor:
        pass

    def _make_optimizer(self, params: NetworkParams) -> torch.optim.Optimizer:
        if self.cfg.critic_optimizer is CriticOptimizer.ADAM:
            return torch.optim.Adam(list(params.values()), lr=self.cfg.lr)
        return torch.optim.SGD(list(params.values()), lr=self.cfg.lr)

    @property
    def action_scale(self) -> torch.Tensor:
        return self.actor.action_scale

    # Acting

    def select_action(self, state: np.ndarray, explore: bool, stream: RngStream = None) -> np.ndarray:
        s = torch.as_tensor(np.asarray(state, dtype=np.float64), dtype=ops.DTYPE).reshape(1, self.state_dim)
        with torch.no_grad():
            a = self._explore(s, stream) if explore else self.actor.act(self.actor.params, s)
        return a.reshape(self.action_dim).numpy().copy()

    @abstractmethod
    def _explore(self, states: torch.Tensor, stream: RngStream) -> torch.Tensor:
        pass

    # Critics

    def q_values(self, critics: List[NetworkParams], states, actions) -> List[torch.Tensor]:
        return [self.critic.q(p, states, actions) for p in critics]

    @abstractmethod
    def meta_q(self, critics: List[NetworkParams], states, actions) -> torch.Tensor:
        """Critic used to compare policies: single critic, first twin or twin minimum."""
        pass

    @abstractmethod
    def td_target(self, batch: Batch, stream: RngStream) -> torch.Tensor:
        pass

    def critic_loss(self, critics: List[NetworkParams], batch: Batch, target: torch.Tensor) -> torch.Tensor:
        losses = [ops.mean(ops.square(ops.sub(q, target))) for q in self.q_values(critics, batch.states, batch.actions)]
        total = losses[0]
        for loss in losses[1:]:
            total = ops.add(total, loss)
        return total

    def critic_update(self, batch: Batch, stream: RngStream) -> float:
        """One gradient step of every critic on the mean squared TD error, returns the loss."""
        with torch.no_grad():
            target = self.td_target(batch, stream)
        loss = self.critic_loss(self.critics, batch, target)
        merged = {f'{i}/{k}': v for i, p in enumerate(self.critics) for k, v in p.items()}
        grads = gradients(loss, merged)
        for i, (params, opt) in enumerate(zip(self.critics, self._optimizers)):
            for k, v in params.items():
                v.grad = grads[f'{i}/{k}']
            opt.step()
            opt.zero_grad(set_to_none=True)
        return float(loss.detach())

    # Actor losses

    @abstractmethod
    def rl_actor_loss(self, phi: NetworkParams, states: torch.Tensor, stream: RngStream) -> torch.Tensor:
        pass

    @abstractmethod
    def il_loss(self, phi: NetworkParams, s_d: torch.Tensor, a_d: torch.Tensor) -> torch.Tensor:
        pass

    def clamp_demo_actions(self, a_d: torch.Tensor) -> torch.Tensor:
        scale = self.action_scale
        if bool((a_d.abs() > scale).any()):
            if not self._warned_demo_clamp:
                log.warning('Demonstration actions outside the action bounds are clamped')
                self._warned_demo_clamp = True
            a_d = torch.maximum(torch.minimum(a_d, scale), -scale)
        return a_d

    def ilrl_weights(self, batch: Batch) -> Tuple[float, float]:
        """(w_rl, w_il) with w_rl = beta / mean |Q(s, a)| over the batch, floored at 1e-8."""
        with torch.no_grad():
            q = self.meta_q(self.critics, batch.states, batch.actions)
            denominator = max(float(q.abs().mean()), W_RL_FLOOR)
        return self.cfg.beta / denominator, self.cfg.w_il

    def rlil_loss(self, phi: NetworkParams, batch: Batch, s_d, a_d, stream: RngStream) -> torch.Tensor:
        w_rl, w_il = self.ilrl_weights(batch)
        rl = self.rl_actor_loss(phi, batch.states, stream)
        il = self.il_loss(phi, s_d, a_d)
        return ops.add(ops.mul(rl, w_rl), ops.mul(il, w_il))

    def gild_policy_action(self, phi: NetworkParams, s_d: torch.Tensor, stream: RngStream) -> torch.Tensor:
        """Action fed to the GILD network, differentiable with respect to `phi`."""
        return self.actor.act(phi, s_d)

    # Actor updates

    def pseudo_update(self, phi: NetworkParams, batch: Batch, s_d, a_d, stream: RngStream) -> NetworkParams:
        """One RL + IL step from a copy of `phi`; `phi` is never modified."""
        copy = leaf_copy(phi)
        loss = self.rlil_loss(copy, batch, s_d, a_d, stream)
        return sgd_step(copy, gradients(loss, copy), self.cfg.lr)

    def vanilla_actor_update(self, batch: Batch, stream: RngStream) -> float:
        phi = self.actor.params
        loss = self.rl_actor_loss(phi, batch.states, stream)
        self.actor.params = sgd_step(phi, gradients(loss, phi), self.cfg.lr)
        return float(loss.detach())

    def il_actor_update(self, batch: Batch, s_d, a_d, stream: RngStream) -> float:
        phi = self.actor.params
        loss = self.rlil_loss(phi, batch, s_d, a_d, stream)
        self.actor.params = sgd_step(phi, gradients(loss, phi), self.cfg.lr)
        return float(loss.detach())

    # Schedules

    def actor_update_due(self, step: int) -> bool:
        return True

    def target_sync_due(self, step: int) -> bool:
        return True

    def sync_targets(self):
        tau = self.cfg.tau
        self.critic_targets = [soft_update(t, o, tau) for t, o in zip(self.critic_targets, self.critics)]
        if self.uses_actor_target:
            self.actor_target = soft_update(self.actor_target, self.actor.params, tau)

    # Persistence

    def networks(self) -> Dict[str, NetworkParams]:
        nets = {'actor': self.actor.params}
        for i, (p, t) in enumerate(zip(self.critics, self.critic_targets)):
            nets[f'critic{i + 1}'] = p
            nets[f'critic{i + 1}_target'] = t
        if self.uses_actor_target:
            nets['actor_target'] = self.actor_target
        return nets
