from typing import List

import torch

from gildrl.data.buffer import Batch
from gildrl.data.rng import RngStream
from gildrl.nets.actors import Actor, GaussianActor
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams
from gildrl.rl.abstract import ActorCriticAgent


class SACAgent(ActorCriticAgent):
    """Squashed Gaussian actor, twin critics with fixed entropy temperature, no actor target.

    Actor related steps run every step, the critic targets every `policy_delay` steps.
    """
    n_critics = 2
    uses_actor_target = False
    actor: GaussianActor

    def _make_actor(self, state_dim, action_dim, hidden, action_scale) -> Actor:
        return GaussianActor(state_dim, action_dim, hidden, action_scale)

    def _explore(self, states: torch.Tensor, stream: RngStream) -> torch.Tensor:
        action, _ = self.actor.rsample(self.actor.params, states, stream.torch)
        return action

    def meta_q(self, critics: List[NetworkParams], states, actions) -> torch.Tensor:
        q1, q2 = self.q_values(critics, states, actions)
        return ops.minimum(q1, q2)

    def td_target(self, batch: Batch, stream: RngStream) -> torch.Tensor:
        a_next, log_prob = self.actor.rsample(self.actor.params, batch.next_states, stream.torch)
        q_next = self.meta_q(self.critic_targets, batch.next_states, a_next)
        soft = ops.sub(q_next, ops.mul(log_prob, self.cfg.alpha_ent))
        not_done = ops.sub(1.0, batch.dones)
        return ops.add(batch.rewards, ops.mul(ops.mul(not_done, soft), self.cfg.gamma))

    def rl_actor_loss(self, phi: NetworkParams, states: torch.Tensor, stream: RngStream) -> torch.Tensor:
        action, log_prob = self.actor.rsample(phi, states, stream.torch)
        q = self.meta_q(self.critics, states, action)
        return ops.mean(ops.sub(ops.mul(log_prob, self.cfg.alpha_ent), q))

    def il_loss(self, phi: NetworkParams, s_d: torch.Tensor, a_d: torch.Tensor) -> torch.Tensor:
        a_d = self.clamp_demo_actions(a_d)
        return ops.neg(ops.mean(self.actor.log_prob(phi, s_d, a_d)))

    def gild_policy_action(self, phi: NetworkParams, s_d: torch.Tensor, stream: RngStream) -> torch.Tensor:
        action, _ = self.actor.rsample(phi, s_d, stream.torch)
        return action

    def target_sync_due(self, step: int) -> bool:
        return step % self.cfg.policy_delay == 0
