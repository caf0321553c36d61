from typing import List

import torch

from gildrl.data.buffer import Batch
from gildrl.data.rng import RngStream
from gildrl.nets.actors import Actor, DeterministicActor
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams
from gildrl.rl.abstract import ActorCriticAgent


class DDPGAgent(ActorCriticAgent):
    """Deterministic actor, one critic, targets synchronised after every update."""
    n_critics = 1
    uses_actor_target = True

    def _make_actor(self, state_dim, action_dim, hidden, action_scale) -> Actor:
        return DeterministicActor(state_dim, action_dim, hidden, action_scale)

    def _explore(self, states: torch.Tensor, stream: RngStream) -> torch.Tensor:
        a = self.actor.act(self.actor.params, states)
        sigma = self.cfg.expl_noise * self.action_scale.numpy()
        noise = torch.as_tensor(stream.np.normal(0.0, 1.0, size=tuple(a.shape)) * sigma, dtype=ops.DTYPE)
        return self.actor.clip_action(ops.add(a, noise))

    def meta_q(self, critics: List[NetworkParams], states, actions) -> torch.Tensor:
        return self.critic.q(critics[0], states, actions)

    def target_action(self, batch: Batch, stream: RngStream) -> torch.Tensor:
        return self.actor.act(self.actor_target, batch.next_states)

    def td_target(self, batch: Batch, stream: RngStream) -> torch.Tensor:
        a_next = self.target_action(batch, stream)
        q_next = self.meta_q(self.critic_targets, batch.next_states, a_next)
        return self._bootstrap(batch, q_next)

    def _bootstrap(self, batch: Batch, q_next: torch.Tensor) -> torch.Tensor:
        not_done = ops.sub(1.0, batch.dones)
        return ops.add(batch.rewards, ops.mul(ops.mul(not_done, q_next), self.cfg.gamma))

    def rl_actor_loss(self, phi: NetworkParams, states: torch.Tensor, stream: RngStream) -> torch.Tensor:
        return ops.neg(ops.mean(self.meta_q(self.critics, states, self.actor.act(phi, states))))

    def il_loss(self, phi: NetworkParams, s_d: torch.Tensor, a_d: torch.Tensor) -> torch.Tensor:
        a_d = self.clamp_demo_actions(a_d)
        return ops.mean(ops.square(ops.sub(self.actor.act(phi, s_d), a_d)))
