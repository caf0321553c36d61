from typing import List

import torch

from gildrl.data.buffer import Batch
from gildrl.data.rng import RngStream
from gildrl.numerics import ops
from gildrl.numerics.params import NetworkParams
from gildrl.rl.ddpg import DDPGAgent


class TD3Agent(DDPGAgent):
    """Twin critics, clipped target policy noise, actor and targets updated every `policy_delay` steps."""
    n_critics = 2
    uses_actor_target = True

    def meta_q(self, critics: List[NetworkParams], states, actions) -> torch.Tensor:
        return self.critic.q(critics[0], states, actions)

    def target_noise(self, shape, stream: RngStream) -> torch.Tensor:
        """N(0, policy_noise) clipped to [-noise_clip, noise_clip], before action scaling."""
        eps = torch.randn(shape, generator=stream.torch, dtype=ops.DTYPE) * self.cfg.policy_noise
        return ops.clip(eps, -self.cfg.noise_clip, self.cfg.noise_clip)

    def target_action(self, batch: Batch, stream: RngStream) -> torch.Tensor:
        a = self.actor.act(self.actor_target, batch.next_states)
        noise = ops.mul(self.target_noise(a.shape, stream), self.action_scale)
        return self.actor.clip_action(ops.add(a, noise))

    def td_target(self, batch: Batch, stream: RngStream) -> torch.Tensor:
        a_next = self.target_action(batch, stream)
        q1, q2 = self.q_values(self.critic_targets, batch.next_states, a_next)
        return self._bootstrap(batch, ops.minimum(q1, q2))

    def actor_update_due(self, step: int) -> bool:
        return step % self.cfg.policy_delay == 0

    def target_sync_due(self, step: int) -> bool:
        return step % self.cfg.policy_delay == 0
