import json
import os
import traceback
from dataclasses import dataclass, field
from time import perf_counter
from typing import Dict, List, Optional

import numpy as np

from gildrl.data.buffer import ReplayBuffer, Transition
from gildrl.data.checkpoint import Checkpoint, GildrlEncoder, checkpoint_dir, checkpoint_path
from gildrl.data.demos import DemonstrationSet
from gildrl.data.rng import RngRegistry
from gildrl.envs.registry import make_env
from gildrl.experiment.config import RunConfig, Variant
from gildrl.experiment.evaluation import evaluate
from gildrl.gild.bilevel import gild_actor_update, gild_meta_update, meta_loss, warmstart_gate
from gildrl.gild.state import GildState
from gildrl.log import attach_log_file, create_logger, detach_handler, parse_level
from gildrl.nets.gild_net import GildNet
from gildrl.rl.factory import make_agent
from gildrl.tools.exceptions import NumericAbort, RunConfigError
from gildrl.tools.observer import (CheckpointRow, CSVCheckpointObserver, CSVEvalObserver, CSVTrainObserver,
                                   EvalRecord, Subject, TrainRecord)
from gildrl.tools.progress import ProgressBar

log = create_logger(__name__)


@dataclass
class _Window:
    """Accumulates the losses and timings between two train records."""
    steps: int = 0
    seconds: float = 0.
    losses: Dict[str, List[float]] = field(default_factory=lambda: {'critic_loss': [], 'actor_loss': [],
                                                                     'gild_loss': [], 'meta_loss': []})

    def add(self, name: str, value: Optional[float]):
        if value is not None:
            self.losses[name].append(value)

    def mean(self, name: str) -> float:
        values = self.losses[name]
        return float(np.mean(values)) if values else 0.


class Trainer(Subject):
    def __init__(self, cfg: RunConfig, demos: Optional[DemonstrationSet] = None):
        """
        Runs one training configuration: acting on the training channel, critic and actor
        updates of the configured variant, periodic evaluation on the dense channel, checkpoints.

        Args:
            -cfg: run configuration
            -demos: demonstrations, loaded from `cfg.demo_path` when None and the variant needs them
        """
        super(Trainer, self).__init__()
        self.cfg = cfg.validate()
        self.rng = RngRegistry(cfg.seed)
        self.env = make_env(cfg.env_id, cfg.sparse_threshold)
        self.agent = make_agent(cfg.algo_config(), self.env.state_dim, self.env.action_dim,
                                self.env.action_scale, self.rng)
        self.buffer = ReplayBuffer(self.env.state_dim, self.env.action_dim, cfg.buffer_capacity)

        self.demos = None
        if cfg.variant is not Variant.VANILLA:
            if demos is None and not os.path.exists(cfg.demo_path):
                raise RunConfigError(f'demonstration file {cfg.demo_path} does not exist')
            self.demos = demos if demos is not None else DemonstrationSet.load(cfg.demo_path)
            if (self.demos.state_dim, self.demos.action_dim) != (self.env.state_dim, self.env.action_dim):
                raise RunConfigError(f'demonstrations of dimensions ({self.demos.state_dim}, {self.demos.action_dim}) '
                                     f'do not match {cfg.env_id}')
            if len(self.demos) == 0:
                raise RunConfigError(f'demonstration set {cfg.demo_path} is empty')

        self.step = 0
        self.gild: Optional[GildState] = None
        if cfg.variant is Variant.GILD:
            hidden = (cfg.gild_hidden_units, cfg.gild_hidden_units)
            self.gild = GildState.create(GildNet(self.env.state_dim, self.env.action_dim, hidden),
                                         self.rng['gild_init'].torch,
                                         zero_policy_input=cfg.gild_zero_policy_input,
                                         inner_lr=cfg.lr,
                                         meta_lr_outer=cfg.outer_lr,
                                         meta_loss_variant=cfg.meta_loss_variant,
                                         meta_sign=cfg.meta_sign,
                                         warm_start_fraction=cfg.warm_start_fraction,
                                         total_steps=cfg.total_steps,
                                         frozen=cfg.gild_frozen)
            self.update_gate()

        self.eval_history: List[EvalRecord] = []
        self._state = None
        self._window = _Window()
        self._phase_seconds = {'gild': 0., 'vanilla': 0., 'warmup': 0.}
        self._phase_steps = {'gild': 0, 'vanilla': 0, 'warmup': 0}

    # Step phases

    def call_act(self) -> np.ndarray:
        if self.step < self.cfg.start_steps:
            scale = self.env.action_scale
            return self.rng['exploration'].np.uniform(-scale, scale)
        return self.agent.select_action(self._state, explore=True, stream=self.rng['exploration'])

    def call_env_step(self, action: np.ndarray):
        result = self.env.step(action)
        reward = result.reward(self.env.channel)
        self.buffer.push(Transition(self._state.copy(), np.asarray(action, dtype=np.float64), reward,
                                    result.next_state.copy(), result.terminal))
        self._state = self.env.reset(self.rng['env'].np) if result.done else result.next_state

    def call_critic_update(self, batch) -> float:
        start = perf_counter()
        loss = self.agent.critic_update(batch, self.rng['policy'])
        log.debug(f'Critic update done in [{perf_counter() - start:.5} s]')
        return loss

    def call_actor_update(self, batch):
        """Actor step of the configured variant.

        Returns:
            -actor loss, GILD loss and meta-loss (None when not computed)
            -True when the GILD machinery ran on this step
        """
        start = perf_counter()
        variant = self.cfg.variant
        gild_loss = meta = None
        gild_active = False
        if variant is Variant.VANILLA:
            actor_loss = self.agent.vanilla_actor_update(batch, self.rng['policy'])
        else:
            s_d, a_d = self.demos.sample(self.cfg.batch_size, self.rng['demo'].np)
            if variant is Variant.IL:
                actor_loss = self.agent.il_actor_update(batch, s_d, a_d, self.rng['policy'])
            elif self.gild.active:
                gild_active = True
                actor_loss, gild_loss, meta = self.call_gild_update(batch, s_d, a_d)
            else:
                actor_loss = self.agent.vanilla_actor_update(batch, self.rng['policy'])
        log.debug(f'Actor update done in [{perf_counter() - start:.5} s]')
        return actor_loss, gild_loss, meta, gild_active

    def call_gild_update(self, batch, s_d, a_d):
        agent = self.agent
        phi = agent.actor.params
        phi_hat = agent.pseudo_update(phi, batch, s_d, a_d, self.rng['meta'])
        phi_new, _, actor_loss, gild_loss = gild_actor_update(agent, self.gild, phi, batch, s_d, a_d,
                                                               self.rng['policy'], self.rng['meta'])
        agent.actor.params = phi_new
        val_states = self.buffer.sample_states(self.cfg.batch_size, self.rng['validation'].np)
        variant = self.gild.meta_loss_variant
        _, meta = gild_meta_update(self.gild, lambda p: meta_loss(agent, p, phi_hat, val_states, variant))
        return actor_loss, gild_loss, meta

    def update_gate(self) -> bool:
        """Open or close the GILD window for the current step, `gild.active` follows the gate."""
        if self.gild is None:
            return False
        was_active = self.gild.active
        self.gild.active = warmstart_gate(self.step, self.gild.total_steps, self.gild.warm_start_fraction).use_gild
        if was_active and not self.gild.active:
            log.info(f"GILD window closed at step {self.step}, vanilla updates from now on")
        return self.gild.active

    def train_step(self):
        batch = self.buffer.sample(self.cfg.batch_size, self.rng['buffer'].np)
        critic_loss = self.call_critic_update(batch)
        actor_loss = gild_loss = meta = None
        gild_active = False
        if self.agent.actor_update_due(self.step):
            actor_loss, gild_loss, meta, gild_active = self.call_actor_update(batch)
        if self.agent.target_sync_due(self.step):
            self.agent.sync_targets()
        w = self._window
        w.add('critic_loss', critic_loss)
        w.add('actor_loss', actor_loss)
        w.add('gild_loss', gild_loss)
        w.add('meta_loss', meta)
        return gild_active

    # Evaluation and records

    def run_spec(self) -> Dict:
        return {'env_id': self.cfg.env_id,
                'algo': self.cfg.algo.value,
                'variant': self.cfg.variant.value,
                'seed': self.cfg.seed,
                'actor': self.agent.actor.to_dict()}

    def call_evaluation(self):
        start = perf_counter()
        result = evaluate(self.agent.actor, self.agent.actor.params, self.cfg.env_id, self.cfg.eval_episodes,
                          self.rng, self.cfg.eval_workers, self.cfg.sparse_threshold)
        record = EvalRecord(self.step, result.mean, result.std)
        self.eval_history.append(record)
        self.notify(record)
        path = checkpoint_path(self.cfg.output_dir, self.step)
        Checkpoint(self.run_spec(), {'actor': self.agent.actor.params}, self.step, result.mean).save(path)
        self.notify(CheckpointRow(self.step, result.mean, os.path.basename(path)))
        log.info(f'Step {self.step}: dense return {result.mean:.4f} +- {result.std:.4f}, '
                 f'goal rate {result.goal_rate:.2f} [{perf_counter() - start:.5} s]')
        return result

    def flush_train_record(self):
        w = self._window
        if w.steps == 0:
            return
        record = TrainRecord(self.step, w.mean('critic_loss'), w.mean('actor_loss'), w.mean('gild_loss'),
                             w.mean('meta_loss'), 1e6 * w.seconds / w.steps)
        self.notify(record)
        self._window = _Window()

    def summary(self) -> Dict:
        returns = [r.mean_dense_return for r in self.eval_history]

        def per_1000(phase):
            n = self._phase_steps[phase]
            return 1e6 * self._phase_seconds[phase] / n if n else None

        return {'steps': self.step,
                'max_avg_return': max(returns) if returns else None,
                'final_return': returns[-1] if returns else None,
                'wall_seconds': sum(self._phase_seconds.values()),
                'wall_ms_per_1000_gild': per_1000('gild'),
                'wall_ms_per_1000_vanilla': per_1000('vanilla')}

    def create_crash_report(self) -> dict:
        return dict(step=self.step, error=traceback.format_exc())

    def final_checkpoint(self) -> Checkpoint:
        networks = dict(self.agent.networks())
        if self.gild is not None:
            networks['gild'] = self.gild.omega
        return Checkpoint(self.run_spec(), networks, self.step, self.eval_history[-1].mean_dense_return
                          if self.eval_history else None)

    # Main loop

    def run(self) -> Dict:
        """Launch the full training run, every output goes to `cfg.output_dir`.

        Returns:
            -the run summary, also written as summary.json
        """
        cfg = self.cfg
        out = cfg.output_dir
        os.makedirs(checkpoint_dir(out), exist_ok=True)
        cfg.save(os.path.join(out, 'config.txt'))
        handler = attach_log_file(os.path.join(out, 'train.log'), parse_level(cfg.log_level))
        for obs in (CSVEvalObserver(os.path.join(out, 'eval.csv')),
                    CSVTrainObserver(os.path.join(out, 'train.csv')),
                    CSVCheckpointObserver(os.path.join(checkpoint_dir(out), 'index.csv'))):
            self.attach(obs)

        log.info(f'Start {cfg.algo.value}/{cfg.variant.value} on {cfg.env_id} for {cfg.total_steps} steps')
        progress = ProgressBar(cfg.total_steps, text=f'{cfg.algo.value}-{cfg.variant.value}', enabled=cfg.progress)
        self._state = self.env.reset(self.rng['env'].np)
        try:
            while self.step < cfg.total_steps:
                start = perf_counter()
                action = self.call_act()
                self.call_env_step(action)
                if self.step >= cfg.start_steps:
                    phase = 'gild' if self.update_gate() else 'vanilla'
                    self.train_step()
                else:
                    phase = 'warmup'
                elapsed = perf_counter() - start
                self._phase_seconds[phase] += elapsed
                self._phase_steps[phase] += 1
                self._window.steps += 1
                self._window.seconds += elapsed
                self.step += 1

                if self.step % cfg.train_log_interval == 0:
                    self.flush_train_record()
                if self.step % cfg.eval_interval == 0:
                    self.call_evaluation()
                progress.update()
                progress.show()
            self.flush_train_record()
        except NumericAbort as err:
            log.error(f'Numeric abort at step {self.step}: {err}')
            with open(os.path.join(out, 'crash_report.json'), 'w') as f:
                json.dump(self.create_crash_report(), f, indent=2)
            raise
        finally:
            self.finish_observers()
            progress.end()
            detach_handler(handler)

        self.final_checkpoint().save(os.path.join(out, 'final.json'))
        summary = self.summary()
        with open(os.path.join(out, 'summary.json'), 'w') as f:
            json.dump(summary, f, indent=2, cls=GildrlEncoder)
        return summary


def train_run(cfg: RunConfig, demos: Optional[DemonstrationSet] = None) -> Trainer:
    trainer = Trainer(cfg, demos)
    trainer.run()
    return trainer
