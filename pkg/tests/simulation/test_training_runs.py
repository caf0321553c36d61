import json
import os
import unittest
from tempfile import TemporaryDirectory
from unittest import mock

import numpy as np
import pandas as pd

from gildrl.data.checkpoint import Checkpoint, read_checkpoint_index
from gildrl.data.demos import DemonstrationSet
from gildrl.envs.point2d import Point2D
from gildrl.experiment.config import RunConfig, Variant
from gildrl.rl.config import Algo
from gildrl.simulation import Trainer, train_run
from gildrl.tools.exceptions import NonFiniteError, RunConfigError


def random_demos(seed: int = 0, n: int = 64) -> DemonstrationSet:
    rng = np.random.default_rng(seed)
    return DemonstrationSet(rng.uniform(0., 1., (n, 2)), rng.uniform(-0.1, 0.1, (n, 2)),
                            {'env_id': 'point2d-sparse', 'behavior_return': 0.})


class TestTrainingRuns(unittest.TestCase):
    def setUp(self):
        self.tempfile = TemporaryDirectory()
        self.dir = self.tempfile.name

    def tearDown(self):
        self.tempfile.cleanup()

    def config(self, name: str, **changes) -> RunConfig:
        cfg = RunConfig(env_id='point2d-sparse',
                        total_steps=200,
                        eval_interval=100,
                        eval_episodes=2,
                        start_steps=50,
                        hidden_units=8,
                        gild_hidden_units=8,
                        batch_size=16,
                        buffer_capacity=1000,
                        train_log_interval=50,
                        demo_path=os.path.join(self.dir, 'demos.csv'),
                        output_dir=os.path.join(self.dir, name))
        return cfg.replace(**changes)

    def test_outputs(self):
        cfg = self.config('gild', algo=Algo.TD3, variant=Variant.GILD, warm_start_fraction=1.0)
        random_demos().save(cfg.demo_path)
        summary = train_run(cfg).summary()

        out = cfg.output_dir
        for name in ('config.txt', 'train.log', 'eval.csv', 'train.csv', 'final.json', 'summary.json',
                     os.path.join('checkpoints', 'index.csv')):
            self.assertTrue(os.path.exists(os.path.join(out, name)), name)

        eval_df = pd.read_csv(os.path.join(out, 'eval.csv'))
        self.assertEqual(list(eval_df.columns), ['step', 'mean_dense_return', 'std_dense_return'])
        self.assertEqual(eval_df['step'].tolist(), [100, 200])

        train_df = pd.read_csv(os.path.join(out, 'train.csv'))
        self.assertEqual(list(train_df.columns),
                         ['step', 'critic_loss', 'actor_loss', 'gild_loss', 'meta_loss', 'wall_ms'])
        self.assertEqual(train_df['step'].tolist(), [50, 100, 150, 200])

        records = read_checkpoint_index(out)
        self.assertEqual([r.step for r in records], [100, 200])
        self.assertTrue(all(os.path.exists(r.path) for r in records))

        final = Checkpoint.load(os.path.join(out, 'final.json'))
        self.assertEqual(final.step, 200)
        self.assertIn('gild', final.networks)
        self.assertIn('critic2_target', final.networks)
        self.assertEqual(RunConfig.from_file(os.path.join(out, 'config.txt')), cfg)

        with open(os.path.join(out, 'summary.json')) as f:
            self.assertEqual(json.load(f)['steps'], 200)
        self.assertEqual(summary['final_return'], eval_df['mean_dense_return'].iloc[-1])

    def test_same_seed_same_run(self):
        runs = []
        for name in ('a', 'b'):
            trainer = train_run(self.config(name, algo=Algo.SAC, seed=3))
            runs.append(trainer)
            with open(os.path.join(trainer.cfg.output_dir, 'eval.csv')) as f:
                runs[-1].eval_text = f.read()
        self.assertEqual(runs[0].eval_text, runs[1].eval_text)
        for k, v in runs[0].agent.actor.params.items():
            np.testing.assert_array_equal(v.detach().numpy(), runs[1].agent.actor.params[k].detach().numpy())

    def test_zero_gild_matches_vanilla(self):
        for algo in Algo:
            with self.subTest(algo=algo.value):
                vanilla = train_run(self.config(f'vanilla-{algo.value}', algo=algo))
                gild = train_run(self.config(f'gild-{algo.value}', algo=algo, variant=Variant.GILD,
                                             gild_frozen=True, gild_zero_policy_input=True,
                                             warm_start_fraction=1.0),
                                 demos=random_demos(1))
                texts = []
                for trainer in (vanilla, gild):
                    with open(os.path.join(trainer.cfg.output_dir, 'eval.csv')) as f:
                        texts.append(f.read())
                self.assertEqual(texts[0], texts[1])
                for k, v in vanilla.agent.actor.params.items():
                    np.testing.assert_array_equal(v.detach().numpy(), gild.agent.actor.params[k].detach().numpy())

    def test_gild_stops_after_warm_start(self):
        cfg = self.config('warm', algo=Algo.DDPG, variant=Variant.GILD, total_steps=400, eval_interval=200,
                          warm_start_fraction=0.25, start_steps=20, train_log_interval=20)
        trainer = train_run(cfg, demos=random_demos(2))
        df = pd.read_csv(os.path.join(cfg.output_dir, 'train.csv')).set_index('step')
        self.assertEqual(len(df), 20)
        self.assertTrue((df.loc[40:100, 'gild_loss'] > 0).all())
        self.assertTrue((df.loc[40:100, 'meta_loss'] != 0).all())
        self.assertFalse(trainer.gild.active)
        self.assertTrue((df.loc[120:, 'gild_loss'] == 0).all())
        self.assertTrue((df.loc[120:, 'meta_loss'] == 0).all())
        self.assertTrue((df.loc[40:, 'critic_loss'] != 0).all())

    def test_td3_policy_delay(self):
        trainer = Trainer(self.config('delay', algo=Algo.TD3, policy_delay=3))
        actor_update = mock.Mock(wraps=trainer.agent.vanilla_actor_update)
        trainer.agent.vanilla_actor_update = actor_update
        trainer.run()
        # train steps 50..199, the actor moves on multiples of 3
        self.assertEqual(actor_update.call_count, len([s for s in range(50, 200) if s % 3 == 0]))

    def test_ddpg_updates_actor_every_step(self):
        trainer = Trainer(self.config('every', algo=Algo.DDPG))
        actor_update = mock.Mock(wraps=trainer.agent.vanilla_actor_update)
        trainer.agent.vanilla_actor_update = actor_update
        trainer.run()
        self.assertEqual(actor_update.call_count, 150)

    def test_crash_report(self):
        cfg = self.config('crash', algo=Algo.DDPG)
        with mock.patch.object(Trainer, 'call_critic_update', side_effect=NonFiniteError('critic loss')):
            with self.assertRaises(NonFiniteError):
                train_run(cfg)
        with open(os.path.join(cfg.output_dir, 'crash_report.json')) as f:
            report = json.load(f)
        self.assertEqual(report['step'], 50)
        self.assertIn('NonFiniteError', report['error'])
        self.assertFalse(os.path.exists(os.path.join(cfg.output_dir, 'final.json')))
        self.assertEqual(len(pd.read_csv(os.path.join(cfg.output_dir, 'eval.csv'))), 0)

    def test_terminal_flag_in_buffer(self):
        trainer = Trainer(self.config('terminal'))
        trainer.env = Point2D(horizon=10)
        trainer._state = trainer.env.reset()
        for _ in range(10):
            trainer.call_env_step(np.array([0.1, 0.1]))
        self.assertEqual([float(trainer.buffer.get(i).done) for i in range(10)], [0.] * 9 + [1.])

        trainer._state = trainer.env.reset()
        for _ in range(10):
            trainer.call_env_step(np.zeros(2))
        self.assertEqual([float(trainer.buffer.get(i).done) for i in range(10, 20)], [0.] * 10)

    def test_gate_follows_state(self):
        trainer = Trainer(self.config('gate', variant=Variant.GILD, total_steps=400, warm_start_fraction=0.25,
                                      start_steps=20), demos=random_demos(3))
        self.assertTrue(trainer.gild.active)
        trainer.step = 99
        self.assertTrue(trainer.update_gate())
        trainer.step = 100
        with self.assertLogs('gildrl.simulation', level='INFO'):
            self.assertFalse(trainer.update_gate())
        self.assertFalse(trainer.gild.active)
        trainer.gild.warm_start_fraction = 1.0
        self.assertTrue(trainer.update_gate())

    def test_missing_demonstrations(self):
        with self.assertRaises(RunConfigError):
            Trainer(self.config('missing', variant=Variant.IL))

    def test_demonstrations_of_another_environment(self):
        demos = DemonstrationSet(np.zeros((4, 4)), np.zeros((4, 2)))
        with self.assertRaises(RunConfigError):
            Trainer(self.config('mass', variant=Variant.IL), demos=demos)
