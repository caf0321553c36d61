import os
import unittest
from tempfile import TemporaryDirectory

from gildrl.experiment.config import RunConfig, Variant, parse_key_values, typed_overrides
from gildrl.gild.state import MetaSign
from gildrl.rl.config import Algo
from gildrl.tools.exceptions import RunConfigError, UnknownEnvironmentError


class TestRunConfig(unittest.TestCase):
    def setUp(self):
        self.tempfile = TemporaryDirectory()
        self.path = os.path.join(self.tempfile.name, 'config.txt')

    def tearDown(self):
        self.tempfile.cleanup()

    def test_defaults(self):
        cfg = RunConfig().validate()
        self.assertEqual(cfg.total_steps, 100_000)
        self.assertEqual(cfg.eval_interval, 5000)
        self.assertEqual(cfg.eval_episodes, 10)
        self.assertEqual(cfg.warm_start_fraction, 0.01)
        self.assertEqual(cfg.start_steps, 100)
        self.assertIs(cfg.meta_sign, MetaSign.MAXIMIZE_SUPERIORITY)
        self.assertEqual(cfg.outer_lr, cfg.lr)

    def test_text_round_trip(self):
        cfg = RunConfig(env_id='mass2d-sparse', algo=Algo.SAC, variant=Variant.GILD, demo_path='demos.csv',
                        meta_lr_outer=1e-3, gild_frozen=True, lr=0.1 + 0.2)
        cfg.save(self.path)
        loaded = RunConfig.from_file(self.path)
        self.assertEqual(loaded, cfg)
        self.assertEqual(loaded.outer_lr, 1e-3)

    def test_comments_and_blank_lines(self):
        text = '# desk scale run\n\nenv_id = mass2d-dense   # dense channel\nalgo=ddpg\n  seed = 4\n'
        cfg = RunConfig.from_text(text)
        self.assertEqual((cfg.env_id, cfg.algo, cfg.seed), ('mass2d-dense', Algo.DDPG, 4))

    def test_overrides(self):
        cfg = RunConfig.from_text('seed = 1\ntotal_steps = 1e4\n', ['seed=7', 'meta_lr_outer = none'])
        self.assertEqual(cfg.seed, 7)
        self.assertEqual(cfg.total_steps, 10_000)
        self.assertIsNone(cfg.meta_lr_outer)

    def test_duplicated_key(self):
        with self.assertRaises(RunConfigError) as ctx:
            parse_key_values(['seed = 1', '# comment', 'seed = 2'])
        self.assertIn('line 3', str(ctx.exception))

    def test_malformed_line(self):
        with self.assertRaises(RunConfigError) as ctx:
            RunConfig.from_text('seed = 1\nalgo td3\n')
        self.assertIn('line 2', str(ctx.exception))

    def test_unknown_key(self):
        with self.assertRaises(RunConfigError):
            RunConfig.from_text('learning_rate = 0.1\n')

    def test_invalid_values(self):
        for text in ('algo = ppo', 'seed = one', 'gild_frozen = maybe', 'log_level = LOUD',
                     'warm_start_fraction = 1.5', 'total_steps = 100\neval_interval = 500',
                     'tau = 2', 'start_steps = -1'):
            with self.assertRaises(RunConfigError, msg=text):
                RunConfig.from_text(text)

    def test_unknown_environment(self):
        with self.assertRaises(UnknownEnvironmentError):
            RunConfig.from_text('env_id = hopper-sparse')

    def test_demonstrations_required(self):
        for variant in ('il', 'gild'):
            with self.assertRaises(RunConfigError):
                RunConfig.from_text(f'variant = {variant}')
        RunConfig.from_text('variant = gild\ndemo_path = demos.csv')

    def test_gild_window_after_warm_up(self):
        cfg = RunConfig(variant=Variant.GILD, demo_path='demos.csv').validate()
        self.assertGreater(cfg.warm_start_fraction * cfg.total_steps, cfg.start_steps)
        base = 'demo_path = demos.csv\ntotal_steps = 2000\neval_interval = 100\n'
        with self.assertRaises(RunConfigError) as ctx:
            RunConfig.from_text(base + 'variant = gild\nstart_steps = 20')
        self.assertIn('start_steps', str(ctx.exception))
        RunConfig.from_text(base + 'variant = gild\nstart_steps = 19')
        RunConfig.from_text(base + 'variant = gild\nstart_steps = 1999\nwarm_start_fraction = 1.0')
        RunConfig.from_text(base + 'variant = il\nstart_steps = 20')

    def test_missing_file(self):
        with self.assertRaises(RunConfigError):
            RunConfig.from_file(os.path.join(self.tempfile.name, 'missing.txt'))

    def test_typed_overrides(self):
        self.assertEqual(typed_overrides(['total_steps=500', 'progress=true', 'lr=0.001']),
                         {'total_steps': 500, 'progress': True, 'lr': 0.001})
        with self.assertRaises(RunConfigError):
            typed_overrides(['unknown=1'])

    def test_algo_config(self):
        algo = RunConfig(algo=Algo.SAC, alpha_ent=0.1, policy_delay=3).algo_config()
        self.assertIs(algo.algo, Algo.SAC)
        self.assertEqual((algo.alpha_ent, algo.policy_delay), (0.1, 3))
