import filecmp
import os
import unittest
from tempfile import TemporaryDirectory

from gildrl.tools.exceptions import EmptyLogError
from gildrl.tools.render import emit_plots, padded_limits


def write(path: str, text: str):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, 'w') as f:
        f.write(text)


EVAL = 'step,mean_dense_return,std_dense_return\n5000,-40.5,3.25\n10000,-22.0,2.5\n15000,-12.75,1.0\n'
TRAIN = ('step,critic_loss,actor_loss,gild_loss,meta_loss,wall_ms\n'
         '100,0.5,-1.0,0.7,0.01,350.0\n200,0.4,-1.2,0.6,-0.002,340.0\n300,0.3,-1.3,0.0,0.0,120.0\n')


class TestRender(unittest.TestCase):
    def setUp(self):
        self.tempfile = TemporaryDirectory()
        self.run = os.path.join(self.tempfile.name, 'td3-gild')
        write(os.path.join(self.run, 'eval.csv'), EVAL)
        write(os.path.join(self.run, 'train.csv'), TRAIN)

    def tearDown(self):
        self.tempfile.cleanup()

    def test_padding(self):
        self.assertEqual(padded_limits([0., 10.]), (-0.5, 10.5))
        low, high = padded_limits([2.])
        self.assertAlmostEqual(low, 1.9, places=15)
        self.assertAlmostEqual(high, 2.1, places=15)
        self.assertEqual(padded_limits([0.]), (-0.05, 0.05))

    def test_files(self):
        written = emit_plots([self.run], os.path.join(self.tempfile.name, 'figures'))
        self.assertEqual([os.path.basename(p) for p in written], ['learning_curve.svg', 'gild_loss.svg', 'meta_loss.svg'])
        for path in written:
            with open(path) as f:
                self.assertIn('<svg', f.read())

    def test_byte_identical(self):
        first = emit_plots([self.run], os.path.join(self.tempfile.name, 'a'))
        second = emit_plots([self.run], os.path.join(self.tempfile.name, 'b'))
        for a, b in zip(first, second):
            self.assertTrue(filecmp.cmp(a, b, shallow=False), os.path.basename(a))

    def test_single_point(self):
        run = os.path.join(self.tempfile.name, 'single')
        write(os.path.join(run, 'eval.csv'), 'step,mean_dense_return,std_dense_return\n5000,12.0,0.0\n')
        written = emit_plots([run], os.path.join(self.tempfile.name, 'single_figures'))
        self.assertEqual(len(written), 1)

    def test_several_runs_and_kl(self):
        other = os.path.join(self.tempfile.name, 'td3')
        write(os.path.join(other, 'eval.csv'), EVAL)
        write(os.path.join(other, 'kl.csv'), 'step,kl\n5000,0.5\n10000,0.25\n')
        written = emit_plots([self.run, other], os.path.join(self.tempfile.name, 'both'))
        self.assertIn('kl.svg', [os.path.basename(p) for p in written])

    def test_empty_log(self):
        run = os.path.join(self.tempfile.name, 'empty')
        write(os.path.join(run, 'eval.csv'), 'step,mean_dense_return,std_dense_return\n')
        with self.assertRaises(EmptyLogError):
            emit_plots([run], os.path.join(self.tempfile.name, 'empty_figures'))
        with self.assertRaises(EmptyLogError):
            emit_plots([os.path.join(self.tempfile.name, 'missing')], self.tempfile.name)
