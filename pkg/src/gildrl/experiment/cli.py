import argparse
import json
import sys
from typing import List, Optional

from gildrl.data.rng import RngRegistry
from gildrl.envs.registry import ENVIRONMENT_IDS
from gildrl.experiment.analysis import kl_series, pca_path
from gildrl.experiment.config import RunConfig, typed_overrides
from gildrl.experiment.evaluation import evaluate
from gildrl.experiment.expert import DEFAULT_RHO, collect_demos_from_checkpoint, load_actor, train_expert
from gildrl.log import attach_stream_handler, create_logger, detach_handler, parse_level, set_all_gildrl_logger_level
from gildrl.rl.config import Algo
from gildrl.simulation import Trainer
from gildrl.tools.exceptions import ConfigurationError, NumericAbort, RunConfigError
from gildrl.tools.render import emit_plots

log = create_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='gildrl', description='Actor-critic RL with meta-learned imitation losses')
    parser.add_argument('--log-level', default='WARNING', help='Console log level')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('train-expert', help='Train vanilla RL on the dense channel')
    p.add_argument('--env', required=True, choices=ENVIRONMENT_IDS)
    p.add_argument('--algo', required=True, choices=[a.value for a in Algo])
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out', required=True)
    p.add_argument('--override', action='append', default=[], metavar='KEY=VALUE')

    p = sub.add_parser('collect-demos', help='Record demonstrations of a behavior checkpoint')
    p.add_argument('--checkpoint', required=True, help='Checkpoint file or expert run directory')
    p.add_argument('--env', required=True, choices=ENVIRONMENT_IDS)
    p.add_argument('--samples', type=int, default=1000)
    p.add_argument('--out', required=True)
    p.add_argument('--rho', type=float, default=DEFAULT_RHO)
    p.add_argument('--seed', type=int, default=0)

    p = sub.add_parser('train', help='Run a training configuration')
    p.add_argument('--config', required=True)
    p.add_argument('--override', action='append', default=[], metavar='KEY=VALUE')

    p = sub.add_parser('evaluate', help='Evaluate a checkpoint on the dense channel')
    p.add_argument('--checkpoint', required=True)
    p.add_argument('--env', required=True, choices=ENVIRONMENT_IDS)
    p.add_argument('--episodes', type=int, default=10)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--seed', type=int, default=0)

    p = sub.add_parser('analyze', help='Analyse a run directory')
    p.add_argument('analysis', choices=['kl', 'pca-path'])
    p.add_argument('--run', required=True)

    p = sub.add_parser('plot', help='SVG figures of one or several runs')
    p.add_argument('--run', required=True, nargs='+')
    p.add_argument('--out', required=True)
    return parser


def _train_expert(args):
    overrides = typed_overrides(args.override)
    fixed = {'env_id', 'algo', 'variant', 'seed', 'output_dir'}.intersection(overrides)
    if fixed:
        raise RunConfigError(f"train-expert sets {', '.join(sorted(fixed))} itself")
    records = train_expert(args.env, Algo(args.algo), args.seed, args.out, **overrides)
    print(json.dumps({'checkpoints': len(records), 'expert_return': records[-1].eval_return if records else None}))


def _collect_demos(args):
    demos = collect_demos_from_checkpoint(args.checkpoint, args.env, args.samples, args.seed, args.rho)
    demos.save(args.out)
    print(json.dumps(demos.metadata))


def _train(args):
    cfg = RunConfig.from_file(args.config, args.override)
    set_all_gildrl_logger_level(parse_level(cfg.log_level))
    summary = Trainer(cfg).run()
    print(json.dumps(summary))


def _evaluate(args):
    actor, params, _ = load_actor(args.checkpoint)
    result = evaluate(actor, params, args.env, args.episodes, RngRegistry(args.seed), args.workers)
    print(json.dumps({'mean': result.mean, 'std': result.std, 'goal_rate': result.goal_rate}))


def _analyze(args):
    if args.analysis == 'kl':
        rows = kl_series(args.run)
        print(json.dumps({'kl': rows}))
    else:
        result = pca_path(args.run)
        print(json.dumps({'explained_variance': result.explained_variance.tolist(), 'rank': result.rank}))


def _plot(args):
    print('\n'.join(emit_plots(args.run, args.out)))


COMMANDS = {'train-expert': _train_expert,
            'collect-demos': _collect_demos,
            'train': _train,
            'evaluate': _evaluate,
            'analyze': _analyze,
            'plot': _plot}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        level = parse_level(args.log_level)
    except ValueError as err:
        print(f'error: {err}', file=sys.stderr)
        return ConfigurationError.exit_code
    set_all_gildrl_logger_level(level)
    handler = attach_stream_handler(level)
    try:
        COMMANDS[args.command](args)
    except ConfigurationError as err:
        log.error(str(err))
        print(f'error: {err}', file=sys.stderr)
        return err.exit_code
    except NumericAbort as err:
        log.error(str(err))
        print(f'numeric abort: {err}', file=sys.stderr)
        return err.exit_code
    finally:
        detach_handler(handler)
    return 0


if __name__ == '__main__':
    sys.exit(main())
