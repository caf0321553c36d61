"""Desk-scale comparison of TD3, TD3+IL and TD3+GILD variants on point2d-sparse.

Trains an expert on the dense channel, records demonstrations of a partially trained behavior
checkpoint, runs every variant over several seeds and prints the ordering, meta-loss
convergence, warm-start and meta-loss ablation checks.
"""
import argparse
import json
import os

import numpy as np
import pandas as pd

from gildrl.data.checkpoint import read_checkpoint_index
from gildrl.experiment.config import RunConfig, Variant
from gildrl.experiment.expert import collect_demos_from_checkpoint, train_expert
from gildrl.gild.state import MetaLossVariant
from gildrl.rl.config import Algo
from gildrl.simulation import Trainer

ENV = 'point2d-sparse'

VARIANTS = {
    'td3': dict(variant=Variant.VANILLA),
    'td3_il': dict(variant=Variant.IL),
    'td3_gild': dict(variant=Variant.GILD, warm_start_fraction=1.0),
    'td3_gild_1ws': dict(variant=Variant.GILD, warm_start_fraction=0.01),
    'td3_gild_intuitive': dict(variant=Variant.GILD, warm_start_fraction=1.0,
                               meta_loss_variant=MetaLossVariant.INTUITIVE),
}


def run_variant(name, seed, args, demo_path):
    out = os.path.join(args.out, name, f'seed_{seed}')
    cfg = RunConfig(env_id=ENV, algo=Algo.TD3, seed=seed, total_steps=args.steps,
                    eval_interval=args.eval_interval, start_steps=args.start_steps,
                    hidden_units=args.hidden, gild_hidden_units=args.hidden,
                    train_log_interval=10, demo_path=demo_path, output_dir=out,
                    progress=args.progress, **VARIANTS[name])
    summary = Trainer(cfg).run()
    summary['train'] = pd.read_csv(os.path.join(out, 'train.csv'))
    return summary


def meta_loss_ratio(train: pd.DataFrame, window: int) -> float:
    active = train[(train['step'] <= window) & (train['meta_loss'] != 0)]
    n = max(len(active) // 10, 1)
    first = active['meta_loss'].abs().head(n).mean()
    last = active['meta_loss'].abs().tail(n).mean()
    return float(last / first) if first > 0 else float('nan')


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument('--out', default='runs/desk_scale')
    parser.add_argument('--seeds', type=int, default=5)
    parser.add_argument('--steps', type=int, default=100_000)
    parser.add_argument('--expert-steps', type=int, default=50_000)
    parser.add_argument('--eval-interval', type=int, default=5000)
    parser.add_argument('--start-steps', type=int, default=100)
    parser.add_argument('--hidden', type=int, default=64)
    parser.add_argument('--samples', type=int, default=1000)
    parser.add_argument('--rho', type=float, default=0.45)
    parser.add_argument('--progress', action='store_true')
    args = parser.parse_args()

    expert_dir = os.path.join(args.out, 'expert')
    train_expert('point2d-dense', Algo.TD3, 0, expert_dir, total_steps=args.expert_steps,
                 eval_interval=args.eval_interval, start_steps=args.start_steps, hidden_units=args.hidden,
                 progress=args.progress)
    expert_return = max(r.eval_return for r in read_checkpoint_index(expert_dir))
    demos = collect_demos_from_checkpoint(expert_dir, ENV, args.samples, 0, args.rho)
    demo_path = os.path.join(args.out, 'demos.csv')
    demos.save(demo_path)
    behavior_return = demos.metadata['behavior_return']
    print(f'Expert return {expert_return:.4f}, behavior return {behavior_return:.4f}')

    results = {name: [run_variant(name, seed, args, demo_path) for seed in range(args.seeds)] for name in VARIANTS}
    final = {name: float(np.median([r['final_return'] for r in runs])) for name, runs in results.items()}
    for name, value in final.items():
        print(f'{name:>20}: median final dense return {value:.4f}')

    checks = dict()
    checks['ordering'] = final['td3_gild'] >= final['td3_il'] >= final['td3'] and final['td3_gild'] > behavior_return
    window = int(0.01 * args.steps)
    ratios = [meta_loss_ratio(r['train'], window) for r in results['td3_gild_1ws']]
    checks['meta_loss_convergence'] = bool(np.nanmedian(ratios) <= 0.2)
    vanilla_ms = np.median([r['wall_ms_per_1000_vanilla'] for r in results['td3']])
    ws_ms = np.median([r['wall_ms_per_1000_vanilla'] for r in results['td3_gild_1ws']])
    scale = max(abs(final['td3_gild']), 1e-12)
    checks['warm_start'] = abs(final['td3_gild_1ws'] - final['td3_gild']) <= 0.15 * scale and \
        abs(ws_ms - vanilla_ms) <= 0.05 * vanilla_ms
    checks['meta_loss_variant'] = final['td3_gild'] >= final['td3_gild_intuitive']
    print(json.dumps({k: bool(v) for k, v in checks.items()}, indent=2))


if __name__ == '__main__':
    main()
