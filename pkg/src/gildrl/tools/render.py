import os
from typing import Dict, List, Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from gildrl.log import create_logger
from gildrl.tools.exceptions import EmptyLogError

log = create_logger(__name__)

PADDING = 0.05


def padded_limits(values: Sequence[float]):
    """Data min/max widened by 5% of the range; a single value gets 5% of its magnitude (or 0.05)."""
    values = np.asarray(values, dtype=np.float64)
    low, high = float(values.min()), float(values.max())
    span = high - low
    if span == 0.:
        span = abs(low) if low != 0. else 1.
    return low - PADDING * span, high + PADDING * span


def draw_curve(ax, x, mean, std=None, label=None, color=None):
    """Mean line with a shaded +-std band, a single point is drawn as a marker."""
    x = np.asarray(x, dtype=np.float64)
    mean = np.asarray(mean, dtype=np.float64)
    if len(x) == 1:
        line = ax.plot(x, mean, 'o', label=label, color=color)[0]
    else:
        line = ax.plot(x, mean, '-', label=label, color=color, linewidth=1.5)[0]
    if std is not None:
        std = np.asarray(std, dtype=np.float64)
        if len(x) == 1:
            ax.errorbar(x, mean, yerr=std, fmt='none', color=line.get_color())
        else:
            ax.fill_between(x, mean - std, mean + std, color=line.get_color(), alpha=0.2, linewidth=0)
    return line


def save_svg(fig, path: str):
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with matplotlib.rc_context({'svg.hashsalt': 'gildrl', 'svg.fonttype': 'path'}):
        fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)


def _read(path: str) -> pd.DataFrame:
    if not os.path.exists(path):
        raise EmptyLogError(path)
    frame = pd.read_csv(path, sep=',')
    if frame.empty:
        raise EmptyLogError(path)
    return frame


def plot_series(path: str, series: Dict[str, pd.DataFrame], x: str, y: str, std: str = None,
                xlabel: str = 'step', ylabel: str = None):
    fig, ax = plt.subplots(figsize=(6, 4))
    xs, ys = [], []
    for label, frame in series.items():
        mean = frame[y].to_numpy()
        band = frame[std].to_numpy() if std is not None else None
        draw_curve(ax, frame[x].to_numpy(), mean, band, label=label)
        xs.extend(frame[x].tolist())
        ys.extend(mean.tolist() if band is None else (mean - band).tolist() + (mean + band).tolist())
    ax.set_xlim(*padded_limits(xs))
    ax.set_ylim(*padded_limits(ys))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel or y)
    if len(series) > 1:
        ax.legend(loc='best')
    fig.tight_layout()
    save_svg(fig, path)
    return path


def emit_plots(run_dirs: List[str], output_dir: str) -> List[str]:
    """Learning curves, GILD / meta-loss curves and KL curves of one or several runs as SVG files.

    Identical inputs give byte-identical files.
    """
    labels = {d: os.path.basename(os.path.normpath(d)) for d in run_dirs}
    evals = {labels[d]: _read(os.path.join(d, 'eval.csv')) for d in run_dirs}
    written = [plot_series(os.path.join(output_dir, 'learning_curve.svg'), evals, 'step',
                           'mean_dense_return', 'std_dense_return', ylabel='dense return')]

    trains = {labels[d]: pd.read_csv(os.path.join(d, 'train.csv'))
              for d in run_dirs if os.path.exists(os.path.join(d, 'train.csv'))}
    trains = {k: v for k, v in trains.items() if not v.empty}
    for column in ('gild_loss', 'meta_loss'):
        active = {k: v for k, v in trains.items() if (v[column] != 0).any()}
        if active:
            written.append(plot_series(os.path.join(output_dir, f'{column}.svg'), active, 'step', column))

    kls = {labels[d]: pd.read_csv(os.path.join(d, 'kl.csv'))
           for d in run_dirs if os.path.exists(os.path.join(d, 'kl.csv'))}
    kls = {k: v for k, v in kls.items() if not v.empty}
    if kls:
        written.append(plot_series(os.path.join(output_dir, 'kl.svg'), kls, 'step', 'kl', ylabel='KL to behavior'))
    log.info(f'{len(written)} figures written in {output_dir}')
    return written
