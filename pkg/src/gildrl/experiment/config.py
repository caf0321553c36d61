"""Run configuration and its flat `key = value` file format.

One key per line, `#` starts a comment, blank lines are ignored. Every field of `RunConfig` is a
key; booleans are written `true` / `false`, enumerations by value.
"""
import dataclasses
import os
from dataclasses import dataclass, fields
from enum import Enum
from typing import Dict, Iterable, List, Optional, Union, get_args, get_origin, get_type_hints

from gildrl.envs.registry import split_env_id
from gildrl.gild.state import MetaLossVariant, MetaSign
from gildrl.log import create_logger, parse_level
from gildrl.rl.config import Algo, AlgoConfig, CriticOptimizer
from gildrl.tools.exceptions import RunConfigError

log = create_logger(__name__)


class Variant(Enum):
    VANILLA = 'vanilla'
    IL = 'il'
    GILD = 'gild'


@dataclass
class RunConfig:
    env_id: str = 'point2d-sparse'
    algo: Algo = Algo.TD3
    variant: Variant = Variant.VANILLA
    total_steps: int = 100_000
    eval_interval: int = 5000
    eval_episodes: int = 10
    seed: int = 0
    warm_start_fraction: float = 0.01
    meta_loss_variant: MetaLossVariant = MetaLossVariant.DIFFERENCE_TANH
    meta_sign: MetaSign = MetaSign.MAXIMIZE_SUPERIORITY
    demo_path: str = ''
    output_dir: str = 'runs/default'
    start_steps: int = 100

    hidden_units: int = 256
    gild_hidden_units: int = 256
    batch_size: int = 256
    lr: float = 3e-4
    gamma: float = 0.99
    tau: float = 5e-3
    expl_noise: float = 0.2
    policy_noise: float = 0.2
    noise_clip: float = 0.5
    policy_delay: int = 2
    alpha_ent: float = 0.2
    beta: float = 2.5
    w_il: float = 1.0
    buffer_capacity: int = 2_000_000
    critic_optimizer: CriticOptimizer = CriticOptimizer.SGD
    sparse_threshold: float = 1.0
    train_log_interval: int = 100
    meta_lr_outer: Optional[float] = None
    gild_frozen: bool = False
    gild_zero_policy_input: bool = False
    eval_workers: int = 1
    behavior_checkpoint: str = ''
    progress: bool = False
    log_level: str = 'WARNING'

    @property
    def outer_lr(self) -> float:
        return self.lr if self.meta_lr_outer is None else self.meta_lr_outer

    def algo_config(self) -> AlgoConfig:
        return AlgoConfig(algo=self.algo, lr=self.lr, gamma=self.gamma, tau=self.tau,
                          batch_size=self.batch_size, expl_noise=self.expl_noise,
                          policy_noise=self.policy_noise, noise_clip=self.noise_clip,
                          policy_delay=self.policy_delay, alpha_ent=self.alpha_ent,
                          beta=self.beta, w_il=self.w_il, hidden_units=self.hidden_units,
                          critic_optimizer=self.critic_optimizer)

    def validate(self) -> "RunConfig":
        split_env_id(self.env_id)
        for name in ('total_steps', 'eval_interval', 'eval_episodes', 'batch_size', 'hidden_units',
                     'gild_hidden_units', 'buffer_capacity', 'train_log_interval', 'eval_workers'):
            if getattr(self, name) < 1:
                raise RunConfigError(f'{name} must be >= 1, got {getattr(self, name)}')
        if self.start_steps < 0:
            raise RunConfigError(f'start_steps must be >= 0, got {self.start_steps}')
        if self.eval_interval > self.total_steps:
            raise RunConfigError(f'eval_interval ({self.eval_interval}) exceeds total_steps ({self.total_steps})')
        if not 0.0 <= self.warm_start_fraction <= 1.0:
            raise RunConfigError(f'warm_start_fraction must lie in [0, 1], got {self.warm_start_fraction}')
        if self.variant in (Variant.IL, Variant.GILD) and not self.demo_path:
            raise RunConfigError(f'variant {self.variant.value} requires demo_path')
        if self.variant is Variant.GILD and self.warm_start_fraction < 1.0 and \
                self.warm_start_fraction * self.total_steps <= self.start_steps:
            raise RunConfigError(f'the GILD window ends at step {self.warm_start_fraction * self.total_steps:g}, '
                                 f'before the first update at start_steps = {self.start_steps}')
        try:
            parse_level(self.log_level)
        except ValueError:
            raise RunConfigError(f'unknown log_level {self.log_level}')
        self.algo_config()
        return self

    # Text format

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            lines.append(f'{f.name} = {format_value(value)}')
        return '\n'.join(lines) + '\n'

    def save(self, path: str):
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(path, 'w') as f:
            f.write(self.to_text())

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_text(cls, text: str, overrides: Iterable[str] = ()) -> "RunConfig":
        values = parse_key_values(text.splitlines())
        for i, item in enumerate(overrides):
            key, value = _split_line(item, f'override {i + 1}')
            values[key] = value
        return cls.from_mapping(values)

    @classmethod
    def from_file(cls, path: str, overrides: Iterable[str] = ()) -> "RunConfig":
        if not os.path.exists(path):
            raise RunConfigError(f'configuration file {path} does not exist')
        with open(path, 'r') as f:
            return cls.from_text(f.read(), overrides)

    @classmethod
    def from_mapping(cls, values: Dict[str, str]) -> "RunConfig":
        hints = get_type_hints(cls)
        known = {f.name for f in fields(cls)}
        kwargs = dict()
        for key, raw in values.items():
            if key not in known:
                raise RunConfigError(f"unknown key '{key}'")
            kwargs[key] = parse_value(key, raw, hints[key])
        return cls(**kwargs).validate()


def format_value(value) -> str:
    if value is None:
        return 'none'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_value(key: str, raw: str, kind):
    raw = raw.strip()
    if get_origin(kind) is Union:
        if raw.lower() in ('none', ''):
            return None
        kind = [k for k in get_args(kind) if k is not type(None)][0]
    try:
        if kind is bool:
            if raw.lower() in ('true', '1', 'yes'):
                return True
            if raw.lower() in ('false', '0', 'no'):
                return False
            raise ValueError(raw)
        if kind is int:
            return int(float(raw)) if 'e' in raw.lower() else int(raw)
        if kind is float:
            return float(raw)
        if isinstance(kind, type) and issubclass(kind, Enum):
            return kind(raw)
    except ValueError:
        raise RunConfigError(f"invalid value '{raw}' for key '{key}'")
    return raw


def _split_line(line: str, where) -> List[str]:
    if '=' not in line:
        raise RunConfigError(f"expected 'key = value', got '{line.strip()}'", where if isinstance(where, int) else None)
    key, value = line.split('=', 1)
    return [key.strip(), value.strip()]


def parse_key_values(lines: Iterable[str]) -> Dict[str, str]:
    values = dict()
    for number, line in enumerate(lines, start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        key, value = _split_line(content, number)
        if key in values:
            raise RunConfigError(f"duplicated key '{key}'", number)
        values[key] = value
    return values


def typed_overrides(items: Iterable[str]) -> Dict:
    """Parse `key=value` overrides into typed RunConfig field values."""
    hints = get_type_hints(RunConfig)
    known = {f.name for f in fields(RunConfig)}
    values = dict()
    for i, item in enumerate(items):
        key, raw = _split_line(item, f'override {i + 1}')
        if key not in known:
            raise RunConfigError(f"unknown key '{key}'")
        values[key] = parse_value(key, raw, hints[key])
    return values
