import csv
import json
import os
from typing import Dict, Optional, Tuple

import numpy as np
import torch

from gildrl.log import create_logger
from gildrl.numerics.ops import DTYPE
from gildrl.tools.exceptions import DemoParseError, DimensionMismatchError, EmptyBufferError

log = create_logger(__name__)


def meta_path(path: str) -> str:
    return f'{path}.meta.json'


def _header(state_dim: int, action_dim: int):
    return [f's{i}' for i in range(state_dim)] + [f'a{i}' for i in range(action_dim)]


def _parse_header(file, header) -> Tuple[int, int]:
    n_states = 0
    while n_states < len(header) and header[n_states] == f's{n_states}':
        n_states += 1
    n_actions = len(header) - n_states
    if n_states == 0 or n_actions == 0 or header != _header(n_states, n_actions):
        raise DemoParseError(file, 1, f"expected a header s0,...,s{{n-1}},a0,...,a{{m-1}}, got {','.join(header)}")
    return n_states, n_actions


class DemonstrationSet(object):
    def __init__(self, states: np.ndarray, actions: np.ndarray, metadata: Optional[Dict] = None):
        """
        Demonstration state-action pairs with their metadata.

        Args:
            -states: array [n, state_dim]
            -actions: array [n, action_dim]
            -metadata: env_id, behavior_return and any additional entry, sample_count is derived
        """
        self.states = np.asarray(states, dtype=np.float64)
        self.actions = np.asarray(actions, dtype=np.float64)
        if self.states.ndim != 2 or self.actions.ndim != 2 or self.states.shape[0] != self.actions.shape[0]:
            raise DimensionMismatchError('demonstration pairs', self.states.shape, self.actions.shape)
        self.metadata = dict(metadata or {})
        self.metadata['sample_count'] = len(self)

    def __len__(self):
        return self.states.shape[0]

    @property
    def state_dim(self) -> int:
        return self.states.shape[1]

    @property
    def action_dim(self) -> int:
        return self.actions.shape[1]

    def __eq__(self, other):
        return isinstance(other, DemonstrationSet) and \
            np.array_equal(self.states, other.states) and \
            np.array_equal(self.actions, other.actions) and \
            self.metadata == other.metadata

    def sample(self, n: int, rng: np.random.Generator) -> Tuple[torch.Tensor, torch.Tensor]:
        if len(self) == 0:
            raise EmptyBufferError()
        idx = rng.integers(0, len(self), size=n)
        return torch.as_tensor(self.states[idx], dtype=DTYPE), torch.as_tensor(self.actions[idx], dtype=DTYPE)

    def save(self, path: str):
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, delimiter=',')
            writer.writerow(_header(self.state_dim, self.action_dim))
            for s, a in zip(self.states, self.actions):
                writer.writerow([repr(float(x)) for x in s] + [repr(float(x)) for x in a])
        with open(meta_path(path), 'w') as f:
            json.dump(self.metadata, f, indent=2)
        log.info(f'Demonstrations saved in {path} ({len(self)} pairs)')

    @classmethod
    def load(cls, path: str) -> "DemonstrationSet":
        with open(path, 'r', newline='') as f:
            reader = csv.reader(f, delimiter=',')
            header = next(reader, None)
            if header is None:
                raise DemoParseError(path, 1, 'missing header')
            n_states, n_actions = _parse_header(path, header)
            rows = []
            for row in reader:
                line = reader.line_num
                if not row:
                    continue
                if len(row) != n_states + n_actions:
                    raise DemoParseError(path, line, f'expected {n_states + n_actions} values, got {len(row)}')
                try:
                    rows.append([float(x) for x in row])
                except ValueError as err:
                    raise DemoParseError(path, line, str(err)) from err
        data = np.asarray(rows, dtype=np.float64).reshape(len(rows), n_states + n_actions)
        metadata = dict()
        if os.path.exists(meta_path(path)):
            with open(meta_path(path), 'r') as f:
                metadata = json.load(f)
        demos = cls(data[:, :n_states], data[:, n_states:], metadata)
        if 'sample_count' in metadata and metadata['sample_count'] != len(demos):
            log.warning(f'{path}: metadata announces {metadata["sample_count"]} pairs, found {len(demos)}')
        return demos
