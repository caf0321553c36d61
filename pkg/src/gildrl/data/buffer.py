from dataclasses import dataclass

import numpy as np
import torch

from gildrl.log import create_logger
from gildrl.numerics.ops import DTYPE
from gildrl.tools.exceptions import DimensionMismatchError, EmptyBufferError

log = create_logger(__name__)


@dataclass(slots=True)
class Transition:
    s: np.ndarray
    a: np.ndarray
    r: float
    s_next: np.ndarray
    done: bool


@dataclass(slots=True)
class Batch:
    states: torch.Tensor
    actions: torch.Tensor
    rewards: torch.Tensor
    next_states: torch.Tensor
    dones: torch.Tensor

    def __len__(self):
        return self.states.shape[0]


class ReplayBuffer(object):
    def __init__(self, state_dim: int, action_dim: int, capacity: int = 2_000_000):
        """
        Ring buffer of transitions, the oldest entry is overwritten once `capacity` is reached.

        Storage grows by doubling up to `capacity` so that large capacities cost nothing for
        short runs.

        Args:
            -state_dim: dimension of the states
            -action_dim: dimension of the actions
            -capacity: maximum number of stored transitions
        """
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.capacity = int(capacity)
        self.size = 0
        self.cursor = 0
        self._allocate(min(self.capacity, 1024))

    def _allocate(self, n: int):
        def grow(old, shape):
            new = np.zeros(shape, dtype=np.float64)
            if old is not None:
                new[:old.shape[0]] = old
            return new
        self._states = grow(getattr(self, '_states', None), (n, self.state_dim))
        self._actions = grow(getattr(self, '_actions', None), (n, self.action_dim))
        self._rewards = grow(getattr(self, '_rewards', None), (n,))
        self._next_states = grow(getattr(self, '_next_states', None), (n, self.state_dim))
        self._dones = grow(getattr(self, '_dones', None), (n,))

    def __len__(self):
        return self.size

    def push(self, t: Transition):
        if len(t.s) != self.state_dim or len(t.s_next) != self.state_dim:
            raise DimensionMismatchError('transition state', self.state_dim, (len(t.s), len(t.s_next)))
        if len(t.a) != self.action_dim:
            raise DimensionMismatchError('transition action', self.action_dim, len(t.a))
        if self.cursor >= self._states.shape[0]:
            self._allocate(min(self.capacity, 2 * self._states.shape[0]))
        i = self.cursor
        self._states[i] = t.s
        self._actions[i] = t.a
        self._rewards[i] = t.r
        self._next_states[i] = t.s_next
        self._dones[i] = float(t.done)
        self.cursor = (self.cursor + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def get(self, index: int) -> Transition:
        """Transition at storage position `index` (0 is the oldest one)."""
        i = (self.cursor - self.size + index) % self.capacity
        return Transition(self._states[i].copy(), self._actions[i].copy(), float(self._rewards[i]),
                          self._next_states[i].copy(), bool(self._dones[i]))

    def _indices(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.size == 0:
            raise EmptyBufferError()
        return rng.integers(0, self.size, size=n)

    def sample(self, n: int, rng: np.random.Generator) -> Batch:
        """n uniform draws with replacement."""
        idx = self._indices(n, rng)
        return Batch(torch.as_tensor(self._states[idx], dtype=DTYPE),
                     torch.as_tensor(self._actions[idx], dtype=DTYPE),
                     torch.as_tensor(self._rewards[idx], dtype=DTYPE).reshape(n, 1),
                     torch.as_tensor(self._next_states[idx], dtype=DTYPE),
                     torch.as_tensor(self._dones[idx], dtype=DTYPE).reshape(n, 1))

    def sample_states(self, n: int, rng: np.random.Generator) -> torch.Tensor:
        idx = self._indices(n, rng)
        return torch.as_tensor(self._states[idx], dtype=DTYPE)
