import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import torch

from gildrl.log import create_logger

log = create_logger(__name__)

_local = threading.local()


def current_tape() -> Optional["Tape"]:
    stack = getattr(_local, 'stack', None)
    if stack:
        return stack[-1]
    return None


@dataclass(slots=True)
class TapeEntry:
    primitive: str
    fn: Callable[..., torch.Tensor]
    operands: Tuple[int, ...]
    kwargs: Dict
    result: int


class Tape(object):
    def __init__(self):
        """
        Ordered record of the primitives evaluated while the tape is active.

        Values live in slots: a slot is either a leaf (an operand that was not produced by a
        recorded primitive, stored as a detached copy) or the result of an entry. The recorded
        results keep their autograd history, so adjoints can be computed for any slot, and a tape
        recorded while evaluating a gradient with `create_graph=True` stays differentiable.

        A tape belongs to the thread that activated it.
        """
        self.entries: List[TapeEntry] = []
        self.adjoints: Dict[int, torch.Tensor] = dict()
        self._values: List[torch.Tensor] = []
        self._leaf: List[bool] = []
        self._slot_of: Dict[int, int] = dict()
        # ids stay unique only while the recorded tensors are alive
        self._alive: List[torch.Tensor] = []

    def __enter__(self):
        stack = getattr(_local, 'stack', None)
        if stack is None:
            stack = []
            _local.stack = stack
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _local.stack.pop()
        return False

    def __len__(self):
        return len(self.entries)

    def _slot(self, tensor: torch.Tensor) -> int:
        key = id(tensor)
        if key not in self._slot_of:
            # leaves are frozen at record time, later in-place updates must not alter the replay
            self._values.append(tensor.detach().clone())
            self._leaf.append(True)
            self._slot_of[key] = len(self._values) - 1
            self._alive.append(tensor)
        return self._slot_of[key]

    def record(self, primitive: str, fn: Callable, operands, kwargs: Dict, result: torch.Tensor):
        operand_slots = tuple(self._slot(op) for op in operands)
        self._values.append(result)
        self._leaf.append(False)
        slot = len(self._values) - 1
        self._slot_of[id(result)] = slot
        self._alive.append(result)
        self.entries.append(TapeEntry(primitive, fn, operand_slots, dict(kwargs), slot))

    def slot_of(self, tensor: torch.Tensor) -> int:
        return self._slot_of[id(tensor)]

    def value(self, slot: int) -> torch.Tensor:
        return self._values[slot]

    def outputs(self) -> List[torch.Tensor]:
        """Results of the recorded entries in recording order."""
        return [self._values[e.result] for e in self.entries]

    def replay(self) -> List[torch.Tensor]:
        """Evaluate the recorded primitives again from the frozen leaves.

        Returns:
            -the results of every entry, in recording order
        """
        values = [v.detach() if leaf else None for v, leaf in zip(self._values, self._leaf)]
        with torch.no_grad():
            for entry in self.entries:
                args = [values[i] for i in entry.operands]
                values[entry.result] = entry.fn(*args, **entry.kwargs)
        return [values[e.result] for e in self.entries]

    def replay_matches(self) -> bool:
        """True when replaying reproduces every recorded output bit for bit."""
        return all(torch.equal(a.detach(), b) for a, b in zip(self.outputs(), self.replay()))

    def backward(self, output: torch.Tensor, create_graph: bool = False) -> Dict[int, torch.Tensor]:
        """Fill the per-slot adjoint storage of `output` for every recorded result.

        Slots that do not influence `output` get an exact zero adjoint.
        """
        slots = [e.result for e in self.entries if self._values[e.result].requires_grad]
        tensors = [self._values[s] for s in slots]
        grads = torch.autograd.grad(output, tensors, allow_unused=True, retain_graph=True,
                                    create_graph=create_graph)
        self.adjoints = {s: (torch.zeros_like(t) if g is None else g) for s, t, g in zip(slots, tensors, grads)}
        return self.adjoints
