import zlib
from dataclasses import dataclass
from typing import Dict

import numpy as np
import torch

STREAM_NAMES = ('init', 'gild_init', 'exploration', 'buffer', 'validation',
                'demo', 'policy', 'meta', 'env', 'eval')


@dataclass(slots=True)
class RngStream:
    name: str
    np: np.random.Generator
    torch: torch.Generator


def _make_stream(name: str, entropy) -> RngStream:
    seq = np.random.SeedSequence(entropy)
    torch_seed = int(seq.generate_state(1, dtype=np.uint64)[0]) & 0x7FFF_FFFF_FFFF_FFFF
    gen = torch.Generator()
    gen.manual_seed(torch_seed)
    return RngStream(name, np.random.default_rng(seq), gen)


class RngRegistry(object):
    def __init__(self, seed: int):
        """
        Named random streams derived from one master seed.

        Every stream is seeded from (seed, crc32(name)) so streams advance independently: drawing
        from one never shifts the sequence of another. Identical seeds give identical streams.

        Args:
            -seed: master seed
        """
        self.seed = int(seed)
        self._streams: Dict[str, RngStream] = dict()

    def _entropy(self, name: str):
        return [self.seed & 0xFFFF_FFFF_FFFF_FFFF, zlib.crc32(name.encode())]

    def __getitem__(self, name: str) -> RngStream:
        if name not in STREAM_NAMES:
            raise KeyError(f"Unknown random stream '{name}', available: {', '.join(STREAM_NAMES)}")
        if name not in self._streams:
            self._streams[name] = _make_stream(name, self._entropy(name))
        return self._streams[name]

    def child(self, name: str, index: int) -> RngStream:
        """Fresh stream owned by item `index` of stream `name` (an evaluation episode for instance)."""
        if name not in STREAM_NAMES:
            raise KeyError(f"Unknown random stream '{name}', available: {', '.join(STREAM_NAMES)}")
        return _make_stream(f'{name}[{index}]', self._entropy(name) + [int(index)])
