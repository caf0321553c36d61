import csv
import json
import os
from dataclasses import dataclass
from json import JSONEncoder
from typing import Dict, List, Optional

import numpy as np
import torch

from gildrl.log import create_logger
from gildrl.numerics.ops import DTYPE
from gildrl.numerics.params import NetworkParams
from gildrl.tools.exceptions import CheckpointFormatError

log = create_logger(__name__)

FORMAT_VERSION = 1
RNG_NOTE = 'streams derive from numpy SeedSequence([seed, crc32(stream name)])'


class GildrlEncoder(JSONEncoder):
    def default(self, obj):
        if isinstance(obj, torch.Tensor):
            return obj.detach().tolist()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, (np.floating,)):
            return float(obj)
        return super().default(obj)


def params_to_json(params: NetworkParams) -> Dict:
    return {name: {'shape': list(t.shape), 'data': t.detach().reshape(-1).tolist()} for name, t in params.items()}


def params_from_json(file, data: Dict) -> NetworkParams:
    params = dict()
    for name, entry in data.items():
        try:
            shape = [int(x) for x in entry['shape']]
            values = torch.tensor(entry['data'], dtype=DTYPE)
        except (KeyError, TypeError, ValueError) as err:
            raise CheckpointFormatError(file, f'array {name}: {err}') from err
        if values.numel() != int(np.prod(shape)):
            raise CheckpointFormatError(file, f'array {name} has {values.numel()} values for shape {shape}')
        params[name] = values.reshape(shape)
    return params


@dataclass
class Checkpoint:
    spec: Dict
    networks: Dict[str, NetworkParams]
    step: int = 0
    eval_return: Optional[float] = None
    rng_note: str = RNG_NOTE

    def save(self, path: str):
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        doc = {'format_version': FORMAT_VERSION,
               'spec': self.spec,
               'step': self.step,
               'eval_return': self.eval_return,
               'networks': {k: params_to_json(v) for k, v in self.networks.items()},
               'rng_note': self.rng_note}
        with open(path, 'w') as f:
            json.dump(doc, f, cls=GildrlEncoder)

    @classmethod
    def load(cls, path: str) -> "Checkpoint":
        try:
            with open(path, 'r') as f:
                doc = json.load(f)
        except json.JSONDecodeError as err:
            raise CheckpointFormatError(path, str(err)) from err
        if doc.get('format_version') != FORMAT_VERSION:
            raise CheckpointFormatError(path, f"unsupported format_version {doc.get('format_version')}")
        for key in ('spec', 'networks'):
            if key not in doc:
                raise CheckpointFormatError(path, f"missing field '{key}'")
        networks = {k: params_from_json(path, v) for k, v in doc['networks'].items()}
        return cls(doc['spec'], networks, int(doc.get('step', 0)), doc.get('eval_return'),
                   doc.get('rng_note', RNG_NOTE))


@dataclass(slots=True)
class CheckpointRecord:
    step: int
    eval_return: float
    path: str


INDEX_HEADER = ['step', 'eval_return', 'path']


def checkpoint_dir(run_dir: str) -> str:
    return os.path.join(run_dir, 'checkpoints')


def checkpoint_path(run_dir: str, step: int) -> str:
    return os.path.join(checkpoint_dir(run_dir), f'step_{step}.json')


def read_checkpoint_index(run_dir: str) -> List[CheckpointRecord]:
    """Checkpoint series of a run directory, in step order. Paths are absolute."""
    index = os.path.join(checkpoint_dir(run_dir), 'index.csv')
    if not os.path.exists(index):
        raise CheckpointFormatError(index, 'no checkpoint index')
    records = []
    with open(index, 'r', newline='') as f:
        reader = csv.DictReader(f, delimiter=',')
        for row in reader:
            records.append(CheckpointRecord(int(row['step']), float(row['eval_return']),
                                            os.path.join(checkpoint_dir(run_dir), row['path'])))
    return sorted(records, key=lambda r: r.step)
