from .rng import RngRegistry, RngStream, STREAM_NAMES
from .buffer import ReplayBuffer, Transition, Batch
from .demos import DemonstrationSet
from .checkpoint import Checkpoint, CheckpointRecord, read_checkpoint_index
