from .mlp import Activation, MlpSpec, init_network
from .actors import Actor, DeterministicActor, GaussianActor
from .critic import Critic
from .gild_net import GildNet, gild_forward
from .target import soft_update, hard_copy
