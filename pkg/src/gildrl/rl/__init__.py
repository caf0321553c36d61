from .config import Algo, AlgoConfig, CriticOptimizer
from .abstract import ActorCriticAgent
from .ddpg import DDPGAgent
from .td3 import TD3Agent
from .sac import SACAgent
from .factory import make_agent
