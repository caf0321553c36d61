from .abstract import Environment, StepResult
from .point2d import Point2D
from .mass2d import Mass2D
from .sparse import Sparsify
from .registry import make_env, dense_id, ENVIRONMENT_IDS
