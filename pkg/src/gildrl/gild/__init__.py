from .state import GildState, MetaLossVariant, MetaSign, RetainedPath
from .bilevel import gild_actor_update, gild_meta_update, meta_loss, warmstart_gate, GateDecision
