"""Human-in-the-loop correction collection: operators, loop, statistics."""

from .collect import collect
from .experts import ScriptedExpert
from .operator import (
    AlwaysTeleopOperator,
    NeverOperator,
    OperatorDisconnect,
    OracleOperator,
    OracleThresholds,
)
from .records import CorrectionRecord, SessionLog, SessionStep, split_episodes
from .stats import intervention_stats

__all__ = [
    "collect",
    "ScriptedExpert",
    "AlwaysTeleopOperator",
    "NeverOperator",
    "OperatorDisconnect",
    "OracleOperator",
    "OracleThresholds",
    "CorrectionRecord",
    "SessionLog",
    "SessionStep",
    "split_episodes",
    "intervention_stats",
]
