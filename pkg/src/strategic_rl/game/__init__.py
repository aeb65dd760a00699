from .model import (
    BOTH,
    MAX,
    MIN,
    GameBuilder,
    GameValidationError,
    MarkovGame,
    StepLayout,
    Transition,
    Violation,
    require_valid,
    sample_step,
    validate_game,
)
from .oracles import (
    ValueTable,
    best_response_value,
    best_response_values,
    exploitability,
    minimax_values,
    nash_conv,
    policy_values,
)
from .policy import (
    MissingPolicyError,
    MixedStrategy,
    Policy,
    PolicyPair,
    as_policy,
    policy_from_mapping,
    pure_policy,
    uniform_policy,
    zeros_policy,
)
from .serialization import GameFormatError, dumps, load, loads, save

__all__ = [
    "BOTH", "MAX", "MIN", "GameBuilder", "GameFormatError", "GameValidationError", "MarkovGame",
    "MissingPolicyError", "MixedStrategy", "Policy", "PolicyPair", "StepLayout", "Transition",
    "ValueTable", "Violation", "as_policy", "best_response_value", "best_response_values", "dumps",
    "exploitability", "load", "loads", "minimax_values", "nash_conv", "policy_from_mapping",
    "policy_values", "pure_policy", "require_valid", "sample_step", "save", "uniform_policy",
    "validate_game", "zeros_policy",
]
