"""Rule language, builtins and the forward-chaining engine."""

from .builtins import BuiltinError, evaluate_builtin
from .engine import (
    DEFAULT_MAX_FACTS,
    DEFAULT_MAX_ITERATIONS,
    InferenceResult,
    LimitExceeded,
    Trace,
    TraceStep,
    describe_step,
    forward_chain,
)
from .syntax import Atom, Rule, RuleError, format_rule, parse_rules

__all__ = [
    "Atom",
    "BuiltinError",
    "DEFAULT_MAX_FACTS",
    "DEFAULT_MAX_ITERATIONS",
    "InferenceResult",
    "LimitExceeded",
    "Rule",
    "RuleError",
    "Trace",
    "TraceStep",
    "describe_step",
    "evaluate_builtin",
    "format_rule",
    "forward_chain",
    "parse_rules",
]
