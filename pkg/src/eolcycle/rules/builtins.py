"""The swrlb builtins supported by the rule engine."""

from __future__ import annotations

import operator
from decimal import Decimal
from typing import Sequence

from ..terms import DECIMAL, INTEGER, NUMERIC, TIMESTAMP, Term, literal
from .syntax import ARITHMETIC, BUILTIN_ARITY


class BuiltinError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


_COMPARE = {
    "lessThan": operator.lt,
    "lessThanOrEqual": operator.le,
    "greaterThan": operator.gt,
    "greaterThanOrEqual": operator.ge,
    "equal": operator.eq,
    "notEqual": operator.ne,
}

_ARITH = {
    "subtract": operator.sub,
    "add": operator.add,
    "multiply": operator.mul,
}


def _unbound(t: Term | None) -> bool:
    return t is None or t.is_variable


def _number(name: str, t: Term):
    if not t.is_numeric:
        raise BuiltinError("non-numeric-argument", f"swrlb:{name} needs numbers, got {t!r}")
    return t.value


def _arith(name: str, a: Term, b: Term) -> Term:
    x, y = _number(name, a), _number(name, b)
    if a.datatype == INTEGER and b.datatype == INTEGER:
        return literal(int(_ARITH[name](x, y)), INTEGER)
    return literal(Decimal(_ARITH[name](Decimal(x), Decimal(y))), DECIMAL)


def _comparable(name: str, a: Term, b: Term) -> tuple:
    if a.datatype in NUMERIC and b.datatype in NUMERIC and a.is_literal and b.is_literal:
        return Decimal(a.value), Decimal(b.value)
    if a.is_literal and b.is_literal and a.datatype == TIMESTAMP and b.datatype == TIMESTAMP:
        return a.value, b.value
    if name in ("equal", "notEqual") and a.kind == b.kind and a.datatype == b.datatype:
        return a, b
    raise BuiltinError("non-numeric-argument", f"swrlb:{name} cannot compare {a!r} and {b!r}")


def evaluate_builtin(name: str, args: Sequence[Term | None]) -> bool | Term:
    """Evaluate a builtin.

    Arithmetic builtins whose first argument is unbound return the computed
    term (the binding for that argument); every other call returns a bool.
    """
    if name not in BUILTIN_ARITY:
        raise BuiltinError("unknown-builtin", f"unknown builtin swrlb:{name}")
    if len(args) != BUILTIN_ARITY[name]:
        raise BuiltinError("builtin-arity-mismatch", f"swrlb:{name} takes {BUILTIN_ARITY[name]} arguments")
    if name in ARITHMETIC:
        first, rest = args[0], args[1:]
        if any(_unbound(t) for t in rest):
            raise BuiltinError("unbound-required-argument", f"swrlb:{name} needs bound inputs")
        result = _arith(name, *rest)
        if _unbound(first):
            return result
        a, b = _comparable("equal", first, result)
        return a == b
    if any(_unbound(t) for t in args):
        raise BuiltinError("unbound-required-argument", f"swrlb:{name} needs all arguments bound")
    a, b = _comparable(name, *args)
    return bool(_COMPARE[name](a, b))
