"""Query syntax tree."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..terms import Term


@dataclass(frozen=True)
class TriplePattern:
    s: Term
    p: Term
    o: Term

    def variables(self) -> list[str]:
        return [t.value for t in (self.s, self.p, self.o) if t.is_variable]


@dataclass(frozen=True)
class Compare:
    op: str  # one of = != < <= > >=
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    expr: "Expr"


@dataclass(frozen=True)
class Bound:
    var: str


@dataclass(frozen=True)
class TermExpr:
    term: Term


Expr = Union[Compare, And, Or, Not, Bound, TermExpr]

OP_NAMES = {
    "=": "equal",
    "!=": "notEqual",
    "<": "lessThan",
    "<=": "lessThanOrEqual",
    ">": "greaterThan",
    ">=": "greaterThanOrEqual",
}


@dataclass(frozen=True)
class Filter:
    expr: Expr


@dataclass
class Group:
    elements: list = field(default_factory=list)

    def patterns(self) -> list[TriplePattern]:
        return [e for e in self.elements if isinstance(e, TriplePattern)]

    def optionals(self) -> list["OptionalBlock"]:
        return [e for e in self.elements if isinstance(e, OptionalBlock)]

    def filters(self) -> list[Filter]:
        return [e for e in self.elements if isinstance(e, Filter)]

    def variables(self) -> list[str]:
        """Variables that can be bound by this group, in order of appearance."""
        out: list[str] = []
        for e in self.elements:
            if isinstance(e, TriplePattern):
                names = e.variables()
            elif isinstance(e, OptionalBlock):
                names = e.group.variables()
            elif isinstance(e, SubSelect):
                names = e.query.output_vars()
            else:
                names = []
            for n in names:
                if n not in out:
                    out.append(n)
        return out


@dataclass
class OptionalBlock:
    group: Group


@dataclass
class SubSelect:
    query: "Query"


@dataclass(frozen=True)
class Count:
    var: str | None  # None means COUNT(*)
    alias: str
    distinct: bool = False


@dataclass(frozen=True)
class OrderKey:
    var: str
    descending: bool = False


@dataclass
class Query:
    projection: list  # of str (variable) or Count
    where: Group
    star: bool = False
    distinct: bool = False
    group_by: list[str] = field(default_factory=list)
    order_by: list[OrderKey] = field(default_factory=list)
    limit: int | None = None
    offset: int = 0

    @property
    def aggregates(self) -> list[Count]:
        return [p for p in self.projection if isinstance(p, Count)]

    def output_vars(self) -> list[str]:
        if self.star:
            return self.where.variables()
        return [p.alias if isinstance(p, Count) else p for p in self.projection]
