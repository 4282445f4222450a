"""Query evaluation: nested-loop joins, left-join OPTIONAL, FILTER, COUNT, ORDER BY."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal

from ..graph import Graph
from ..terms import BOOLEAN, IRI, NUMERIC, STRING, TIMESTAMP, Term, literal
from .ast import (
    And,
    Bound,
    Compare,
    Count,
    Filter,
    Group,
    Not,
    OptionalBlock,
    Or,
    Query,
    SubSelect,
    TermExpr,
    TriplePattern,
)

Row = dict[str, Term]


@dataclass
class ResultTable:
    header: list[str]
    rows: list[tuple[Term | None, ...]]
    diagnostics: Counter = field(default_factory=Counter)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[Term | None]:
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    def as_dicts(self) -> list[dict[str, Term]]:
        return [{h: v for h, v in zip(self.header, r) if v is not None} for r in self.rows]


class _ExprError(Exception):
    def __init__(self, kind: str):
        self.kind = kind


def _cell_key(t: Term | None) -> tuple:
    return (0,) if t is None else (1, t.sort_key())


def order_key(t: Term | None) -> tuple:
    """Value ordering for ORDER BY: unbound, IRIs, numbers, timestamps, booleans, strings."""
    if t is None:
        return (0,)
    if t.kind == IRI:
        return (1, t.value)
    if t.datatype in NUMERIC:
        return (2, Decimal(t.value))
    if t.datatype == TIMESTAMP:
        return (3, t.value)
    if t.datatype == BOOLEAN:
        return (4, t.value)
    return (5, str(t.value))


class Evaluator:
    def __init__(self, graph: Graph):
        self.graph = graph
        self.diagnostics: Counter = Counter()

    # -- patterns -------------------------------------------------------

    def match(self, pattern: TriplePattern, row: Row) -> list[Row]:
        terms = [row.get(t.value, t) if t.is_variable else t for t in (pattern.s, pattern.p, pattern.o)]
        out = []
        for fact in self.graph.triples(*(None if t.is_variable else t for t in terms)):
            new = dict(row)
            ok = True
            for t, value in zip(terms, fact.triple):
                if t.is_variable:
                    seen = new.get(t.value)
                    if seen is not None and seen != value:
                        ok = False
                        break
                    new[t.value] = value
            if ok:
                out.append(new)
        return out

    @staticmethod
    def _selectivity(pattern: TriplePattern, bound: set[str]) -> int:
        return sum(1 for t in (pattern.s, pattern.p, pattern.o) if not t.is_variable or t.value in bound)

    def bgp(self, patterns: list[TriplePattern], rows: list[Row]) -> list[Row]:
        out = []
        for row in rows:
            partial = [row]
            remaining = list(patterns)
            bound = set(row)
            while remaining and partial:
                best = max(remaining, key=lambda p: (self._selectivity(p, bound), -remaining.index(p)))
                remaining.remove(best)
                partial = [r2 for r in partial for r2 in self.match(best, r)]
                bound.update(best.variables())
            out.extend(partial)
        return out

    def group(self, group: Group, rows: list[Row]) -> list[Row]:
        pending: list[TriplePattern] = []
        filters: list[Filter] = []
        for el in group.elements:
            if isinstance(el, TriplePattern):
                pending.append(el)
                continue
            if pending:
                rows = self.bgp(pending, rows)
                pending = []
            if isinstance(el, Filter):
                filters.append(el)
            elif isinstance(el, OptionalBlock):
                rows = self.left_join(rows, el.group)
            elif isinstance(el, SubSelect):
                rows = self.join(rows, self.select_rows(el.query))
        if pending:
            rows = self.bgp(pending, rows)
        for f in filters:
            rows = [r for r in rows if self.accepts(f.expr, r)]
        return rows

    def left_join(self, rows: list[Row], group: Group) -> list[Row]:
        out = []
        for row in rows:
            extended = self.group(group, [row])
            out.extend(extended if extended else [row])
        return out

    @staticmethod
    def join(left: list[Row], right: list[Row]) -> list[Row]:
        out = []
        for a in left:
            for b in right:
                if all(a[k] == v for k, v in b.items() if k in a):
                    out.append({**a, **b})
        return out

    # -- filters --------------------------------------------------------

    def accepts(self, expr, row: Row) -> bool:
        try:
            return self.truth(expr, row)
        except _ExprError as exc:
            self.diagnostics[exc.kind] += 1
            return False

    def value(self, expr, row: Row) -> Term:
        if isinstance(expr, TermExpr):
            t = expr.term
            if t.is_variable:
                if t.value not in row:
                    raise _ExprError("unbound")
                return row[t.value]
            return t
        return literal(self.truth(expr, row))

    def truth(self, expr, row: Row) -> bool:
        if isinstance(expr, Bound):
            return expr.var in row
        if isinstance(expr, Not):
            return not self.truth(expr.expr, row)
        if isinstance(expr, And):
            # an error on one side is masked by a false on the other
            try:
                left = self.truth(expr.left, row)
            except _ExprError:
                if not self.truth(expr.right, row):
                    return False
                raise
            return left and self.truth(expr.right, row)
        if isinstance(expr, Or):
            try:
                left = self.truth(expr.left, row)
            except _ExprError:
                if self.truth(expr.right, row):
                    return True
                raise
            return left or self.truth(expr.right, row)
        if isinstance(expr, Compare):
            return compare(expr.op, self.value(expr.left, row), self.value(expr.right, row))
        return effective_boolean(self.value(expr, row))

    # -- select ---------------------------------------------------------

    def select_rows(self, query: Query) -> list[Row]:
        rows = self.group(query.where, [{}])
        if query.aggregates or query.group_by:
            rows = self.aggregate(query, rows)
        header = query.output_vars()
        rows.sort(key=lambda r: tuple(_cell_key(r.get(h)) for h in header))
        for key in reversed(query.order_by):
            rows.sort(key=lambda r: order_key(r.get(key.var)), reverse=key.descending)
        projected = [{h: r[h] for h in header if h in r} for r in rows]
        if query.distinct:
            seen = set()
            unique = []
            for r in projected:
                sig = tuple(r.get(h) for h in header)
                if sig not in seen:
                    seen.add(sig)
                    unique.append(r)
            projected = unique
        end = None if query.limit is None else query.offset + query.limit
        return projected[query.offset:end]

    @staticmethod
    def aggregate(query: Query, rows: list[Row]) -> list[Row]:
        groups: dict[tuple, list[Row]] = {}
        for r in rows:
            groups.setdefault(tuple(r.get(v) for v in query.group_by), []).append(r)
        if not groups and not query.group_by:
            groups[()] = []
        out = []
        for key, members in groups.items():
            row = {v: t for v, t in zip(query.group_by, key) if t is not None}
            for agg in query.aggregates:
                row[agg.alias] = literal(_count(agg, members))
            out.append(row)
        return out


def _count(agg: Count, rows: list[Row]) -> int:
    if agg.var is None:
        return len({tuple(sorted(r.items(), key=lambda kv: kv[0])) for r in rows}) if agg.distinct else len(rows)
    values = [r[agg.var] for r in rows if agg.var in r]
    return len(set(values)) if agg.distinct else len(values)


def effective_boolean(t: Term) -> bool:
    if t.datatype == BOOLEAN:
        return bool(t.value)
    if t.datatype in NUMERIC:
        return t.value != 0
    if t.datatype == STRING:
        return t.value != ""
    raise _ExprError("type-mismatch")


def compare(op: str, a: Term, b: Term) -> bool:
    if a.is_literal and b.is_literal:
        if a.datatype in NUMERIC and b.datatype in NUMERIC:
            x, y = Decimal(a.value), Decimal(b.value)
        elif a.datatype == b.datatype:
            x, y = a.value, b.value
        else:
            raise _ExprError("type-mismatch")
    elif a.kind == IRI and b.kind == IRI:
        if op == "=":
            return a == b
        if op == "!=":
            return a != b
        x, y = a.value, b.value
    else:
        # IRI against literal
        if op == "=":
            return False
        if op == "!=":
            return True
        raise _ExprError("type-mismatch")
    return {
        "=": x == y,
        "!=": x != y,
        "<": x < y,
        "<=": x <= y,
        ">": x > y,
        ">=": x >= y,
    }[op]


def execute(query: Query, graph: Graph) -> ResultTable:
    """Evaluate a parsed query against a graph."""
    ev = Evaluator(graph)
    rows = ev.select_rows(query)
    header = query.output_vars()
    table = ResultTable(header, [tuple(r.get(h) for h in header) for r in rows])
    table.diagnostics = ev.diagnostics
    return table
