"""Semi-naive forward chaining to a fixpoint, with derivation traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..graph import Fact, Graph, inferred_by
from ..terms import Term, shorten
from .builtins import BuiltinError, evaluate_builtin
from .syntax import BUILTIN_ATOM, Atom, Rule

DEFAULT_MAX_ITERATIONS = 1000
DEFAULT_MAX_FACTS = 1_000_000

Binding = dict[str, Term]


@dataclass(frozen=True)
class TraceStep:
    rule: str
    bindings: tuple[tuple[str, Term], ...]
    fact: Fact
    iteration: int
    # facts newly added by this step: the head plus anything it materialized
    produced: tuple[Fact, ...] = ()

    @property
    def duplicate(self) -> bool:
        return not self.produced

    def binding(self) -> Binding:
        return dict(self.bindings)


@dataclass
class Trace:
    steps: list[TraceStep] = field(default_factory=list)

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def fired_rules(self) -> list[str]:
        out: list[str] = []
        for step in self.steps:
            if step.rule not in out:
                out.append(step.rule)
        return out

    def about(self, entity: Term) -> list[TraceStep]:
        return [s for s in self.steps if s.fact.subject == entity]


@dataclass
class InferenceResult:
    inferred: list[Fact]
    trace: Trace
    rounds: int
    builtin_errors: int = 0


class LimitExceeded(RuntimeError):
    def __init__(self, message: str, trace: Trace, rounds: int):
        super().__init__(message)
        self.code = "limit-exceeded"
        self.trace = trace
        self.rounds = rounds


class _DeltaIndex:
    """Facts added in the previous round, indexed like the graph."""

    def __init__(self, facts: Iterable[Fact]):
        self.graph = Graph()
        for f in facts:
            self.graph._insert(f)
        self.triples_set = {f.triple for f in self.graph._facts.values()}


def _subst(t: Term, b: Binding) -> Term:
    return b.get(t.value, t) if t.is_variable else t


def _match_atom(atom: Atom, binding: Binding, source: Graph, exclude: set | None) -> list[Binding]:
    s, p, o = (_subst(t, binding) for t in atom.as_triple())
    out = []
    for fact in source.triples(
        None if s.is_variable else s,
        None if p.is_variable else p,
        None if o.is_variable else o,
    ):
        if exclude is not None and fact.triple in exclude:
            continue
        b = dict(binding)
        ok = True
        for pattern, value in zip((s, p, o), fact.triple):
            if pattern.is_variable:
                seen = b.get(pattern.value)
                if seen is not None and seen != value:
                    ok = False
                    break
                b[pattern.value] = value
        if ok:
            out.append(b)
    return out


class _Evaluator:
    def __init__(self, graph: Graph):
        self.graph = graph
        self.builtin_errors = 0

    def run_builtins(self, builtins: list[Atom], binding: Binding) -> tuple[Binding | None, list[Atom]]:
        """Evaluate every builtin whose inputs are bound, left to right."""
        pending = list(builtins)
        progress = True
        while progress:
            progress = False
            for atom in list(pending):
                args = [_subst(a, binding) for a in atom.args]
                inputs = args[1:] if atom.builtin in ("subtract", "add", "multiply") else args
                if any(a.is_variable for a in inputs):
                    continue
                pending.remove(atom)
                progress = True
                try:
                    result = evaluate_builtin(atom.builtin, args)
                except BuiltinError:
                    self.builtin_errors += 1
                    return None, pending
                if isinstance(result, Term):
                    binding = {**binding, args[0].value: result}
                elif not result:
                    return None, pending
        return binding, pending

    def solve(
        self,
        rule: Rule,
        delta: _DeltaIndex | None,
        delta_pos: int | None,
    ) -> list[Binding]:
        """All bindings satisfying the body; with ``delta_pos`` set, that atom must match a delta fact.

        Atoms before ``delta_pos`` are restricted to pre-delta facts so each
        combination is found once across the semi-naive rounds.
        """
        plain = [(i, a) for i, a in enumerate(rule.body) if a.kind != BUILTIN_ATOM]
        builtins = [a for a in rule.body if a.kind == BUILTIN_ATOM]
        if delta_pos is not None:
            plain.sort(key=lambda ia: ia[0] != delta_pos)
        partial: list[tuple[Binding, list[Atom]]] = [({}, builtins)]
        for i, atom in plain:
            nxt: list[tuple[Binding, list[Atom]]] = []
            for binding, pending in partial:
                if delta_pos is None:
                    matches = _match_atom(atom, binding, self.graph, None)
                elif i == delta_pos:
                    matches = _match_atom(atom, binding, delta.graph, None)
                elif i < delta_pos:
                    matches = _match_atom(atom, binding, self.graph, delta.triples_set)
                else:
                    matches = _match_atom(atom, binding, self.graph, None)
                for b in matches:
                    b2, rest = self.run_builtins(pending, b)
                    if b2 is not None:
                        nxt.append((b2, rest))
            partial = nxt
            if not partial:
                return []
        out = []
        for binding, pending in partial:
            b2, rest = self.run_builtins(pending, binding)
            if b2 is not None and not rest:
                out.append(b2)
        return out


def instantiate(atom: Atom, binding: Binding, rule_name: str) -> Fact:
    s, p, o = (_subst(t, binding) for t in atom.as_triple())
    return Fact(s, p, o, inferred_by(rule_name))


def forward_chain(
    graph: Graph,
    rules: Sequence[Rule],
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    max_facts: int = DEFAULT_MAX_FACTS,
) -> InferenceResult:
    """Apply ``rules`` to ``graph`` until a round derives nothing new.

    Derived facts are merged into the graph at the end of each round in
    derivation order. On hitting a limit the graph is restored and
    ``LimitExceeded`` carries the partial trace.
    """
    trace = Trace()
    evaluator = _Evaluator(graph)
    added: list[Fact] = []
    delta: _DeltaIndex | None = None
    rounds = 0
    try:
        while True:
            rounds += 1
            if rounds > max_iterations:
                raise LimitExceeded(f"no fixpoint within {max_iterations} rounds", trace, rounds - 1)
            order: list[tuple[Rule, Binding, Fact]] = []
            for rule in rules:
                if delta is None:
                    solutions = evaluator.solve(rule, None, None)
                else:
                    solutions = []
                    for pos, atom in enumerate(rule.body):
                        if atom.kind != BUILTIN_ATOM:
                            solutions.extend(evaluator.solve(rule, delta, pos))
                for b in solutions:
                    fact = instantiate(rule.head, b, rule.name)
                    order.append((rule, b, fact))
            new_facts: list[Fact] = []
            for rule, b, fact in order:
                names = set(rule.variables())
                keep = tuple(sorted((k, v) for k, v in b.items() if k in names))
                produced: tuple[Fact, ...] = ()
                if fact.triple not in graph:
                    produced = tuple(graph.add(fact))
                    added.extend(produced)
                    new_facts.extend(produced)
                    if len(graph) > max_facts:
                        trace.steps.append(TraceStep(rule.name, keep, fact, rounds, produced))
                        raise LimitExceeded(f"fact cap {max_facts} exceeded", trace, rounds)
                trace.steps.append(TraceStep(rule.name, keep, fact, rounds, produced))
            if not new_facts:
                break
            delta = _DeltaIndex(new_facts)
    except LimitExceeded:
        for f in reversed(added):
            graph._remove(f.triple)
        raise
    return InferenceResult(added, trace, rounds, evaluator.builtin_errors)


def describe_step(step: TraceStep, graph: Graph) -> str:
    """One human-readable line for a trace step."""
    name = lambda t: shorten(t, graph.prefixes)  # noqa: E731
    binds = ", ".join(f"?{k}={name(v)}" for k, v in step.bindings)
    f = step.fact
    tail = "" if step.produced else " (already known)"
    return f"[round {step.iteration}] {step.rule}: {binds} => {name(f.subject)} {name(f.predicate)} {name(f.object)}{tail}"
