"""End-of-life decisions: health model, default ruleset, priority resolution, reference oracle."""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field, replace
from decimal import Decimal
from importlib import resources
from pathlib import Path
from typing import Sequence

from .graph import Fact, Graph, inferred_by
from .rules import Rule, Trace, TraceStep, forward_chain, parse_rules
from .rules.syntax import BUILTIN_ATOM, Atom
from .schema import (
    ACTUAL_SERVICE_LIFE,
    AMBER,
    AVG,
    DESIGNED_FOR_DISASSEMBLY,
    DOCUMENT,
    GREEN,
    HAS_EOL_STRATEGY,
    HAS_HEALTH_STATE,
    HAS_MARKET_DEMAND,
    HEALTH_DECLINE_RATE,
    HIGH,
    INITIAL_HEALTH,
    LOW,
    PRODUCT,
    RED,
    REFERENCE_SERVICE_LIFE,
    SUGGESTED_EOL_ROUTE,
    AT_EOL,
    ccpo,
    new_graph,
)
from .terms import RDF_TYPE, TRUE, Term, literal, shorten


class EolError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# -- health model ---------------------------------------------------------


@dataclass(frozen=True)
class HealthModelParams:
    p_h0: float
    alpha: float
    od: float

    def __post_init__(self):
        if not (0 < self.p_h0 <= 1):
            raise EolError("domain-error", f"initial health must be in (0, 1], got {self.p_h0}")
        if self.alpha < 0:
            raise EolError("domain-error", f"decline rate must be >= 0, got {self.alpha}")
        if self.od < 0:
            raise EolError("domain-error", f"operating duration must be >= 0, got {self.od}")


def health_value(params: HealthModelParams) -> float:
    """Exponential health decay: initial health times exp(-alpha * od)."""
    return params.p_h0 * math.exp(-params.alpha * params.od)


class HealthRating(enum.Enum):
    GREEN = 1
    AMBER = 2
    RED = 3

    @property
    def rics(self) -> int:
        return self.value

    @property
    def term(self) -> Term:
        return ccpo(self.name.lower())

    @classmethod
    def from_rics(cls, code: int) -> HealthRating:
        return cls(code)

    @classmethod
    def from_term(cls, term: Term) -> HealthRating:
        for r in cls:
            if r.term == term:
                return r
        raise EolError("unknown-health", f"{term!r} is not a health rating")


DEFAULT_THRESHOLDS = (0.7, 0.4)


def classify_health(value: float, thresholds: tuple[float, float] = DEFAULT_THRESHOLDS) -> HealthRating:
    """Map a health value to a RICS rating; both thresholds are inclusive lower bounds."""
    green_min, amber_min = thresholds
    if not (1 >= green_min > amber_min >= 0):
        raise EolError("invalid-thresholds", f"need 1 >= green-min > amber-min >= 0, got {thresholds}")
    if value >= green_min:
        return HealthRating.GREEN
    if value >= amber_min:
        return HealthRating.AMBER
    return HealthRating.RED


# -- routes ---------------------------------------------------------------


class EoLRoute(enum.Enum):
    StrongReuseSuggestion = "StrongReuseSuggestion"
    WeakReuse_ConsiderRefurbishmentSoon = "WeakReuse_ConsiderRefurbishmentSoon"
    CannotReuseDueToPoorProductHealth = "CannotReuseDueToPoorProductHealth"
    FollowManufacturerEoLStrategy = "FollowManufacturerEoLStrategy"
    RecycleDueToHighMarketDemand = "RecycleDueToHighMarketDemand"
    DoNotRecycleDueToLowDemand = "DoNotRecycleDueToLowDemand"
    SendToLandfill = "SendToLandfill"

    @property
    def rank(self) -> int:
        return _RANK[self]

    @property
    def intermediate(self) -> bool:
        return self.rank == INTERMEDIATE_RANK

    @property
    def term(self) -> Term:
        return ccpo(self.value)

    @classmethod
    def from_term(cls, term: Term) -> EoLRoute | None:
        for r in cls:
            if r.term == term:
                return r
        return None


INTERMEDIATE_RANK = 99

# waste-hierarchy ordering: reuse, manufacturer strategy, recycle, landfill
_RANK = {
    EoLRoute.StrongReuseSuggestion: 1,
    EoLRoute.WeakReuse_ConsiderRefurbishmentSoon: 1,
    EoLRoute.FollowManufacturerEoLStrategy: 2,
    EoLRoute.RecycleDueToHighMarketDemand: 3,
    EoLRoute.SendToLandfill: 4,
    EoLRoute.CannotReuseDueToPoorProductHealth: INTERMEDIATE_RANK,
    EoLRoute.DoNotRecycleDueToLowDemand: INTERMEDIATE_RANK,
}
_ORDER = list(EoLRoute)


def route_key(route: EoLRoute) -> tuple[int, int]:
    return (route.rank, _ORDER.index(route))


def resolve_priority(routes) -> EoLRoute | None:
    """Lowest-ranked non-intermediate route, or None."""
    finals = [r for r in routes if not r.intermediate]
    return min(finals, key=route_key) if finals else None


# -- ruleset --------------------------------------------------------------


def bundled_path(*parts: str) -> Path:
    return Path(str(resources.files("eolcycle").joinpath("data", *parts)))


def read_rules_text() -> str:
    return bundled_path("rules", "eol.rules").read_text(encoding="utf-8")


def _with_window(rule: Rule, window: int) -> Rule:
    body = []
    for atom in rule.body:
        if atom.kind == BUILTIN_ATOM and atom.builtin == "lessThanOrEqual":
            atom = Atom(atom.kind, atom.predicate, (atom.args[0], literal(window)))
        body.append(atom)
    return replace(rule, body=tuple(body))


def default_ruleset(reconciliation: bool = True, eol_window: int = 1) -> list[Rule]:
    """The bundled EoL rules; ``reconciliation=False`` keeps only the nine base rules."""
    rules = parse_rules(read_rules_text())
    if not reconciliation:
        rules = [r for r in rules if not r.is_reconciliation]
    if eol_window != 1:
        rules = [_with_window(r, eol_window) if r.name == "Rule1" else r for r in rules]
    return rules


# -- decisions ------------------------------------------------------------


@dataclass
class DecisionReport:
    product: Term
    at_eol: bool
    derived_routes: list[EoLRoute]
    final: EoLRoute | None
    fired_rules: list[str]
    trace: list[TraceStep]
    # rsl - asl when both are known
    diff: int | None = None
    health_estimate: float | None = None

    def as_dict(self, graph: Graph | None = None) -> dict:
        prefixes = graph.prefixes if graph is not None else None
        name = lambda t: shorten(t, prefixes)  # noqa: E731
        return {
            "product": name(self.product),
            "atEoL": self.at_eol,
            "derivedRoutes": [r.value for r in self.derived_routes],
            "final": self.final.value if self.final else None,
            "firedRules": list(self.fired_rules),
            "trace": [
                {
                    "rule": s.rule,
                    "round": s.iteration,
                    "bindings": {k: name(v) for k, v in s.bindings},
                    "fact": [name(s.fact.subject), name(s.fact.predicate), name(s.fact.object)],
                    "new": not s.duplicate,
                }
                for s in self.trace
            ],
        }


def _int_value(graph: Graph, s: Term, p: Term) -> int | None:
    t = graph.value(s, p)
    return int(t.value) if t is not None and t.is_numeric else None


def assess_health(graph: Graph, product: Term, thresholds=DEFAULT_THRESHOLDS) -> tuple[float, HealthRating] | None:
    """Rate a product from its decay parameters, using actual service life as operating duration."""
    p_h0 = graph.value(product, INITIAL_HEALTH)
    alpha = graph.value(product, HEALTH_DECLINE_RATE)
    od = graph.value(product, ACTUAL_SERVICE_LIFE)
    if p_h0 is None or alpha is None or od is None:
        return None
    value = health_value(HealthModelParams(float(p_h0.value), float(alpha.value), float(od.value)))
    return value, classify_health(value, thresholds)


def decide(
    graph: Graph,
    product: Term,
    ruleset: Sequence[Rule],
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS,
) -> DecisionReport:
    """Run the ruleset and pick the highest-priority route for ``product``."""
    if not graph.mentions(product):
        raise EolError("unknown-product", f"{shorten(product, graph.prefixes)} is not in the graph")
    if PRODUCT not in graph.types(product):
        raise EolError("not-a-product", f"{shorten(product, graph.prefixes)} is not a Product")

    pre_steps: list[TraceStep] = []
    estimate = None
    if not graph.objects(product, HAS_HEALTH_STATE):
        assessed = assess_health(graph, product, thresholds)
        if assessed is not None:
            estimate, rating = assessed
            fact = Fact(product, HAS_HEALTH_STATE, rating.term, inferred_by("health-model"))
            produced = tuple(graph.add(fact))
            binding = (("health", literal(Decimal(str(round(estimate, 6))))),)
            pre_steps.append(TraceStep("health-model", binding, fact, 0, produced))

    result = forward_chain(graph, ruleset)
    steps = pre_steps + result.trace.about(product)
    routes = {EoLRoute.from_term(o) for o in graph.objects(product, SUGGESTED_EOL_ROUTE)}
    routes.discard(None)
    derived = sorted(routes, key=route_key)
    at_eol = (product, AT_EOL, TRUE) in graph
    rsl = _int_value(graph, product, REFERENCE_SERVICE_LIFE)
    asl = _int_value(graph, product, ACTUAL_SERVICE_LIFE)
    fired: list[str] = []
    for s in steps:
        if s.rule not in fired:
            fired.append(s.rule)
    return DecisionReport(
        product=product,
        at_eol=at_eol,
        derived_routes=derived,
        final=resolve_priority(derived) if at_eol else None,
        fired_rules=fired,
        trace=steps,
        diff=None if rsl is None or asl is None else rsl - asl,
        health_estimate=estimate,
    )


EOL_RULE_HEADS = (AT_EOL, SUGGESTED_EOL_ROUTE)


def explain(report: DecisionReport, graph: Graph) -> str:
    """A derivation narrative: each fired rule, its bindings and the fact it produced."""
    from .rules import describe_step

    name = lambda t: shorten(t, graph.prefixes)  # noqa: E731
    lines = [f"Product {name(report.product)}"]
    if report.health_estimate is not None:
        lines.append(f"  health estimate {report.health_estimate:.4f} from the decay model")
    if not report.trace:
        lines.append("  no rules fired (empty trace)")
    if not report.at_eol:
        diff = "unknown" if report.diff is None else str(report.diff)
        lines.append(f"  not at end-of-life (diff={diff})")
        eol_steps = [s for s in report.trace if s.fact.predicate in EOL_RULE_HEADS]
        if not eol_steps:
            lines.append("  no end-of-life rules fired")
    for step in report.trace:
        lines.append("  " + describe_step(step, graph))
    if report.at_eol:
        if report.final is not None:
            others = [r.value for r in report.derived_routes if r is not report.final]
            tail = f" (also derived: {', '.join(others)})" if others else ""
            lines.append(f"  final route: {report.final.value}{tail}")
        else:
            lines.append("  at end-of-life but no route derived: the ruleset has a gap for this state")
    return "\n".join(lines) + "\n"


# -- reference oracle -----------------------------------------------------


class Demand(enum.Enum):
    HIGH = "high"
    AVG = "avg"
    LOW = "low"

    @property
    def term(self) -> Term:
        return {Demand.HIGH: HIGH, Demand.AVG: AVG, Demand.LOW: LOW}[self]


@dataclass(frozen=True)
class ProductState:
    health: HealthRating
    rsl: int
    asl: int
    strategy_exists: bool
    market_demand: Demand
    dfd: bool


@dataclass(frozen=True)
class OracleResult:
    at_eol: bool
    route: EoLRoute


def oracle_decision(state: ProductState, eol_window: int = 1) -> OracleResult:
    """Direct transcription of the EoL decision algorithm, independent of the rule engine.

    The recycle test reads as ``high or (avg and dfd)``.
    """
    at_eol = state.rsl - state.asl <= eol_window
    green = state.health is HealthRating.GREEN
    amber = state.health is HealthRating.AMBER
    if green and state.asl < state.rsl:
        route = EoLRoute.StrongReuseSuggestion
    elif amber or state.asl >= state.rsl:
        route = EoLRoute.WeakReuse_ConsiderRefurbishmentSoon
    elif state.strategy_exists:
        route = EoLRoute.FollowManufacturerEoLStrategy
    elif state.market_demand is Demand.HIGH or (state.market_demand is Demand.AVG and state.dfd):
        route = EoLRoute.RecycleDueToHighMarketDemand
    else:
        route = EoLRoute.SendToLandfill
    return OracleResult(at_eol, route)


def graph_from_state(state: ProductState, product: Term | None = None) -> tuple[Graph, Term]:
    """A minimal graph holding one product in ``state``."""
    product = product or ccpo("p1")
    g = new_graph()
    g.add(Fact(product, RDF_TYPE, PRODUCT))
    g.add(Fact(product, REFERENCE_SERVICE_LIFE, literal(state.rsl)))
    g.add(Fact(product, ACTUAL_SERVICE_LIFE, literal(state.asl)))
    g.add(Fact(product, HAS_HEALTH_STATE, state.health.term))
    g.add(Fact(product, HAS_MARKET_DEMAND, state.market_demand.term))
    g.add(Fact(product, DESIGNED_FOR_DISASSEMBLY, literal(state.dfd)))
    if state.strategy_exists:
        doc = ccpo("p1_eol_strategy")
        g.add(Fact(doc, RDF_TYPE, DOCUMENT))
        g.add(Fact(product, HAS_EOL_STRATEGY, doc))
    return g, product


# -- configuration --------------------------------------------------------

ENV_PREFIX = "EOLCYCLE_"


@dataclass
class EolConfig:
    green_min: float = DEFAULT_THRESHOLDS[0]
    amber_min: float = DEFAULT_THRESHOLDS[1]
    eol_window: int = 1
    reconciliation: bool = True
    ruleset: str | None = None
    strict: bool = False
    format: str = "pretty"
    sources: list[str] = field(default_factory=list)

    @property
    def thresholds(self) -> tuple[float, float]:
        return (self.green_min, self.amber_min)

    def rules(self) -> list[Rule]:
        if self.ruleset:
            return parse_rules(Path(self.ruleset).read_text(encoding="utf-8"))
        return default_ruleset(self.reconciliation, self.eol_window)


def _coerce(key: str, raw: str):
    kind = EolConfig.__dataclass_fields__[key].type
    if kind == "float":
        return float(raw)
    if kind == "int":
        return int(raw)
    if kind == "bool":
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise EolError("bad-config", f"{key}: expected a boolean, got {raw!r}")
    return raw.strip()


_KEYS = ("green_min", "amber_min", "eol_window", "reconciliation", "ruleset", "strict", "format")


def parse_config_text(text: str, config: EolConfig | None = None) -> EolConfig:
    """Apply ``key = value`` lines (``#`` comments) onto a config."""
    config = config or EolConfig()
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _KEYS:
            raise EolError("bad-config", f"line {n}: unknown or malformed setting {line!r}")
        try:
            setattr(config, key, _coerce(key, value.strip()))
        except ValueError as exc:
            raise EolError("bad-config", f"line {n}: {exc}") from None
    return config


def load_config(path: str | Path | None = None, environ=None) -> EolConfig:
    """Defaults, then the config file, then ``EOLCYCLE_*`` environment variables."""
    config = EolConfig()
    if path is not None:
        config = parse_config_text(Path(path).read_text(encoding="utf-8"), config)
        config.sources.append(str(path))
        if config.ruleset and not Path(config.ruleset).is_absolute():
            config.ruleset = str(Path(path).parent / config.ruleset)
    environ = os.environ if environ is None else environ
    for key in _KEYS:
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            setattr(config, key, _coerce(key, raw))
            config.sources.append(ENV_PREFIX + key.upper())
    classify_health(1.0, config.thresholds)
    return config
