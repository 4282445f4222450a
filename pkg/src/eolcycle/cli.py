"""Command-line entry point: validate, query, decide, explain.

Exit codes: 0 ok, 1 input error, 2 validation failure, 3 decision gap.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .eol import EolConfig, EolError, bundled_path, decide, explain, load_config
from .graph import GraphError
from .query import FORMATS, QueryError, execute, parse_query, serialize_results
from .rules import LimitExceeded, RuleError, forward_chain, parse_rules
from .terms import CCPO, Term, TermError, iri
from .turtle import ParseError
from .validate import ADVISORY, STRICT, Loaded, load_files, rejection_issues, validate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVALID = 2
EXIT_GAP = 3


class InputError(Exception):
    """Anything the user supplied that cannot be used: missing files, syntax errors, unknown ids."""


@dataclass
class CliConfig:
    data_paths: list[Path]
    settings: EolConfig
    ruleset_path: Path | None = None
    query_path: Path | None = None
    query_text: str | None = None
    product_id: str | None = None
    infer: bool = False

    @property
    def output_format(self) -> str:
        return self.settings.format

    @property
    def strict(self) -> bool:
        return self.settings.strict


def resolve_path(raw: str) -> Path:
    """A path as given, else the same relative path inside the bundled data directory."""
    path = Path(raw)
    if path.exists():
        return path
    if not path.is_absolute():
        bundled = bundled_path(*path.parts)
        if bundled.exists():
            return bundled
    raise InputError(f"file not found: {raw}")


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_data(config: CliConfig) -> Loaded:
    try:
        return load_files(config.data_paths)
    except ParseError as exc:
        raise InputError(f"parse error [{exc.code}]: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read data: {exc}") from None


def load_rules(config: CliConfig):
    if config.ruleset_path is None:
        return config.settings.rules()
    try:
        return parse_rules(_read(config.ruleset_path))
    except RuleError as exc:
        raise InputError(f"{config.ruleset_path}: rule error [{exc.code}]: {exc}") from None


def _require_clean(loaded: Loaded) -> None:
    if loaded.rejected:
        issue = rejection_issues(loaded)[0]
        raise InputError(f"data rejected [{issue.code}] {issue.entity}: {issue.message}")


def infer(graph, rules) -> None:
    try:
        forward_chain(graph, rules)
    except LimitExceeded as exc:
        raise InputError(f"inference stopped [{exc.code}]: {exc}") from None


def resolve_product(raw: str, graph) -> Term:
    text = raw.strip()
    if text.startswith("<") and text.endswith(">"):
        return iri(text[1:-1])
    if "://" in text:
        return iri(text)
    if ":" in text:
        try:
            return iri(graph.prefixes.expand(text))
        except TermError as exc:
            raise InputError(str(exc)) from None
    return iri(CCPO + text)


# -- commands -------------------------------------------------------------


def cmd_validate(config: CliConfig, out) -> int:
    loaded = load_data(config)
    report = validate(loaded.graph, STRICT if config.strict else ADVISORY)
    # facts the schema refused never made it into the graph; report them as errors
    report.errors[:0] = rejection_issues(loaded)
    if config.output_format == "json":
        out.write(report.to_json() + "\n")
    else:
        for issue in report.errors:
            out.write(f"error\t{issue.code}\t{issue.entity}\t{issue.message}\n")
        for issue in report.warnings:
            out.write(f"warning\t{issue.code}\t{issue.entity}\t{issue.message}\n")
        status = "consistent" if not report.errors else "inconsistent"
        out.write(
            f"{status}: {len(report.errors)} error(s), {len(report.warnings)} warning(s), "
            f"{report.checked} fact(s) checked\n"
        )
    return EXIT_INVALID if report.errors else EXIT_OK


def cmd_query(config: CliConfig, out) -> int:
    if config.query_text is not None:
        text = config.query_text
    elif config.query_path is not None:
        text = _read(config.query_path)
    else:
        raise InputError("query needs --file PATH or --query TEXT")
    loaded = load_data(config)
    _require_clean(loaded)
    graph = loaded.graph
    try:
        query = parse_query(text, graph.prefixes)
    except QueryError as exc:
        raise InputError(f"query error [{exc.code}]: {exc}") from None
    if config.infer:
        infer(graph, load_rules(config))
    table = execute(query, graph)
    out.write(serialize_results(table, config.output_format, graph.prefixes))
    return EXIT_OK


def _decision(config: CliConfig):
    loaded = load_data(config)
    _require_clean(loaded)
    graph = loaded.graph
    rules = load_rules(config)
    product = resolve_product(config.product_id, graph)
    try:
        report = decide(graph, product, rules, config.settings.thresholds)
    except EolError as exc:
        raise InputError(f"[{exc.code}] {exc}") from None
    except LimitExceeded as exc:
        raise InputError(f"inference stopped [{exc.code}]: {exc}") from None
    return graph, report


def _gap(report) -> bool:
    return report.at_eol and report.final is None


def cmd_decide(config: CliConfig, out) -> int:
    graph, report = _decision(config)
    if config.output_format == "json":
        out.write(json.dumps(report.as_dict(graph), indent=2, sort_keys=True) + "\n")
    else:
        doc = report.as_dict(graph)
        routes = ", ".join(doc["derivedRoutes"]) or "none"
        sep = "\t" if config.output_format == "tsv" else ": "
        for key, value in (
            ("product", doc["product"]),
            ("atEoL", str(doc["atEoL"]).lower()),
            ("derivedRoutes", routes),
            ("final", doc["final"] or "none"),
            ("firedRules", ", ".join(doc["firedRules"]) or "none"),
        ):
            out.write(f"{key}{sep}{value}\n")
    return EXIT_GAP if _gap(report) else EXIT_OK


def cmd_explain(config: CliConfig, out) -> int:
    graph, report = _decision(config)
    out.write(explain(report, graph))
    return EXIT_GAP if _gap(report) else EXIT_OK


COMMANDS = {"validate": cmd_validate, "query": cmd_query, "decide": cmd_decide, "explain": cmd_explain}


# -- argument handling ----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eolcycle",
        description="Provenance knowledge graph and end-of-life decision support for construction products.",
    )
    parser.add_argument("--version", action="version", version=f"eolcycle {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help="output format (default: pretty)")
    common.add_argument("--config", metavar="PATH", help="key=value settings file")
    common.add_argument("--ruleset", metavar="PATH", help="rules file (default: bundled ruleset)")
    common.add_argument("--strict", action="store_true", default=None, help="strict validation")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    p = sub.add_parser("validate", parents=[common], help="check data against the schema")
    p.add_argument("data", nargs="+", help="Turtle data files")

    p = sub.add_parser("query", parents=[common], help="run a SELECT query")
    p.add_argument("data", nargs="+", help="Turtle data files")
    p.add_argument("--file", metavar="PATH", help="query file")
    p.add_argument("--query", metavar="TEXT", help="inline query text")
    p.add_argument("--infer", action="store_true", help="run the ruleset before querying")

    for name, text in (("decide", "suggest an end-of-life route"), ("explain", "narrate the derivation")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("data", nargs="+", help="Turtle data files")
        p.add_argument("product", help="product id: prefix:name, <iri> or a bare ccpo name")
    return parser


def make_config(args: argparse.Namespace, environ=None) -> CliConfig:
    try:
        settings = load_config(resolve_path(args.config) if args.config else None, environ)
    except EolError as exc:
        raise InputError(f"config error: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from None
    # flags win over the config file and environment
    if args.format is not None:
        settings.format = args.format
    if args.strict:
        settings.strict = True
    if settings.format not in FORMATS:
        raise InputError(f"unknown format {settings.format!r}; expected one of {', '.join(FORMATS)}")
    ruleset = args.ruleset or None
    if ruleset is None and settings.ruleset:
        ruleset = settings.ruleset
        settings.ruleset = None
    return CliConfig(
        data_paths=[resolve_path(p) for p in args.data],
        settings=settings,
        ruleset_path=resolve_path(ruleset) if ruleset else None,
        query_path=resolve_path(args.file) if getattr(args, "file", None) else None,
        query_text=getattr(args, "query", None),
        product_id=getattr(args, "product", None),
        infer=bool(getattr(args, "infer", False)),
    )


def main(argv: list[str] | None = None, out=None, err=None, environ=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        config = make_config(args, environ)
        return COMMANDS[args.command](config, out)
    except InputError as exc:
        err.write(f"eolcycle: {exc}\n")
        return EXIT_INPUT
    except GraphError as exc:
        err.write(f"eolcycle: [{exc.code}] {exc}\n")
        return EXIT_INPUT


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
