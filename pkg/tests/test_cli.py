import io
import json
import subprocess
import sys

import pytest

from eolcycle.cli import EXIT_GAP, EXIT_INPUT, EXIT_INVALID, EXIT_OK, main
from eolcycle.eol import bundled_path, default_ruleset
from eolcycle.query import execute, parse_query
from eolcycle.rules import forward_chain

from helpers import iwp_graph

IWP = "fixtures/iwp.ttl"


def cli(*args, environ=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(args), out=out, err=err, environ=environ or {})
    return code, out.getvalue(), err.getvalue()


def test_validate_exit_codes():
    assert cli("validate", IWP)[0] == EXIT_OK
    code, out, _ = cli("validate", "fixtures/bad_cardinality.ttl", "--format", "json")
    assert code == EXIT_INVALID
    assert json.loads(out)["errors"][0]["code"] == "cardinality"
    code, _, err = cli("validate", "missing.ttl")
    assert code == EXIT_INPUT and "missing.ttl" in err


def test_validate_parse_failure(tmp_path):
    bad = tmp_path / "bad.ttl"
    bad.write_text("@prefix ccpo: <http://example.org/ccpo#> .\nccpo:a ccpo:b")
    code, _, err = cli("validate", str(bad))
    assert code == EXIT_INPUT and "line 2" in err


def test_validate_reports_rejected_facts(tmp_path):
    bad = tmp_path / "typo.ttl"
    bad.write_text('@prefix ccpo: <http://example.org/ccpo#> .\nccpo:a a ccpo:Product ; ccpo:actualServiceLife "old" .')
    code, out, _ = cli("validate", str(bad))
    assert code == EXIT_INVALID and "datatype-mismatch" in out


def test_strict_flag_upgrades_warnings(tmp_path):
    extra = tmp_path / "spare.ttl"
    extra.write_text("@prefix ccpo: <http://example.org/ccpo#> .\nccpo:spare a ccpo:Product .")
    assert cli("validate", IWP, str(extra))[0] == EXIT_OK
    assert cli("validate", IWP, str(extra), "--strict")[0] == EXIT_INVALID


def test_query_file_and_inline():
    code, out, _ = cli("query", IWP, "--file", "cq/cq1.rq", "--format", "tsv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "?component\t?virginMat\t?nonVirginMat"
    code, out, _ = cli("query", IWP, "--query", "SELECT ?x WHERE { ?x ccpo:hasURL ?u }", "--format", "tsv")
    assert code == EXIT_OK and len(out.splitlines()) == 7


def test_query_empty_result_is_ok():
    code, out, _ = cli("query", IWP, "--file", "cq/cq6.rq", "--format", "tsv")
    assert code == EXIT_OK and out == "?product\t?route\n"


def test_query_errors():
    code, _, err = cli("query", IWP, "--query", "SELECT ?x WHERE { ?x }")
    assert code == EXIT_INPUT and "line 1" in err
    assert cli("query", IWP)[0] == EXIT_INPUT


def test_decide_and_explain():
    code, out, _ = cli("decide", IWP, "ccpo:iwp1", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["final"] == "StrongReuseSuggestion" and doc["atEoL"] is True
    code, out, _ = cli("explain", IWP, "iwp1")
    assert code == EXIT_OK
    assert [line.split(": ")[0].split("] ")[1] for line in out.splitlines() if "[round" in line] == ["Rule1", "Rule3.i", "Rule2.i"]
    assert cli("decide", IWP, "ccpo:nonexistent")[0] == EXIT_INPUT
    assert cli("decide", IWP, "<http://example.org/ccpo#iwp1>")[0] == EXIT_OK


def test_decide_gap_exit_code(tmp_path):
    rules = tmp_path / "eol-only.rules"
    rules.write_text(
        "Rule1: Product(?p) ^ referenceServiceLife(?p, ?r) ^ actualServiceLife(?p, ?a) "
        "^ swrlb:subtract(?diff, ?r, ?a) ^ swrlb:lessThanOrEqual(?diff, 1) -> atEoL(?p, true)\n"
    )
    code, out, _ = cli("decide", IWP, "iwp1", "--ruleset", str(rules))
    assert code == EXIT_GAP and "final: none" in out


def test_custom_ruleset_and_bad_ruleset(tmp_path):
    rules = tmp_path / "sla.rules"
    rules.write_text("Any: Product(?p) -> suggestedEoLRoute(?p, SendToLandfill)\nEol: Product(?p) -> atEoL(?p, true)")
    code, out, _ = cli("decide", IWP, "iwp1", "--ruleset", str(rules), "--format", "json")
    assert code == EXIT_OK and json.loads(out)["final"] == "SendToLandfill"
    rules.write_text("Broken: Product(?p) -> atEoL(?q, true)")
    code, _, err = cli("decide", IWP, "iwp1", "--ruleset", str(rules))
    assert code == EXIT_INPUT and "unsafe-rule" in err


def test_config_and_env(tmp_path):
    conf = tmp_path / "site.conf"
    conf.write_text("format = json\neol_window = 0\n")
    code, out, _ = cli("decide", IWP, "iwp1", "--config", str(conf))
    doc = json.loads(out)
    assert code == EXIT_OK and doc["atEoL"] is False and doc["final"] is None
    # flags beat the file; environment beats the file
    code, out, _ = cli("decide", IWP, "iwp1", "--config", str(conf), "--format", "tsv")
    assert out.startswith("product\t")
    code, out, _ = cli("decide", IWP, "iwp1", "--config", str(conf), environ={"EOLCYCLE_EOL_WINDOW": "1"})
    assert json.loads(out)["final"] == "StrongReuseSuggestion"
    conf.write_text("colour = blue\n")
    assert cli("decide", IWP, "iwp1", "--config", str(conf))[0] == EXIT_INPUT


def test_json_output_is_byte_stable():
    runs = {cli("decide", IWP, "iwp1", "--format", "json")[1] for _ in range(3)}
    assert len(runs) == 1
    runs = {cli("query", IWP, "--file", "cq/cq2.rq", "--format", "json")[1] for _ in range(3)}
    assert len(runs) == 1


def test_decide_agrees_with_cq6():
    g = iwp_graph()
    forward_chain(g, default_ruleset())
    table = execute(parse_query(bundled_path("cq", "cq6.rq").read_text()), g)
    routes = {r[1].value.split("#")[1] for r in table.rows if r[0].value.endswith("#iwp1")}
    doc = json.loads(cli("decide", IWP, "iwp1", "--format", "json")[1])
    assert set(doc["derivedRoutes"]) == routes
    assert doc["final"] in routes


def test_version_and_console_script():
    with pytest.raises(SystemExit) as exit_info:
        main(["--version"])
    assert exit_info.value.code == 0
    proc = subprocess.run([sys.executable, "-m", "eolcycle.cli", "validate", IWP], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("consistent")
