"""
Command-line front end: outputs, reports and exit codes
"""
import json

import pytest

from gysin.cli import cli
from gysin.complexes import ChainMap, point_complex
from gysin.documents import validate_report
from gysin.equivariant import trivial_action_datum
from gysin.factory import ewc_instance, generate


def _json(result):
    return json.loads(result.output)


# ------------------------
# Single commands
# ------------------------
def test_homology_of_cpn2(runner, cpn2_path):
    result = runner.invoke(cli, ["homology", "--in", cpn2_path])
    assert result.exit_code == 0, result.output
    assert result.output.strip() == "H0=Z H1=0 H2=Z H3=0 H4=Z"


def test_homology_reads_stdin(runner):
    doc = runner.invoke(cli, ["example", "rp2"]).output
    result = runner.invoke(cli, ["homology"], input=doc)
    assert result.exit_code == 0
    assert "H1=Z/2" in result.output


def test_ring_option_overrides_document(runner, cpn2_path):
    result = runner.invoke(cli, ["homology", "--in", cpn2_path, "--ring", "Zp:2"])
    assert result.exit_code == 0
    assert "H4=Z" in result.output


def test_bad_ring_is_a_usage_error(runner, cpn2_path):
    result = runner.invoke(cli, ["homology", "--in", cpn2_path, "--ring", "Zp:4"])
    assert result.exit_code == 2


def test_example_piped_into_gysin(runner):
    doc = runner.invoke(cli, ["example", "hopf"]).output
    result = runner.invoke(cli, ["gysin"], input=doc)
    assert result.exit_code == 0, result.output
    assert "H0(total)" in result.output
    assert "H3(total)" in result.output
    assert "total: H0=Z H1=0 H2=0 H3=Z" in result.output


def test_json_reports_validate(runner, write_doc):
    path = write_doc(generate("hopf"))
    for command in ("gysin", "check-lemma58", "spectral", "homology"):
        result = runner.invoke(cli, [command, "--in", path, "--format", "json"])
        assert result.exit_code == 0, (command, result.output)
        report = _json(result)
        validate_report(report)
        assert report["command"] == command
        assert report["ok"] is True


def test_spectral_two_line_has_no_late_differentials(runner, write_doc):
    path = write_doc(generate("hopf"))
    report = _json(runner.invoke(cli, ["spectral", "--in", path, "--pages", "4", "--format", "json"]))
    assert report["result"]["late_differentials"] == []
    assert report["result"]["recursion_failures"] == []


def test_spectral_chart_is_written(runner, write_doc, tmp_path):
    path = write_doc(generate("random_filtered(2, 5)"))
    chart = tmp_path / "pages.html"
    result = runner.invoke(cli, ["spectral", "--in", path, "--chart", str(chart)])
    assert result.exit_code == 0, result.output
    assert chart.read_text(encoding="utf-8").lstrip().lower().startswith("<html")


def test_out_writes_to_file(runner, cpn2_path, tmp_path):
    target = tmp_path / "report.json"
    result = runner.invoke(cli, ["homology", "--in", cpn2_path, "--format", "json", "--out", str(target)])
    assert result.exit_code == 0
    assert json.loads(target.read_text(encoding="utf-8"))["result"]["groups"]["2"] == "Z"


def test_cone_and_snake(runner, write_doc):
    P = point_complex()
    path = write_doc(ChainMap(P, P, 0, {0: [[2]]}))
    cone = runner.invoke(cli, ["cone", "--in", path])
    assert cone.exit_code == 0
    assert "H-1=Z/2" in cone.output
    snake = _json(runner.invoke(cli, ["snake", "--in", path, "--format", "json"]))
    assert snake["result"]["connecting_equals_induced"] is True


def test_grid57_on_random_morphism(runner, write_doc):
    path = write_doc(generate("random_ses_morphism(5, 3)"))
    result = runner.invoke(cli, ["grid57", "--in", path])
    assert result.exit_code == 0, result.output
    assert "ok: True" in result.output


def test_equivariant_datum_commands(runner, write_doc):
    ewc = write_doc(ewc_instance(1), "ewc.json")
    for command in ("mb-assemble", "phi", "theorem11", "bv", "diagram17"):
        result = runner.invoke(cli, [command, "--in", ewc])
        assert result.exit_code == 0, (command, result.output)
    diagram = _json(runner.invoke(cli, ["diagram17", "--in", ewc, "--format", "json"]))
    assert diagram["result"]["ewc"]["all_vanish"] is True


def test_diagram17_over_q_reports_forced_isomorphisms(runner, write_doc):
    path = write_doc(ewc_instance(2), "ewc.json")
    result = runner.invoke(cli, ["diagram17", "--in", path, "--ring", "Q"])
    assert result.exit_code == 0, result.output
    assert "connecting maps forced to be isomorphisms" in result.output
    report = _json(runner.invoke(cli, ["diagram17", "--in", path, "--ring", "Q", "--format", "json"]))
    assert report["result"]["diagram"]["forced_isomorphisms"]


def test_equivariant_with_quotient(runner, write_doc):
    datum = {"schema_version": "1", "kind": "s1_morse_datum",
             "circles": [{"label": "a", "index": "0"}, {"label": "b", "index": "1"}],
             "counts": [["1", "0", "2"]]}
    quotient = {"schema_version": "1", "kind": "complex", "ring": "Z", "degrees": {"0": "1", "1": "1"},
                "labels": {"0": ["a"], "1": ["b"]}, "differentials": {"1": [["0", "0", "2"]]}}
    result = runner.invoke(cli, ["equivariant", "--in", write_doc(datum, "d.json"),
                                 "--quotient", write_doc(quotient, "q.json")])
    assert result.exit_code == 0, result.output
    assert "H0=Z/2" in result.output
    assert "matches quotient: True" in result.output


def test_borel_level(runner, write_doc):
    path = write_doc(generate("circle"))
    report = _json(runner.invoke(cli, ["borel", "--in", path, "--level", "1", "--format", "json"]))
    assert report["result"]["level"] == 1
    assert report["ok"] is True


def test_theorem11_uses_equivariant_map_names(runner, write_doc):
    path = write_doc(trivial_action_datum(1))
    report = _json(runner.invoke(cli, ["theorem11", "--in", path, "--format", "json"]))
    kinds = {m["kind"] for m in report["result"]["les"]["maps"]}
    assert kinds == {"M", "E", "D"}


# ------------------------
# Solver
# ------------------------
def test_solve_from_dims(runner):
    result = runner.invoke(cli, ["solve", "--dims", "A=3,?,2", "--format", "json"])
    assert result.exit_code == 0, result.output
    assert _json(result)["result"]["dims"] == ["3", "5", "2"]


def test_solve_reports_contradictions(runner):
    result = runner.invoke(cli, ["solve", "--dims", "2,3"])
    assert result.exit_code == 1
    assert "Contradiction" in result.output


def test_solve_hidden_entry_of_a_sequence(runner, write_doc):
    gysin = _json(runner.invoke(cli, ["gysin", "--in", write_doc(generate("hopf")), "--ring", "Q",
                                      "--format", "json"]))
    path = write_doc(gysin["result"]["les"], "les.json")
    result = runner.invoke(cli, ["solve", "--in", path, "--hide", "H3(total)", "--format", "json"])
    assert result.exit_code == 0, result.output
    assert _json(result)["result"]["dims"][1] == "1"


def test_solve_refuses_integer_sequences(runner, write_doc):
    gysin = _json(runner.invoke(cli, ["gysin", "--in", write_doc(generate("hopf")), "--format", "json"]))
    result = runner.invoke(cli, ["solve", "--in", write_doc(gysin["result"]["les"], "les.json")])
    assert result.exit_code == 1


# ------------------------
# Filtered orders and examples
# ------------------------
def test_order_of_homotopy(runner, write_doc):
    inst = generate("random_homotopy(3, 4, 1)")
    report = _json(runner.invoke(cli, ["order", "--in", write_doc(inst.K), "--format", "json"]))
    assert report["result"]["order"] <= 1
    assert report["result"]["shift"] == 1


def test_example_seed_and_size(runner):
    first = runner.invoke(cli, ["example", "random_complex", "--seed", "4", "--size", "6"]).output
    second = runner.invoke(cli, ["example", "random_complex(4, 6)"]).output
    assert first == second


def test_seed_on_fixed_example_is_rejected(runner):
    result = runner.invoke(cli, ["example", "cpn(2)", "--seed", "3"])
    assert result.exit_code == 1


# ------------------------
# Errors and exit codes
# ------------------------
def test_validate_names_failing_degree(runner, write_doc):
    doc = {"schema_version": "1", "kind": "complex", "ring": "Z", "degrees": {"0": "1", "1": "1", "2": "1"},
           "differentials": {"1": [["0", "0", "1"]], "2": [["0", "0", "1"]]}}
    result = runner.invoke(cli, ["validate", "--in", write_doc(doc)])
    assert result.exit_code == 1
    assert "InvalidComplex" in result.output
    assert "degree=2" in result.output


def test_validate_accepts_examples(runner, write_doc):
    result = runner.invoke(cli, ["validate", "--in", write_doc(generate("random_two_line(1, 4)"))])
    assert result.exit_code == 0
    assert result.output.startswith("valid two_line over Z")


def test_invalid_json_exits_2(runner):
    result = runner.invoke(cli, ["homology"], input='{"kind": ')
    assert result.exit_code == 2
    assert "invalid JSON" in result.output


def test_missing_file_exits_2(runner, tmp_path):
    result = runner.invoke(cli, ["homology", "--in", str(tmp_path / "absent.json")])
    assert result.exit_code == 2


def test_wrong_kind_exits_1(runner, cpn2_path):
    result = runner.invoke(cli, ["gysin", "--in", cpn2_path])
    assert result.exit_code == 1
    assert "two_line" in result.output


@pytest.mark.parametrize("flag", ["-v", "-vv", "--log-json"])
def test_logging_flags(runner, cpn2_path, flag):
    result = runner.invoke(cli, [flag, "homology", "--in", cpn2_path])
    assert result.exit_code == 0


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "gysin" in result.output
