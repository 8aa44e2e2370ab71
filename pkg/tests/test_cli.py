import json

import pytest
from click.testing import CliRunner

from dfmforge.cli import main
from dfmforge.codec import parse_yaml, serialize_yaml
from dfmforge.render import to_dot

from conftest import FIXTURES, load_case


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args))


CASES = FIXTURES / "cases"
RELATIONAL = FIXTURES / "relational"
TRANSCRIPTS = FIXTURES / "transcripts"


def test_parse_reprints_canonically(runner):
    result = invoke(runner, "parse", str(CASES / "c2_draft.yaml"))
    assert result.exit_code == 0
    assert result.output == load_case("c2_draft.yaml")


def test_parse_json_format(runner):
    result = invoke(runner, "parse", str(CASES / "c2_draft.yaml"), "--format", "json")
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["fact"] == {"name": "PURCHASES"}


def test_parse_missing_file_exit_2(runner):
    result = invoke(runner, "parse", "no/such/file.yaml")
    assert result.exit_code == 2


def test_parse_bad_yaml_exit_1(runner, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("fact: [unclosed\n")
    result = invoke(runner, "parse", str(bad))
    assert result.exit_code == 1


def test_validate_ok(runner):
    result = invoke(runner, "validate", str(CASES / "c2_refined.yaml"))
    assert result.exit_code == 0
    assert result.output.strip() == "ok"


def test_validate_names_fake_node(runner, tmp_path):
    bad = tmp_path / "fake.yaml"
    bad.write_text(
        "fact: {name: F}\nmeasures:\n- Amount\ndependencies:\n"
        "- {from: F, to: Amount}\n- {from: F, to: A}\n- {from: A, to: Amount (AVG)}\n"
    )
    result = invoke(runner, "validate", str(bad))
    assert result.exit_code == 1
    assert "FakeNode" in result.output
    assert "Amount (AVG)" in result.output


def test_draft_matches_golden(runner):
    result = invoke(runner, "draft", str(RELATIONAL / "purchases.json"), "PURCHASES")
    assert result.exit_code == 0
    assert result.output == load_case("purchases_draft.yaml")


def test_draft_measures_override(runner):
    result = invoke(
        runner,
        "draft",
        str(RELATIONAL / "purchases.json"),
        "PURCHASES",
        "--measures",
        "amount",
    )
    assert result.exit_code == 0
    schema = parse_yaml(result.output)
    assert schema.measure_names == frozenset({"PURCHASES.amount"})


def test_draft_cyclic_fk_diagnostic(runner, tmp_path):
    cyclic = tmp_path / "cyc.json"
    cyclic.write_text(
        json.dumps(
            {
                "tables": [
                    {
                        "name": "A",
                        "columns": ["id", "b"],
                        "primary_key": ["id"],
                        "foreign_keys": [{"columns": ["b"], "target_table": "B"}],
                    },
                    {
                        "name": "B",
                        "columns": ["id", "a"],
                        "primary_key": ["id"],
                        "foreign_keys": [{"columns": ["a"], "target_table": "A"}],
                    },
                ]
            }
        )
    )
    result = invoke(runner, "draft", str(cyclic), "A")
    assert result.exit_code == 1
    assert "CyclicForeignKeys" in result.output


def test_apply_ops(runner, tmp_path):
    ops = tmp_path / "ops.json"
    ops.write_text(
        json.dumps(
            [
                {"kind": "Rename", "params": {"old": "STORE.id", "new": "Store"}},
                {"kind": "MarkOptional", "params": {"attr": "REGION.state"}},
            ]
        )
    )
    result = invoke(runner, "apply", str(CASES / "c2_draft.yaml"), str(ops))
    assert result.exit_code == 0
    schema = parse_yaml(result.output)
    assert "Store" in schema.attributes
    assert schema.optional == frozenset({"REGION.state"})


def test_apply_failure_reports_step(runner, tmp_path):
    ops = tmp_path / "ops.json"
    ops.write_text(
        json.dumps([{"kind": "Rename", "params": {"old": "Ghost", "new": "X"}}])
    )
    result = invoke(runner, "apply", str(CASES / "c2_draft.yaml"), str(ops))
    assert result.exit_code == 1
    assert "step 0" in result.output


def test_diff_self_zero(runner):
    result = invoke(
        runner, "diff", str(CASES / "c2_refined.yaml"), str(CASES / "c2_refined.yaml")
    )
    assert result.exit_code == 0
    assert result.output.startswith("total: 0")


def test_diff_min_over_truths(runner):
    result = invoke(
        runner,
        "diff",
        str(CASES / "c2_refined.yaml"),
        str(CASES / "c2_draft.yaml"),
        str(CASES / "c2_refined.yaml"),
    )
    assert result.exit_code == 0


def test_diff_exit_equals_total(runner, tmp_path):
    truth = tmp_path / "truth.yaml"
    truth.write_text("fact: {name: F}\ndependencies:\n- {from: F, to: A}\n- {from: A, to: B}\n")
    cand = tmp_path / "cand.yaml"
    cand.write_text("fact: {name: F}\ndependencies:\n- {from: F, to: A}\n")
    result = invoke(runner, "diff", str(cand), str(truth))
    assert result.exit_code == 1  # B missing


def test_diff_json_format(runner):
    result = invoke(
        runner,
        "diff",
        str(CASES / "c2_refined.yaml"),
        str(CASES / "c2_refined.yaml"),
        "--report-format",
        "json",
    )
    assert json.loads(result.output)["total"] == 0


def test_render_dot(runner):
    result = invoke(runner, "render", str(CASES / "c2_refined.yaml"))
    assert result.exit_code == 0
    out = result.output
    assert out.startswith("digraph dfm {")
    assert "shape=box" in out
    # optional State dashed, descriptive without circle, role labels absent here
    assert '"State" [shape=ellipse, style="dashed"]' in out
    assert '"ProductName" [shape=plaintext]' in out
    # measures live inside the fact box, not as arcs
    assert '"PURCHASES" -> "UnitPrice (AVG)"' not in out
    assert "UnitPrice (AVG)" in out  # listed in the fact label


def test_render_dot_roles():
    schema = parse_yaml(
        "fact: {name: R}\ndependencies:\n"
        "- {from: R, to: Date, role: pick-up}\n- {from: R, to: Date, role: drop-off}\n"
    )
    out = to_dot(schema)
    assert '[label="pick-up"]' in out
    assert '[label="drop-off"]' in out


def test_refine_llm_replay(runner):
    result = invoke(
        runner,
        "refine-llm",
        str(CASES / "c2_draft.yaml"),
        "--replay",
        str(TRANSCRIPTS / "c2_pipeline.jsonl"),
        "--optional-statement",
        "Not all regions have a state.",
        "--removal-statement",
        "StoreId is not interesting to me.",
    )
    assert result.exit_code == 0, result.output
    assert result.output == load_case("c2_refined.yaml")


def test_fix_replay(runner, tmp_path):
    transcript = tmp_path / "session.jsonl"
    result = invoke(
        runner,
        "fix",
        str(CASES / "c2_draft.yaml"),
        "Some arcs are missing, please try again.",
        "--replay",
        str(TRANSCRIPTS / "c2_fix.jsonl"),
        "--transcript",
        str(transcript),
    )
    assert result.exit_code == 0, result.output
    schema = parse_yaml(result.output)
    assert any((d.source, d.target) == ("Region", "State") for d in schema.dependencies)
    records = [json.loads(line) for line in transcript.read_text().splitlines()]
    assert len(records) == 4  # two prompts, two answers
    assert {r["role"] for r in records} == {"user", "assistant"}
