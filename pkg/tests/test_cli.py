import json
import subprocess
import sys

import pytest

from folnar.cli import main
from folnar.synthetic import BUNDLED
from conftest import GOLDEN_CONCLUSION, GOLDEN_NARSESE, GOLDEN_PREMISES, GOLDEN_RECORD

MOCK = [f"--engine={sys.executable}", "--engine-arg=-m", "--engine-arg=folnar.mock_engine"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def table(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split()
    return [dict(zip(header, ln.split())) for ln in lines[1:] if not ln.startswith("retained ")]


# -- compile ------------------------------------------------------------------


def test_compile_golden(capsys):
    code, out, _ = run(capsys, "compile", *GOLDEN_PREMISES, "--query", GOLDEN_CONCLUSION)
    assert code == 0
    assert out == "\n".join(GOLDEN_NARSESE) + "\n"


def test_compile_last_formula_is_conclusion_and_file_input(tmp_path, capsys):
    src = tmp_path / "unit.fol"
    src.write_text("# comment\n" + "\n".join(GOLDEN_PREMISES + [GOLDEN_CONCLUSION]) + "\n", encoding="utf-8")
    out_path = tmp_path / "out.nal"
    code, out, _ = run(capsys, "compile", "-f", src, "-o", out_path)
    assert code == 0 and out == ""
    assert out_path.read_text(encoding="utf-8").splitlines() == GOLDEN_NARSESE


def test_compile_single_premise(capsys):
    code, out, _ = run(capsys, "compile", "p(a)", "--query", "q(a)")
    assert out.splitlines() == ["<{a} --> p>.", "<{a} --> q>?"]


def test_compile_report(capsys):
    code, out, _ = run(capsys, "compile", "p(a)", "∀x(p(x) ∨ q(x) → r(x))", "--query", "p(a) ∨ r(a)", "--report")
    assert code == 0
    comments = [ln for ln in out.splitlines() if ln.startswith("//")]
    assert comments == [
        "// fallback_used: true",
        "// fallback_subformula: p(a)",
        "// premise 0 -> lines 0",
        "// premise 1 -> lines 1,2",
    ]


def test_compile_or_fact_exits_3(capsys):
    code, _, err = run(capsys, "compile", "p(a)", "p(a) ∨ q(a)", "--query", "p(a)")
    assert code == 3
    assert "premise 1" in err


def test_compile_parse_error_exits_2(capsys):
    code, _, err = run(capsys, "compile", "p(a) @ q(a)", "--query", "p(a)")
    assert code == 2
    assert "offset 5" in err
    code, _, _ = run(capsys, "compile")
    assert code == 2


# -- run / validate -----------------------------------------------------------


def test_run_chase(capsys):
    code, out, _ = run(capsys, "run", BUNDLED, "--mode", "chase", "--format", "json-lines")
    rows = jsonl(out)
    assert code == 0 and len(rows) == 30
    assert all(r["label"] in ("True", "False", "Uncertain") and r["frequency"] is None for r in rows)


def test_run_mock_engine(capsys, tmp_path):
    src = tmp_path / "golden.jsonl"
    src.write_text(json.dumps(GOLDEN_RECORD) + "\n", encoding="utf-8")
    code, out, _ = run(capsys, "run", src, *MOCK, "--format", "json-lines")
    assert code == 0
    assert jsonl(out) == [{"id": "golden-1", "label": "Uncertain", "frequency": None, "error": None}]


@pytest.mark.parametrize("mode", ["chase", "models"])
def test_validate_retains_28(capsys, tmp_path, mode):
    kept = tmp_path / "kept.jsonl"
    code, out, _ = run(capsys, "validate", BUNDLED, "--mode", mode, "-o", kept)
    assert code == 0
    assert out.rstrip().endswith("retained 28/30")
    assert len(kept.read_text(encoding="utf-8").splitlines()) == 28


def test_validate_with_mock_engine(capsys):
    code, out, _ = run(capsys, "validate", BUNDLED, *MOCK, "--jobs", "4", "--format", "json-lines")
    rows = jsonl(out)
    assert code == 0
    assert sum(r["retained"] for r in rows) == 28
    assert [r["id"] for r in rows] == sorted(r["id"] for r in rows)


def test_jobs_keep_order_and_values(capsys):
    _, one, _ = run(capsys, "validate", BUNDLED, "--mode", "chase", "--format", "json-lines")
    _, four, _ = run(capsys, "validate", BUNDLED, "--mode", "chase", "--format", "json-lines", "--jobs", "4")
    assert one == four


def test_table_and_json_lines_agree(capsys):
    _, tab, _ = run(capsys, "validate", BUNDLED, "--mode", "chase")
    _, js, _ = run(capsys, "validate", BUNDLED, "--mode", "chase", "--format", "json-lines")
    rows = jsonl(js)
    for t, j in zip(table(tab), rows):
        assert t["id"] == j["id"] and t["gold"] == j["gold"] and t["executed"] == j["executed"]
        assert t["retained"] == str(j["retained"])


def test_engine_missing_exits_4(capsys, monkeypatch, tmp_path):
    monkeypatch.delenv("NARS_ENGINE_PATH", raising=False)
    code, _, err = run(capsys, "validate", BUNDLED)
    assert code == 4
    code, _, _ = run(capsys, "run", BUNDLED, "--engine", tmp_path / "nope")
    assert code == 4


def test_engine_flags_conflict_with_oracle_modes(capsys):
    with pytest.raises(SystemExit) as err:
        main(["validate", str(BUNDLED), "--mode", "chase", "--cycles", "40"])
    assert err.value.code == 2
    with pytest.raises(SystemExit):
        main(["run", str(BUNDLED), "--mode", "models", "--engine", "/bin/true"])


def test_bad_thresholds_exit_2(capsys):
    code, _, _ = run(capsys, "run", BUNDLED, *MOCK, "--true-threshold", "0.01")
    assert code == 2


def test_schema_error_exits_5(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({**GOLDEN_RECORD, "steps": 4}) + "\n")
    for cmd in ("stats", "validate"):
        code, _, err = run(capsys, cmd, bad, "--mode", "chase") if cmd == "validate" else run(capsys, cmd, bad)
        assert code == 5 and "line 1" in err


# -- oracle -------------------------------------------------------------------


def test_oracle_inline(capsys):
    code, out, _ = run(capsys, "oracle", *GOLDEN_PREMISES, "--query", GOLDEN_CONCLUSION, "--format", "json-lines")
    [row] = jsonl(out)
    assert code == 0
    assert (row["models"], row["chase"], row["agreement"]) == ("Uncertain", "Uncertain", "agree")


def test_oracle_strengthening(capsys):
    _, out, _ = run(capsys, "oracle", "A(k)", "A(k) → (B(k) ∨ C(k))", "--query", "B(k)", "--format", "json-lines")
    assert jsonl(out)[0]["agreement"] == "strengthened_divergence"


def test_oracle_instances(capsys):
    code, out, _ = run(capsys, "oracle", "-i", BUNDLED, "--jobs", "3", "--format", "json-lines")
    rows = jsonl(out)
    assert code == 0 and len(rows) == 30
    assert {r["agreement"] for r in rows} == {"agree"}


# -- stats / score / export ---------------------------------------------------------


def test_stats_bundled(capsys):
    code, out, _ = run(capsys, "stats", BUNDLED, "--format", "json-lines")
    assert jsonl(out) == [
        {"split": "Train", "easy": 7, "medium": 7, "hard": 7, "total": 21},
        {"split": "Test", "easy": 3, "medium": 3, "hard": 3, "total": 9},
        {"split": "Total", "easy": 10, "medium": 10, "hard": 10, "total": 30},
    ]


def test_stats_empty(capsys, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    code, out, _ = run(capsys, "stats", empty, "--format", "json-lines")
    assert jsonl(out) == [{"split": "Total", "easy": 0, "medium": 0, "hard": 0, "total": 0}]


def six_files(tmp_path):
    gold = ["True", "True", "False", "False", "Uncertain", "Uncertain"]
    pred = ["True", "False", "False", "Uncertain", "Uncertain", "Uncertain"]
    inst = tmp_path / "six.jsonl"
    inst.write_text("".join(json.dumps({**GOLDEN_RECORD, "id": f"i{k}", "gold_label": g}) + "\n" for k, g in enumerate(gold)))
    preds = tmp_path / "pred.jsonl"
    preds.write_text("".join(json.dumps({"id": f"i{k}", "label": p}) + "\n" for k, p in enumerate(pred)))
    return inst, preds


def test_score_six(capsys, tmp_path):
    inst, preds = six_files(tmp_path)
    code, out, _ = run(capsys, "score", inst, "--predictions", preds, "--format", "json-lines")
    [report] = jsonl(out)
    assert code == 0
    assert report["overall_accuracy"] == round(4 / 6, 6)
    assert report["macro_f1"] == round(59 / 90, 6)
    assert report["confusion"] == [[1, 1, 0], [0, 1, 1], [0, 0, 2]]
    assert report["execution_success_rate"] == 1.0
    code, tab, _ = run(capsys, "score", inst, "--predictions", preds)
    assert f"macro_f1                {round(59 / 90, 6)}" in tab


def test_score_unknown_id(capsys, tmp_path):
    inst, preds = six_files(tmp_path)
    preds.write_text(preds.read_text() + json.dumps({"id": "ghost", "label": "True"}) + "\n")
    code, _, err = run(capsys, "score", inst, "--predictions", preds)
    assert code == 5 and "ghost" in err


def test_export(capsys, tmp_path):
    out = tmp_path / "cls.jsonl"
    code, _, _ = run(capsys, "export", BUNDLED, out)
    assert code == 0
    assert {json.loads(x)["label"] for x in out.read_text(encoding="utf-8").splitlines()} <= {"A", "B", "C"}


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "folnar.cli", "stats", str(BUNDLED)], capture_output=True, text=True)
    assert proc.returncode == 0 and "Total" in proc.stdout
