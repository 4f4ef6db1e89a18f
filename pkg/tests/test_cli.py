import json

import pytest

from conftest import make_instance
from middlemile import instances
from middlemile.cli import main


@pytest.fixture
def inst_file(tmp_path):
    path = tmp_path / "inst.json"
    assert main(["gen", "--seed", "42", "-o", str(path)]) == 0
    return path


def test_gen_is_deterministic(tmp_path, inst_file):
    other = tmp_path / "again.json"
    assert main(["gen", "--seed", "42", "-o", str(other)]) == 0
    assert other.read_bytes() == inst_file.read_bytes()


def test_gen_counts(tmp_path):
    path = tmp_path / "i.json"
    assert main(["gen", "--seed", "1", "--terminals", "5", "--non-terminals", "3", "-o", str(path)]) == 0
    inst = instances.load(path)
    assert len(inst.terminals) == 5 and len(inst.non_terminals) == 3


def test_gen_many(tmp_path):
    out = tmp_path / "set"
    assert main(["gen", "--count", "3", "--seed", "7", "-o", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["inst-0.json", "inst-1.json", "inst-2.json"]


def test_gen_chain(tmp_path):
    path = tmp_path / "chain.json"
    args = ["gen", "--chain", "--terminals", "8", "--non-terminals", "3", "--gamma", "2", "-o", str(path)]
    assert main(args) == 0
    assert len(instances.load(path).vertices) == 11


def test_gen_failure_exit_code(tmp_path):
    # obstructions far above what HTMAX can clear
    args = ["gen", "--ob-range", "60-80", "--attempts", "3", "-o", str(tmp_path / "x.json")]
    assert main(args) == 4


def test_plan_deterministic_and_valid(tmp_path, inst_file, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["plan", str(inst_file), "--trace", "-o", str(a)]) == 0
    assert main(["plan", str(inst_file), "--trace", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert list(doc)[:4] == ["format", "instance_digest", "hybrid_mode", "heights"]
    assert "trace" in doc
    assert main(["validate", str(inst_file), str(a)]) == 0
    assert "OK" in capsys.readouterr().out


def test_plan_without_hybrid(tmp_path, inst_file):
    out = tmp_path / "p.json"
    assert main(["plan", str(inst_file), "--hybrid=none", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["hybrid"] is None and "trace" not in doc


def test_validate_catches_tampering(tmp_path, inst_file, capsys):
    out = tmp_path / "p.json"
    main(["plan", str(inst_file), "-o", str(out)])
    doc = json.loads(out.read_text())
    doc["capacity"]["copies"][0][2] = 0
    out.write_text(json.dumps(doc))
    assert main(["validate", str(inst_file), str(out)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_bad_input_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [}')
    assert main(["plan", str(bad)]) == 2
    d = instances.to_dict(_tiny())
    d["edges"][0]["ob"] = -1
    bad.write_text(json.dumps(d))
    assert main(["plan", str(bad)]) == 2


def test_infeasible_exit_code(tmp_path):
    d = instances.to_dict(_tiny())
    d["edges"][0]["ob"] = 40
    path = tmp_path / "inf.json"
    path.write_text(json.dumps(d))
    assert main(["plan", str(path)]) == 3


def test_oracle_compare(tmp_path, capsys):
    out = tmp_path / "set"
    assert main(["gen", "--count", "5", "--terminals", "3-5", "-o", str(out)]) == 0
    assert main(["oracle-compare", str(out / "*.json")]) == 0
    text = capsys.readouterr().out
    assert text.count("PASS") == 5


def test_oracle_compare_skips_refusals(tmp_path, capsys):
    out = tmp_path / "set"
    main(["gen", "--count", "2", "-o", str(out)])
    assert main(["oracle-compare", "--max-space", "5", str(out / "*.json")]) == 0
    assert "2 skipped" in capsys.readouterr().out


def test_report(inst_file, capsys):
    assert main(["report", str(inst_file)]) == 0
    assert "ratio bound" in capsys.readouterr().out


def _tiny():
    return make_instance([(0, 0, 0, "L"), (1, 1000, 0, "T")], [(0, 1, 10)])
