"""CLI subcommands, exit codes and stream discipline."""

import json

import pytest

from modelfinder import corpus_path
from modelfinder.cli import main

GOOD = """
model Tiny
class A attributes x : Integer end
constraints
context A inv pos: self.x >= 0
"""

PROPS = """
[only]
A_min = 1
A_max = 1
Integer_min = 0
Integer_max = 3
"""

TWO = PROPS + "\n[second]\nA_min = 0\nA_max = 0\n"


@pytest.fixture
def model_file(tmp_path):
    p = tmp_path / "tiny.use"
    p.write_text(GOOD)
    return p


@pytest.fixture
def props_file(tmp_path):
    p = tmp_path / "tiny.properties"
    p.write_text(PROPS)
    return p


class TestCheck:
    def test_clean_model(self, model_file, capsys):
        assert main(["check", str(model_file)]) == 0
        assert capsys.readouterr().err == ""

    def test_warning_to_stderr(self, capsys):
        assert main(["check", str(corpus_path("carrental.use"))]) == 0
        err = capsys.readouterr().err
        assert "WARNING: Collect operation `self.employee.age'" in err

    def test_broken_model(self, tmp_path, capsys):
        p = tmp_path / "bad.use"
        p.write_text("model X\nclass end")
        assert main(["check", str(p)]) == 2
        assert "bad.use:2" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["check", str(tmp_path / "nope.use")]) == 2


class TestValidate:
    def test_sat_writes_export(self, model_file, props_file, tmp_path, capsys):
        out = tmp_path / "w"
        assert main(["validate", str(model_file), str(props_file),
                     "--out", "json", "--output", str(out)]) == 0
        assert "SAT" in capsys.readouterr().out
        data = json.loads((tmp_path / "w.json").read_text())
        assert len(data["objects"]) == 1

    def test_single_config_auto_selected(self, model_file, props_file):
        assert main(["validate", str(model_file), str(props_file)]) == 0

    def test_multi_config_requires_flag(self, model_file, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        p = tmp_path / "two.properties"
        p.write_text(TWO)
        assert main(["validate", str(model_file), str(p)]) == 2
        assert "second" in capsys.readouterr().err
        assert main(["validate", str(model_file), str(p), "--config", "second"]) == 0

    def test_unsat_exit_one(self, model_file, tmp_path, capsys):
        p = tmp_path / "u.properties"
        p.write_text("[u]\nA_min = 1\nA_max = 1\nInteger_min = -3\nInteger_max = -1\n")
        assert main(["validate", str(model_file), str(p)]) == 1
        assert "UNSAT" in capsys.readouterr().out

    def test_timeout_exit_one(self, capsys):
        model = str(corpus_path("carrental.use"))
        props = str(corpus_path("carrental.properties"))
        assert main(["validate", model, props, "--config", "full", "--timeout", "0"]) == 1
        assert "TIMEOUT" in capsys.readouterr().out

    def test_bitwidth_override(self, model_file, tmp_path, capsys):
        p = tmp_path / "b.properties"
        p.write_text("[b]\nA_min = 1\nA_max = 1\nInteger_min = 5\nInteger_max = 5\n")
        # bitwidth 3 clips the domain [5,5] to nothing -> UNSAT
        assert main(["validate", str(model_file), str(p), "--bitwidth", "3"]) == 1

    def test_limit_enumerates(self, model_file, props_file, tmp_path, capsys):
        out = tmp_path / "e"
        assert main(["validate", str(model_file), str(props_file),
                     "--limit", "10", "--out", "json", "--output", str(out)]) == 0
        assert len(list(tmp_path.glob("e.*.json"))) == 4  # x in 0..3


class TestTasks:
    def test_consistency_text(self, model_file, props_file, capsys):
        assert main(["tasks", str(model_file), str(props_file),
                     "--task", "consistency"]) == 0
        assert "consistent within bounds" in capsys.readouterr().out

    def test_duplicate_not_independent(self, tmp_path, capsys):
        m = tmp_path / "d.use"
        m.write_text("model D\nclass A attributes x : Integer end\n"
                     "constraints\ncontext A inv p: self.x > 0\n"
                     "context A inv q: self.x > 0\n")
        p = tmp_path / "d.properties"
        p.write_text("[c]\nA_min = 0\nA_max = 2\nInteger_min = -3\nInteger_max = 3\n")
        assert main(["tasks", str(m), str(p), "--task", "independence:A::q"]) == 1
        assert "not independent within bounds" in capsys.readouterr().out

    def test_json_output_parses(self, model_file, props_file, capsys):
        assert main(["tasks", str(model_file), str(props_file),
                     "--task", "independence", "--json"]) in (0, 1)
        data = json.loads(capsys.readouterr().out)
        assert [r["invariant"] for r in data] == ["A::pos"]

    def test_unknown_invariant(self, model_file, props_file):
        assert main(["tasks", str(model_file), str(props_file),
                     "--task", "independence:A::ghost"]) == 2


class TestConfig:
    def test_list(self, model_file, tmp_path, capsys):
        p = tmp_path / "two.properties"
        p.write_text(TWO)
        assert main(["config", "list", str(model_file), str(p)]) == 0
        assert capsys.readouterr().out.splitlines() == ["only", "second"]

    def test_clone_rename_delete_round_trip(self, model_file, tmp_path, capsys):
        p = tmp_path / "two.properties"
        p.write_text(TWO)
        assert main(["config", "clone", str(model_file), str(p), "only"]) == 0
        assert main(["config", "rename", str(model_file), str(p), "only (copy)", "third"]) == 0
        capsys.readouterr()
        assert main(["config", "list", str(model_file), str(p)]) == 0
        assert capsys.readouterr().out.splitlines() == ["only", "second", "third"]
        assert main(["config", "delete", str(model_file), str(p), "third"]) == 0
        # file still parses and validates after the rewrite cycle
        assert main(["validate", str(model_file), str(p), "--config", "only"]) == 0

    def test_delete_unknown(self, model_file, tmp_path):
        p = tmp_path / "two.properties"
        p.write_text(TWO)
        assert main(["config", "delete", str(model_file), str(p), "ghost"]) == 2


class TestUsage:
    def test_version(self, capsys):
        assert main(["--version"]) == 0

    def test_no_args(self):
        assert main([]) == 2
