import importlib.util
import json
import sys

from conftest import ROOT


def load(name):
    spec = importlib.util.spec_from_file_location(name, ROOT / "scripts" / f"{name}.py")
    module = importlib.util.module_from_spec(spec)
    sys.modules[name] = module
    spec.loader.exec_module(module)
    return module


def test_bookstore_case(tmp_path, capsys):
    mod = load("run_bookstore_case")
    answers = mod.run(mod.CaseConfig(out=tmp_path))
    assert answers["Q1.1 editions of the book"] == 2
    assert answers["Q2.1 price over time"]["2007-06-01"] == "£50"
    assert json.loads((tmp_path / "quality_op.json").read_text())["objectivity"]["traced"] is True
    assert "7/7 answerable" in capsys.readouterr().out


def test_extensibility_drill(tmp_path):
    mod = load("extensibility_drill")
    out = tmp_path / "drill.json"
    summary = mod.run(mod.DrillConfig(out=out))
    assert summary["op"]["non_invasive"] and not summary["orm"]["non_invasive"]
    assert json.loads(out.read_text()) == summary
