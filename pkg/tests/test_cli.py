import json

import pytest

from btquot import __version__
from btquot.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def test_fundom_summary_and_artifacts(tmp_path, capsys):
    dot, js = tmp_path / "g.dot", tmp_path / "d.json"
    assert run("fundom", "--fixture", "fixtures/p2_N13_1.json", "--dot", dot, "--json", js) == 0
    assert "2 vertices, 3 edges" in capsys.readouterr().out
    assert dot.read_text().count(" -- ") == 3
    data = json.loads(js.read_text())
    assert data["version"] == __version__ and data["fixture_sha256"] and "precision" in data
    assert data["conjectural"] is False and data["domain"]["genus"] == 2


def test_artifacts_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("fundom", "--fixture", "p53_N2_1.json", "--json", a)
    run("fundom", "--fixture", "p53_N2_1.json", "--json", b)
    assert a.read_bytes() == b.read_bytes()


def test_order_validate(capsys):
    assert run("order", "validate", "fixtures/p53_N2_1.json") == 0
    assert "valid" in capsys.readouterr().out


def test_forms_with_hecke(tmp_path):
    out = tmp_path / "f.json"
    assert run("forms", "--fixture", "p2_N13_1.json", "--hecke", "3,5", "--json", out) == 0
    data = json.loads(out.read_text())
    assert data["dimension"] == 2 and data["eigen_status"] == "split over Q"


def test_lift_then_eval(tmp_path, capsys):
    m = tmp_path / "m.json"
    assert run("lift", "--fixture", "p2_N13_1.json", "--weight", 2, "--eigenform", 0, "--digits", 20, "--json", m) == 0
    capsys.readouterr()
    assert run("eval", "--moments", m, "--point", "3+1*w", "--digits", 20) == 0
    assert "*w" in capsys.readouterr().out


def test_missing_fixture_is_a_config_error():
    assert run("fundom", "--fixture", "does/not/exist.json") == 2


def test_bad_residuals_file(tmp_path):
    r = tmp_path / "r.toml"
    r.write_text("A = 'x'\n")
    assert run("equations", "--fixture", "p53_N2_1.json", "--residuals", r) == 2


def test_point_on_the_boundary_is_a_precision_error(tmp_path):
    m = tmp_path / "m.json"
    run("lift", "--fixture", "p2_N13_1.json", "--digits", 10, "--json", m)
    assert run("eval", "--moments", m, "--point", "3") == 3


def test_non_positive_digits_rejected():
    assert run("lift", "--fixture", "p2_N13_1.json", "--digits", 0) == 2


def test_selftest():
    assert run("selftest") == 0
