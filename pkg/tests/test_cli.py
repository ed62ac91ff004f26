# -*- coding: utf-8 -*-
"""
Test cho CLI simpcalc: đầu ra JSON và mã thoát.
"""

import json
import os
import sys

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.presheaf.serialize import load_presheaf
from simpcalc import EXIT_ERROR, main

EMPTY = ["--objects", "0", "--categories", "0", "--diagrams", "0"]


def _gen(tmp_path, name, *argv):
    path = tmp_path / f"{name}.json"
    assert main(["gen", *argv, "--out", str(path)]) == 0
    return str(path)


def test_gen_writes_presheaf(tmp_path):
    path = _gen(tmp_path, "d1", "simplex", "1", "--dim", "2")
    assert load_presheaf(path).counts() == {(0,): 2, (1,): 3, (2,): 4}


def test_hom_count(tmp_path, capsys):
    d1 = _gen(tmp_path, "d1", "simplex", "1", "--dim", "2")
    assert main(["hom", d1, d1, "--count-only"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["count"] == 3
    assert payload["exactness"] == "exact-by-coskeletality-1"
    assert "maps" not in payload


def test_check_exit_codes(tmp_path):
    d2 = _gen(tmp_path, "d2", "simplex", "2", "--dim", "3")
    sp = _gen(tmp_path, "sp", "spine", "2", "--dim", "3")
    assert main(["check", "qcat", d2]) == 0
    out = tmp_path / "report.json"
    assert main(["check", "qcat", sp, "--out", str(out)]) == 1
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["verdict"] == "fails"
    assert report["witness"]["generator"] == "Λ[2]_1->Δ[2]"


def test_input_errors_exit_3(tmp_path):
    assert main(["gen", "horn", "2", "3"]) == EXIT_ERROR
    assert main(["hom", str(tmp_path / "missing.json"), str(tmp_path / "missing.json")]) == EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["hom", str(bad), str(bad)]) == EXIT_ERROR


def test_apply_and_verify(tmp_path):
    d1 = _gen(tmp_path, "d1", "simplex", "1", "--dim", "2")
    lifted = tmp_path / "lifted.json"
    assert main(["apply", "p1*", d1, "--bound", "1", "--out", str(lifted)]) == 0
    assert load_presheaf(lifted).count((1, 1)) == 3
    plus = _gen(tmp_path, "plus", "tau", "1+", "--dim", "2")
    assert main(["verify", "adjunction", "flat/forget", d1, plus]) == 0
    assert main(["verify", "adjunction", "no/such", d1, plus]) == EXIT_ERROR


def test_suite_command(tmp_path, capsys):
    out = tmp_path / "suite.json"
    assert main(["suite", "standard-counts", *EMPTY, "--json", str(out)]) == 0
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["verdict"] == "holds"
    assert "Kết luận: holds" in capsys.readouterr().err


def test_matching_over_point(tmp_path, capsys):
    d1 = _gen(tmp_path, "d1", "simplex", "1", "--dim", "2")
    lifted = tmp_path / "lifted.json"
    assert main(["apply", "p1*", d1, "--bound", "2", "--out", str(lifted)]) == 0
    capsys.readouterr()
    assert main(["matching", str(lifted), "--n", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 1
    # ba cạnh của Δ[1] đi vào bốn cặp đỉnh
    assert payload["injective"] is True
    assert payload["surjective"] is False
    assert main(["matching", str(lifted), "--n", "5"]) == EXIT_ERROR
