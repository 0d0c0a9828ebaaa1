import csv

import numpy as np
import pytest
import yaml

from canodual.bundled import load_example
from canodual.cli import EXIT_FAIL, EXIT_MISMATCH, EXIT_OK, export_contour, main
from canodual.errors import DimensionError
from canodual.problem import QuarticProblem, serialize_problem


def test_solve_verify_example1(capsys):
    assert main(["solve", "examples/example1.problem", "--verify"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "5 dual critical point(s)" in out
    for v in ("-14.0421", "-4.3050", "0.5971"):
        assert v.rstrip("0") in out
    assert "mismatches 0" in out


def test_solve_example4_degenerate(capsys):
    assert main(["solve", "example4"]) == EXIT_OK
    assert "degenerate" in capsys.readouterr().out


def test_solve_example4_perturbed(tmp_path, capsys):
    out = tmp_path / "r.yaml"
    assert main(["solve", "example4", "--perturb", "0.001,0.005", "--report", str(out)]) == EXIT_OK
    doc = yaml.safe_load(out.read_text())
    assert not doc["degenerate"]
    g = doc["pairs"][0]
    assert g["kind"] == "GlobalMin"
    np.testing.assert_allclose(g["x"], [0.0, 1.0], atol=5e-3)
    assert doc["perturbation"]["f_pert"] == [0.001, 0.005]


def test_bare_perturb_flag_uses_seeded_default(capsys):
    assert main(["solve", "example4", "--perturb", "--seed", "3", "--report", "-"]) == EXIT_OK
    doc = yaml.safe_load(capsys.readouterr().out.split("# canodual report", 1)[1])
    assert max(abs(v) for v in doc["perturbation"]["f_pert"]) == pytest.approx(1e-3)


def test_report_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.yaml", tmp_path / "b.yaml"
    for path in (a, b):
        assert main(["solve", "example2", "--seed", "7", "--report", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_flags_reach_config(tmp_path):
    out = tmp_path / "r.yaml"
    main(["solve", "example3", "--seed", "5", "--tol", "1e-8", "--starts", "40", "--box", "7",
          "--report", str(out)])
    cfg = yaml.safe_load(out.read_text())["config"]
    assert (cfg["rng_seed"], cfg["definiteness_tol"], cfg["multistart_count"], cfg["sample_box_halfwidth"]) \
        == (5, 1e-8, 40, 7.0)


def test_failure_exit_codes(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "missing.problem")]) == EXIT_FAIL
    bad = tmp_path / "bad.problem"
    bad.write_text("n: 2\nm: 1\nA: [1, 2]\n")
    assert main(["solve", str(bad)]) == EXIT_FAIL
    assert main(["solve", "example4", "--perturb", "1,2,3"]) == EXIT_FAIL
    assert main(["solve", "example4", "--perturb", "0,0"]) == EXIT_FAIL
    assert "error:" in capsys.readouterr().err


def test_mismatch_exit_code(monkeypatch, capsys):
    import canodual.cli as cli

    def fake(report, p, cfg=None):
        return {"oracle_minimizers": 0, "grid_best": None, "mismatches": [{"check": "a", "detail": "x"}],
                "passed": False}

    monkeypatch.setattr(cli, "cross_validate", fake)
    assert main(["solve", "example1", "--verify"]) == EXIT_MISMATCH


def test_problem_file_path(tmp_path):
    path = tmp_path / "p.problem"
    path.write_text(serialize_problem(load_example(3)))
    assert main(["solve", str(path)]) == EXIT_OK


def _rows(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_contour_example1(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["contour", "example1", "--out", str(out), "--grid", "101"]) == EXIT_OK
    header, data = _rows(out)
    assert header == ["x1", "x2", "value"] and data.shape == (10201, 3)
    assert data[:, 2].min() == pytest.approx(-14.0421, abs=1e-2)
    assert data[:, 0].min() == -4.0 and data[:, 1].max() == 4.0


def test_contour_from_solve(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["solve", "example2", "--contour", str(out), "--grid", "5", "--xmin", "-1", "--xmax", "1"]) \
        == EXIT_OK
    _, data = _rows(out)
    assert data.shape == (25, 3) and data[:, 0].max() == 1.0


def test_contour_single_row(tmp_path, ex1):
    assert export_contour(ex1, tmp_path / "one.csv", grid=1) == 1
    _, data = _rows(tmp_path / "one.csv")
    assert data.shape == (1, 3)


def test_contour_needs_two_dimensions(tmp_path, ex3):
    with pytest.raises(DimensionError):
        export_contour(ex3, tmp_path / "x.csv")
    assert main(["contour", "example3", "--out", str(tmp_path / "x.csv")]) == EXIT_FAIL


def test_contour_values_match_objective(tmp_path):
    p = QuarticProblem(A=np.eye(2), B=np.zeros((1, 2, 2)), d=np.zeros(1), f=np.zeros(2))
    export_contour(p, tmp_path / "q.csv", grid=3, xlim=(-1, 1), ylim=(-1, 1))
    _, data = _rows(tmp_path / "q.csv")
    np.testing.assert_allclose(data[:, 2], 0.5 * (data[:, 0] ** 2 + data[:, 1] ** 2))


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
