import csv
import io
import json

import pytest

from ansfd.cli import create_router, main
from ansfd.router import EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, exit_code_for
from ansfd.errors import BracketError, DivergenceError, OrderStudyError, UnknownProblemError


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_solve_euler_csv(capsys):
    code = main(["solve", "--problem", "dahlquist:-1", "--scheme", "explicit_euler", "--h", "0.1"])
    out, err = capsys.readouterr()
    assert code == EXIT_OK
    rows = _rows(out)
    assert rows[0] == ["t", "y", "y_ref", "abs_err"]
    values = [float(v) for row in rows[1:4] for v in row[:2]]
    assert values == pytest.approx([0.0, 1.0, 0.1, 0.9, 0.2, 0.81], rel=1e-15)
    assert len(rows) == 12
    assert "problem=dahlquist:-1" in err


def test_solve_without_reference_has_two_columns(capsys):
    assert main(["solve", "--problem", "noisy_dahlquist:-1", "--seed", "3"]) == EXIT_OK
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["t", "y"]


def test_solve_json(capsys):
    assert main(["solve", "--h", "0.5", "--format", "json"]) == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["report"] == "trajectory"
    assert body["meta"]["scheme"] == "explicit_euler"
    assert [r["y"] for r in body["rows"]] == pytest.approx([1.0, 0.5, 0.25])


def test_seeded_runs_are_byte_identical(tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["solve", "--problem", "dahlquist:-1", "--scheme", "rk_ansfd:eta=3,seed=7", "--h", "0.05"]
    assert main([*args, "--output", str(first)]) == EXIT_OK
    assert main([*args, "--output", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert first.read_bytes().startswith(b"t,y,y_ref,abs_err\n")
    assert b"\r" not in first.read_bytes()


def test_env_seed_feeds_random_deltas(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ANSFD_SEED", "7")
    from_env = tmp_path / "env.csv"
    explicit = tmp_path / "explicit.csv"
    assert main(["solve", "--scheme", "rk_ansfd:eta=3,delta=random", "-o", str(from_env)]) == EXIT_OK
    monkeypatch.delenv("ANSFD_SEED")
    assert main(["solve", "--scheme", "rk_ansfd:eta=3,seed=7", "-o", str(explicit)]) == EXIT_OK
    assert from_env.read_bytes() == explicit.read_bytes()


def test_unknown_problem_exits_2(capsys):
    code = main(["solve", "--problem", "nosuch", "--scheme", "explicit_euler", "--h", "0.1"])
    err = capsys.readouterr().err
    assert code == EXIT_CONFIG
    assert "dahlquist" in err


def test_bad_scheme_exits_2(capsys):
    assert main(["solve", "--scheme", "rk_ansfd:eta=two"]) == EXIT_CONFIG
    assert "eta" in capsys.readouterr().err


def test_divergence_exits_3(capsys):
    code = main(["solve", "--problem", "dahlquist:-1000", "--h", "0.5", "--t-final", "10"])
    err = capsys.readouterr().err
    assert code == EXIT_DIVERGED
    assert "step 5" in err


def test_config_file_with_flag_override(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"problem": "dahlquist:-2", "scheme": "rk4_classic", "h": 0.1}))
    assert main(["solve", "--config", str(path), "--h", "0.25"]) == EXIT_OK
    out, err = capsys.readouterr()
    assert len(_rows(out)) == 6
    assert "scheme=rk4_classic" in err


def test_sweep_rows_sorted(capsys):
    code = main(["sweep", "--scheme", "euler_ansfd:eta=1", "--grid", "h=0.1,0.05:eta=2,1"])
    rows = _rows(capsys.readouterr().out)
    assert code == EXIT_OK
    assert rows[0] == ["scheme", "eta", "h", "status", "final_value", "final_error", "linf", "l2"]
    keys = [(int(r[1]), float(r[2])) for r in rows[1:]]
    assert keys == [(1, 0.05), (1, 0.1), (2, 0.05), (2, 0.1)]
    assert all(r[3] == "ok" for r in rows[1:])


def test_sweep_records_divergence(capsys):
    code = main(["sweep", "--problem", "dahlquist:-1000", "--scheme", "explicit_euler", "--grid", "h=0.1,0.0005"])
    rows = _rows(capsys.readouterr().out)
    assert code == EXIT_OK
    assert [r[3] for r in rows[1:]] == ["ok", "diverged"]
    assert rows[2][4:] == ["nan", "nan", "nan", "nan"]


def test_sweep_rejects_fractional_eta(capsys):
    assert main(["sweep", "--scheme", "euler_ansfd", "--grid", "h=0.1:eta=1.5"]) == EXIT_CONFIG


def test_order_csv(capsys):
    assert main(["order", "--scheme", "explicit_euler", "--h-list", "0.1,0.05,0.025"]) == EXIT_OK
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["h", "final_error", "pairwise_order"]
    assert rows[1][2] == ""
    assert 0.9 <= float(rows[2][2]) <= 1.1


def test_stability_csv(capsys):
    assert main(["stability", "--scheme", "explicit_euler", "--lambda", "-1", "--bracket", "1e-4:4"]) == EXIT_OK
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["scheme", "eta", "lambda", "h_max"]
    assert rows[1][1] == ""
    assert float(rows[1][3]) == pytest.approx(2.0, abs=1e-3)


def test_stability_eta_list(capsys):
    assert main(["stability", "--scheme", "euler_ansfd", "--eta-list", "1,2"]) == EXIT_OK
    rows = _rows(capsys.readouterr().out)
    assert [r[1] for r in rows[1:]] == ["1", "2"]


def test_stability_bad_bracket_exits_2(capsys):
    assert main(["stability", "--bracket", "3:4"]) == EXIT_CONFIG


def test_coeffs_csv(capsys):
    assert main(["coeffs", "--eta", "5"]) == EXIT_OK
    out, err = capsys.readouterr()
    rows = _rows(out)
    assert rows[0] == ["j", "weight"]
    assert [float(r[1]) for r in rows[1:]] == [5.0, 6.0, 2.0, -2.0, -6.0, -5.0]
    assert "eta=5" in err


def test_coeffs_json(capsys):
    assert main(["coeffs", "--eta", "3", "--h", "0.5", "--gain", "unit", "--format", "json"]) == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["meta"]["gain"] == 1.0
    assert body["meta"]["signs"] == [2, 0, 2]
    assert [r["weight"] for r in body["rows"]] == [1.5, 1.0, -1.0, -1.5]


def test_noise_csv(capsys):
    assert main(["noise", "--eta-list", "8", "--trials", "2000", "--seed", "1"]) == EXIT_OK
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["eta", "algebraic_std", "two_point_std", "analytic_std"]
    assert float(rows[1][1]) < float(rows[1][2])


def test_gains_csv(capsys):
    assert main(["gains", "--eta-list", "1,3"]) == EXIT_OK
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["eta", "gain", "positive", "zero", "negative"]
    assert float(rows[2][1]) == pytest.approx(9 / 11)


def test_router_lists_commands():
    names = {c["name"] for c in create_router().list_commands()}
    assert names == {"solve", "sweep", "order", "stability", "coeffs", "noise", "gains"}


def test_unknown_command_exits_2(capsys):
    assert create_router().dispatch("plot", {}) == EXIT_CONFIG
    assert "plot" in capsys.readouterr().err


def test_exit_codes():
    assert exit_code_for(DivergenceError(4, 1e13)) == EXIT_DIVERGED
    assert exit_code_for(OrderStudyError(0.1, DivergenceError(4, 1e13))) == EXIT_DIVERGED
    assert exit_code_for(BracketError("bad")) == EXIT_CONFIG
    assert exit_code_for(UnknownProblemError("x", ["dahlquist:-1"])) == EXIT_CONFIG


@pytest.mark.parametrize("command", ["coeffs", "gains", "solve"])
def test_unknown_format_from_config_exits_2(tmp_path, capsys, command):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"format": "xml"}))
    assert main([command, "--config", str(path)]) == EXIT_CONFIG
    out, err = capsys.readouterr()
    assert out == ""
    assert "format" in err


def test_coeffs_metadata_goes_to_stderr_with_output_file(tmp_path, capsys):
    path = tmp_path / "w.csv"
    assert main(["coeffs", "--eta", "5", "--h", "1", "-o", str(path)]) == EXIT_OK
    err = capsys.readouterr().err
    assert path.read_text().splitlines()[0] == "j,weight"
    assert "eta=5" in err
    assert "gain=0.925925925" in err
    assert "scale=" in err


def test_solve_accepts_seed_with_grid_deltas(capsys):
    scheme = "rk_ansfd:eta=5,delta=grid:0:auto,seed=42"
    assert main(["solve", "--problem", "dahlquist:-1", "--scheme", scheme, "--h", "0.1"]) == EXIT_OK
    out, err = capsys.readouterr()
    assert len(_rows(out)) == 12
    assert "delta=grid" in err
