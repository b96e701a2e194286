#!/usr/bin/env python3
import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import csv
import json
import math

import pytest

from app.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from app.commands import create_registry
from ofke.density_io import save_density_file
from ofke.grid import make_uniform_grid
from ofke.reports import render, round_sig
from ofke.systems import box_fermions_1d


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bounds_hydrogen_json(capsys):
    code, out, _ = _run(capsys, "bounds", "--system", "hydrogen", "--Z", "1")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["header"]["command"] == "bounds"
    assert report["header"]["units"] == "hartree"
    result = report["results"][0]
    assert result["system"] == "hydrogen"
    assert result["chain_ok"] == [True, True, True]
    assert result["lower_lt"] == pytest.approx(0.45870, abs=1e-4)
    assert result["upper_tfw"] == pytest.approx(0.98190, abs=1e-4)


def test_reports_are_reproducible(capsys):
    _, first, _ = _run(capsys, "bounds", "--system", "hydrogen")
    _, second, _ = _run(capsys, "bounds", "--system", "hydrogen")
    assert first == second


def test_decompose_box(capsys):
    code, out, _ = _run(capsys, "decompose", "--system", "box1d", "--L", "1", "--n2", "512")
    assert code == EXIT_OK
    result = json.loads(out)["results"][0]
    assert result["grid"] == {"n1": 512, "n2": 512}
    assert abs(result["residual"]) <= 1e-3 * result["multivariate"]
    assert result["multivariate"] == pytest.approx(5.0 * math.pi ** 2 / 2.0, rel=1e-3)


def test_decompose_needs_pair_system(capsys):
    code, _, err = _run(capsys, "decompose", "--system", "hydrogen")
    assert code == EXIT_USAGE
    assert "decompose" in err


def test_fit_q_box_family(capsys):
    code, out, _ = _run(capsys, "fit-q", "--system", "box1d", "--N", "4", "--C", str(math.pi ** 2 / 6.0))
    assert code == EXIT_OK
    report = json.loads(out)
    result = report["results"][0]
    assert 0.0 <= result["q_star"] <= 1.0
    assert [fit["name"] for fit in result["per_system"]] == [f"box1d(N={n},L=1)" for n in range(1, 5)]
    assert len(report["header"]["grids"]) == 4


def test_eval_density_file(tmp_path, capsys):
    rho = box_fermions_1d(1, 1.0, make_uniform_grid(0.0, 1.0, 2001)).density
    path = save_density_file(rho, tmp_path / "box.txt")
    code, out, _ = _run(capsys, "eval", "--density", str(path), "--format", "text")
    assert code == EXIT_OK
    assert "system: box.txt" in out
    assert "measure: line1d" in out
    assert "t_exact: \n" in out


def test_eval_builtin_with_march_young(capsys):
    code, out, _ = _run(capsys, "eval", "--system", "box1d", "--N", "2", "--c-my", "0.5")
    assert code == EXIT_OK
    result = json.loads(out)["results"][0]
    assert result["measure"] == "line1d"
    assert result["t_exact"] == pytest.approx(5.0 * math.pi ** 2 / 2.0)
    assert result["march_young"] is not None
    assert result["pathak_gadre"] is None
    assert result["combined"]["total"] == pytest.approx(
        result["combined"]["tf_term"] + result["combined"]["weizsacker_term"]
    )


def test_csv_report(capsys):
    code, out, _ = _run(capsys, "bounds", "--system", "box1d", "--N", "3", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "# tool=ofke"
    columns = next(line for line in lines if not line.startswith("#")).split(",")
    assert columns[:3] == ["system", "params.N", "params.L"]
    assert "chain_ok.2" in columns
    assert lines[-1].endswith(",")


def test_report_written_to_file(tmp_path, capsys):
    target = tmp_path / "bounds.json"
    code, out, _ = _run(capsys, "bounds", "--system", "gauss3d", "--out", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(target.read_text())["results"][0]["system"] == "gauss3d"


def test_config_file(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({
        "systems": [{"name": "harm1d", "N": 2}],
        "coefficients": {"q": 0.5},
    }))
    code, out, _ = _run(capsys, "eval", "--config", str(config))
    assert code == EXIT_OK
    result = json.loads(out)["results"][0]
    assert result["combined"]["q"] == 0.5
    assert result["params"] == {"N": 2.0, "omega": 1.0}


def test_flags_override_config_file(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({
        "systems": [{"name": "box1d", "N": 2}],
        "coefficients": {"q": 0.5},
        "format": "json",
    }))
    target = tmp_path / "report.csv"
    code, out, _ = _run(
        capsys, "eval", "--config", str(config), "--format", "csv", "--out", str(target), "--C", "1",
    )
    assert code == EXIT_OK
    assert out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "# tool=ofke"
    row = next(csv.DictReader(line for line in lines if not line.startswith("#")))
    assert float(row["combined.q"]) == 0.5
    assert float(row["combined.C"]) == 1.0

    code, out, _ = _run(capsys, "eval", "--config", str(config), "--system", "harm1d")
    assert code == EXIT_OK
    assert json.loads(out)["results"][0]["system"] == "harm1d"


def test_usage_errors_exit_with_two(tmp_path, capsys):
    assert _run(capsys, "eval", "--density", str(tmp_path / "missing.txt"))[0] == EXIT_USAGE
    assert _run(capsys, "bounds", "--density", str(tmp_path / "rho.txt"))[0] == EXIT_USAGE
    assert _run(capsys, "bounds")[0] == EXIT_USAGE
    assert _run(capsys, "eval", "--system", "hydrogen", "--q", "2")[0] == EXIT_USAGE
    assert _run(capsys, "bounds", "--system", "hydrogen", "--system", "box1d")[0] == EXIT_USAGE
    assert _run(capsys, "solve", "--system", "hydrogen")[0] == EXIT_USAGE

    bad_config = tmp_path / "bad.json"
    bad_config.write_text("{not json")
    assert _run(capsys, "eval", "--config", str(bad_config))[0] == EXIT_USAGE


def test_unknown_system_is_rejected_by_the_parser(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bounds", "--system", "helium"])
    assert exc.value.code == 2


def test_strict_solver_failure_exits_with_three(capsys):
    code, _, err = _run(capsys, "solve", "--system", "harm1d", "--max-iterations", "3", "--strict")
    assert code == EXIT_NUMERICAL
    assert "converge" in err


def test_lenient_solver_failure_is_reported(capsys):
    code, out, _ = _run(capsys, "solve", "--system", "harm1d", "--max-iterations", "3")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["results"][0]["converged"] is False
    assert report["header"]["solver"]["max_iterations"] == 3


def test_solve_oscillator(capsys):
    code, out, _ = _run(capsys, "solve", "--system", "harm1d", "--C", "0", "--q", "1")
    assert code == EXIT_OK
    result = json.loads(out)["results"][0]
    assert result["converged"] is True
    assert result["energy"] == pytest.approx(0.5, abs=1e-3)
    assert result["n_particles"] == pytest.approx(1.0, abs=1e-10)


def test_registry_lists_every_command():
    registry = create_registry()
    for command in ("eval", "bounds", "decompose", "fit-q", "solve"):
        assert registry.has_command(command)
    assert not registry.has_command("plot")
    with pytest.raises(KeyError):
        registry.get_command("plot")


def test_render_rounds_to_twelve_digits():
    assert round_sig(1.0 / 3.0) == 0.333333333333
    text = render("json", {"tool": "ofke"}, [{"value": 2.0 / 3.0}])
    assert json.loads(text)["results"][0]["value"] == 0.666666666667
    with pytest.raises(ValueError):
        render("xml", {}, [])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
