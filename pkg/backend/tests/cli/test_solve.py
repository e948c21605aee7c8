import json
import math
from pathlib import Path

import pytest

from app.core.config import settings
from app.main import run
from app.models import RunReport
from tests.utils.systems import make_system, system_json


def write_config(tmp_path: Path, document: dict[str, object]) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document))
    return str(path)


def test_solve_single_particle(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    system = make_system(n=1, a_params=[], b_params=[], mu=[1])
    config = write_config(tmp_path, system_json(system))
    assert run(["solve", config, "--format", "json"]) == 0
    report = RunReport.model_validate_json(capsys.readouterr().out)
    assert report.command == "solve"
    assert report.rows[0].root == pytest.approx(math.pi, abs=1e-12)
    assert report.within_bounds
    assert report.timings_ms is None
    assert report.grad_tol == pytest.approx(2 * math.pi * settings.SOLVER_GRAD_TOL)
    assert report.grad_norm is not None and report.grad_tol is not None
    assert report.grad_norm <= report.grad_tol


def test_solve_polynomial_config(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = write_config(
        tmp_path,
        {"polynomial": {"family": "askey-wilson", "n": 5, "params": [0.3, -0.2, 0.15, 0.1, 0.1]}},
    )
    assert run(["solve", config, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "j,root,lower,upper,oracle_root,bethe_residual,de_residual"
    assert len(lines) == 6
    first = lines[1].split(",")
    assert float(first[1]) == pytest.approx(2.577, abs=5e-4)
    assert first[4] == ""


def test_solve_fills_default_weights(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = write_config(
        tmp_path,
        {
            "system": {
                "stype": "A",
                "kind": "trigonometric",
                "n": 4,
                "alpha": 1.5,
                "a_params": [0.5],
            }
        },
    )
    assert run(["solve", config, "--format", "json"]) == 0
    report = RunReport.model_validate_json(capsys.readouterr().out)
    assert report.inputs["system"]["mu"] == [1, 0, -1, -2]
    assert report.inputs["system"]["beta"] == 0.5
    roots = [row.root for row in report.rows]
    assert roots == sorted(roots, reverse=True)


def test_solve_timings_on_request(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = write_config(tmp_path, system_json(make_system()))
    assert run(["solve", config, "--format", "json", "--timings"]) == 0
    report = RunReport.model_validate_json(capsys.readouterr().out)
    assert report.timings_ms is not None
    assert set(report.timings_ms) == {"solve", "bounds"}


def test_hyperbolic_at_alpha_zero_is_rejected(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    document = system_json(make_system())
    document["system"].update(
        {
            "kind": "hyperbolic",
            "alpha": 0.0,
            "a_params": [{"kind": "hyperbolic", "magnitude": 0.4}],
            "b_params": [],
        }
    )
    config = write_config(tmp_path, document)
    assert run(["solve", config]) == 1
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "sufficiently close to 0" in captured.err


def test_non_convergence_exits_2(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = write_config(tmp_path, system_json(make_system(n=6, mu=[6, 5, 4, 3, 2, 1])))
    assert run(["solve", config, "--max-iters", "1", "--tol", "1e-15"]) == 2
    assert "error:" in capsys.readouterr().err


def test_config_needs_exactly_one_key(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = write_config(tmp_path, {"system": {}, "polynomial": {}})
    assert run(["solve", config]) == 1
    assert "exactly one of" in capsys.readouterr().err


def test_missing_config_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["solve", str(tmp_path / "absent.json")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_usage_error_exits_1() -> None:
    with pytest.raises(SystemExit) as exc_info:
        run(["solve"])
    assert exc_info.value.code == 1
