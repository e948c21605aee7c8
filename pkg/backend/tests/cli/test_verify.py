import json

import pytest

from app.main import run
from app.models import PolynomialSpec, RunReport
from app.services import verification


def test_zero_cases_warn(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["verify", "--cases", "0"]) == 0
    out = capsys.readouterr().out
    assert "verify: seed=0 cases=0 passed=0/0" in out
    assert "warning: no cases requested" in out


def test_verify_json_is_reproducible(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["verify", "--seed", "3", "--cases", "2", "--format", "json"]) == 0
    first = capsys.readouterr().out
    assert run(["verify", "--seed", "3", "--cases", "2", "--threads", "1", "--format", "json"]) == 0
    assert capsys.readouterr().out == first
    report = RunReport.model_validate_json(first)
    assert report.inputs == {"seed": 3, "cases": 2}
    assert report.verification is not None and report.verification.passed


def test_failure_exits_4_with_counterexample(
    monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    real_oracle = verification.zeros_via_oracle
    monkeypatch.setattr(
        verification, "zeros_via_oracle", lambda spec: real_oracle(spec) + 1.0
    )
    assert run(["verify", "--cases", "1"]) == 4
    err = capsys.readouterr().err
    assert "verification case 0" in err
    counterexample = json.loads(err.split("reproduce with: ", 1)[1])
    PolynomialSpec.model_validate(counterexample["polynomial"])
