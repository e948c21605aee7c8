from unittest.mock import patch

import numpy as np
import pytest

from app.models import BetheSystem, PolynomialFamily, PolynomialSpec, SystemType
from app.services import verification
from app.services.verification import (
    random_polynomial_spec,
    random_system,
    run_case,
    verify,
)


def test_zero_cases_pass_with_warning() -> None:
    with patch.object(verification.logger, "warning") as mock_warning:
        report = verify(seed=1, cases=0)
    assert report.passed
    assert report.cases == 0
    assert report.results == []
    assert report.warning
    mock_warning.assert_called_once()


def test_small_sweep_passes() -> None:
    report = verify(seed=42, cases=3, threads=2)
    assert report.passed, [r.failure for r in report.results]
    assert [r.index for r in report.results] == [0, 1, 2]
    assert report.counterexample is None
    for result in report.results:
        assert result.max_discrepancy is not None
        assert result.max_discrepancy <= verification.ORACLE_TOL
        assert result.hessian_error is not None


def test_case_is_independent_of_thread_count() -> None:
    single = verify(seed=42, cases=3, threads=1)
    pooled = verify(seed=42, cases=3, threads=4)
    assert single.passed, [r.failure for r in single.results]
    assert single.model_dump() == pooled.model_dump()


def test_run_case_is_deterministic() -> None:
    first, _ = run_case(seed=9, index=2)
    second, _ = run_case(seed=9, index=2)
    assert first == second


def test_random_inputs_cycle_families_and_types() -> None:
    families = [
        random_polynomial_spec(np.random.default_rng([0, i]), i).family for i in range(3)
    ]
    assert families == [
        PolynomialFamily.WILSON,
        PolynomialFamily.ASKEY_WILSON,
        PolynomialFamily.CONTINUOUS_HAHN,
    ]
    types = [random_system(np.random.default_rng([0, i]), i).stype for i in range(2)]
    assert types == [SystemType.A, SystemType.B]


@pytest.mark.parametrize("index", [3, 4, 5])
def test_second_cycle_uses_conjugate_pairs(index: int) -> None:
    spec = random_polynomial_spec(np.random.default_rng([11, index]), index)
    assert spec.params[0].imag > 0
    assert spec.params[1] == spec.params[0].conjugate()


def test_random_systems_are_valid() -> None:
    for i in range(12):
        system = random_system(np.random.default_rng([3, i]), i)
        assert system.alpha > 0
        assert all(a > b for a, b in zip(system.mu, system.mu[1:], strict=False))


def test_oracle_disagreement_yields_polynomial_counterexample(
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    real_oracle = verification.zeros_via_oracle
    monkeypatch.setattr(
        verification, "zeros_via_oracle", lambda spec: real_oracle(spec) + 1.0
    )
    result, counterexample = run_case(seed=0, index=0)
    assert not result.passed
    assert result.failure == "oracle and Bethe zeros disagree"
    assert counterexample is not None
    spec = PolynomialSpec.model_validate(counterexample["polynomial"])
    assert spec == random_polynomial_spec(np.random.default_rng([0, 0]), 0)


def test_system_failure_yields_system_counterexample(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(verification, "MORSE_TOL", -1.0)
    report = verify(seed=0, cases=1, threads=1)
    assert not report.passed
    assert report.counterexample is not None
    system = BetheSystem.model_validate(report.counterexample["system"])
    assert system.alpha > 0
    assert "Morse" in (report.results[0].failure or "")
