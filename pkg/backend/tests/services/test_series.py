import math
from collections.abc import Callable

import numpy as np
import pytest

from app.core.config import settings
from app.core.errors import NumericInstabilityError
from app.models import PolynomialFamily, PolynomialSpec
from app.services.polyzeros import eval_poly, logger
from app.services.series import askey_wilson_by_recurrence, real_value
from tests.utils.systems import chebyshev_spec


def test_chebyshev_values() -> None:
    spec = chebyshev_spec(5)
    assert eval_poly(spec, math.pi / 6) == pytest.approx(0.0, abs=1e-14)
    for xi in (0.3, 1.1, 2.6):
        expected = math.sin(6 * xi) / math.sin(xi) / 2**5
        assert eval_poly(spec, xi) == pytest.approx(expected, rel=1e-12)


def test_series_agrees_with_recurrence(askey_wilson_spec: PolynomialSpec) -> None:
    q = askey_wilson_spec.params[4].real
    for xi in np.linspace(0.05, 3.1, 13):
        by_series = eval_poly(askey_wilson_spec, float(xi))
        by_recurrence = askey_wilson_by_recurrence(askey_wilson_spec.coupling, q, 5, float(xi))
        assert by_series == pytest.approx(by_recurrence.real, rel=1e-9, abs=1e-12)
        assert abs(by_recurrence.imag) <= 1e-14


def test_small_parameters_are_continuous() -> None:
    tiny = PolynomialSpec(family=PolynomialFamily.ASKEY_WILSON, n=4, params=[1e-6, 0, 0, 0, 0.5])
    zero = PolynomialSpec(family=PolynomialFamily.ASKEY_WILSON, n=4, params=[0, 0, 0, 0, 0.5])
    for xi in (0.4, 1.0, 2.2):
        assert eval_poly(tiny, xi) == pytest.approx(eval_poly(zero, xi), rel=1e-5, abs=1e-6)


@pytest.mark.parametrize(
    ("family", "params", "variable"),
    [
        (PolynomialFamily.WILSON, [1.15, 1.1, 1.0, 0.9], lambda x: x * x),
        (PolynomialFamily.CONTINUOUS_HAHN, [1.1, 0.9], lambda x: x),
        (PolynomialFamily.ASKEY_WILSON, [0.3, -0.2, 0.15, 0.1, 0.1], math.cos),
    ],
)
def test_degree_one_is_monic(
    family: PolynomialFamily, params: list[float], variable: Callable[[float], float]
) -> None:
    spec = PolynomialSpec(family=family, n=1, params=params)
    x1, x2 = 0.4, 1.3
    slope = (eval_poly(spec, x2) - eval_poly(spec, x1)) / (variable(x2) - variable(x1))
    assert slope == pytest.approx(1.0, rel=1e-10)


def test_symmetry_in_xi(wilson_spec: PolynomialSpec, hahn_spec: PolynomialSpec) -> None:
    odd_hahn = PolynomialSpec(family=hahn_spec.family, n=7, params=hahn_spec.params)
    for xi in (0.3, 1.7, 3.2):
        assert eval_poly(wilson_spec, -xi) == pytest.approx(eval_poly(wilson_spec, xi), rel=1e-10)
        assert eval_poly(hahn_spec, -xi) == pytest.approx(eval_poly(hahn_spec, xi), rel=1e-10)
        assert eval_poly(odd_hahn, -xi) == pytest.approx(-eval_poly(odd_hahn, xi), rel=1e-10)


def test_complex_pair_gives_real_values() -> None:
    spec = PolynomialSpec(
        family=PolynomialFamily.WILSON, n=4, params=["1.2+0.7i", "1.2-0.7i", 0.8, 1.5]
    )
    assert math.isfinite(eval_poly(spec, 0.9))


def test_precision_ceiling(monkeypatch: pytest.MonkeyPatch, wilson_spec: PolynomialSpec) -> None:
    monkeypatch.setattr(settings, "SERIES_MAX_DPS", 16)
    with pytest.raises(NumericInstabilityError):
        eval_poly(wilson_spec, 1.0)


def test_askey_wilson_falls_back_to_recurrence(
    monkeypatch: pytest.MonkeyPatch, askey_wilson_spec: PolynomialSpec
) -> None:
    expected = eval_poly(askey_wilson_spec, 0.8)
    monkeypatch.setattr(settings, "SERIES_MAX_DPS", 16)
    with monkeypatch.context() as m:
        calls: list[str] = []
        m.setattr(logger, "warning", calls.append)
        assert eval_poly(askey_wilson_spec, 0.8) == pytest.approx(expected, rel=1e-9)
    assert calls


def test_imaginary_residue_is_rejected() -> None:
    assert real_value(complex(2.0, 1e-13), 0.0) == 2.0
    with pytest.raises(NumericInstabilityError):
        real_value(complex(2.0, 1e-3), 0.0)
