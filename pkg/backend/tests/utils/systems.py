import math
from typing import Any

import numpy as np

from app.models import BetheSystem, FloatArray, PolynomialFamily, PolynomialSpec


def make_system(**overrides: Any) -> BetheSystem:
    """Rational type-B system with alpha > 0; keyword arguments replace fields."""
    data: dict[str, Any] = {
        "stype": "B",
        "kind": "rational",
        "n": 3,
        "alpha": 1.0,
        "epsilon": 0,
        "a_params": [{"magnitude": 0.8}, {"magnitude": 1.7}],
        "b_params": [{"magnitude": 1.0}],
        "mu": [3, 2, 1],
    }
    data.update(overrides)
    return BetheSystem.model_validate(data)


def chebyshev_spec(n: int) -> PolynomialSpec:
    """Askey-Wilson with every parameter zero: p_n(cos xi) = U_n(cos xi) / 2^n."""
    return PolynomialSpec(family=PolynomialFamily.ASKEY_WILSON, n=n, params=[0, 0, 0, 0, 0])


def chebyshev_roots(n: int) -> FloatArray:
    return np.array([(n + 1 - j) * math.pi / (n + 1) for j in range(1, n + 1)])


def system_json(system: BetheSystem) -> dict[str, Any]:
    return {"system": system.model_dump(mode="json")}
