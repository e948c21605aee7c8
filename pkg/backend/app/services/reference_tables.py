"""Published root tables, with the exact parameters they were computed for.

Values are listed for j = 1..n in the solver's order (largest root first).
For the continuous Hahn table only the positive half of the symmetric zero
set is printed.
"""

from typing import Any

from app.core.errors import DomainError
from app.models import CellMismatch, PolynomialFamily, PolynomialSpec

TABLES: dict[int, dict[str, Any]] = {
    1: {
        "title": "Askey-Wilson zeros with lower and upper bounds",
        "family": PolynomialFamily.ASKEY_WILSON,
        "n": 5,
        "params": [0.3, -0.2, 0.15, 0.1, 0.1],
        "rows": {
            "root": [2.577, 2.033, 1.508, 0.997, 0.496],
            "lower": [2.000, 1.600, 1.200, 0.800, 0.400],
            "upper": [3.375, 2.700, 2.025, 1.350, 0.675],
        },
    },
    2: {
        "title": "Wilson zeros with lower bounds",
        "family": PolynomialFamily.WILSON,
        "n": 5,
        "params": [1.15, 1.1, 1.0, 0.9],
        "rows": {
            "root": [4.477, 3.099, 2.090, 1.292, 0.632],
            "lower": [1.321, 1.057, 0.793, 0.528, 0.264],
        },
    },
    3: {
        "title": "Positive continuous Hahn zeros with lower bounds",
        "family": PolynomialFamily.CONTINUOUS_HAHN,
        "n": 10,
        "params": [1.1, 0.9],
        "rows": {
            "root": [3.770, 2.481, 1.554, 0.838, 0.261],
            "lower": [1.176, 0.915, 0.653, 0.392, 0.131],
        },
    },
}


def get_table(which: int) -> dict[str, Any]:
    table = TABLES.get(which)
    if table is None:
        raise DomainError(f"no reference table {which}; choose one of {sorted(TABLES)}")
    return table


def get_table_spec(which: int) -> PolynomialSpec:
    table = get_table(which)
    return PolynomialSpec(family=table["family"], n=table["n"], params=table["params"])


def compare_rows(
    expected: dict[str, list[float]], actual: dict[str, list[float | None]], tolerance: float
) -> list[CellMismatch]:
    mismatches = []
    for row, values in expected.items():
        computed = actual.get(row, [])
        for j, value in enumerate(values, start=1):
            got = computed[j - 1] if j <= len(computed) else None
            got = float("nan") if got is None else got
            if not abs(got - value) <= tolerance:
                mismatches.append(CellMismatch(row=row, j=j, expected=value, actual=got))
    return mismatches
