import pytest

from app.models import FloatArray, PolynomialSpec
from app.services.polyzeros import zeros_via_bethe
from app.services.reference_tables import get_table_spec


@pytest.fixture(scope="session")
def askey_wilson_spec() -> PolynomialSpec:
    return get_table_spec(1)


@pytest.fixture(scope="session")
def wilson_spec() -> PolynomialSpec:
    return get_table_spec(2)


@pytest.fixture(scope="session")
def hahn_spec() -> PolynomialSpec:
    return get_table_spec(3)


@pytest.fixture(scope="session")
def askey_wilson_roots(askey_wilson_spec: PolynomialSpec) -> FloatArray:
    return zeros_via_bethe(askey_wilson_spec)


@pytest.fixture(scope="session")
def wilson_roots(wilson_spec: PolynomialSpec) -> FloatArray:
    return zeros_via_bethe(wilson_spec)


@pytest.fixture(scope="session")
def hahn_roots(hahn_spec: PolynomialSpec) -> FloatArray:
    return zeros_via_bethe(hahn_spec)
