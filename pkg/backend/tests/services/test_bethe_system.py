import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from app.core.errors import DimensionError, DomainError
from app.models import BetheSystem, SystemType
from app.services.bethe_system import (
    bethe_residual,
    finite_difference_gradient,
    finite_difference_hessian,
    gradient,
    hessian,
    make_rho,
    make_rho_tilde_and_beta,
    morse_value,
    nonlinear_morse_value,
    relative_error,
)
from app.services.verification import random_system
from tests.utils.systems import make_system


def test_minimal_weights() -> None:
    assert make_rho(4) == [4, 3, 2, 1]
    assert make_rho_tilde_and_beta(4) == ([1, 0, -1, -2], 0.5)
    assert make_rho_tilde_and_beta(3) == ([1, 0, -1], 0.0)
    with pytest.raises(DomainError):
        make_rho(0)
    with pytest.raises(DomainError):
        make_rho_tilde_and_beta(-1)


def test_single_free_particle_sits_at_pi() -> None:
    system = make_system(n=1, a_params=[], b_params=[], mu=[1])
    assert gradient(system, [math.pi])[0] == pytest.approx(0.0, abs=1e-14)
    assert hessian(system, [math.pi])[0, 0] == pytest.approx(2.0)
    assert bethe_residual(system, [math.pi])[0] == pytest.approx(0.0, abs=1e-14)


def test_wrong_length_is_rejected() -> None:
    system = make_system()
    with pytest.raises(DimensionError):
        gradient(system, [1.0, 2.0])


@pytest.mark.parametrize("index", range(6))
def test_gradient_matches_morse_differences(index: int) -> None:
    system = random_system(np.random.default_rng([11, index]), index)
    x = np.linspace(2.0, -1.0, system.n) + 0.1 * index
    assert relative_error(gradient(system, x), finite_difference_gradient(system, x)) <= 1e-5


@pytest.mark.parametrize("index", range(6))
def test_hessian_matches_gradient_differences(index: int) -> None:
    system = random_system(np.random.default_rng([12, index]), index)
    x = np.linspace(3.0, 0.5, system.n)
    h = hessian(system, x)
    np.testing.assert_allclose(h, h.T, atol=1e-14)
    assert relative_error(h, finite_difference_hessian(system, x)) <= 1e-6
    assert np.all(np.linalg.eigvalsh(h) > 0)


def test_morse_value_adds_linear_term() -> None:
    system = make_system()
    x = np.array([2.5, 1.2, 0.4])
    rhs = 2 * np.pi * np.array([3, 2, 1])
    assert morse_value(system, x) == pytest.approx(nonlinear_morse_value(system, x) - rhs @ x)


@settings(max_examples=25, deadline=None)
@given(
    x=st.lists(st.floats(-4.0, 4.0), min_size=3, max_size=3),
    signs=st.tuples(*[st.sampled_from([-1.0, 1.0])] * 3),
    order=st.permutations(range(3)),
)
def test_type_b_morse_is_hyperoctahedral(
    x: list[float], signs: tuple[float, float, float], order: list[int]
) -> None:
    system = make_system()
    base = np.array(x)
    moved = np.array([signs[i] * x[k] for i, k in enumerate(order)])
    assert nonlinear_morse_value(system, moved) == pytest.approx(
        nonlinear_morse_value(system, base), rel=1e-10, abs=1e-10
    )


def test_type_a_morse_is_permutation_invariant() -> None:
    system = make_system(stype="A", epsilon=None, beta=0.25, mu=[1, 0, -1])
    x = np.array([1.3, -0.2, -2.0])
    value = nonlinear_morse_value(system, x)
    for perm in itertools.permutations(range(3)):
        assert nonlinear_morse_value(system, x[list(perm)]) == pytest.approx(value, rel=1e-12)


def test_hyperbolic_without_confinement_is_rejected() -> None:
    with pytest.raises(ValidationError, match="sufficiently close to 0"):
        make_system(kind="hyperbolic", alpha=0.0, a_params=[{"magnitude": 0.5}] * 3)


def test_rational_type_b_at_alpha_zero_needs_minimal_weights() -> None:
    params = [{"magnitude": m} for m in (1.0, 1.2, 0.8, 0.9)]
    with pytest.raises(ValidationError, match="mu=rho"):
        make_system(alpha=0.0, a_params=params, mu=[4, 2, 1])
    system = make_system(alpha=0.0, a_params=params)
    assert system.stype is SystemType.B
    assert system.is_minimal_weight()


def test_weights_must_decrease() -> None:
    with pytest.raises(ValidationError, match="strictly decreasing"):
        make_system(mu=[3, 3, 1])


def test_round_trips_through_json() -> None:
    system = make_system(kind="trigonometric", a_params=[0.3, -0.4], b_params=[0.0])
    again = BetheSystem.model_validate_json(system.model_dump_json())
    assert again == system
    assert math.isinf(again.b_params[0].magnitude)
