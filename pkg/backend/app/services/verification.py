"""Seeded property sweep over random polynomial specs and random Bethe systems.

Case ``i`` draws from ``numpy.random.default_rng([seed, i])`` so every case is
reproducible on its own, whatever the thread count.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np
from scipy import linalg

from app.core.config import settings
from app.models import (
    BetheSystem,
    CaseResult,
    CoupledParameter,
    FloatArray,
    PolynomialFamily,
    PolynomialSpec,
    PotentialKind,
    SystemType,
    VerificationReport,
)
from app.services.bethe_system import (
    finite_difference_gradient,
    finite_difference_hessian,
    gradient,
    hessian,
    relative_error,
)
from app.services.bounds import bound_box, box_violation, positive_zero_lower_bounds
from app.services.polyzeros import de_residual, family_to_bethe, zeros_via_oracle
from app.services.solver import solve

logger = logging.getLogger(__name__)

HESSIAN_TOL = 1e-6
MORSE_TOL = 1e-5
RESIDUAL_TOL = 1e-8
BOUND_TOL = 1e-12
ORACLE_TOL = 1e-8

FAMILIES = (
    PolynomialFamily.WILSON,
    PolynomialFamily.ASKEY_WILSON,
    PolynomialFamily.CONTINUOUS_HAHN,
)
KINDS = (PotentialKind.RATIONAL, PotentialKind.HYPERBOLIC, PotentialKind.TRIGONOMETRIC)


class CheckFailed(Exception):
    pass


# ---- Random inputs ----


def random_polynomial_spec(rng: np.random.Generator, index: int) -> PolynomialSpec:
    """In-domain spec; the second case of every family cycle uses a conjugate pair."""
    family = FAMILIES[index % 3]
    n = int(rng.integers(1, 13))
    with_pair = index // 3 == 1
    if family is PolynomialFamily.ASKEY_WILSON:
        params: list[complex] = [complex(v) for v in rng.uniform(-0.9, 0.9, size=4)]
        if with_pair:
            r = rng.uniform(0.05, 0.9)
            phi = rng.uniform(0.1, math.pi - 0.1)
            z = r * complex(math.cos(phi), math.sin(phi))
            params[:2] = [z, z.conjugate()]
        params.append(complex(rng.uniform(-0.9, 0.9)))
        return PolynomialSpec(family=family, n=n, params=params)

    count = 4 if family is PolynomialFamily.WILSON else 2
    params = [complex(v) for v in rng.uniform(0.1, 4.0, size=count)]
    if with_pair:
        z = complex(rng.uniform(0.1, 4.0), rng.uniform(0.1, 2.0))
        params[:2] = [z, z.conjugate()]
    return PolynomialSpec(family=family, n=n, params=params)


def _random_parameter(rng: np.random.Generator, kind: PotentialKind) -> CoupledParameter:
    if kind is PotentialKind.RATIONAL:
        return CoupledParameter(kind=kind, magnitude=rng.uniform(0.2, 3.0))
    if kind is PotentialKind.HYPERBOLIC:
        return CoupledParameter(kind=kind, magnitude=rng.uniform(0.2, 2.8))
    return CoupledParameter.from_family_value(kind, rng.uniform(-0.9, 0.9))


def random_system(rng: np.random.Generator, index: int) -> BetheSystem:
    """Random system with alpha > 0, so any kind and any weights are admissible."""
    stype = SystemType.A if index % 2 == 0 else SystemType.B
    kind = KINDS[index % 3]
    n = int(rng.integers(1, 7))
    steps = rng.integers(1, 3, size=n)
    if stype is SystemType.B:
        mu = np.cumsum(steps)[::-1].tolist()
    else:
        mu = (int(rng.integers(-2, 3)) - np.cumsum(steps) + steps[0]).tolist()
    common: dict[str, Any] = {
        "stype": stype,
        "kind": kind,
        "n": n,
        "alpha": rng.uniform(0.5, 3.0),
        "a_params": [_random_parameter(rng, kind) for _ in range(int(rng.integers(0, 4)))],
        "b_params": [_random_parameter(rng, kind) for _ in range(int(rng.integers(0, 3)))],
        "mu": [int(m) for m in mu],
    }
    if stype is SystemType.A:
        return BetheSystem(**common, beta=rng.uniform(0.0, 0.99))
    return BetheSystem(**common, epsilon=int(rng.integers(0, 2)))


# ---- Checks ----


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise CheckFailed(message)


def _check_cholesky(h: FloatArray) -> None:
    try:
        linalg.cho_factor(h)
    except np.linalg.LinAlgError as e:
        raise CheckFailed(f"Hessian is not positive definite: {e}") from e


def _scaled(x: FloatArray) -> float:
    return max(1.0, float(np.max(np.abs(x)))) if x.size else 1.0


def _check_polynomial(spec: PolynomialSpec, result: dict[str, Any]) -> None:
    system = family_to_bethe(spec)
    solution = solve(system)
    x = solution.as_array()

    result["hessian_error"] = relative_error(hessian(system, x), finite_difference_hessian(system, x))
    _require(result["hessian_error"] <= HESSIAN_TOL, "Hessian disagrees with finite differences")
    _check_cholesky(hessian(system, x))

    result["bethe_residual"] = solution.bethe_residual_max
    _require(solution.bethe_residual_max <= RESIDUAL_TOL, "Bethe product residual too large")
    result["de_residual"] = de_residual(spec, x)
    _require(result["de_residual"] <= RESIDUAL_TOL, "difference-equation residual too large")

    violation = box_violation(bound_box(system), x)
    if spec.family is PolynomialFamily.CONTINUOUS_HAHN:
        lowers = positive_zero_lower_bounds(spec)
        violation = max([violation, *(lo - r for lo, r in zip(lowers, x, strict=False))])
    result["bound_violation"] = violation
    _require(violation <= BOUND_TOL * _scaled(x), f"bound violated by {violation:.3e}")

    oracle = zeros_via_oracle(spec)
    result["max_discrepancy"] = float(np.max(np.abs(oracle - x)))
    _require(result["max_discrepancy"] <= ORACLE_TOL, "oracle and Bethe zeros disagree")


def _check_system(system: BetheSystem, result: dict[str, Any]) -> None:
    solution = solve(system)
    x = solution.as_array()
    violation = box_violation(bound_box(system), x)
    result["bound_violation"] = max(result.get("bound_violation") or 0.0, violation)
    _require(violation <= BOUND_TOL * _scaled(x), f"system bound violated by {violation:.3e}")

    # off the minimum, so the gradient is not trivially zero
    offset_x = x + 0.1 * np.linspace(1.0, -1.0, system.n)
    result["morse_error"] = relative_error(
        gradient(system, offset_x), finite_difference_gradient(system, offset_x)
    )
    _require(result["morse_error"] <= MORSE_TOL, "gradient disagrees with the Morse function")
    h = hessian(system, offset_x)
    error = relative_error(h, finite_difference_hessian(system, offset_x))
    result["hessian_error"] = max(result.get("hessian_error") or 0.0, error)
    _require(error <= HESSIAN_TOL, "system Hessian disagrees with finite differences")
    _check_cholesky(h)


def run_case(seed: int, index: int) -> tuple[CaseResult, dict[str, Any] | None]:
    """One sweep case and, if it failed, the input that reproduces the failure."""
    rng = np.random.default_rng([seed, index])
    spec = random_polynomial_spec(rng, index)
    system = random_system(rng, index)
    label = f"{spec.family.value} n={spec.n} / {system.stype.value}-{system.kind.value} n={system.n}"
    result: dict[str, Any] = {}
    counterexample: dict[str, Any] = {"polynomial": spec.model_dump(mode="json")}
    try:
        _check_polynomial(spec, result)
        counterexample = {"system": system.model_dump(mode="json")}
        _check_system(system, result)
    except Exception as e:
        logger.info(f"case {index} ({label}) failed: {e}")
        return (
            CaseResult(index=index, label=label, passed=False, failure=str(e), **result),
            counterexample,
        )
    logger.info(f"case {index} ({label}) passed")
    return CaseResult(index=index, label=label, passed=True, **result), None


def verify(seed: int, cases: int, threads: int | None = None) -> VerificationReport:
    if cases <= 0:
        logger.warning("verification ran with zero cases")
        return VerificationReport(
            seed=seed, cases=0, passed=True, warning="no cases requested; nothing was checked"
        )
    workers = min(threads or settings.BETHE_ZEROS_THREADS, cases)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(lambda i: run_case(seed, i), range(cases)))
    results = [r for r, _ in outcomes]
    failing = next((c for r, c in outcomes if not r.passed), None)
    return VerificationReport(
        seed=seed,
        cases=cases,
        passed=failing is None,
        results=results,
        counterexample=failing,
    )
