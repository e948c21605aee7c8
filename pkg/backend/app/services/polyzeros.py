"""Zeros of the Wilson, Askey-Wilson and continuous Hahn polynomials.

Each family maps onto a Bethe system at alpha = 0 whose unique minimum is the
zero set. The polynomials themselves are evaluated by their terminating
(basic) hypergeometric series, which gives an independent bisection oracle,
and the two-term difference equation gives a residual certificate.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy import optimize
from tenacity import (
    RetryCallState,
    Retrying,
    retry_if_exception_type,
    stop_after_attempt,
)

from app.core.config import settings
from app.core.errors import NumericInstabilityError, OracleFailureError, SingularityError
from app.models import (
    BetheSolution,
    BetheSystem,
    CoupledParameter,
    FloatArray,
    PolynomialFamily,
    PolynomialSpec,
    PotentialKind,
    SolverConfig,
    SystemType,
)
from app.services.bethe_system import make_rho, make_rho_tilde_and_beta
from app.services.bounds import family_k_pm
from app.services.series import (
    SeriesData,
    TerminatingSeries,
    askey_wilson_by_recurrence,
    real_value,
)
from app.services.solver import solve

logger = logging.getLogger(__name__)

# below these the Askey-Wilson 4phi3 prefactor is replaced by the recurrence
AW_SMALL_Q = 1e-6
AW_SMALL_PARAMS = 1e-8
# grid points used to size the working precision of a scan
SCAN_SAMPLES = 5
# extra digits over the sampled maximum, for grid points between samples
SCAN_DPS_MARGIN = 5


# ---- Family to Bethe system ----


def _representatives(values: Sequence[complex]) -> list[complex]:
    # one member per conjugate pair; the pair parameter carries both
    return [v for v in values if v.imag >= 0]


def family_to_bethe(spec: PolynomialSpec) -> BetheSystem:
    n = spec.n
    if spec.family is PolynomialFamily.ASKEY_WILSON:
        kind = PotentialKind.TRIGONOMETRIC
        return BetheSystem(
            stype=SystemType.B,
            kind=kind,
            n=n,
            alpha=0.0,
            epsilon=0,
            a_params=[
                CoupledParameter.from_family_value(kind, v)
                for v in _representatives(spec.coupling)
            ],
            b_params=[CoupledParameter.from_family_value(kind, spec.params[4])],
            mu=make_rho(n),
        )

    kind = PotentialKind.RATIONAL
    a_params = [
        CoupledParameter.from_family_value(kind, v) for v in _representatives(spec.coupling)
    ]
    b_params = [CoupledParameter(kind=kind, magnitude=1.0)]
    if spec.family is PolynomialFamily.WILSON:
        return BetheSystem(
            stype=SystemType.B,
            kind=kind,
            n=n,
            alpha=0.0,
            epsilon=0,
            a_params=a_params,
            b_params=b_params,
            mu=make_rho(n),
        )
    rho_tilde, beta = make_rho_tilde_and_beta(n)
    return BetheSystem(
        stype=SystemType.A,
        kind=kind,
        n=n,
        alpha=0.0,
        beta=beta,
        a_params=a_params,
        b_params=b_params,
        mu=rho_tilde,
    )


# ---- Series evaluation ----


def _series_key(spec: PolynomialSpec) -> tuple[Any, ...]:
    return (spec.family, spec.n, tuple(spec.params))


def _wilson_series(spec: PolynomialSpec, xi: float) -> TerminatingSeries:
    n = spec.n

    def build(ctx: Any) -> SeriesData:
        a, b, c, d = (ctx.convert(p) for p in spec.params)
        s = a + b + c + d
        prefactor = (
            (-1) ** n
            * ctx.rf(a + b, n)
            * ctx.rf(a + c, n)
            * ctx.rf(a + d, n)
            / ctx.rf(n + s - 1, n)
        )
        return SeriesData(
            fixed_upper=[-n, n + s - 1],
            lower=[a + b, a + c, a + d],
            z=1,
            base=None,
            prefactor=prefactor,
        )

    def variable(ctx: Any) -> list[Any]:
        a = ctx.convert(spec.params[0])
        ix = ctx.mpc(0, xi)
        return [a + ix, a - ix]

    return TerminatingSeries(key=_series_key(spec), n=n, build=build, variable=variable)


def _continuous_hahn_series(spec: PolynomialSpec, xi: float) -> TerminatingSeries:
    n = spec.n

    def build(ctx: Any) -> SeriesData:
        a, b = (ctx.convert(p) for p in spec.params)
        top = n + 2 * a + 2 * b - 1
        prefactor = ctx.mpc(0, 1) ** n * ctx.rf(2 * a, n) * ctx.rf(a + b, n) / ctx.rf(top, n)
        return SeriesData(
            fixed_upper=[-n, top],
            lower=[2 * a, a + b],
            z=1,
            base=None,
            prefactor=prefactor,
        )

    def variable(ctx: Any) -> list[Any]:
        return [ctx.convert(spec.params[0]) + ctx.mpc(0, xi)]

    return TerminatingSeries(key=_series_key(spec), n=n, build=build, variable=variable)


def _askey_wilson_slots(spec: PolynomialSpec) -> list[complex]:
    # the monic polynomial is symmetric in a..d; put the largest one in the 1/(2a)^n slot
    values = list(spec.coupling)
    lead = max(range(4), key=lambda k: abs(values[k]))
    return [values[lead], *values[:lead], *values[lead + 1 :]]


def _askey_wilson_series(spec: PolynomialSpec, xi: float) -> TerminatingSeries:
    n = spec.n
    slots = _askey_wilson_slots(spec)

    def build(ctx: Any) -> SeriesData:
        a, b, c, d = (ctx.convert(p) for p in slots)
        q = ctx.convert(spec.params[4].real)
        top = a * b * c * d * q ** (n - 1)
        prefactor = (
            ctx.qp(a * b, q, n)
            * ctx.qp(a * c, q, n)
            * ctx.qp(a * d, q, n)
            / ((2 * a) ** n * ctx.qp(top, q, n))
        )
        return SeriesData(
            fixed_upper=[q ** (-n), top],
            lower=[a * b, a * c, a * d],
            z=q,
            base=q,
            prefactor=prefactor,
        )

    def variable(ctx: Any) -> list[Any]:
        a = ctx.convert(slots[0])
        z = ctx.expj(xi)
        return [a * z, a / z]

    return TerminatingSeries(key=_series_key(spec), n=n, build=build, variable=variable)


def _series(spec: PolynomialSpec, xi: float) -> TerminatingSeries:
    if spec.family is PolynomialFamily.WILSON:
        return _wilson_series(spec, xi)
    if spec.family is PolynomialFamily.CONTINUOUS_HAHN:
        return _continuous_hahn_series(spec, xi)
    return _askey_wilson_series(spec, xi)


def _needs_recurrence(spec: PolynomialSpec) -> bool:
    q = abs(spec.params[4])
    return q < AW_SMALL_Q or max(abs(p) for p in spec.coupling) < AW_SMALL_PARAMS


@dataclass(frozen=True)
class PolynomialEvaluator:
    """Monic p_n at one working precision; ``dps`` None runs the Askey-Wilson recurrence."""

    spec: PolynomialSpec
    dps: int | None

    def __call__(self, xi: float) -> float:
        if self.dps is None:
            q = self.spec.params[4].real
            value = askey_wilson_by_recurrence(self.spec.coupling, q, self.spec.n, xi)
            return real_value(value, 0.0)
        return real_value(*_series(self.spec, xi).evaluate(self.dps))


def evaluator(spec: PolynomialSpec, points: Sequence[float]) -> PolynomialEvaluator:
    """Evaluator whose precision covers the largest series term at every point in ``points``."""
    if spec.family is PolynomialFamily.ASKEY_WILSON and _needs_recurrence(spec):
        return PolynomialEvaluator(spec, None)
    dps = max(_series(spec, float(x)).required_dps() for x in points)
    if len(points) > 1:
        dps += SCAN_DPS_MARGIN
    if dps > settings.SERIES_MAX_DPS:
        detail = f"series needs {dps} digits, above SERIES_MAX_DPS={settings.SERIES_MAX_DPS}"
        if spec.family is not PolynomialFamily.ASKEY_WILSON:
            raise NumericInstabilityError(detail)
        logger.warning(f"4phi3 series unusable ({detail}); switching to the recurrence")
        return PolynomialEvaluator(spec, None)
    return PolynomialEvaluator(spec, dps)


def eval_poly(spec: PolynomialSpec, xi: float) -> float:
    """Monic p_n at a real point: in xi^2 (Wilson), cos(xi) (Askey-Wilson) or xi."""
    return evaluator(spec, [xi])(xi)


def product_form(spec: PolynomialSpec, roots: npt.ArrayLike, x: complex) -> complex:
    """p_n written through its zeros; ``x`` may be complex."""
    r = np.asarray(roots, dtype=np.float64)
    if spec.family is PolynomialFamily.WILSON:
        return complex(np.prod(x * x - r * r))
    if spec.family is PolynomialFamily.ASKEY_WILSON:
        return complex(np.prod(np.cos(x) - np.cos(r)))
    return complex(np.prod(x - r))


# ---- Zeros ----


def solve_family(spec: PolynomialSpec, config: SolverConfig | None = None) -> BetheSolution:
    return solve(family_to_bethe(spec), config)


def zeros_via_bethe(spec: PolynomialSpec, config: SolverConfig | None = None) -> FloatArray:
    return solve_family(spec, config).as_array()


class _SignChangeDeficit(Exception):
    def __init__(self, found: int, needed: int, interval: tuple[float, float]) -> None:
        super().__init__(
            f"found {found} of {needed} sign changes on [{interval[0]:.6g}, {interval[1]:.6g}]"
        )
        self.found = found


def _scan_grid(spec: PolynomialSpec, level: int) -> FloatArray:
    n = spec.n
    points = settings.ORACLE_GRID_FACTOR * n * 2**level
    if spec.family is PolynomialFamily.ASKEY_WILSON:
        return np.linspace(0.0, math.pi, points + 1)
    k_minus, _ = family_k_pm(spec.family, n, list(spec.params))
    if spec.family is PolynomialFamily.WILSON:
        upper = 2 * math.pi * n / k_minus * 2**level
        return np.linspace(0.0, upper, points + 1)
    # an even number of symmetric points never lands on 0, the odd-degree zero
    upper = math.pi * n / k_minus * 2**level
    return np.linspace(-upper, upper, points + points % 2)


def _refine(f: Callable[[float], float], lo: float, hi: float) -> float:
    if settings.ORACLE_REFINER == "brentq":
        return float(optimize.brentq(f, lo, hi, xtol=settings.ORACLE_XTOL))
    return float(optimize.bisect(f, lo, hi, xtol=settings.ORACLE_XTOL))


def _scan(spec: PolynomialSpec, level: int) -> FloatArray:
    grid = _scan_grid(spec, level)
    f = evaluator(spec, np.linspace(grid[0], grid[-1], SCAN_SAMPLES).tolist())
    values = np.array([f(float(x)) for x in grid])
    roots: list[float] = []
    for i in range(len(grid) - 1):
        if values[i] == 0 and i > 0:
            roots.append(float(grid[i]))
        elif np.sign(values[i]) * np.sign(values[i + 1]) < 0:
            roots.append(_refine(f, float(grid[i]), float(grid[i + 1])))
    if len(roots) > spec.n:
        raise OracleFailureError(
            f"scan found {len(roots)} sign changes for a degree-{spec.n} polynomial"
        )
    if len(roots) < spec.n:
        raise _SignChangeDeficit(len(roots), spec.n, (float(grid[0]), float(grid[-1])))
    return np.sort(np.asarray(roots))[::-1]


def _log_doubling(retry_state: RetryCallState) -> None:
    error = retry_state.outcome.exception() if retry_state.outcome else None
    logger.debug(f"oracle grid level {retry_state.attempt_number}: {error}; doubling")


def zeros_via_oracle(spec: PolynomialSpec) -> FloatArray:
    """Zeros from sign changes of the series, refined by a bracketing root finder.

    Every retry doubles the grid; for the families without an upper bound the
    scanned interval doubles with it, so the spacing stays below the smallest
    gap the bounds allow.
    """
    try:
        for attempt in Retrying(
            stop=stop_after_attempt(settings.ORACLE_MAX_DOUBLINGS + 1),
            retry=retry_if_exception_type(_SignChangeDeficit),
            before_sleep=_log_doubling,
            reraise=True,
        ):
            with attempt:
                roots = _scan(spec, attempt.retry_state.attempt_number - 1)
    except _SignChangeDeficit as e:
        raise OracleFailureError(
            f"oracle gave up after {settings.ORACLE_MAX_DOUBLINGS} doublings: {e}"
        ) from e
    return roots


# ---- Difference equation ----


@dataclass(frozen=True)
class DifferenceOperatorData:
    """L p = A(xi)[p(xi + shift) - p(xi)] + A(-xi)[p(xi - shift) - p(xi)], L p_n = E_n p_n."""

    family: PolynomialFamily
    coefficient: Callable[[complex], complex]
    eigenvalue: float
    shift: complex

    def apply(self, poly: Callable[[complex], complex], xi: float) -> complex:
        center = poly(xi)
        return self.coefficient(xi) * (poly(xi + self.shift) - center) + self.coefficient(
            -xi
        ) * (poly(xi - self.shift) - center)


def _eigenvalue(spec: PolynomialSpec, m: int) -> float:
    if spec.family is PolynomialFamily.WILSON:
        return m * (m + sum(spec.params).real - 1)
    if spec.family is PolynomialFamily.CONTINUOUS_HAHN:
        return m * (m + 2 * sum(spec.params).real - 1)
    q = spec.params[4].real
    if m == 0:
        return 0.0
    if q == 0:
        return math.inf
    abcd = complex(np.prod(spec.coupling)).real
    return float(q**-m * (1 - q**m) * (1 - abcd * q ** (m - 1)))


def _aw_shift(q: float) -> complex:
    # e^{i shift} = q, so p(xi + shift) is p at q e^{i xi}
    if q == 0:
        return complex(0.0, math.inf)
    return complex(math.atan2(0.0, q), -math.log(abs(q)))


def difference_operator(spec: PolynomialSpec) -> DifferenceOperatorData:
    values = list(spec.coupling)
    if spec.family is PolynomialFamily.WILSON:

        def wilson(xi: complex) -> complex:
            ix = 1j * xi
            return complex(np.prod([v - ix for v in values])) / (2 * ix * (2 * ix - 1))

        return DifferenceOperatorData(spec.family, wilson, _eigenvalue(spec, spec.n), 1j)

    if spec.family is PolynomialFamily.CONTINUOUS_HAHN:

        def hahn(xi: complex) -> complex:
            return complex(np.prod([v - 1j * xi for v in values]))

        return DifferenceOperatorData(spec.family, hahn, _eigenvalue(spec, spec.n), 1j)

    q = spec.params[4].real

    def askey_wilson(xi: complex) -> complex:
        z = complex(np.exp(1j * xi))
        num = complex(np.prod([1 - v * z for v in values]))
        return num / ((1 - z * z) * (1 - q * z * z))

    return DifferenceOperatorData(spec.family, askey_wilson, _eigenvalue(spec, spec.n), _aw_shift(q))


def eigenvalues_nondegenerate(spec: PolynomialSpec) -> bool:
    """True when E_0, ..., E_n are pairwise distinct."""
    eigenvalues = [_eigenvalue(spec, m) for m in range(spec.n + 1)]
    if any(math.isinf(e) for e in eigenvalues):
        # q = 0: only E_0 = 0 and E_1 = inf can be told apart
        return spec.n <= 1
    for i, e in enumerate(eigenvalues):
        for f in eigenvalues[i + 1 :]:
            if abs(e - f) <= 1e-12 * max(1.0, abs(e), abs(f)):
                return False
    return True


def _shifted_terms(spec: PolynomialSpec, r: FloatArray, xi: float) -> tuple[complex, complex]:
    op = difference_operator(spec)
    try:
        return _shifted_products(spec, op, r, xi)
    except ZeroDivisionError as e:
        raise SingularityError(f"difference-equation coefficient has a pole at {xi}") from e


def _shifted_products(
    spec: PolynomialSpec, op: DifferenceOperatorData, r: FloatArray, xi: float
) -> tuple[complex, complex]:
    if spec.family is not PolynomialFamily.ASKEY_WILSON:
        x = op.coefficient(xi) * product_form(spec, r, xi + op.shift)
        y = op.coefficient(-xi) * product_form(spec, r, xi - op.shift)
        return x, y
    # q^n p(xi +- shift), written so that q = 0 needs no special case
    q = spec.params[4].real
    z = complex(np.exp(1j * xi))
    cos_r = np.cos(r)
    up = complex(np.prod((q * q * z + 1 / z) / 2 - q * cos_r))
    down = complex(np.prod((z + q * q / z) / 2 - q * cos_r))
    return op.coefficient(xi) * up, op.coefficient(-xi) * down


def de_residuals(spec: PolynomialSpec, roots: npt.ArrayLike) -> FloatArray:
    """|X_j + Y_j| / (|X_j| + |Y_j|) of the two-term identity at every root."""
    r = np.asarray(roots, dtype=np.float64)
    residuals = np.empty(len(r))
    for j, xi in enumerate(r):
        x, y = _shifted_terms(spec, r, float(xi))
        norm = abs(x) + abs(y)
        if norm == 0 or not math.isfinite(norm):
            raise SingularityError(
                f"difference-equation normalizer vanishes or overflows at root {j + 1} ({xi})"
            )
        residuals[j] = abs(x + y) / norm
    return residuals


def de_residual(spec: PolynomialSpec, roots: npt.ArrayLike) -> float:
    return float(np.max(de_residuals(spec, roots)))
