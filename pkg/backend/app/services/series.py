"""Terminating (basic) hypergeometric series in extended precision.

Terms are built by forward recurrence on the term ratio, so no Pochhammer
symbol is ever formed on its own inside the sum. The xi-independent part of
every ratio is computed once per parameter set and precision; only the
numerator parameters that carry xi are formed per evaluation.

mpmath's default context holds one process-wide precision, so every thread
works in its own ``MPContext``.
"""

import logging
import math
import threading
from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass
from typing import Any, NamedTuple

import mpmath

from app.core.config import settings
from app.core.errors import NumericInstabilityError

logger = logging.getLogger(__name__)

# digits used while sizing the terms
SIZING_DPS = 15
IMAG_TOLERANCE = 1e-10
# ratio tables kept per thread
PLAN_CACHE_SIZE = 64

_local = threading.local()


def working_context() -> Any:
    """This thread's private mpmath context."""
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = _local.ctx = mpmath.MPContext()
        _local.plans = {}
    return ctx


class SeriesData(NamedTuple):
    # numerator parameters that do not depend on xi
    fixed_upper: list[Any]
    lower: list[Any]
    z: Any
    # None for an ordinary pFq, q for a basic series
    base: Any
    prefactor: Any


class _Plan(NamedTuple):
    prefactor: Any
    ratios: list[Any]
    powers: list[Any] | None


@dataclass(frozen=True)
class TerminatingSeries:
    """Prefactor times a series truncated after ``n`` term ratios.

    ``build`` and ``variable`` receive the working context and form their
    parameters in it, so values such as q^{-n} or a + i xi carry the full
    working precision. ``key`` identifies the xi-independent part.
    """

    key: Hashable
    n: int
    build: Callable[[Any], SeriesData]
    variable: Callable[[Any], list[Any]]

    def _plan(self, ctx: Any) -> _Plan:
        plans: dict[Hashable, _Plan] = _local.plans
        key = (self.key, ctx.dps)
        plan = plans.get(key)
        if plan is not None:
            return plan
        if len(plans) >= PLAN_CACHE_SIZE:
            logger.debug(f"dropping {len(plans)} cached series ratio tables")
            plans.clear()
        data = self.build(ctx)
        ratios = []
        powers = None if data.base is None else [data.base**k for k in range(self.n)]
        for k in range(self.n):
            if powers is None:
                num = ctx.fprod(a + k for a in data.fixed_upper)
                den = ctx.fprod(b + k for b in data.lower) * (k + 1)
            else:
                qk = powers[k]
                num = ctx.fprod(1 - a * qk for a in data.fixed_upper)
                den = ctx.fprod(1 - b * qk for b in data.lower) * (1 - qk * data.base)
            ratios.append(num * data.z / den)
        plan = plans[key] = _Plan(ctx.mpc(data.prefactor), ratios, powers)
        return plan

    def _terms(self, ctx: Any) -> list[Any]:
        plan = self._plan(ctx)
        variable = self.variable(ctx)
        term = plan.prefactor
        terms = [term]
        for k, ratio in enumerate(plan.ratios):
            if plan.powers is None:
                factor = ctx.fprod(a + k for a in variable)
            else:
                factor = ctx.fprod(1 - a * plan.powers[k] for a in variable)
            term = term * ratio * factor
            terms.append(term)
        return terms

    def required_dps(self) -> int:
        ctx = working_context()
        with ctx.workdps(SIZING_DPS):
            peak = max(abs(t) for t in self._terms(ctx))
            digits = 0 if peak == 0 else max(0, int(ctx.ceil(ctx.log10(peak))))
        return settings.SERIES_DPS + digits

    def evaluate(self, dps: int | None = None) -> tuple[complex, float]:
        """Value of the series and the log10 size of its largest term.

        ``dps`` fixes the working precision; without it the terms are sized first.
        """
        if dps is None:
            dps = self.required_dps()
        if dps > settings.SERIES_MAX_DPS:
            raise NumericInstabilityError(
                f"series needs {dps} digits, above SERIES_MAX_DPS={settings.SERIES_MAX_DPS}"
            )
        ctx = working_context()
        with ctx.workdps(dps):
            terms = self._terms(ctx)
            total = ctx.fsum(terms)
            peak = max(abs(t) for t in terms)
            log_peak = float(ctx.log10(peak)) if peak != 0 else -math.inf
            return complex(total), log_peak


def real_value(value: complex, log_peak: float) -> float:
    """Real part, after checking the imaginary residue against the term scale."""
    scale = max(abs(value.real), 10.0**log_peak if math.isfinite(log_peak) else 0.0, 1e-300)
    if abs(value.imag) > IMAG_TOLERANCE * scale:
        raise NumericInstabilityError(
            f"polynomial value has imaginary residue {value.imag:.3e} at scale {scale:.3e}"
        )
    return value.real


# ---- Askey-Wilson three-term recurrence ----


def askey_wilson_recurrence(
    params: Sequence[complex], q: float, n: int
) -> tuple[list[complex], list[complex]]:
    """Coefficients of x p_m = p_{m+1} + b_m p_m + gamma_m p_{m-1}, x = cos(xi).

    Written without any division by a or q, so it stays valid at the
    removable points a = 0 and q = 0 where the 4phi3 form breaks down.
    ``gamma[0]`` is unused and set to 0.
    """
    a, b, c, d = (complex(p) for p in params)
    s1 = b + c + d
    s2 = b * c + b * d + c * d
    s3 = b * c * d
    s = a * s3

    def p3(big_q: complex) -> complex:
        # (1 - ab Q)(1 - ac Q)(1 - ad Q)
        return 1 - a * s1 * big_q + a * a * s2 * big_q**2 - a**3 * s3 * big_q**3

    def a_scaled(m: int) -> complex:
        if m == 0:
            return p3(1) / (1 - s)
        return (
            p3(q**m)
            * (1 - s * q ** (m - 1))
            / ((1 - s * q ** (2 * m - 1)) * (1 - s * q ** (2 * m)))
        )

    def c_scaled(m: int) -> complex:
        r = q ** (m - 1)
        return (
            (1 - q**m)
            * (1 - b * c * r)
            * (1 - b * d * r)
            * (1 - c * d * r)
            / ((1 - s * q ** (2 * m - 2)) * (1 - s * q ** (2 * m - 1)))
        )

    b_coeffs = [0.5 * (a + (s1 - a * s2 + a * a * s3 - s3) / (1 - s))]
    gammas = [0j]
    for m in range(1, n):
        big_q = q**m
        numerator = (
            s1 * big_q
            - a * s2 * big_q**2
            + a * a * s3 * big_q**3
            + s3 * (q ** (m - 1) * p3(big_q) - q ** (2 * m - 1) - q ** (2 * m))
            + s * s3 * q ** (4 * m - 1)
        )
        denominator = (1 - s * q ** (2 * m - 1)) * (1 - s * q ** (2 * m))
        b_coeffs.append(0.5 * (numerator / denominator + a - a * c_scaled(m)))
        gammas.append(0.25 * a_scaled(m - 1) * c_scaled(m))
    return b_coeffs, gammas


def askey_wilson_by_recurrence(params: Sequence[complex], q: float, n: int, xi: float) -> complex:
    b_coeffs, gammas = askey_wilson_recurrence(params, q, n)
    x = math.cos(xi)
    prev, cur = 0j, 1 + 0j
    for m in range(n):
        prev, cur = cur, (x - b_coeffs[m]) * cur - gammas[m] * prev
    return cur
