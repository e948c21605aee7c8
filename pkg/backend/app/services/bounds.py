"""A-priori bounds on the minimum of the Morse function.

The constants kappa_- and kappa_+ bound the derivative of the combined
potential. They turn the critical equations into boxes for the coordinates
(type B) and for all gaps xi_j - xi_j'.

Factor bookkeeping for the polynomial families: at alpha = 0 the family
constants are k = kappa for type-B systems (Wilson, Askey-Wilson) and
k = kappa / 2 for type-A systems (continuous Hahn). The factor 2 comes from
the 1/2 alpha xi^2 term of the type-A Morse function against alpha xi^2 for
type B, which puts 2 pi instead of pi in the type-A gap bounds.
"""

import math

import numpy as np
import numpy.typing as npt

from app.core.errors import DomainError
from app.models import (
    BetheSystem,
    BoundBox,
    CoupledParameter,
    PolynomialFamily,
    PolynomialSpec,
    PotentialKind,
    SystemType,
)
from app.services.potentials import v_deriv_range


def _range_sums(params: list[CoupledParameter]) -> tuple[float, float]:
    # pairs count twice, with the derivative range of their real part
    lo = hi = 0.0
    for p in params:
        d_min, d_max = v_deriv_range(p.real_part())
        lo += p.weight * d_min
        hi += p.weight * d_max
    return lo, hi


def kappa_pm(sys: BetheSystem) -> tuple[float, float]:
    """(kappa_minus, kappa_plus) of the system."""
    a_lo, a_hi = _range_sums(sys.a_params)
    b_lo, b_hi = _range_sums(sys.b_params)
    if sys.stype is SystemType.A:
        kappa_minus = a_hi + sys.n * b_hi
        kappa_plus = a_lo + sys.n * b_lo
    else:
        kappa_minus = 0.5 * a_hi + (sys.n - 1) * b_hi
        kappa_plus = 0.5 * a_lo + (sys.n - 1) * b_lo
    return kappa_minus, kappa_plus


def kappa_to_k(stype: SystemType, kappa: float) -> float:
    return kappa if stype is SystemType.B else kappa / 2


def _over(numerator: float, denominator: float) -> float:
    # +inf is the explicit sentinel for a one-sided bound
    return numerator / denominator if denominator > 0 else math.inf


def pi_cap_applies(sys: BetheSystem) -> bool:
    """Trigonometric type-B minima with mu=rho, epsilon=0, K>2, L>0 lie below pi."""
    return (
        sys.kind is PotentialKind.TRIGONOMETRIC
        and sys.stype is SystemType.B
        and sys.k_eff > 2
        and sys.l_eff > 0
        and sys.epsilon == 0
        and sys.is_minimal_weight()
    )


def bound_box(sys: BetheSystem) -> BoundBox:
    kappa_minus, kappa_plus = kappa_pm(sys)
    lower_den = sys.alpha + kappa_minus
    upper_den = sys.alpha + kappa_plus
    if lower_den <= 0:
        raise DomainError(
            "the Morse function has no strictly convex minimum: alpha + kappa_minus vanishes"
        )
    n = sys.n
    mu = sys.mu
    if sys.stype is SystemType.B:
        scale = math.pi
        shifted = [m + sys.shift for m in mu]
        coord_lower = [scale * m / lower_den for m in shifted]
        coord_upper = [_over(scale * m, upper_den) for m in shifted]
    else:
        scale = 2 * math.pi
        coord_lower = [-math.inf] * n
        coord_upper = [math.inf] * n
    gap_lower = [[0.0] * n for _ in range(n)]
    gap_upper = [[0.0] * n for _ in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            gap_lower[j][k] = scale * (mu[j] - mu[k]) / lower_den
            gap_upper[j][k] = _over(scale * (mu[j] - mu[k]), upper_den)
    return BoundBox(
        coord_lower=coord_lower,
        coord_upper=coord_upper,
        coord_cap=math.pi if pi_cap_applies(sys) else math.inf,
        gap_lower=gap_lower,
        gap_upper=gap_upper,
        kappa_minus=kappa_minus,
        kappa_plus=kappa_plus,
    )


def box_violation(box: BoundBox, xi: npt.ArrayLike) -> float:
    """Worst violation of any coordinate or gap inequality; 0 when all hold."""
    x = np.asarray(xi, dtype=np.float64)
    worst = 0.0
    for j, xj in enumerate(x):
        upper = min(box.coord_upper[j], box.coord_cap)
        worst = max(worst, box.coord_lower[j] - xj, xj - upper)
        for k in range(j + 1, len(x)):
            gap = xj - x[k]
            worst = max(worst, box.gap_lower[j][k] - gap, gap - box.gap_upper[j][k])
    return float(worst)


def contains(box: BoundBox, xi: npt.ArrayLike, slack: float = 1e-12) -> bool:
    x = np.asarray(xi, dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(x)))) if x.size else 1.0
    return box_violation(box, x) <= slack * scale


def _disc_ratio(value: complex) -> float:
    m = abs(value)
    return (1 - m) / (1 + m)


def family_k_pm(family: PolynomialFamily, n: int, params: list[complex]) -> tuple[float, float]:
    """(k_minus, k_plus) for the zeros of a polynomial family.

    Wilson and continuous Hahn only have a lower constant; their k_plus is 0,
    which makes every upper bound +inf.
    """
    spec = PolynomialSpec(family=family, n=n, params=params)
    if family is PolynomialFamily.WILSON:
        return 2 * (n - 1) + sum(1 / p.real for p in spec.params), 0.0
    if family is PolynomialFamily.CONTINUOUS_HAHN:
        return n + sum(1 / p.real for p in spec.params), 0.0
    q_ratio = _disc_ratio(spec.params[4])
    ratios = [_disc_ratio(p) for p in spec.params[:4]]
    k_minus = (n - 1) / q_ratio + 0.5 * sum(1 / r for r in ratios)
    k_plus = (n - 1) * q_ratio + 0.5 * sum(ratios)
    return k_minus, k_plus


def positive_zero_lower_bounds(spec: PolynomialSpec) -> list[float]:
    """pi (n+1-2j) / (2 k_minus) for j = 1..floor(n/2) (continuous Hahn only)."""
    if spec.family is not PolynomialFamily.CONTINUOUS_HAHN:
        raise DomainError("positive-zero bounds are specific to the continuous Hahn family")
    k_minus, _ = family_k_pm(spec.family, spec.n, list(spec.params))
    return [math.pi * (spec.n + 1 - 2 * j) / (2 * k_minus) for j in range(1, spec.n // 2 + 1)]
