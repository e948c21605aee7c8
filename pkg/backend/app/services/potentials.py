"""Building blocks s(x), v_a(x) and their derivatives.

Every function accepts a scalar or an array for ``x`` and broadcasts like
numpy. A parameter with a pair offset stands for the conjugate pair
{a, conj(a)} and evaluates to the sum of the two shifted real-part terms.
"""

import functools
import logging
import math

import numpy as np
import numpy.typing as npt
from scipy import integrate

from app.core.errors import DomainError, SingularityError, UnsupportedParameterError
from app.models import CoupledParameter, FloatArray, PotentialKind

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-12
# sample points for the closed-form self-check
_CHECK_X = (-7.3, -2.0, -0.4, 0.0, 0.9, 3.1, 11.5)


def s_eval(kind: PotentialKind, z: complex) -> complex:
    if kind is PotentialKind.RATIONAL:
        return complex(z) / 2
    if kind is PotentialKind.HYPERBOLIC:
        return complex(np.sinh(complex(z) / 2))
    return complex(np.sin(complex(z) / 2))


def _trig_rho(p: CoupledParameter) -> float:
    # signed modulus; the Im(a)=pi branch flips the sign
    return (p.trig_sign or 1) * p.modulus


def _single_value(p: CoupledParameter, x: FloatArray) -> FloatArray:
    if p.kind is PotentialKind.RATIONAL:
        return 2.0 * np.arctan(x / p.magnitude)
    if p.kind is PotentialKind.HYPERBOLIC:
        return 2.0 * np.arctan(np.tanh(x / 2) / np.tan(p.magnitude / 2))
    rho = _trig_rho(p)
    c = (1 + rho) / (1 - rho)
    m = np.round(x / (2 * np.pi))
    y = x - 2 * np.pi * m
    # y in [-pi, pi] keeps cos(y/2) >= 0, so atan2 stays on one branch
    return 2.0 * np.arctan2(c * np.sin(y / 2), np.cos(y / 2)) + 2 * np.pi * m


def _single_deriv(p: CoupledParameter, x: FloatArray) -> FloatArray:
    if p.kind is PotentialKind.RATIONAL:
        a = p.magnitude
        return 2 * a / (a * a + x * x)
    if p.kind is PotentialKind.HYPERBOLIC:
        a = p.magnitude
        # sin a / (cosh x - cos a), rewritten with e^{-|x|} so large |x| cannot overflow
        e = np.exp(-np.abs(x))
        return 2 * math.sin(a) * e / (1 + e * e - 2 * math.cos(a) * e)
    rho = _trig_rho(p)
    return (1 - rho * rho) / (1 - 2 * rho * np.cos(x) + rho * rho)


def _check_parameter(p: CoupledParameter) -> None:
    if p.kind is PotentialKind.TRIGONOMETRIC:
        return
    if not math.isfinite(p.magnitude) or p.magnitude <= 0:
        raise DomainError(f"{p.kind.value} parameter out of domain: {p.magnitude}")
    if p.kind is PotentialKind.HYPERBOLIC and p.magnitude >= math.pi:
        raise DomainError(f"hyperbolic parameter must lie in (0, pi): {p.magnitude}")


def v_eval(p: CoupledParameter, x: npt.ArrayLike) -> FloatArray:
    """v_a(x), the integral of v_a' from 0 to x."""
    _check_parameter(p)
    xs = np.asarray(x, dtype=np.float64)
    base = p.real_part()
    if not _closed_form_ok(p.kind):
        return _vectorized_quadrature(p, xs)
    if p.is_pair:
        return _single_value(base, xs + p.pair_offset) + _single_value(
            base, xs - p.pair_offset
        )
    return _single_value(base, xs)


def v_deriv(p: CoupledParameter, x: npt.ArrayLike) -> FloatArray:
    _check_parameter(p)
    xs = np.asarray(x, dtype=np.float64)
    base = p.real_part()
    if p.is_pair:
        return _single_deriv(base, xs + p.pair_offset) + _single_deriv(
            base, xs - p.pair_offset
        )
    return _single_deriv(base, xs)


def v_deriv_range(p: CoupledParameter) -> tuple[float, float]:
    """Infimum and supremum of v_a' over the real line."""
    if p.is_pair:
        raise UnsupportedParameterError(
            "derivative ranges are defined per real parameter; pairs combine at the bounds layer"
        )
    _check_parameter(p)
    if p.kind is PotentialKind.RATIONAL:
        return 0.0, 2 / p.magnitude
    if p.kind is PotentialKind.HYPERBOLIC:
        return 0.0, 1 / math.tan(p.magnitude / 2)
    r = p.modulus
    return (1 - r) / (1 + r), (1 + r) / (1 - r)


def v_quadrature(p: CoupledParameter, x: float) -> float:
    """Adaptive quadrature of v_a' from 0 to x; the reference for the closed forms."""
    if x == 0:
        return 0.0
    lo, hi = sorted((0.0, float(x)))
    # split at the peaks of the integrand so quad sees them
    points = {t for t in (p.pair_offset, -p.pair_offset) if lo < t < hi}
    if p.kind is PotentialKind.TRIGONOMETRIC:
        # trigonometric peaks repeat every 2 pi
        points.update(
            2 * math.pi * k + s
            for k in range(math.floor(lo / (2 * math.pi)) - 1, math.floor(hi / (2 * math.pi)) + 2)
            for s in (p.pair_offset, -p.pair_offset, 0.0, math.pi)
            if lo < 2 * math.pi * k + s < hi
        )
    value, _ = integrate.quad(
        lambda t: float(v_deriv(p, t)),
        lo,
        hi,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=400,
        points=sorted(points) or None,
    )
    return float(value) if x > 0 else -float(value)


def _vectorized_quadrature(p: CoupledParameter, xs: FloatArray) -> FloatArray:
    flat = [v_quadrature(p, float(t)) for t in xs.ravel()]
    return np.asarray(flat, dtype=np.float64).reshape(xs.shape)


@functools.cache
def _closed_form_ok(kind: PotentialKind) -> bool:
    """Check the closed form of ``kind`` against quadrature once per process."""
    samples = {
        PotentialKind.RATIONAL: CoupledParameter(kind=PotentialKind.RATIONAL, magnitude=0.7),
        PotentialKind.HYPERBOLIC: CoupledParameter(kind=PotentialKind.HYPERBOLIC, magnitude=1.3),
        PotentialKind.TRIGONOMETRIC: CoupledParameter(
            kind=PotentialKind.TRIGONOMETRIC, magnitude=0.4, trig_sign=-1
        ),
    }
    p = samples[kind]
    closed = _single_value(p, np.asarray(_CHECK_X))
    worst = max(abs(float(c) - v_quadrature(p, t)) for c, t in zip(closed, _CHECK_X, strict=True))
    if worst > 1e-9:
        logger.warning(
            f"closed form for {kind.value} potential deviates from quadrature by {worst:.3e}; "
            "falling back to quadrature"
        )
        return False
    return True


def closed_form_error(p: CoupledParameter, xs: npt.ArrayLike) -> float:
    """Largest gap between the closed form and quadrature of v_a' on ``xs``."""
    grid = np.asarray(xs, dtype=np.float64)
    closed = v_eval(p, grid)
    return max(
        (abs(float(c) - v_quadrature(p, float(t))) for c, t in zip(closed, grid, strict=True)),
        default=0.0,
    )


def _rational_antideriv(a: float, x: FloatArray) -> FloatArray:
    return 2 * x * np.arctan(x / a) - a * np.log1p((x / a) ** 2)


def v_antideriv(p: CoupledParameter, x: npt.ArrayLike) -> FloatArray:
    """Integral of v_a from 0 to x. Used for Morse values, never by the solver."""
    _check_parameter(p)
    xs = np.asarray(x, dtype=np.float64)
    if p.kind is PotentialKind.RATIONAL:
        a, t = p.magnitude, p.pair_offset
        if p.is_pair:
            return (
                _rational_antideriv(a, xs + t)
                + _rational_antideriv(a, xs - t)
                - 2 * _rational_antideriv(a, np.asarray(t))
            )
        return _rational_antideriv(a, xs)
    if p.kind is PotentialKind.HYPERBOLIC:
        flat = [
            integrate.quad(lambda s: float(v_eval(p, s)), 0.0, float(t), epsabs=QUAD_EPSABS)[0]
            for t in xs.ravel()
        ]
        return np.asarray(flat, dtype=np.float64).reshape(xs.shape)
    # v(t) - w t is odd and 2 pi periodic, so only the reduced argument needs quadrature
    w = p.weight
    if p.modulus == 0:
        return w * xs * xs / 2
    reduced = xs - 2 * np.pi * np.round(xs / (2 * np.pi))
    periodic = [
        integrate.quad(
            lambda s: float(v_eval(p, s)) - w * s, 0.0, float(y), epsabs=QUAD_EPSABS, limit=200
        )[0]
        for y in reduced.ravel()
    ]
    return w * xs * xs / 2 + np.asarray(periodic, dtype=np.float64).reshape(xs.shape)


def interaction_factor(p: CoupledParameter, x: float) -> complex:
    """s(ia + x) / s(ia - x), multiplied over both members of a pair.

    For real x this equals exp(-i v_a(x)).
    """
    _check_parameter(p)
    members = [p.as_complex()]
    if p.is_pair:
        members.append(members[0].conjugate())
    factor = complex(1.0)
    for a in members:
        factor *= _member_factor(p, a, x)
    return factor


def _member_factor(p: CoupledParameter, a: complex, x: float) -> complex:
    if p.kind is PotentialKind.TRIGONOMETRIC:
        # e^{-ix} (1 - rho e^{ix}) / (1 - rho e^{-ix}) with rho = e^{-a}
        rho = 0j if math.isinf(a.real) else complex(np.exp(-a))
        num = 1 - rho * complex(np.exp(1j * x))
        den = 1 - rho * complex(np.exp(-1j * x))
        _guard(den, p, x)
        return complex(np.exp(-1j * x)) * num / den
    if p.kind is PotentialKind.RATIONAL:
        den = s_eval(p.kind, 1j * a - x)
        _guard(den, p, x)
        return s_eval(p.kind, 1j * a + x) / den
    # sinh ratio rewritten with e^{c - |x|} so large |x| cannot overflow
    c = 1j * a
    ax = abs(x)
    den = 1 - complex(np.exp(c - ax))
    _guard(den, p, x)
    g = -complex(np.exp(c)) * (1 - complex(np.exp(-c - ax))) / den
    return g if x >= 0 else 1 / g


def _guard(den: complex, p: CoupledParameter, x: float) -> None:
    if abs(den) < 1e-300:
        raise SingularityError(
            f"interaction factor of {p.kind.value} parameter {p.magnitude} is singular at x={x}"
        )
