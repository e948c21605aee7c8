import logging
import math

import numpy as np
import numpy.typing as npt
from scipy import linalg

from app.core.errors import NonConvergenceError, NumericInstabilityError
from app.models import BetheSolution, BetheSystem, FloatArray, SolverConfig, SystemType
from app.services.bethe_system import (
    bethe_residual,
    finite_difference_gradient,
    gradient,
    hessian,
    relative_error,
    rhs_scale,
)
from app.services.bounds import bound_box, contains

logger = logging.getLogger(__name__)

# smallest line-search step before the step is taken anyway
MIN_STEP = 1e-12


def _finite_or(value: float, fallback: float) -> float:
    return value if math.isfinite(value) else fallback


def initial_point(sys: BetheSystem) -> FloatArray:
    """Starting vector inside (or near) the a-priori bound box."""
    box = bound_box(sys)
    if sys.stype is SystemType.B:
        start = []
        for lo, hi in zip(box.coord_lower, box.coord_upper, strict=True):
            hi = min(hi, box.coord_cap)
            start.append(0.5 * (lo + hi) if math.isfinite(hi) else 1.5 * lo)
        return np.asarray(start, dtype=np.float64)
    # type A: anchor the last coordinate, then stack gap midpoints upwards
    n = sys.n
    x = np.empty(n)
    x[n - 1] = 2 * math.pi * (sys.mu[n - 1] + sys.shift) / (sys.alpha + box.kappa_minus)
    for j in range(n - 2, -1, -1):
        lo = box.gap_lower[j][j + 1]
        hi = box.gap_upper[j][j + 1]
        x[j] = x[j + 1] + _finite_or(0.5 * (lo + hi), 1.5 * lo)
    return x


def _newton_direction(h: FloatArray, g: FloatArray) -> FloatArray:
    try:
        factor = linalg.cho_factor(h)
    except np.linalg.LinAlgError:
        logger.warning("Hessian factorization failed; using steepest descent on the merit")
        return -(h @ g)
    return -linalg.cho_solve(factor, g)


def _check_order(sys: BetheSystem, x: FloatArray) -> None:
    if np.any(np.diff(x) >= 0):
        raise NumericInstabilityError(f"minimum is not strictly decreasing: {x.tolist()}")
    if sys.stype is SystemType.B and x[-1] <= 0:
        raise NumericInstabilityError(f"type-B minimum left the positive cone: {x.tolist()}")


def solve(
    sys: BetheSystem,
    config: SolverConfig | None = None,
    x0: npt.ArrayLike | None = None,
) -> BetheSolution:
    """Minimize the Morse function by damped Newton steps on its gradient.

    The line search uses the merit 1/2 |g|^2, so Morse values (which need
    quadrature for two of the kinds) never sit on the hot path. The gradient
    tolerance is scaled by max(1, |2 pi (mu_j + shift)|) so that it stays
    reachable in double precision for large weights; the solution records the
    scaled value as ``grad_tol``.
    """
    cfg = config or SolverConfig()
    x = initial_point(sys) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    if cfg.fd_check:
        _fd_check(sys, x)

    tol = cfg.grad_tol * rhs_scale(sys)
    g = gradient(sys, x)
    merit = 0.5 * float(g @ g)
    iterations = 0
    while float(np.max(np.abs(g))) > tol:
        if iterations >= cfg.max_iters:
            grad_norm = float(np.max(np.abs(g)))
            raise NonConvergenceError(
                f"no convergence after {cfg.max_iters} iterations (|g| = {grad_norm:.3e})",
                last_iterate=x,
                grad_norm=grad_norm,
            )
        h = hessian(sys, x)
        d = _newton_direction(h, g)
        slope = float(g @ (h @ d))
        t = 1.0
        while True:
            x_new = x + t * d
            g_new = gradient(sys, x_new)
            merit_new = 0.5 * float(g_new @ g_new)
            if merit_new <= merit + cfg.armijo * t * slope or t < MIN_STEP:
                break
            t *= cfg.backtrack
        x, g, merit = x_new, g_new, merit_new
        iterations += 1
        logger.debug(f"newton iteration {iterations}: step={t:.3g} |g|={np.max(np.abs(g)):.3e}")

    _check_order(sys, x)
    residual = bethe_residual(sys, x)
    return BetheSolution(
        xi=x.tolist(),
        iterations=iterations,
        grad_norm=float(np.max(np.abs(g))),
        grad_tol=tol,
        bethe_residual_max=float(np.max(residual)),
        within_bounds=contains(bound_box(sys), x),
    )


def _fd_check(sys: BetheSystem, x: FloatArray) -> None:
    error = relative_error(gradient(sys, x), finite_difference_gradient(sys, x))
    if error > 1e-5:
        raise NumericInstabilityError(
            f"gradient disagrees with finite differences of the Morse function ({error:.3e})"
        )
    logger.info(f"gradient self-check passed (relative error {error:.3e})")
