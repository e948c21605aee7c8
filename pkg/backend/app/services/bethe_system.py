import math

import numpy as np
import numpy.typing as npt

from app.core.errors import DimensionError, DomainError, SingularityError
from app.models import BetheSystem, CoupledParameter, FloatArray, SystemType
from app.services.potentials import interaction_factor, v_antideriv, v_deriv, v_eval


def make_rho(n: int) -> list[int]:
    if n <= 0:
        raise DomainError(f"particle number must be positive, got {n}")
    return list(range(n, 0, -1))


def make_rho_tilde_and_beta(n: int) -> tuple[list[int], float]:
    """Minimal type-A weights floor((n+1-2j)/2) and the half-integer shift beta_n."""
    if n <= 0:
        raise DomainError(f"particle number must be positive, got {n}")
    rho_tilde = [(n + 1 - 2 * j) // 2 for j in range(1, n + 1)]
    return rho_tilde, 0.5 if n % 2 == 0 else 0.0


def _as_vector(sys: BetheSystem, xi: npt.ArrayLike) -> FloatArray:
    x = np.asarray(xi, dtype=np.float64)
    if x.shape != (sys.n,):
        raise DimensionError(f"expected a vector of length {sys.n}, got shape {x.shape}")
    return x


def _sum_v(params: list[CoupledParameter], x: FloatArray) -> FloatArray:
    total = np.zeros_like(x)
    for p in params:
        total = total + v_eval(p, x)
    return total


def _sum_dv(params: list[CoupledParameter], x: FloatArray) -> FloatArray:
    total = np.zeros_like(x)
    for p in params:
        total = total + v_deriv(p, x)
    return total


def right_hand_side(sys: BetheSystem) -> FloatArray:
    """2 pi (mu_j + beta) or 2 pi (mu_j + epsilon/2)."""
    return 2 * np.pi * (np.asarray(sys.mu, dtype=np.float64) + sys.shift)


def rhs_scale(sys: BetheSystem) -> float:
    return float(max(1.0, np.max(np.abs(right_hand_side(sys)))))


def gradient(sys: BetheSystem, xi: npt.ArrayLike) -> FloatArray:
    """LHS minus RHS of the critical equations, component by component."""
    x = _as_vector(sys, xi)
    diff = x[:, None] - x[None, :]
    # v is odd, so the diagonal of the difference matrix contributes v(0) = 0
    pair = _sum_v(sys.b_params, diff).sum(axis=1)
    if sys.stype is SystemType.A:
        linear = sys.alpha * x
    else:
        linear = 2 * sys.alpha * x
        summ = _sum_v(sys.b_params, x[:, None] + x[None, :])
        pair = pair + summ.sum(axis=1) - np.diagonal(summ)
    return linear + _sum_v(sys.a_params, x) + pair - right_hand_side(sys)


def hessian(sys: BetheSystem, xi: npt.ArrayLike) -> FloatArray:
    x = _as_vector(sys, xi)
    n = sys.n
    diff_d = _sum_dv(sys.b_params, x[:, None] - x[None, :])
    np.fill_diagonal(diff_d, 0.0)
    if sys.stype is SystemType.A:
        h = -diff_d
        diag = sys.alpha + _sum_dv(sys.a_params, x) + diff_d.sum(axis=1)
    else:
        sum_d = _sum_dv(sys.b_params, x[:, None] + x[None, :])
        np.fill_diagonal(sum_d, 0.0)
        h = sum_d - diff_d
        diag = 2 * sys.alpha + _sum_dv(sys.a_params, x) + sum_d.sum(axis=1) + diff_d.sum(axis=1)
    h[np.diag_indices(n)] = diag
    return h


def _antideriv_sum(params: list[CoupledParameter], x: FloatArray) -> float:
    return float(sum(float(np.sum(v_antideriv(p, x))) for p in params))


def nonlinear_morse_value(sys: BetheSystem, xi: npt.ArrayLike) -> float:
    """Morse value without the linear term; invariant under the symmetry group."""
    x = _as_vector(sys, xi)
    upper = np.triu_indices(sys.n, k=1)
    diffs = (x[:, None] - x[None, :])[upper]
    value = _antideriv_sum(sys.a_params, x) + _antideriv_sum(sys.b_params, diffs)
    if sys.stype is SystemType.A:
        return value + 0.5 * sys.alpha * float(x @ x)
    sums = (x[:, None] + x[None, :])[upper]
    return value + _antideriv_sum(sys.b_params, sums) + sys.alpha * float(x @ x)


def morse_value(sys: BetheSystem, xi: npt.ArrayLike) -> float:
    x = _as_vector(sys, xi)
    return nonlinear_morse_value(sys, x) - float(right_hand_side(sys) @ x)


def bethe_residual(sys: BetheSystem, xi: npt.ArrayLike) -> FloatArray:
    """|LHS/RHS - 1| of the exponentiated product-form Bethe equations."""
    x = _as_vector(sys, xi)
    residual = np.empty(sys.n)
    for j in range(sys.n):
        if sys.stype is SystemType.A:
            lhs = complex(np.exp(1j * sys.alpha * x[j]))
            rhs = complex(np.exp(2j * np.pi * float(sys.beta or 0.0)))
        else:
            lhs = complex(np.exp(2j * sys.alpha * x[j]))
            rhs = complex((-1) ** (sys.epsilon or 0))
        for p in sys.a_params:
            rhs *= interaction_factor(p, float(x[j]))
        for k in range(sys.n):
            if k == j:
                continue
            for p in sys.b_params:
                rhs *= interaction_factor(p, float(x[j] - x[k]))
                if sys.stype is SystemType.B:
                    rhs *= interaction_factor(p, float(x[j] + x[k]))
        if abs(rhs) == 0 or not math.isfinite(abs(rhs)):
            raise SingularityError(f"Bethe product vanishes or overflows at component {j + 1}")
        residual[j] = abs(lhs / rhs - 1)
    return residual


def finite_difference_gradient(
    sys: BetheSystem, xi: npt.ArrayLike, step: float = 1e-5
) -> FloatArray:
    """Central differences of ``morse_value``."""
    x = _as_vector(sys, xi)
    g = np.empty(sys.n)
    for j in range(sys.n):
        h = step * max(1.0, abs(x[j]))
        e = np.zeros(sys.n)
        e[j] = h
        g[j] = (morse_value(sys, x + e) - morse_value(sys, x - e)) / (2 * h)
    return g


def finite_difference_hessian(
    sys: BetheSystem, xi: npt.ArrayLike, step: float = 1e-5
) -> FloatArray:
    """Central differences of ``gradient``, symmetrized."""
    x = _as_vector(sys, xi)
    h = np.empty((sys.n, sys.n))
    for j in range(sys.n):
        dx = step * max(1.0, abs(x[j]))
        e = np.zeros(sys.n)
        e[j] = dx
        h[:, j] = (gradient(sys, x + e) - gradient(sys, x - e)) / (2 * dx)
    return 0.5 * (h + h.T)


def relative_error(actual: FloatArray, expected: FloatArray) -> float:
    scale = max(1.0, float(np.max(np.abs(expected))))
    return float(np.max(np.abs(actual - expected))) / scale
