import math
from enum import Enum
from typing import Annotated, Any

import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_serializer,
    model_validator,
)
from typing_extensions import Self

from app.core.config import settings

FloatArray = npt.NDArray[np.float64]


def _float_or_inf(value: float) -> float | str:
    # JSON has no infinity literal; the explicit sentinel keeps reports parseable
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _parse_inf(value: Any) -> Any:
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return math.inf
        if text in ("-inf", "-infinity"):
            return -math.inf
    return value


ReportFloat = Annotated[
    float, BeforeValidator(_parse_inf), PlainSerializer(_float_or_inf, when_used="json")
]


# ---- Potential Models ----


class PotentialKind(str, Enum):
    RATIONAL = "rational"
    HYPERBOLIC = "hyperbolic"
    TRIGONOMETRIC = "trigonometric"


class CoupledParameter(BaseModel):
    """One interaction parameter a_k or b_l.

    ``magnitude`` is the real part of the parameter. A positive ``pair_offset``
    is the imaginary part of a non-real parameter and stands for the conjugate
    pair {a, conj(a)}. For trigonometric parameters ``trig_sign = -1`` encodes
    Im(a) = pi, and ``magnitude = inf`` is the free limit v(x) = x.
    """

    model_config = ConfigDict(frozen=True)

    kind: PotentialKind
    magnitude: Annotated[float, BeforeValidator(_parse_inf)]
    trig_sign: int | None = None
    pair_offset: float = Field(default=0.0, ge=0.0)

    @field_serializer("magnitude", when_used="json")
    def _serialize_magnitude(self, value: float) -> float | str:
        return _float_or_inf(value)

    @model_validator(mode="before")
    @classmethod
    def _default_trig_sign(cls, data: Any) -> Any:
        if (
            isinstance(data, dict)
            and data.get("kind") in (PotentialKind.TRIGONOMETRIC, "trigonometric")
            and data.get("trig_sign") is None
        ):
            return {**data, "trig_sign": 1}
        return data

    @model_validator(mode="after")
    def _check_domain(self) -> Self:
        m = self.magnitude
        if math.isnan(m) or m <= 0:
            raise ValueError(f"parameter magnitude must be positive, got {m}")
        if self.kind is PotentialKind.TRIGONOMETRIC:
            if self.trig_sign not in (1, -1):
                raise ValueError(f"trig_sign must be +1 or -1, got {self.trig_sign}")
            if self.trig_sign == -1 and self.pair_offset > 0:
                raise ValueError(
                    "a trigonometric parameter on the Im(a)=pi branch cannot also carry a conjugate-pair offset"
                )
            if self.pair_offset >= math.pi:
                raise ValueError(
                    f"trigonometric pair offset must lie in [0, pi), got {self.pair_offset}"
                )
            return self
        if self.trig_sign is not None:
            raise ValueError("trig_sign is only defined for trigonometric parameters")
        if math.isinf(m):
            raise ValueError(f"{self.kind.value} parameters must be finite")
        if self.kind is PotentialKind.HYPERBOLIC and m >= math.pi:
            raise ValueError(f"hyperbolic parameters must lie in (0, pi), got {m}")
        return self

    @classmethod
    def from_family_value(cls, kind: PotentialKind, value: complex) -> "CoupledParameter":
        """Build a parameter from the value a polynomial family uses.

        Trigonometric values live in the unit disc and map through e^{-a} = value;
        rational and hyperbolic values are taken as they are.
        """
        value = complex(value)
        if kind is not PotentialKind.TRIGONOMETRIC:
            return cls(kind=kind, magnitude=value.real, pair_offset=abs(value.imag))
        modulus = abs(value)
        if modulus >= 1:
            raise ValueError(
                f"trigonometric family values must lie in the open unit disc, got {value}"
            )
        magnitude = math.inf if modulus == 0 else -math.log(modulus)
        if value.imag != 0:
            return cls(
                kind=kind,
                magnitude=magnitude,
                trig_sign=1,
                pair_offset=abs(math.atan2(value.imag, value.real)),
            )
        return cls(kind=kind, magnitude=magnitude, trig_sign=-1 if value.real < 0 else 1)

    @property
    def is_pair(self) -> bool:
        return self.pair_offset > 0

    @property
    def weight(self) -> int:
        return 2 if self.is_pair else 1

    @property
    def modulus(self) -> float:
        """e^{-A}, zero in the free limit (trigonometric only)."""
        return 0.0 if math.isinf(self.magnitude) else math.exp(-self.magnitude)

    def real_part(self) -> "CoupledParameter":
        return self.model_copy(update={"pair_offset": 0.0})

    def as_complex(self) -> complex:
        """The parameter a itself (for a pair, the member with Im(a) > 0)."""
        imag = math.pi if self.trig_sign == -1 else self.pair_offset
        return complex(self.magnitude, imag)


# ---- Bethe System Models ----


class SystemType(str, Enum):
    A = "A"
    B = "B"


def _coerce_parameters(kind: Any, raw: Any) -> Any:
    if not isinstance(raw, list):
        return raw
    try:
        kind = PotentialKind(kind)
    except ValueError:
        return raw
    coerced: list[Any] = []
    for entry in raw:
        if isinstance(entry, int | float | complex) and not isinstance(entry, bool):
            coerced.append(CoupledParameter.from_family_value(kind, entry))
        elif isinstance(entry, dict) and "kind" not in entry:
            coerced.append({**entry, "kind": kind})
        else:
            coerced.append(entry)
    return coerced


class BetheSystem(BaseModel):
    model_config = ConfigDict(frozen=True)

    stype: SystemType
    kind: PotentialKind
    n: int = Field(ge=1)
    alpha: float = Field(ge=0.0, allow_inf_nan=False)
    beta: float | None = None
    epsilon: int | None = None
    a_params: list[CoupledParameter] = []
    b_params: list[CoupledParameter] = []
    mu: list[int]

    @model_validator(mode="before")
    @classmethod
    def _coerce_family_values(cls, data: Any) -> Any:
        # bare numbers are family-style values (e^{-a} for trigonometric)
        if isinstance(data, dict) and "kind" in data:
            data = dict(data)
            for key in ("a_params", "b_params"):
                if key in data:
                    data[key] = _coerce_parameters(data["kind"], data[key])
        return data

    @property
    def k_eff(self) -> int:
        return sum(p.weight for p in self.a_params)

    @property
    def l_eff(self) -> int:
        return sum(p.weight for p in self.b_params)

    @property
    def shift(self) -> float:
        """beta (type A) or epsilon/2 (type B) added to every weight."""
        if self.stype is SystemType.A:
            return float(self.beta or 0.0)
        return (self.epsilon or 0) / 2

    def is_minimal_weight(self) -> bool:
        if self.stype is SystemType.B:
            return self.mu == list(range(self.n, 0, -1))
        return self.mu == [(self.n + 1 - 2 * j) // 2 for j in range(1, self.n + 1)]

    @model_validator(mode="after")
    def _check_admissible(self) -> Self:
        for p in [*self.a_params, *self.b_params]:
            if p.kind is not self.kind:
                raise ValueError(
                    f"all parameters must share the system kind {self.kind.value}, got {p.kind.value}"
                )
        if len(self.mu) != self.n:
            raise ValueError(f"mu has {len(self.mu)} entries, expected n={self.n}")
        if any(a <= b for a, b in zip(self.mu, self.mu[1:], strict=False)):
            raise ValueError(f"mu must be strictly decreasing, got {self.mu}")

        if self.stype is SystemType.A:
            if self.epsilon is not None:
                raise ValueError("epsilon belongs to type-B systems; type A uses beta")
            if self.beta is None or not 0 <= self.beta < 1:
                raise ValueError(f"type-A systems need beta in [0, 1), got {self.beta}")
        else:
            if self.beta is not None:
                raise ValueError("beta belongs to type-A systems; type B uses epsilon")
            if self.epsilon not in (0, 1):
                raise ValueError(f"type-B systems need epsilon in {{0, 1}}, got {self.epsilon}")
            if self.mu[-1] <= 0:
                raise ValueError(f"type-B weights must be positive, got {self.mu}")

        if self.alpha == 0:
            self._check_alpha_zero()
        return self

    def _check_alpha_zero(self) -> None:
        if self.kind is PotentialKind.HYPERBOLIC:
            raise ValueError(
                "hyperbolic systems at alpha=0 only have a minimum when the parameters lie "
                "sufficiently close to 0 in the interval (0, pi); alpha must be positive"
            )
        if self.stype is SystemType.B:
            if self.kind is PotentialKind.TRIGONOMETRIC:
                if self.k_eff == 0:
                    raise ValueError("trigonometric type-B systems at alpha=0 need K>0")
                return
            if self.k_eff <= 2 or self.l_eff == 0:
                raise ValueError(
                    f"rational type-B systems at alpha=0 need K>2 and L>0, got K={self.k_eff}, L={self.l_eff}"
                )
            if not self.is_minimal_weight() or self.epsilon != 0:
                raise ValueError(
                    "rational type-B systems at alpha=0 need mu=rho=(n,...,1) and epsilon=0"
                )
            return
        if self.kind is not PotentialKind.RATIONAL:
            raise ValueError("type-A systems at alpha=0 are only supported for the rational kind")
        if self.k_eff == 0 or self.l_eff == 0:
            raise ValueError(
                f"rational type-A systems at alpha=0 need K>0 and L>0, got K={self.k_eff}, L={self.l_eff}"
            )
        beta_n = 0.5 if self.n % 2 == 0 else 0.0
        if not self.is_minimal_weight() or self.beta != beta_n:
            raise ValueError(
                f"rational type-A systems at alpha=0 need mu=rho_tilde and beta=beta_n={beta_n}"
            )


# ---- Solver Models ----


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    grad_tol: float = Field(default_factory=lambda: settings.SOLVER_GRAD_TOL, gt=0)
    max_iters: int = Field(default_factory=lambda: settings.SOLVER_MAX_ITERS, ge=1)
    armijo: float = Field(default_factory=lambda: settings.SOLVER_ARMIJO, gt=0, lt=1)
    backtrack: float = Field(default_factory=lambda: settings.SOLVER_BACKTRACK, gt=0, lt=1)
    fd_check: bool = False


class BetheSolution(BaseModel):
    xi: list[float]
    iterations: int
    grad_norm: float
    # tolerance grad_norm was held to: grad_tol scaled by the right-hand side
    grad_tol: float
    bethe_residual_max: float
    within_bounds: bool

    def as_array(self) -> FloatArray:
        return np.asarray(self.xi, dtype=np.float64)


# ---- Bound Models ----


class BoundBox(BaseModel):
    """Coordinate and gap bounds at the minimum.

    Gap matrices are upper triangular: entry (j, j') with j < j' bounds
    xi_j - xi_j'. Everything on or below the diagonal is zero.
    """

    coord_lower: list[ReportFloat]
    coord_upper: list[ReportFloat]
    # pi for trigonometric type-B systems with mu=rho, +inf otherwise
    coord_cap: ReportFloat = math.inf
    gap_lower: list[list[ReportFloat]]
    gap_upper: list[list[ReportFloat]]
    kappa_minus: float
    kappa_plus: float


# ---- Polynomial Models ----


class PolynomialFamily(str, Enum):
    WILSON = "wilson"
    ASKEY_WILSON = "askey-wilson"
    CONTINUOUS_HAHN = "continuous-hahn"


PARAMETER_COUNT = {
    PolynomialFamily.WILSON: 4,
    PolynomialFamily.ASKEY_WILSON: 5,
    PolynomialFamily.CONTINUOUS_HAHN: 2,
}


def parse_complex(v: Any) -> Any:
    if isinstance(v, list | tuple) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.strip().replace(" ", "").replace("i", "j"))
    return v


def _complex_to_json(value: complex) -> float | list[float]:
    return value.real if value.imag == 0 else [value.real, value.imag]


FamilyValue = Annotated[
    complex,
    BeforeValidator(parse_complex),
    PlainSerializer(_complex_to_json, when_used="json"),
]


class PolynomialSpec(BaseModel):
    """Wilson (a,b,c,d), Askey-Wilson (a,b,c,d,q) or continuous Hahn (a,b)."""

    model_config = ConfigDict(frozen=True)

    family: PolynomialFamily
    n: int = Field(ge=1)
    params: list[FamilyValue]

    @model_validator(mode="after")
    def _check_domain(self) -> Self:
        expected = PARAMETER_COUNT[self.family]
        if len(self.params) != expected:
            raise ValueError(
                f"{self.family.value} takes {expected} parameters, got {len(self.params)}"
            )
        if self.family is PolynomialFamily.ASKEY_WILSON:
            q = self.params[4]
            if q.imag != 0 or not -1 < q.real < 1:
                raise ValueError(f"Askey-Wilson needs a real q in (-1, 1), got {q}")
            if any(abs(p) >= 1 for p in self.params[:4]):
                raise ValueError("Askey-Wilson parameters must lie in the open unit disc")
            _check_conjugate_pairs(self.params[:4])
        else:
            if any(p.real <= 0 for p in self.params):
                raise ValueError(
                    f"{self.family.value} parameters need positive real parts, got {self.params}"
                )
            _check_conjugate_pairs(self.params)
        return self

    @property
    def coupling(self) -> list[complex]:
        """Parameters entering the one-body potential (q excluded)."""
        if self.family is PolynomialFamily.ASKEY_WILSON:
            return list(self.params[:4])
        return list(self.params)


def _check_conjugate_pairs(values: list[complex]) -> None:
    remaining = [v for v in values if v.imag != 0]
    while remaining:
        v = remaining.pop(0)
        match = next((w for w in remaining if w == v.conjugate()), None)
        if match is None:
            raise ValueError(f"non-real parameter {v} must come with its complex conjugate")
        remaining.remove(match)


# ---- Report Models ----


class RootRow(BaseModel):
    j: int
    root: ReportFloat
    lower: ReportFloat | None = None
    upper: ReportFloat | None = None
    oracle_root: ReportFloat | None = None
    bethe_residual: ReportFloat | None = None
    de_residual: ReportFloat | None = None


class CellMismatch(BaseModel):
    row: str
    j: int
    expected: float
    actual: float


class CaseResult(BaseModel):
    index: int
    label: str
    passed: bool
    failure: str | None = None
    max_discrepancy: float | None = None
    bethe_residual: float | None = None
    de_residual: float | None = None
    bound_violation: float | None = None
    hessian_error: float | None = None
    morse_error: float | None = None


class VerificationReport(BaseModel):
    seed: int
    cases: int
    passed: bool
    warning: str | None = None
    results: list[CaseResult] = []
    counterexample: dict[str, Any] | None = None


class RunReport(BaseModel):
    tool: str = "bethe-zeros"
    version: str
    command: str
    inputs: dict[str, Any]
    rows: list[RootRow] = []
    iterations: int | None = None
    grad_norm: float | None = None
    grad_tol: float | None = None
    bethe_residual_max: float | None = None
    within_bounds: bool | None = None
    kappa_minus: ReportFloat | None = None
    kappa_plus: ReportFloat | None = None
    k_minus: ReportFloat | None = None
    k_plus: ReportFloat | None = None
    max_discrepancy: float | None = None
    de_residual: float | None = None
    mismatches: list[CellMismatch] | None = None
    verification: VerificationReport | None = None
    timings_ms: dict[str, float] | None = None
