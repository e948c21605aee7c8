from typing import Any

import numpy as np
import numpy.typing as npt


class BetheZerosError(Exception):
    """Base error; ``exit_code`` is what the command line returns for it."""

    exit_code: int = 1

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class DomainError(BetheZerosError):
    pass


class DimensionError(BetheZerosError):
    pass


class UnsupportedParameterError(BetheZerosError):
    pass


class SingularityError(BetheZerosError):
    pass


class NumericInstabilityError(BetheZerosError):
    pass


class OracleFailureError(BetheZerosError):
    pass


class NonConvergenceError(BetheZerosError):
    exit_code = 2

    def __init__(
        self, detail: str, last_iterate: npt.NDArray[np.float64], grad_norm: float
    ) -> None:
        super().__init__(detail)
        self.last_iterate = last_iterate
        self.grad_norm = grad_norm


class TableMismatchError(BetheZerosError):
    exit_code = 3

    def __init__(self, detail: str, cells: list[dict[str, Any]]) -> None:
        super().__init__(detail)
        self.cells = cells


class VerificationFailure(BetheZerosError):
    exit_code = 4

    def __init__(self, detail: str, counterexample: dict[str, Any]) -> None:
        super().__init__(detail)
        self.counterexample = counterexample
