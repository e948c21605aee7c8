"""Options and input handling shared by the commands."""

import argparse
import json
import time
from collections.abc import Iterator
from contextlib import contextmanager
from importlib import metadata
from pathlib import Path
from typing import Any

from app.core.config import settings
from app.core.errors import DomainError, TableMismatchError, VerificationFailure
from app.models import BetheSystem, PolynomialFamily, PolynomialSpec, RunReport, SolverConfig
from app.services.bethe_system import make_rho, make_rho_tilde_and_beta

FORMATS = ("table", "csv", "json")


def add_format_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default="table", help="Output format.")
    parser.add_argument(
        "--timings",
        action="store_true",
        help="Add wall-clock timings (ms) to the report; output is then no longer reproducible.",
    )


def add_solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--tol",
        type=float,
        default=settings.SOLVER_GRAD_TOL,
        help=f"Gradient tolerance, scaled by the largest weight (default: {settings.SOLVER_GRAD_TOL:g}).",
    )
    parser.add_argument(
        "--max-iters",
        type=int,
        default=settings.SOLVER_MAX_ITERS,
        dest="max_iters",
        help=f"Newton iteration cap (default: {settings.SOLVER_MAX_ITERS}).",
    )
    parser.add_argument(
        "--fd-check",
        action="store_true",
        dest="fd_check",
        help="Compare the gradient with finite differences of the Morse function first.",
    )


def solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(grad_tol=args.tol, max_iters=args.max_iters, fd_check=args.fd_check)


def parse_params(text: str) -> list[str]:
    """Comma-separated values; complex entries are written like 1.2+0.5i."""
    return [item.strip() for item in text.split(",") if item.strip()]


def spec_from_args(args: argparse.Namespace) -> PolynomialSpec:
    return PolynomialSpec(family=PolynomialFamily(args.family), n=args.n, params=args.params)


def load_document(path: str) -> dict[str, Any]:
    try:
        document = json.loads(Path(path).read_text())
    except OSError as e:
        raise DomainError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise DomainError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(document, dict) or len({"system", "polynomial"} & document.keys()) != 1:
        raise DomainError('config must hold exactly one of the keys "system" or "polynomial"')
    return document


def with_default_weights(raw: dict[str, Any]) -> dict[str, Any]:
    """Fill mu (and beta or epsilon) with the minimal choice when left out."""
    data = dict(raw)
    n = data.get("n")
    if not isinstance(n, int):
        return data
    if data.get("stype") == "A":
        rho_tilde, beta_n = make_rho_tilde_and_beta(n)
        data.setdefault("mu", rho_tilde)
        data.setdefault("beta", beta_n)
    else:
        data.setdefault("mu", make_rho(n))
        data.setdefault("epsilon", 0)
    return data


def parse_system(raw: dict[str, Any]) -> BetheSystem:
    return BetheSystem.model_validate(with_default_weights(raw))


def parse_polynomial(raw: dict[str, Any]) -> PolynomialSpec:
    return PolynomialSpec.model_validate(raw)


class Stopwatch:
    """Collects phase timings in milliseconds, only when asked to."""

    def __init__(self, enabled: bool) -> None:
        self.enabled = enabled
        self.timings: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            if self.enabled:
                self.timings[name] = round(1000 * (time.perf_counter() - start), 3)

    def result(self) -> dict[str, float] | None:
        return self.timings if self.enabled else None


def raise_for_report(report: RunReport) -> None:
    """Turn a completed report with failed checks into its exit-code error."""
    if report.mismatches:
        cells = [m.model_dump() for m in report.mismatches]
        listing = ", ".join(f"{m.row}[{m.j}]={m.actual:.6f} (expected {m.expected})" for m in report.mismatches)
        raise TableMismatchError(f"table mismatch beyond tolerance: {listing}", cells)
    if report.verification is not None and not report.verification.passed:
        counterexample = report.verification.counterexample or {}
        failed = next(r for r in report.verification.results if not r.passed)
        raise VerificationFailure(
            f"verification case {failed.index} ({failed.label}) failed: {failed.failure}; "
            f"reproduce with: {json.dumps(counterexample, sort_keys=True)}",
            counterexample,
        )


def tool_version() -> str:
    try:
        return metadata.version(settings.PROJECT_NAME)
    except metadata.PackageNotFoundError:
        return "0.1.0"
