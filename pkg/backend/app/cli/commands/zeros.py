import argparse

import numpy as np

from app.cli.deps import (
    Stopwatch,
    add_format_option,
    add_solver_options,
    parse_params,
    solver_config,
    spec_from_args,
    tool_version,
)
from app.models import PolynomialFamily, PolynomialSpec, RootRow, RunReport, SolverConfig
from app.services.bethe_system import bethe_residual
from app.services.bounds import bound_box, family_k_pm, positive_zero_lower_bounds
from app.services.polyzeros import (
    de_residuals,
    family_to_bethe,
    solve_family,
    zeros_via_oracle,
)


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser(
        "zeros",
        help="Zeros of a Wilson, Askey-Wilson or continuous Hahn polynomial.",
        description=(
            "Compute the zeros through the Bethe system and through the series oracle, "
            "with their a-priori bounds. A first parameter below zero must be passed "
            "as --params=-0.2,..."
        ),
    )
    parser.add_argument("--family", choices=[f.value for f in PolynomialFamily], required=True)
    parser.add_argument("--n", type=int, required=True, help="Degree of the polynomial.")
    parser.add_argument(
        "--params",
        type=parse_params,
        required=True,
        help="Comma-separated parameters, e.g. 0.3,-0.2,0.15,0.1,0.1 or 1+0.5i,1-0.5i.",
    )
    parser.add_argument(
        "--no-oracle",
        action="store_false",
        dest="oracle",
        help="Skip the bisection cross-check.",
    )
    add_solver_options(parser)
    add_format_option(parser)
    parser.set_defaults(handler=run)


def zeros_report(
    spec: PolynomialSpec,
    config: SolverConfig | None,
    command: str,
    with_oracle: bool = True,
    clock: Stopwatch | None = None,
) -> RunReport:
    clock = clock or Stopwatch(False)
    system = family_to_bethe(spec)
    with clock.phase("bethe"):
        solution = solve_family(spec, config)
    roots = solution.as_array()
    oracle = None
    if with_oracle:
        with clock.phase("oracle"):
            oracle = zeros_via_oracle(spec)
    with clock.phase("certificates"):
        box = bound_box(system)
        residuals = bethe_residual(system, roots)
        de = de_residuals(spec, roots)
    lower = list(box.coord_lower)
    upper = list(box.coord_upper)
    if spec.family is PolynomialFamily.CONTINUOUS_HAHN:
        # positive zeros only have a lower bound; the rest stay open
        positive = positive_zero_lower_bounds(spec)
        lower = [*positive, *[-np.inf] * (spec.n - len(positive))]
    k_minus, k_plus = family_k_pm(spec.family, spec.n, list(spec.params))
    rows = [
        RootRow(
            j=j,
            root=float(root),
            lower=lower[j - 1],
            upper=upper[j - 1],
            oracle_root=None if oracle is None else float(oracle[j - 1]),
            bethe_residual=float(residuals[j - 1]),
            de_residual=float(de[j - 1]),
        )
        for j, root in enumerate(roots, start=1)
    ]
    return RunReport(
        version=tool_version(),
        command=command,
        inputs={"polynomial": spec.model_dump(mode="json")},
        rows=rows,
        iterations=solution.iterations,
        grad_norm=solution.grad_norm,
        grad_tol=solution.grad_tol,
        bethe_residual_max=solution.bethe_residual_max,
        within_bounds=solution.within_bounds,
        kappa_minus=box.kappa_minus,
        kappa_plus=box.kappa_plus,
        k_minus=k_minus,
        k_plus=k_plus,
        max_discrepancy=None if oracle is None else float(np.max(np.abs(oracle - roots))),
        de_residual=float(np.max(de)),
        timings_ms=clock.result(),
    )


def run(args: argparse.Namespace) -> RunReport:
    clock = Stopwatch(args.timings)
    return zeros_report(spec_from_args(args), solver_config(args), "zeros", args.oracle, clock)
