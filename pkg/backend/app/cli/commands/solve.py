import argparse

from app.cli.deps import (
    Stopwatch,
    add_format_option,
    add_solver_options,
    load_document,
    parse_polynomial,
    parse_system,
    solver_config,
    tool_version,
)
from app.models import RootRow, RunReport
from app.services.bethe_system import bethe_residual
from app.services.bounds import bound_box
from app.services.polyzeros import family_to_bethe
from app.services.solver import solve


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser(
        "solve",
        help="Solve a Bethe system given as JSON.",
        description=(
            'Minimize the Morse function of the system in CONFIG. CONFIG holds {"system": {...}} '
            'or {"polynomial": {...}}; a polynomial is solved through its Bethe system.'
        ),
    )
    parser.add_argument("config", help="Path to the JSON config.")
    add_solver_options(parser)
    add_format_option(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> RunReport:
    clock = Stopwatch(args.timings)
    document = load_document(args.config)
    if "polynomial" in document:
        spec = parse_polynomial(document["polynomial"])
        system = family_to_bethe(spec)
        inputs = {"polynomial": spec.model_dump(mode="json")}
    else:
        system = parse_system(document["system"])
        inputs = {"system": system.model_dump(mode="json")}

    with clock.phase("solve"):
        solution = solve(system, solver_config(args))
    with clock.phase("bounds"):
        box = bound_box(system)
        residuals = bethe_residual(system, solution.xi)
    rows = [
        RootRow(
            j=j,
            root=root,
            lower=box.coord_lower[j - 1],
            upper=box.coord_upper[j - 1],
            bethe_residual=float(residuals[j - 1]),
        )
        for j, root in enumerate(solution.xi, start=1)
    ]
    return RunReport(
        version=tool_version(),
        command="solve",
        inputs=inputs,
        rows=rows,
        iterations=solution.iterations,
        grad_norm=solution.grad_norm,
        grad_tol=solution.grad_tol,
        bethe_residual_max=solution.bethe_residual_max,
        within_bounds=solution.within_bounds,
        kappa_minus=box.kappa_minus,
        kappa_plus=box.kappa_plus,
        timings_ms=clock.result(),
    )
