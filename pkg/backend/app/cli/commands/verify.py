import argparse

from app.cli.deps import Stopwatch, add_format_option, tool_version
from app.core.config import settings
from app.models import RunReport
from app.services.verification import verify


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser(
        "verify",
        help="Run the seeded property sweep.",
        description=(
            "Check Hessians, bounds, residuals and oracle agreement on random inputs. "
            "Cases run on up to BETHE_ZEROS_THREADS threads."
        ),
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--cases", type=int, default=25, help="Number of random cases.")
    parser.add_argument(
        "--threads",
        type=int,
        default=settings.BETHE_ZEROS_THREADS,
        help=f"Worker threads (default: {settings.BETHE_ZEROS_THREADS}).",
    )
    add_format_option(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> RunReport:
    clock = Stopwatch(args.timings)
    with clock.phase("verify"):
        report = verify(args.seed, args.cases, threads=args.threads)
    return RunReport(
        version=tool_version(),
        command="verify",
        inputs={"seed": args.seed, "cases": args.cases},
        verification=report,
        timings_ms=clock.result(),
    )
