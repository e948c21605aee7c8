import argparse

from app.cli.commands.zeros import zeros_report
from app.cli.deps import Stopwatch, add_format_option
from app.core.config import settings
from app.models import RunReport
from app.services.reference_tables import TABLES, compare_rows, get_table, get_table_spec


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser(
        "table",
        help="Reproduce one of the published root tables.",
    )
    parser.add_argument("--which", type=int, choices=sorted(TABLES), required=True)
    parser.add_argument(
        "--check",
        action="store_true",
        help=f"Compare with the printed values (tolerance {settings.TABLE_TOLERANCE:g}); exit 3 on mismatch.",
    )
    add_format_option(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> RunReport:
    table = get_table(args.which)
    report = zeros_report(
        get_table_spec(args.which), None, f"table {args.which}", clock=Stopwatch(args.timings)
    )
    # the continuous Hahn table prints the positive zeros only
    rows = report.rows[: len(table["rows"]["root"])]
    mismatches = None
    if args.check:
        actual: dict[str, list[float | None]] = {
            "root": [r.root for r in rows],
            "lower": [r.lower for r in rows],
            "upper": [r.upper for r in rows],
        }
        mismatches = compare_rows(table["rows"], actual, settings.TABLE_TOLERANCE)
    return report.model_copy(update={"rows": rows, "mismatches": mismatches})
