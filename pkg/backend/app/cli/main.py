import argparse
import sys
from typing import NoReturn

from app.cli.commands import solve, table, verify, zeros
from app.core.config import settings


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors are validation errors: exit 1, keeping 2 for non-convergence."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="Zeros of Askey-scheme polynomials as minima of convex Morse functions.",
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level (to stderr).")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (solve, zeros, table, verify):
        command.register(subparsers)
    return parser
