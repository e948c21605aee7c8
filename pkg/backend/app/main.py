import logging
import sys
from collections.abc import Sequence

import sentry_sdk
from pydantic import ValidationError

from app.cli.deps import raise_for_report
from app.cli.main import build_parser
from app.cli.render import render
from app.core.config import settings
from app.core.errors import BetheZerosError

logger = logging.getLogger(__name__)

if settings.SENTRY_DSN and settings.ENVIRONMENT != "local":
    sentry_sdk.init(dsn=str(settings.SENTRY_DSN), enable_tracing=True)


def _first_error(e: ValidationError) -> str:
    error = e.errors()[0]
    location = ".".join(str(part) for part in error["loc"])
    return f"{location}: {error['msg']}" if location else error["msg"]


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the command and return the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else settings.LOG_LEVEL)
    try:
        report = args.handler(args)
        sys.stdout.write(render(report, args.format))
        raise_for_report(report)
    except ValidationError as e:
        sys.stderr.write(f"error: invalid input: {_first_error(e)}\n")
        return 1
    except BetheZerosError as e:
        logger.debug(f"{type(e).__name__}: {e.detail}")
        sys.stderr.write(f"error: {e.detail}\n")
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(run())
