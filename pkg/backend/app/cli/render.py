import csv
import io
import math
from decimal import ROUND_HALF_UP, Decimal

from app.models import RootRow, RunReport

CSV_COLUMNS = ("j", "root", "lower", "upper", "oracle_root", "bethe_residual", "de_residual")
SUMMARY_FIELDS = (
    "grad_norm",
    "grad_tol",
    "bethe_residual_max",
    "kappa_minus",
    "kappa_plus",
    "k_minus",
    "k_plus",
    "max_discrepancy",
    "de_residual",
)


def three_decimals(value: float) -> str:
    """Round half away from zero to 3 decimals; infinities print as inf / -inf."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    quantized = Decimal(repr(value)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP)
    # no "-0.000"
    return f"{quantized:.3f}" if quantized != 0 else "0.000"


def _exact(value: float | None) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _short(value: float | None) -> str:
    if value is None:
        return "-"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.3e}"


def render_json(report: RunReport) -> str:
    return report.model_dump_json(indent=2, exclude_none=True) + "\n"


def render_csv(report: RunReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow([row.j, *(_exact(getattr(row, c)) for c in CSV_COLUMNS[1:])])
    return buffer.getvalue()


def _row_line(row: RootRow) -> str:
    cells = [f"{row.j:>3}", f"{three_decimals(row.root):>10}"]
    for value in (row.lower, row.upper, row.oracle_root):
        cells.append(f"{three_decimals(value) if value is not None else '-':>10}")
    cells.append(f"{_short(row.bethe_residual):>12}")
    cells.append(f"{_short(row.de_residual):>12}")
    return " ".join(cells)


def render_table(report: RunReport) -> str:
    lines = [f"{report.tool} {report.version} {report.command}"]
    if report.rows:
        header = ["  j", "root", "lower", "upper", "oracle"]
        lines.append(
            " ".join(f"{h:>3}" if i == 0 else f"{h:>10}" for i, h in enumerate(header))
            + f" {'bethe_res':>12} {'de_res':>12}"
        )
        lines.extend(_row_line(row) for row in report.rows)
    if report.iterations is not None:
        lines.append(f"iterations: {report.iterations}")
    if report.within_bounds is not None:
        lines.append(f"within_bounds: {report.within_bounds}")
    for key in SUMMARY_FIELDS:
        value = getattr(report, key)
        if value is not None:
            lines.append(f"{key}: {_short(value)}")
    if report.mismatches is not None:
        if not report.mismatches:
            lines.append("check: all cells within tolerance")
        for m in report.mismatches:
            lines.append(f"mismatch: {m.row}[{m.j}] expected {m.expected} got {m.actual:.6f}")
    if report.verification is not None:
        v = report.verification
        passed = sum(r.passed for r in v.results)
        lines.append(f"verify: seed={v.seed} cases={v.cases} passed={passed}/{v.cases}")
        if v.warning:
            lines.append(f"warning: {v.warning}")
        lines.extend(
            f"  case {r.index} {r.label}: {r.failure}" for r in v.results if not r.passed
        )
    if report.timings_ms:
        lines.extend(f"time {name}: {ms} ms" for name, ms in report.timings_ms.items())
    return "\n".join(lines) + "\n"


def render(report: RunReport, fmt: str) -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    return render_table(report)
