"""CSV serialization and plain-text reports for CLI output."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from fracspline.models import CheckReport, CsvTable, ReproductionResult
from fracspline.sequences import CoefficientSequence

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def format_real(value: float) -> str:
    """17 significant digits, enough to recover the binary value."""
    return f"{float(value):.17g}"


def _parse_real(text: str) -> float:
    return float(text.strip())


def _comment(line: str) -> str:
    return f"# {line}" if line else "#"


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def format_csv(table: CsvTable) -> str:
    """Serialize *table*: comments, header, rows, footer, newline-terminated."""
    lines = [_comment(c) for c in table.comments]
    lines.append(",".join(table.header))
    lines.extend(",".join(format_real(v) for v in row) for row in table.rows)
    lines.extend(_comment(c) for c in table.footer)
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> CsvTable:
    """Inverse of :func:`format_csv`."""
    comments: list[str] = []
    footer: list[str] = []
    header: list[str] | None = None
    rows: list[list[float]] = []
    for raw in text.splitlines():
        if not raw:
            continue
        if raw.startswith("#"):
            body = raw[2:] if raw.startswith("# ") else raw[1:]
            (comments if header is None else footer).append(body)
        elif header is None:
            header = raw.split(",")
        else:
            if footer:
                raise ValueError("data row after footer comments")
            rows.append([_parse_real(cell) for cell in raw.split(",")])
    if header is None:
        raise ValueError("CSV has no header row")
    return CsvTable(header=header, rows=rows, comments=comments, footer=footer)


def write_csv(table: CsvTable, path: Path) -> Path:
    """Write *table* to *path*, creating parent directories. Raises OSError on failure."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(table), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def coeffs_table(
    alpha: float,
    count: int,
    mask: CoefficientSequence,
    detail: CoefficientSequence,
    detail_unnormalized: CoefficientSequence,
    reproduction: CoefficientSequence | None,
) -> CsvTable:
    """Columns k, a_k, b_k (normalized), b_tilde_k (unnormalized), p_k for k = 0 .. count − 1.

    Without a reproduction sequence the p_k column is omitted.
    """
    hi = count - 1
    columns = [
        np.arange(count, dtype=float),
        mask.values(0, hi),
        detail.values(0, hi),
        detail_unnormalized.values(0, hi),
    ]
    header = ["k", "a_k", "b_k", "b_tilde_k"]
    if reproduction is not None:
        columns.append(reproduction.values(0, hi))
        header.append("p_k")
    rows = [[float(v) for v in row] for row in zip(*columns, strict=True)]
    return CsvTable(header=header, rows=rows, comments=[f"alpha={format_real(alpha)}"])


def eval_table(
    x: np.ndarray,
    values: np.ndarray,
    comments: list[str],
    tail_bound: float | None = None,
) -> CsvTable:
    """Columns x, value and, for truncated evaluation, the tail bound."""
    if tail_bound is None:
        return CsvTable(
            header=["x", "value"],
            rows=[[float(a), float(v)] for a, v in zip(x, values, strict=True)],
            comments=comments,
        )
    return CsvTable(
        header=["x", "value", "tail_bound"],
        rows=[[float(a), float(v), tail_bound] for a, v in zip(x, values, strict=True)],
        comments=comments,
    )


def _result_footer(result: ReproductionResult) -> list[str]:
    footer = [
        f"max_error={format_real(result.max_error)}",
        f"max_interior_error={format_real(result.max_interior_error)}",
    ]
    if result.shift_window is not None:
        footer.append(f"shift_window={result.shift_window[0]}..{result.shift_window[1]}")
    if result.half_width is not None:
        footer.append(f"half_width={result.half_width}")
    if result.tail_bound:
        footer.append(f"tail_bound={format_real(result.tail_bound)}")
    if result.error_slope is not None:
        footer.append(f"error_slope={format_real(result.error_slope)}")
    for lo, hi in result.excluded:
        footer.append(f"excluded={format_real(lo)}..{format_real(hi)}")
    for key in sorted(result.details):
        footer.append(f"{key}={format_real(result.details[key])}")
    footer.extend(f"note={n}" for n in result.notes)
    return footer


def reproduction_table(result: ReproductionResult) -> CsvTable:
    """1D rows (x, target, reconstruction, abs_error); 2D rows add y, row-major over y."""
    head = [f"kind={result.kind.value}", f"alpha={format_real(result.alpha)}"]
    if result.y is None:
        rows = [
            [float(v) for v in row]
            for row in zip(
                result.x, result.target, result.reconstruction, result.abs_error, strict=True
            )
        ]
        return CsvTable(
            header=["x", "target", "reconstruction", "abs_error"],
            rows=rows,
            comments=head,
            footer=_result_footer(result),
        )
    if result.alpha2 is not None:
        head.append(f"alpha2={format_real(result.alpha2)}")
    rows = []
    for i, y in enumerate(result.y):
        for j, x in enumerate(result.x):
            rows.append(
                [
                    float(x),
                    float(y),
                    float(result.target[i, j]),
                    float(result.reconstruction[i, j]),
                    float(result.abs_error[i, j]),
                ]
            )
    return CsvTable(
        header=["x", "y", "target", "reconstruction", "abs_error"],
        rows=rows,
        comments=head,
        footer=_result_footer(result),
    )


# ---------------------------------------------------------------------------
# Text reports
# ---------------------------------------------------------------------------


def _status(report: CheckReport) -> str:
    if report.skipped:
        return "SKIP"
    return "PASS" if report.passed else "FAIL"


def format_check_line(report: CheckReport) -> str:
    """One line: status, identity, alpha, residual against tolerance, and any note."""
    alpha = "-" if report.alpha is None else f"{report.alpha:g}"
    parts = [
        f"{_status(report):4}",
        f"{report.name:22}",
        f"alpha={alpha:6}",
        f"residual={report.residual:.3e}",
        f"tol={report.tolerance:.1e}",
    ]
    if report.location is not None and not report.skipped:
        parts.append(f"at={report.location:g}")
    if "observed_scale" in report.details and not report.passed:
        parts.append(f"scale={report.details['observed_scale']:.6g}")
    if report.note:
        parts.append(f"({report.note})")
    return "  ".join(parts)


def format_check_report(reports: list[CheckReport]) -> str:
    """All check lines followed by a summary line."""
    lines = [format_check_line(r) for r in reports]
    failed = sum(1 for r in reports if not r.passed)
    skipped = sum(1 for r in reports if r.skipped)
    passed = len(reports) - failed - skipped
    lines.append(f"{passed} passed, {failed} failed, {skipped} skipped")
    return "\n".join(lines)


def format_reproduction_summary(result: ReproductionResult, tol: float) -> str:
    """Markdown summary of a reproduction run."""
    title = f"{result.kind.value} reproduction, alpha={result.alpha:g}"
    if result.alpha2 is not None:
        title += f", alpha2={result.alpha2:g}"
    verdict = "within" if result.max_interior_error <= tol else "**exceeds**"
    parts = [f"## {title}\n"]
    parts.append(
        f"- max interior error: {result.max_interior_error:.3e} ({verdict} tol {tol:.1e})"
    )
    parts.append(f"- max error: {result.max_error:.3e}")
    if result.half_width is not None:
        parts.append(f"- half width: {result.half_width}")
    if result.tail_bound and math.isfinite(result.tail_bound):
        parts.append(f"- tail bound: {result.tail_bound:.3e}")
    if result.error_slope is not None:
        parts.append(f"- error slope per doubling: {result.error_slope:.2f}")
    for note in result.notes:
        parts.append(f"- {note}")
    return "\n".join(parts)
