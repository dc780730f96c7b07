"""Typer CLI for fracspline: coeffs, eval, reproduce, reproduce2d, check, probe, figures."""

from __future__ import annotations

import logging
import math
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer
from pydantic import ValidationError

from fracspline.config import (
    CHECK_DELTA_TERMS,
    CHECK_DERIVATIVE_BETA,
    CHECK_DERIVATIVE_RANGE,
    CHECK_DERIVATIVE_SMOOTH_ALPHA,
    CHECK_TOLERANCES,
    DEFAULT_CHECK_ALPHAS,
    DEFAULT_EVAL_RANGE,
    DEFAULT_HALF_WIDTH,
    DEFAULT_PROBE_RANGE,
    DEFAULT_REPRODUCE_RANGE,
    DEFAULT_SYMMETRIC_RANGE,
    DEFAULT_SYMMETRIC_TOLERANCE,
    DEFAULT_TERMS,
    DEFAULT_TOLERANCE,
    resolve_output_dir,
    resolve_tolerance,
)
from fracspline.models import (
    CheckReport,
    Command,
    CsvTable,
    FracSplineError,
    QuadrantMode,
    RunConfig,
    SplineKind,
    first_error_message,
)

logger = logging.getLogger("fracspline.cli")

app = typer.Typer(
    name="fracspline",
    help="Fractional B-splines: coefficients, evaluation, monomial reproduction, identity checks.",
    no_args_is_help=True,
)

EXIT_USAGE = 2
EXIT_TOLERANCE = 3
EXIT_IO = 4

FIGURE_SETS = ("fig1", "fig2", "fig3")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _config(**kwargs) -> RunConfig:
    """Validate CLI arguments; exit 2 naming the offending flag."""
    try:
        return RunConfig(**kwargs)
    except ValidationError as e:
        typer.echo(f"Error: {first_error_message(e)}", err=True)
        raise typer.Exit(EXIT_USAGE) from None


@contextmanager
def _usage_errors() -> Iterator[None]:
    """Map argument-domain failures from the library to exit code 2."""
    try:
        yield
    except (FracSplineError, ValueError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(EXIT_USAGE) from None


def _emit(table: CsvTable, out: Path | None) -> None:
    """Write *table* to *out*, or to stdout when no path is given."""
    from fracspline.formatter import format_csv, write_csv

    if out is None:
        typer.echo(format_csv(table), nl=False)
        return
    try:
        write_csv(table, out)
    except OSError as e:
        typer.echo(f"Error: cannot write {out}: {e}", err=True)
        raise typer.Exit(EXIT_IO) from None
    logger.info("wrote %d rows to %s", len(table.rows), out)


def _reproduce_tolerance(cfg: RunConfig, alpha: float) -> float:
    if cfg.kind is SplineKind.CAUSAL:
        default = DEFAULT_TOLERANCE
    elif cfg.quadrant is not QuadrantMode.FULL or (alpha >= 0 and alpha % 2 == 0):
        # quadrant targets and the slowly converging even orders are measured, not judged
        default = math.inf
    else:
        default = DEFAULT_SYMMETRIC_TOLERANCE
    return resolve_tolerance(cfg.tol, default)


def _judge(max_interior_error: float, tol: float) -> None:
    if max_interior_error > tol:
        typer.echo(
            f"Error: max interior error {max_interior_error:.3e} exceeds tolerance {tol:.1e}",
            err=True,
        )
        raise typer.Exit(EXIT_TOLERANCE)


@app.callback()
def _root(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr"),
) -> None:
    """Configure logging; stdout stays reserved for CSV and reports."""
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


# ---------------------------------------------------------------------------
# fracspline coeffs
# ---------------------------------------------------------------------------


@app.command()
def coeffs(
    alpha: float = typer.Option(None, "--alpha", help="Spline order, > -1"),
    kind: SplineKind = typer.Option(SplineKind.CAUSAL, "--kind", case_sensitive=False),
    terms: int = typer.Option(DEFAULT_TERMS, "--terms", "-n", help="Number of coefficients"),
    out: Path = typer.Option(None, "--out", help="CSV output path (default: stdout)"),
) -> None:
    """Emit mask, detail mask and reproduction coefficients for k = 0 .. N-1."""
    cfg = _config(command=Command.COEFFS, alpha=alpha, kind=kind, terms=terms, out=out)

    from fracspline.formatter import coeffs_table
    from fracspline.models import as_order
    from fracspline.reproduction import symmetric_reproduction_coeffs
    from fracspline.sequences import (
        causal_detail_mask,
        causal_mask,
        reproduction_coeffs_causal,
        symmetric_detail_mask,
        symmetric_mask,
    )

    with _usage_errors():
        order = as_order(cfg.alpha)
        if cfg.kind is SplineKind.CAUSAL:
            mask, detail = causal_mask(order), causal_detail_mask(order, normalized=True)
            plain = causal_detail_mask(order)
            p = reproduction_coeffs_causal(order)
        else:
            mask, detail = symmetric_mask(order), symmetric_detail_mask(order, normalized=True)
            plain = symmetric_detail_mask(order)
            # even orders have no single reproduction sequence
            p = None if order.is_even_nonneg else symmetric_reproduction_coeffs(order)
        table = coeffs_table(order.alpha, cfg.terms, mask, detail, plain, p)
    table.comments.append(f"kind={cfg.kind.value}")
    _emit(table, cfg.out)


# ---------------------------------------------------------------------------
# fracspline eval
# ---------------------------------------------------------------------------


@app.command(name="eval")
def eval_cmd(
    alpha: float = typer.Option(None, "--alpha", help="Spline order, > -1"),
    kind: SplineKind = typer.Option(SplineKind.CAUSAL, "--kind", case_sensitive=False),
    x0: float = typer.Option(None, "--x0", help="Grid start"),
    x1: float = typer.Option(None, "--x1", help="Grid end (exclusive unless --spectral)"),
    step: float = typer.Option(None, "--step", help="Grid spacing"),
    max_terms: int = typer.Option(4096, "--max-terms", help="Pairs summed without tail model"),
    tail_correction: bool = typer.Option(
        True, "--tail-correction/--no-tail-correction", help="Model the series tail"
    ),
    spectral: bool = typer.Option(False, "--spectral", help="Spectral oracle (symmetric only)"),
    out: Path = typer.Option(None, "--out", help="CSV output path (default: stdout)"),
) -> None:
    """Evaluate a fractional B-spline over a grid."""
    cfg = _config(
        command=Command.EVAL,
        alpha=alpha,
        kind=kind,
        x0=x0,
        x1=x1,
        step=step,
        max_terms=max_terms,
        tail_correction=tail_correction,
        spectral=spectral,
        out=out,
    )

    from fracspline.formatter import eval_table, format_real
    from fracspline.models import Strategy
    from fracspline.splines import (
        FractionalSpline,
        compare_symmetric_spectral,
        eval_symmetric_spline,
        eval_symmetric_spline_spectral,
    )

    default = DEFAULT_EVAL_RANGE if cfg.kind is SplineKind.CAUSAL else DEFAULT_SYMMETRIC_RANGE
    head = [f"kind={cfg.kind.value}", f"alpha={format_real(cfg.alpha)}"]
    with _usage_errors():
        if cfg.spectral:
            grid = cfg.grid(default, closed=True)
            values = eval_symmetric_spline_spectral(cfg.alpha, grid)
            report = compare_symmetric_spectral(cfg.alpha, grid, trunc=cfg.truncation())
            table = eval_table(grid.points(), values, head + ["strategy=spectral_grid"])
            table.footer.append(f"scale={format_real(report.details['scale'])}")
            table.footer.append(f"relative_misfit={format_real(report.residual)}")
            _emit(table, cfg.out)
            return

        grid = cfg.grid(default)
        spline = FractionalSpline.default(cfg.kind, cfg.alpha).model_copy(
            update={"truncation": cfg.truncation()}
        )
        head.append(f"strategy={spline.strategy.value}")
        if spline.strategy is Strategy.TRUNCATED_SERIES:
            values, bound = eval_symmetric_spline(cfg.alpha, grid.points(), spline.truncation)
            table = eval_table(grid.points(), values, head, tail_bound=bound)
        else:
            table = eval_table(grid.points(), spline.evaluate_grid(grid), head)
    _emit(table, cfg.out)


# ---------------------------------------------------------------------------
# fracspline reproduce
# ---------------------------------------------------------------------------


@app.command()
def reproduce(
    alpha: float = typer.Option(None, "--alpha", help="Monomial order, > -1"),
    kind: SplineKind = typer.Option(SplineKind.CAUSAL, "--kind", case_sensitive=False),
    x0: float = typer.Option(None, "--x0", help="Grid start"),
    x1: float = typer.Option(None, "--x1", help="Grid end (exclusive)"),
    step: float = typer.Option(None, "--step", help="Grid spacing"),
    half_width: int = typer.Option(DEFAULT_HALF_WIDTH, "--half-width", help="Symmetric window"),
    slope: bool = typer.Option(False, "--slope", help="Also measure the error at half width"),
    tol: float = typer.Option(None, "--tol", help="Max interior error allowed (exit 3 above)"),
    out: Path = typer.Option(None, "--out", help="CSV output path (default: stdout)"),
) -> None:
    """Reproduce x_+^alpha or |x|^alpha from shifted splines and report the error."""
    cfg = _config(
        command=Command.REPRODUCE,
        alpha=alpha,
        kind=kind,
        x0=x0,
        x1=x1,
        step=step,
        half_width=half_width,
        tol=tol,
        out=out,
    )

    from fracspline.display import display_reproduction
    from fracspline.formatter import format_reproduction_summary, reproduction_table
    from fracspline.reproduction import reproduce_causal, reproduce_symmetric

    with _usage_errors():
        if cfg.kind is SplineKind.CAUSAL:
            result = reproduce_causal(cfg.alpha, cfg.grid(DEFAULT_REPRODUCE_RANGE))
        else:
            grid = cfg.grid(DEFAULT_SYMMETRIC_RANGE)
            result = reproduce_symmetric(cfg.alpha, grid, cfg.half_width, measure_slope=slope)

    limit = _reproduce_tolerance(cfg, cfg.alpha)
    _emit(reproduction_table(result), cfg.out)
    display_reproduction(format_reproduction_summary(result, limit))
    _judge(result.max_interior_error, limit)


# ---------------------------------------------------------------------------
# fracspline reproduce2d
# ---------------------------------------------------------------------------


@app.command()
def reproduce2d(
    alpha: float = typer.Option(None, "--alpha", help="Order along x, > -1"),
    alpha2: float = typer.Option(None, "--alpha2", help="Order along y, > -1"),
    kind: SplineKind = typer.Option(SplineKind.CAUSAL, "--kind", case_sensitive=False),
    x0: float = typer.Option(None, "--x0", help="Grid start (both axes)"),
    x1: float = typer.Option(None, "--x1", help="Grid end, exclusive (both axes)"),
    step: float = typer.Option(None, "--step", help="Grid spacing (both axes)"),
    half_width: int = typer.Option(DEFAULT_HALF_WIDTH, "--half-width", help="Symmetric window"),
    quadrant: QuadrantMode = typer.Option(
        QuadrantMode.FULL, "--quadrant", case_sensitive=False, help="Restrict k1*k2 by sign"
    ),
    tol: float = typer.Option(None, "--tol", help="Max interior error allowed (exit 3 above)"),
    out: Path = typer.Option(None, "--out", help="CSV output path (default: stdout)"),
) -> None:
    """Reproduce a separable 2D monomial on a square grid."""
    cfg = _config(
        command=Command.REPRODUCE2D,
        alpha=alpha,
        alpha2=alpha2,
        kind=kind,
        x0=x0,
        x1=x1,
        step=step,
        half_width=half_width,
        quadrant=quadrant,
        tol=tol,
        out=out,
    )

    from fracspline.display import display_reproduction
    from fracspline.formatter import format_reproduction_summary, reproduction_table
    from fracspline.models import Grid2D
    from fracspline.reproduction import reproduce_2d, reproduce_2d_quadrant

    default = DEFAULT_REPRODUCE_RANGE if cfg.kind is SplineKind.CAUSAL else DEFAULT_SYMMETRIC_RANGE
    with _usage_errors():
        axis = cfg.grid(default)
        grid2d = Grid2D(x=axis, y=axis)
        if cfg.quadrant is QuadrantMode.FULL:
            result = reproduce_2d(cfg.kind, cfg.alpha, cfg.alpha2, grid2d, cfg.half_width)
        else:
            result = reproduce_2d_quadrant(
                cfg.alpha, cfg.alpha2, grid2d, cfg.quadrant, cfg.half_width
            )

    limit = min(_reproduce_tolerance(cfg, cfg.alpha), _reproduce_tolerance(cfg, cfg.alpha2))
    _emit(reproduction_table(result), cfg.out)
    display_reproduction(format_reproduction_summary(result, limit))
    _judge(result.max_interior_error, limit)


# ---------------------------------------------------------------------------
# fracspline check
# ---------------------------------------------------------------------------


def _run_checks(alpha: float, normalized: bool, tol: float | None) -> list[CheckReport]:
    from fracspline.models import Grid1D
    from fracspline.sequences import (
        causal_detail_mask,
        check_delta,
        check_det_condition,
        reproduction_coeffs_causal,
    )
    from fracspline.splines import check_derivative_relation, convolution_identity_residual

    delta = check_delta(
        causal_detail_mask(alpha, normalized=normalized),
        reproduction_coeffs_causal(alpha),
        CHECK_DELTA_TERMS,
        resolve_tolerance(tol, CHECK_TOLERANCES["delta"]),
    ).model_copy(update={"alpha": alpha, "note": "normalized detail" if normalized else ""})
    det = check_det_condition(alpha, tol=resolve_tolerance(tol, CHECK_TOLERANCES["det_condition"]))
    conv = convolution_identity_residual(
        alpha, alpha, tol=resolve_tolerance(tol, CHECK_TOLERANCES["convolution_identity"])
    )
    x0, x1, step = CHECK_DERIVATIVE_RANGE
    if alpha >= CHECK_DERIVATIVE_SMOOTH_ALPHA:
        beta, key, note = CHECK_DERIVATIVE_BETA, "derivative_relation", ""
    else:
        beta = max(0.0, min(CHECK_DERIVATIVE_BETA, alpha / 2.0))
        key, note = "derivative_relation_rough", f"rough spline, beta={beta:g}"
    deriv = check_derivative_relation(
        alpha, beta, Grid1D.closed(x0, x1, step), tol=resolve_tolerance(tol, CHECK_TOLERANCES[key])
    ).model_copy(update={"note": note})
    return [delta, det, conv, deriv]


@app.command()
def check(
    alpha: list[float] = typer.Option(None, "--alpha", help="Order to check; repeatable"),
    normalized: bool = typer.Option(
        False, "--normalized/--unnormalized", help="Use the normalized detail in the delta check"
    ),
    tol: float = typer.Option(None, "--tol", help="Override every identity's tolerance"),
    table: bool = typer.Option(False, "--table", help="Also render a rich table on stderr"),
) -> None:
    """Run the identity checks; exit 3 if any fails."""
    alphas = list(alpha) if alpha else list(DEFAULT_CHECK_ALPHAS)
    cfg = _config(command=Command.CHECK, alphas=alphas, normalized=normalized, tol=tol)

    from fracspline.display import display_checks
    from fracspline.formatter import format_check_report

    reports = []
    with _usage_errors():
        for a in cfg.alphas:
            reports.extend(_run_checks(a, cfg.normalized, cfg.tol))

    typer.echo(format_check_report(reports))
    if table:
        display_checks(reports)
    if not all(r.passed for r in reports):
        raise typer.Exit(EXIT_TOLERANCE)


# ---------------------------------------------------------------------------
# fracspline probe
# ---------------------------------------------------------------------------


@app.command()
def probe(
    alpha: float = typer.Option(None, "--alpha", help="Spline order, > -1"),
    window: list[int] = typer.Option(None, "--window", help="Shift window K; repeatable"),
    x_point: float = typer.Option(2.0, "--x", help="Point for the pointwise error"),
    step: float = typer.Option(None, "--step", help="Spacing of the sup-error grid"),
    partition: bool = typer.Option(False, "--partition", help="Partition-of-unity table instead"),
    out: Path = typer.Option(None, "--out", help="CSV output path (default: stdout)"),
) -> None:
    """Measure ordinary linear reproduction as the shift window grows."""
    cfg = _config(command=Command.PROBE, alpha=alpha, step=step, out=out)

    from fracspline.reproduction import partition_of_unity_probe, probe_nonuniform_convergence

    windows = list(window) if window else [15, 30, 60, 120, 240]
    if any(k < 1 for k in windows):
        typer.echo("Error: --window must be at least 1", err=True)
        raise typer.Exit(EXIT_USAGE)
    with _usage_errors():
        if partition:
            table = partition_of_unity_probe(cfg.alpha, [0.3, 1.7], windows)
        else:
            spacing = DEFAULT_PROBE_RANGE[2] if cfg.step is None else cfg.step
            table = probe_nonuniform_convergence(cfg.alpha, windows, x_point, spacing)
    _emit(table, cfg.out)
    if cfg.out is not None:
        from fracspline.display import display_table_preview

        display_table_preview(table)


# ---------------------------------------------------------------------------
# fracspline figures
# ---------------------------------------------------------------------------


def _figure_tables(name: str) -> dict[str, CsvTable]:
    from fracspline.formatter import reproduction_table
    from fracspline.models import Grid1D, Grid2D
    from fracspline.reproduction import reproduce_2d, reproduce_causal, reproduce_symmetric

    tables: dict[str, CsvTable] = {}
    if name == "fig1":
        grid = Grid1D.closed(0.0, 8.0, 0.01)
        for a in (0.2, 0.75, 1.0, 1.25):
            tables[f"fig1_causal_{a:g}.csv"] = reproduction_table(reproduce_causal(a, grid))
    elif name == "fig2":
        grid = Grid1D.closed(-4.0, 4.0, 0.05)
        for a in (0.5, 1.0, 1.5, 2.0):
            result = reproduce_symmetric(a, grid, DEFAULT_HALF_WIDTH)
            tables[f"fig2_symmetric_{a:g}.csv"] = reproduction_table(result)
    else:
        causal = Grid1D.closed(0.0, 4.0, 0.125)
        result = reproduce_2d(SplineKind.CAUSAL, 0.25, 8.0 / 3.0, Grid2D(x=causal, y=causal))
        tables["fig3_causal_0.25_2.667.csv"] = reproduction_table(result)
        symmetric = Grid1D.closed(-3.0, 3.0, 0.125)
        result = reproduce_2d(
            SplineKind.SYMMETRIC, 0.5, 1.5, Grid2D(x=symmetric, y=symmetric), DEFAULT_HALF_WIDTH
        )
        tables["fig3_symmetric_0.5_1.5.csv"] = reproduction_table(result)
    return tables


@app.command()
def figures(
    out: Path = typer.Option(None, "--out", help="Output directory (env: FRACSPLINE_OUTPUT_DIR)"),
    only: list[str] = typer.Option(None, "--only", help="fig1, fig2 or fig3; repeatable"),
) -> None:
    """Regenerate the figure datasets as CSV files."""
    cfg = _config(command=Command.FIGURES, out=out)
    selected = list(only) if only else list(FIGURE_SETS)
    unknown = [s for s in selected if s not in FIGURE_SETS]
    if unknown:
        typer.echo(f"Error: unknown figure set {unknown[0]!r}", err=True)
        raise typer.Exit(EXIT_USAGE)

    from fracspline.display import display_figures_summary

    out_dir = resolve_output_dir(cfg.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        typer.echo(f"Error: cannot create {out_dir}: {e}", err=True)
        raise typer.Exit(EXIT_IO) from None

    written: list[str] = []
    for name in selected:
        for filename, table in _figure_tables(name).items():
            _emit(table, out_dir / filename)
            written.append(filename)
    display_figures_summary(str(out_dir), written)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def main() -> None:
    """CLI entry point."""
    app()


if __name__ == "__main__":
    main()
