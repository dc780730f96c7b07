"""Shared fixtures and factories for fracspline tests."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from fracspline.models import CsvTable, Grid1D, ReproductionResult, SplineKind

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture()
def out_csv(tmp_path: Path) -> Path:
    """Return a CSV path inside a temp directory (file doesn't exist yet)."""
    return tmp_path / "out" / "table.csv"


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    """Keep FRACSPLINE_* overrides from the caller's shell out of tests."""
    monkeypatch.delenv("FRACSPLINE_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("FRACSPLINE_TOL", raising=False)


@pytest.fixture()
def small_grid() -> Grid1D:
    return Grid1D.closed(0.0, 2.0, 0.5)


@pytest.fixture()
def sample_table() -> CsvTable:
    return CsvTable(
        header=["x", "value"], rows=SAMPLE_ROWS, comments=["alpha=0.5"], footer=["n=4"]
    )


@pytest.fixture()
def sample_result() -> ReproductionResult:
    x = np.array([0.0, 0.5, 1.0])
    target = np.sqrt(x)
    recon = target + np.array([0.0, 1e-12, -2e-12])
    return ReproductionResult(
        kind=SplineKind.CAUSAL,
        alpha=0.5,
        x=x,
        target=target,
        reconstruction=recon,
        abs_error=np.abs(recon - target),
        max_error=2e-12,
        max_interior_error=2e-12,
        shift_window=(0, 1),
        excluded=[(0.0, 0.5)],
    )


# ---------------------------------------------------------------------------
# Sample data
# ---------------------------------------------------------------------------

SAMPLE_ROWS: list[list[float]] = [
    [0.0, 1.0],
    [0.1, 1.0 / 3.0],
    [-2.5, 1e-300],
    [1e20, -0.0],
]
