"""Unit tests for fracspline Pydantic models."""

from __future__ import annotations

import numpy as np
import pytest
from pydantic import ValidationError

from fracspline.models import (
    Command,
    CsvTable,
    FracSplineError,
    Grid1D,
    InvalidSplit,
    Order,
    PreconditionViolated,
    QuadrantMode,
    ReproductionResult,
    RunConfig,
    SplineKind,
    TruncationPolicy,
    as_order,
    first_error_message,
)

# ---------------------------------------------------------------------------
# Order
# ---------------------------------------------------------------------------


class TestOrder:
    def test_flags(self):
        assert Order(alpha=2).is_even_nonneg
        assert Order(alpha=3).is_odd_nonneg
        assert not Order(alpha=0.5).is_integer
        assert Order(alpha=1.25).ceil == 2

    def test_bound(self):
        with pytest.raises(ValidationError):
            Order(alpha=-1.0)

    def test_not_finite(self):
        with pytest.raises(ValidationError):
            Order(alpha=float("inf"))

    def test_as_order_passthrough(self):
        o = Order(alpha=0.5)
        assert as_order(o) is o
        assert as_order(1.5).alpha == 1.5


# ---------------------------------------------------------------------------
# Grids and policies
# ---------------------------------------------------------------------------


class TestGrid1D:
    def test_half_open(self):
        g = Grid1D.from_range(0.0, 2.0, 0.5)
        assert list(g.points()) == [0.0, 0.5, 1.0, 1.5]

    def test_closed(self):
        g = Grid1D.closed(0.0, 2.0, 0.5)
        assert g.count == 5
        assert g.stop == 2.0

    def test_centered(self):
        g = Grid1D.centered(2, 0.25)
        np.testing.assert_array_equal(g.points(), [-0.5, -0.25, 0.0, 0.25, 0.5])

    def test_positive_step(self):
        with pytest.raises(ValidationError):
            Grid1D(start=0.0, step=0.0, count=3)


class TestTruncationPolicy:
    def test_defaults(self):
        policy = TruncationPolicy()
        assert policy.max_terms == 4096
        assert policy.tail_correction

    def test_max_terms_bound(self):
        with pytest.raises(ValidationError):
            TruncationPolicy(max_terms=0)


# ---------------------------------------------------------------------------
# Results and tables
# ---------------------------------------------------------------------------


class TestReproductionResult:
    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            ReproductionResult(
                kind=SplineKind.CAUSAL,
                alpha=0.5,
                x=np.zeros(3),
                target=np.zeros(3),
                reconstruction=np.zeros(3),
                abs_error=np.zeros(2),
                max_error=0.0,
                max_interior_error=0.0,
            )

    def test_fixture_defaults(self, sample_result):
        assert sample_result.y is None
        assert sample_result.notes == []


class TestCsvTable:
    def test_rectangular(self):
        with pytest.raises(ValidationError):
            CsvTable(header=["a", "b"], rows=[[1.0]])

    def test_empty_rows(self):
        assert CsvTable(header=["a"]).rows == []


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class TestErrors:
    def test_hierarchy(self):
        assert issubclass(InvalidSplit, FracSplineError)
        assert issubclass(InvalidSplit, ValueError)
        assert issubclass(PreconditionViolated, ValueError)


# ---------------------------------------------------------------------------
# RunConfig
# ---------------------------------------------------------------------------


class TestRunConfig:
    def test_alpha_required(self):
        with pytest.raises(ValidationError) as exc:
            RunConfig(command=Command.EVAL)
        assert first_error_message(exc.value) == "--alpha is required"

    def test_alpha2_required(self):
        with pytest.raises(ValidationError) as exc:
            RunConfig(command=Command.REPRODUCE2D, alpha=0.5)
        assert "--alpha2" in first_error_message(exc.value)

    def test_empty_check_set(self):
        with pytest.raises(ValidationError) as exc:
            RunConfig(command=Command.CHECK, alphas=[])
        assert "--alpha" in first_error_message(exc.value)

    def test_terms_positive(self):
        with pytest.raises(ValidationError) as exc:
            RunConfig(command=Command.COEFFS, alpha=0.0, terms=0)
        assert "--terms" in first_error_message(exc.value)

    def test_quadrant_needs_symmetric(self):
        with pytest.raises(ValidationError) as exc:
            RunConfig(
                command=Command.REPRODUCE2D, alpha=0.5, alpha2=0.5, quadrant=QuadrantMode.SAME
            )
        assert "--quadrant" in first_error_message(exc.value)

    def test_spectral_needs_symmetric(self):
        with pytest.raises(ValidationError):
            RunConfig(command=Command.EVAL, alpha=0.5, spectral=True)

    def test_grid_defaults_per_flag(self):
        cfg = RunConfig(command=Command.EVAL, alpha=0.5, x1=1.0)
        g = cfg.grid((0.0, 4.0, 0.25))
        assert g.count == 4
        assert g.start == 0.0

    def test_grid_rejects_reversed_range(self):
        cfg = RunConfig(command=Command.EVAL, alpha=0.5, x0=5.0)
        with pytest.raises(ValueError, match="--x1"):
            cfg.grid((0.0, 4.0, 0.25))

    def test_closed_grid(self):
        cfg = RunConfig(command=Command.EVAL, alpha=0.5, kind=SplineKind.SYMMETRIC)
        assert cfg.grid((-1.0, 1.0, 0.5), closed=True).count == 5

    def test_truncation(self):
        cfg = RunConfig(command=Command.EVAL, alpha=0.5, max_terms=64, tail_correction=False)
        policy = cfg.truncation()
        assert policy.max_terms == 64
        assert not policy.tail_correction
