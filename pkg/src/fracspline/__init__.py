"""fracspline: fractional B-splines and the reproduction of fractional monomials."""

from __future__ import annotations

try:
    from fracspline._version import __version__
except ImportError:
    __version__ = "0.0.0"

from fracspline.models import (
    CheckReport,
    FracSplineError,
    Grid1D,
    Grid2D,
    Order,
    QuadrantMode,
    ReproductionResult,
    SplineKind,
    TruncationPolicy,
)
from fracspline.reproduction import (
    ReproductionPlan,
    reproduce_2d,
    reproduce_causal,
    reproduce_symmetric,
)
from fracspline.splines import FractionalSpline, eval_causal_spline, eval_symmetric_spline

__all__ = [
    "CheckReport",
    "FracSplineError",
    "FractionalSpline",
    "Grid1D",
    "Grid2D",
    "Order",
    "QuadrantMode",
    "ReproductionPlan",
    "ReproductionResult",
    "SplineKind",
    "TruncationPolicy",
    "eval_causal_spline",
    "eval_symmetric_spline",
    "reproduce_2d",
    "reproduce_causal",
    "reproduce_symmetric",
]
