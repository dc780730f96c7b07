"""Pydantic models for fracspline, the shared data contracts."""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class FracSplineError(Exception):
    """Base class for every error raised by fracspline."""


class PoleError(FracSplineError, ValueError):
    """A Gamma argument sits on (or within the near-pole threshold of) a pole."""


class DomainError(FracSplineError, ValueError):
    """A point value is undefined, e.g. log|x| at x = 0."""


class InfiniteCoefficient(FracSplineError):
    """A coefficient generator met an Infinite binomial value."""


class ClosedFormUnavailable(FracSplineError):
    """The closed-form coefficient formula does not apply to this order."""


class SingularSystem(FracSplineError):
    """A triangular system has a vanishing diagonal."""


class PreconditionViolated(FracSplineError, ValueError):
    """An operation was called outside its validity range."""


class InvalidSplit(FracSplineError, ValueError):
    """A factorization split of an inverse difference is not admissible."""


# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------


class SplineKind(str, Enum):
    """One-sided or centered construction."""

    CAUSAL = "causal"
    SYMMETRIC = "symmetric"


class Strategy(str, Enum):
    """How a spline is evaluated."""

    EXACT_FINITE_SUM = "exact_finite_sum"
    TRUNCATED_SERIES = "truncated_series"
    SPECTRAL_GRID = "spectral_grid"


class Support(str, Enum):
    """Index support of a coefficient sequence."""

    NONNEGATIVE_ONLY = "nonnegative_only"
    ALL_INTEGERS = "all_integers"


class QuadrantMode(str, Enum):
    """Sign restriction on (k1, k2) in a 2D symmetric double sum."""

    FULL = "full"
    SAME = "same"
    OPPOSITE = "opposite"


class BinomialKind(str, Enum):
    FINITE = "finite"
    ZERO = "zero"
    INFINITE = "infinite"


class Command(str, Enum):
    COEFFS = "coeffs"
    EVAL = "eval"
    REPRODUCE = "reproduce"
    REPRODUCE2D = "reproduce2d"
    CHECK = "check"
    FIGURES = "figures"
    PROBE = "probe"


# ---------------------------------------------------------------------------
# Order
# ---------------------------------------------------------------------------


class Order(BaseModel):
    """A spline or monomial order alpha > -1."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=-1.0)

    @field_validator("alpha")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("alpha must be finite")
        return v

    @property
    def is_integer(self) -> bool:
        return float(self.alpha).is_integer()

    @property
    def is_even_nonneg(self) -> bool:
        return self.is_integer and self.alpha >= 0 and int(self.alpha) % 2 == 0

    @property
    def is_odd_nonneg(self) -> bool:
        return self.is_integer and self.alpha >= 0 and int(self.alpha) % 2 == 1

    @property
    def ceil(self) -> int:
        return math.ceil(self.alpha)

    def __float__(self) -> float:
        return float(self.alpha)


def as_order(value: Order | float) -> Order:
    """Coerce a bare float into a validated :class:`Order`."""
    if isinstance(value, Order):
        return value
    return Order(alpha=float(value))


# ---------------------------------------------------------------------------
# Binomial values
# ---------------------------------------------------------------------------


class BinomialValue(BaseModel):
    """Tagged result of a generalized binomial coefficient.

    ``FINITE`` carries ``value``; ``INFINITE`` carries ``sign``; ``ZERO`` carries nothing.
    """

    model_config = ConfigDict(frozen=True)

    kind: BinomialKind
    value: float = 0.0
    sign: int = 1

    @classmethod
    def finite(cls, value: float) -> BinomialValue:
        return cls(kind=BinomialKind.FINITE, value=value)

    @classmethod
    def zero(cls) -> BinomialValue:
        return cls(kind=BinomialKind.ZERO)

    @classmethod
    def infinite(cls, sign: int) -> BinomialValue:
        return cls(kind=BinomialKind.INFINITE, sign=1 if sign >= 0 else -1)

    @property
    def is_finite(self) -> bool:
        return self.kind is BinomialKind.FINITE

    @property
    def is_zero(self) -> bool:
        return self.kind is BinomialKind.ZERO

    @property
    def is_infinite(self) -> bool:
        return self.kind is BinomialKind.INFINITE


# ---------------------------------------------------------------------------
# Truncation and grids
# ---------------------------------------------------------------------------


class TruncationPolicy(BaseModel):
    """How far an infinite series is summed, and whether its tail is modelled."""

    model_config = ConfigDict(frozen=True)

    max_terms: int = Field(default=4096, ge=1)
    tail_tolerance: float = Field(default=1e-10, gt=0.0)
    tail_correction: bool = True


class Grid1D(BaseModel):
    """Uniform samples start + i * step, i = 0 .. count - 1."""

    model_config = ConfigDict(frozen=True)

    start: float
    step: float = Field(gt=0.0)
    count: int = Field(ge=1)

    @classmethod
    def from_range(cls, x0: float, x1: float, step: float) -> Grid1D:
        """Half-open range [x0, x1) sampled at *step*."""
        if step <= 0:
            raise ValueError("step must be positive")
        if x1 <= x0:
            raise ValueError("x1 must be greater than x0")
        count = math.ceil((x1 - x0) / step - 1e-9)
        return cls(start=x0, step=step, count=max(count, 1))

    @classmethod
    def closed(cls, x0: float, x1: float, step: float) -> Grid1D:
        """Closed range [x0, x1] sampled at *step* (x1 included when on the lattice)."""
        if step <= 0:
            raise ValueError("step must be positive")
        if x1 < x0:
            raise ValueError("x1 must not be less than x0")
        count = math.floor((x1 - x0) / step + 1e-9) + 1
        return cls(start=x0, step=step, count=count)

    @classmethod
    def centered(cls, half_count: int, step: float) -> Grid1D:
        """Grid symmetric about 0 with 2 * half_count + 1 points."""
        return cls(start=-half_count * step, step=step, count=2 * half_count + 1)

    @property
    def stop(self) -> float:
        return self.start + (self.count - 1) * self.step

    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count, dtype=float)


class Grid2D(BaseModel):
    """Tensor grid; rows follow y, columns follow x."""

    model_config = ConfigDict(frozen=True)

    x: Grid1D
    y: Grid1D


class FrequencyGrid(BaseModel):
    """Uniform frequencies 2*pi*j/count, j = 0 .. count - 1, inside [0, 2*pi)."""

    model_config = ConfigDict(frozen=True)

    count: int = Field(ge=1)

    @property
    def samples(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.count, dtype=float) / self.count


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class CheckReport(BaseModel):
    """Outcome of one numerical identity check."""

    name: str
    residual: float
    tolerance: float
    passed: bool
    skipped: bool = False
    alpha: float | None = None
    location: float | None = None
    details: dict[str, float] = Field(default_factory=dict)
    note: str = ""


class SolveReport(BaseModel):
    """Coefficients from a deconvolution solve plus conditioning diagnostics."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    indices: np.ndarray
    coefficients: np.ndarray
    condition: float = 1.0
    ill_conditioned: bool = False
    residual: float = 0.0
    regularization: float = 0.0


class ReproductionResult(BaseModel):
    """Samples of a reconstruction next to its target monomial.

    For 2D results ``y`` is set and the sample arrays have shape (len(y), len(x)).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: SplineKind
    alpha: float
    alpha2: float | None = None
    x: np.ndarray
    y: np.ndarray | None = None
    target: np.ndarray
    reconstruction: np.ndarray
    abs_error: np.ndarray
    max_error: float
    max_interior_error: float
    shift_window: tuple[int, int] | None = None
    half_width: int | None = None
    tail_bound: float = 0.0
    excluded: list[tuple[float, float]] = Field(default_factory=list)
    error_slope: float | None = None
    details: dict[str, float] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shapes_agree(self) -> ReproductionResult:
        if self.abs_error.shape != self.reconstruction.shape:
            raise ValueError("error array must match the reconstruction shape")
        return self


class CsvTable(BaseModel):
    """A rectangular numeric table with '#'-prefixed metadata lines.

    ``comments`` precede the header row; ``footer`` follows the last data row.
    """

    header: list[str]
    rows: list[list[float]] = Field(default_factory=list)
    comments: list[str] = Field(default_factory=list)
    footer: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _rectangular(self) -> CsvTable:
        width = len(self.header)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")
        return self


# ---------------------------------------------------------------------------
# CLI run configuration
# ---------------------------------------------------------------------------


class RunConfig(BaseModel):
    """Validated parameters for one CLI command."""

    command: Command
    alpha: float | None = None
    alpha2: float | None = None
    alphas: list[float] = Field(default_factory=list)
    kind: SplineKind = SplineKind.CAUSAL
    x0: float | None = None
    x1: float | None = None
    step: float | None = None
    half_width: int = 200
    terms: int = 16
    max_terms: int = 4096
    tail_correction: bool = True
    tol: float | None = None
    out: Path | None = None
    normalized: bool = False
    quadrant: QuadrantMode = QuadrantMode.FULL
    spectral: bool = False

    @model_validator(mode="after")
    def _check_flags(self) -> RunConfig:
        needs_alpha = {
            Command.COEFFS,
            Command.EVAL,
            Command.REPRODUCE,
            Command.REPRODUCE2D,
            Command.PROBE,
        }
        if self.command in needs_alpha:
            if self.alpha is None:
                raise ValueError("--alpha is required")
            if self.alpha <= -1:
                raise ValueError("--alpha must be greater than -1")
        if self.command is Command.REPRODUCE2D:
            if self.alpha2 is None:
                raise ValueError("--alpha2 is required")
            if self.alpha2 <= -1:
                raise ValueError("--alpha2 must be greater than -1")
        if self.command is Command.CHECK:
            if not self.alphas:
                raise ValueError("--alpha must be given at least once")
            if any(a <= -1 for a in self.alphas):
                raise ValueError("--alpha must be greater than -1")
        if self.terms < 1:
            raise ValueError("--terms must be at least 1")
        if self.max_terms < 1:
            raise ValueError("--max-terms must be at least 1")
        if self.half_width < 1:
            raise ValueError("--half-width must be at least 1")
        if self.step is not None and self.step <= 0:
            raise ValueError("--step must be positive")
        if self.x0 is not None and self.x1 is not None and self.x1 <= self.x0:
            raise ValueError("--x1 must be greater than --x0")
        if self.tol is not None and self.tol < 0:
            raise ValueError("--tol must be nonnegative")
        if self.quadrant is not QuadrantMode.FULL and self.kind is not SplineKind.SYMMETRIC:
            raise ValueError("--quadrant requires --kind symmetric")
        if self.spectral and self.kind is not SplineKind.SYMMETRIC:
            raise ValueError("--spectral requires --kind symmetric")
        return self

    def grid(self, default: tuple[float, float, float], closed: bool = False) -> Grid1D:
        """The sampling grid from --x0/--x1/--step, falling back to *default* per flag."""
        x0 = default[0] if self.x0 is None else self.x0
        x1 = default[1] if self.x1 is None else self.x1
        step = default[2] if self.step is None else self.step
        if x1 <= x0:
            raise ValueError(f"--x1 ({x1:g}) must be greater than --x0 ({x0:g})")
        if closed:
            return Grid1D.closed(x0, x1, step)
        return Grid1D.from_range(x0, x1, step)

    def truncation(self) -> TruncationPolicy:
        return TruncationPolicy(max_terms=self.max_terms, tail_correction=self.tail_correction)


def first_error_message(exc: Any) -> str:
    """Return the first human-readable message from a pydantic ValidationError."""
    errors = getattr(exc, "errors", None)
    if callable(errors):
        items = errors()
        if items:
            msg = str(items[0].get("msg", exc))
            return msg.removeprefix("Value error, ")
    return str(exc)
