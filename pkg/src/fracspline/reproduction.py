"""Reproduction of fractional monomials from integer shifts of fractional B-splines."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.special import gamma

from fracspline.config import DEFAULT_HALF_WIDTH
from fracspline.models import (
    CsvTable,
    Grid1D,
    Grid2D,
    InvalidSplit,
    Order,
    PreconditionViolated,
    QuadrantMode,
    ReproductionResult,
    SplineKind,
    Support,
    TruncationPolicy,
    as_order,
)
from fracspline.sequences import (
    CoefficientSequence,
    difference_coeffs,
    reproduction_coeffs_causal,
    reproduction_coeffs_symmetric,
    solve_weak_strang_fix_symmetric,
    symmetric_detail_mask,
)
from fracspline.splines import (
    FractionalSpline,
    causal_monomial,
    eval_causal_spline,
    eval_symmetric_spline,
    symmetric_lattice_values,
    symmetric_monomial_values,
)

logger = logging.getLogger("fracspline.reproduction")

# ---------------------------------------------------------------------------
# Coefficients and plans
# ---------------------------------------------------------------------------


def _odd_symmetric_coeffs(order: Order) -> CoefficientSequence:
    """p for odd integer α from a small exact solve, reduced to its odd part in |k|.

    The solver returns the discrete Green's function plus an even polynomial from
    the null space of b̃; dropping the even powers leaves a polynomial in |k| that
    extends to any half width.
    """
    m = (int(order.alpha) + 1) // 2
    report = solve_weak_strang_fix_symmetric(
        symmetric_detail_mask(order), half_width=2 * m + 6, regularization=0.0
    )
    keep = report.indices >= 0
    k = report.indices[keep].astype(float)
    odd = [k ** (2 * i + 1) for i in range(m)]
    even = [k ** (2 * i) for i in range(m)]
    basis = np.column_stack(odd + even)
    fit, *_ = np.linalg.lstsq(basis, report.coefficients[keep], rcond=None)
    powers = np.arange(1, 2 * m, 2)
    weights = fit[:m]
    logger.debug("odd symmetric coefficients for alpha=%g: %s", order.alpha, weights)

    def run(n: int) -> np.ndarray:
        kk = np.arange(n, dtype=float)
        return (kk[:, None] ** powers[None, :]) @ weights

    return CoefficientSequence.two_sided_even(f"p*({order.alpha:g}, solved)", run)


def symmetric_reproduction_coeffs(order: Order | float) -> CoefficientSequence:
    """Closed-form p for non-integer α, solver-derived p for odd integer α."""
    o = as_order(order)
    if not o.is_integer:
        return reproduction_coeffs_symmetric(o)
    if o.is_odd_nonneg:
        return _odd_symmetric_coeffs(o)
    raise PreconditionViolated(
        f"even symmetric order {o.alpha:g} is reproduced through the factorized path"
    )


class ReproductionPlan(BaseModel):
    """Pairing of a spline with its reproduction coefficients and shift window.

    For symmetric plans the window is relative to round(x).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spline: FractionalSpline
    coeffs: CoefficientSequence
    shift_window: tuple[int, int]
    target: str

    @model_validator(mode="after")
    def _window_fits_support(self) -> ReproductionPlan:
        lo, hi = self.shift_window
        if hi < lo:
            raise ValueError("shift window is empty")
        if self.coeffs.support is Support.NONNEGATIVE_ONLY and lo < 0:
            raise ValueError("one-sided coefficients need a shift window starting at k >= 0")
        return self

    @classmethod
    def causal(
        cls, order: Order | float, x_max: float, k_max: int | None = None
    ) -> ReproductionPlan:
        o = as_order(order)
        top = max(int(math.floor(x_max)), 0)
        return cls(
            spline=FractionalSpline.default(SplineKind.CAUSAL, o),
            coeffs=reproduction_coeffs_causal(o),
            shift_window=(0, top if k_max is None else max(k_max, 0)),
            target=f"x_+^{o.alpha:g}",
        )

    @classmethod
    def symmetric(
        cls,
        order: Order | float,
        half_width: int,
        trunc: TruncationPolicy | None = None,
    ) -> ReproductionPlan:
        o = as_order(order)
        spline = FractionalSpline.default(SplineKind.SYMMETRIC, o)
        if trunc is not None:
            spline = spline.model_copy(update={"truncation": trunc})
        return cls(
            spline=spline,
            coeffs=symmetric_reproduction_coeffs(o),
            shift_window=(-half_width, half_width),
            target=f"|x|^{o.alpha:g}",
        )

    def is_exact_on(self, x_max: float) -> bool:
        return self.spline.kind is SplineKind.CAUSAL and self.shift_window[1] >= math.floor(x_max)


# ---------------------------------------------------------------------------
# Result assembly
# ---------------------------------------------------------------------------


def _away_from_kink(x: np.ndarray, step: float) -> np.ndarray:
    return np.abs(x) >= step * (1.0 - 1e-9)


def _result(
    kind: SplineKind,
    alpha: float,
    x: np.ndarray,
    target: np.ndarray,
    reconstruction: np.ndarray,
    interior: np.ndarray,
    **meta,
) -> ReproductionResult:
    finite = np.isfinite(target) & np.isfinite(reconstruction)
    with np.errstate(invalid="ignore"):
        err = np.where(finite, np.abs(reconstruction - target), np.inf)
    max_error = float(np.max(err[finite])) if finite.any() else math.inf
    inner = interior & finite
    max_interior = float(np.max(err[inner])) if inner.any() else 0.0
    return ReproductionResult(
        kind=kind,
        alpha=alpha,
        x=x,
        target=target,
        reconstruction=reconstruction,
        abs_error=err,
        max_error=max_error,
        max_interior_error=max_interior,
        **meta,
    )


# ---------------------------------------------------------------------------
# Causal reproduction
# ---------------------------------------------------------------------------


def _shift_sum(
    coeffs: np.ndarray,
    shifts: range,
    basis: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
) -> np.ndarray:
    """Σ coeffs[i]·basis(x − shifts[i]), accumulated in shift order."""
    total = np.zeros_like(x)
    for c, k in zip(coeffs, shifts, strict=True):
        if c != 0.0:
            total = total + c * basis(x - k)
    return total


def _causal_sum(
    order: Order, seq: CoefficientSequence, window: tuple[int, int], x: np.ndarray
) -> np.ndarray:
    lo, hi = window
    return _shift_sum(
        seq.values(lo, hi), range(lo, hi + 1), lambda t: eval_causal_spline(order, t), x
    )


def reproduce_causal(
    order: Order | float, grid: Grid1D, k_max: int | None = None
) -> ReproductionResult:
    """Σ_{k=0}^{⌊x⌋} binom(k+α, k) B₊^α(x − k), which equals x₊^α exactly."""
    o = as_order(order)
    if grid.start < 0:
        raise PreconditionViolated("causal reproduction needs a grid starting at x >= 0")
    x = grid.points()
    plan = ReproductionPlan.causal(o, float(x.max()), k_max)
    reconstruction = _causal_sum(o, plan.coeffs, plan.shift_window, x)
    target = causal_monomial(o, x)
    excluded = [(0.0, grid.step)] if grid.start < grid.step else []
    logger.info("reproduce_causal alpha=%g window=%s", o.alpha, plan.shift_window)
    return _result(
        SplineKind.CAUSAL,
        o.alpha,
        x,
        target,
        reconstruction,
        _away_from_kink(x, grid.step),
        shift_window=plan.shift_window,
        excluded=excluded,
    )


def inverse_difference_apply(
    order: Order | float,
    kind: SplineKind,
    grid: Grid1D,
    window: tuple[int, int] | None = None,
    trunc: TruncationPolicy | None = None,
) -> np.ndarray:
    """Δ^{−α−1} applied to the shifted splines: Σ_{k∈window} p_k B^α(x − k).

    The causal default window is [0, ⌊max x⌋]; the symmetric one is ±DEFAULT_HALF_WIDTH.
    """
    o = as_order(order)
    x = grid.points()
    if kind is SplineKind.CAUSAL:
        if window is None:
            window = (0, max(int(math.floor(float(x.max()))), 0))
        return _causal_sum(o, reproduction_coeffs_causal(o), window, x)
    lo, hi = window or (-DEFAULT_HALF_WIDTH, DEFAULT_HALF_WIDTH)
    seq = symmetric_reproduction_coeffs(o)
    k = np.arange(lo, hi + 1)
    values, _ = symmetric_lattice_values(o, x[:, None] - k[None, :], trunc)
    return np.sum(values * seq.values(lo, hi)[None, :], axis=1)


# ---------------------------------------------------------------------------
# Symmetric reproduction
# ---------------------------------------------------------------------------


def _centered_sum(
    order: Order,
    seq: CoefficientSequence,
    x: np.ndarray,
    half_width: int,
    trunc: TruncationPolicy | None,
) -> tuple[np.ndarray, float]:
    """Σ_{|d|≤H} p_{r+d} B*(x − r − d) with r = round(x).

    Summed as t_0 + Σ (t_d + t_−d).
    """
    h = half_width
    r = np.rint(x)
    frac = x - r
    d = np.arange(-h, h + 1)
    splines, bound = symmetric_lattice_values(order, frac[:, None] - d[None, :], trunc)
    idx = np.abs(r.astype(int)[:, None] + d[None, :])
    pv = seq.values(0, int(idx.max()))
    terms = pv[idx] * splines
    pairs = terms[:, h + 1 :] + terms[:, h - 1 :: -1] if h else np.zeros((len(x), 0))
    total = terms[:, h] + np.sum(pairs, axis=1)
    tail = float(h * np.max(np.abs(pairs[:, -1]))) if h else 0.0
    return total, tail + bound


def reproduce_symmetric(
    order: Order | float,
    grid: Grid1D,
    half_width: int = DEFAULT_HALF_WIDTH,
    trunc: TruncationPolicy | None = None,
    measure_slope: bool = False,
) -> ReproductionResult:
    """Truncated two-sided sum reproducing x*^α, window centered at round(x).

    Even integer orders are routed through the factorized path with an equal split.
    """
    o = as_order(order)
    if o.is_even_nonneg:
        half = -(o.alpha + 1.0) / 2.0
        return reproduce_even_symmetric_factorized(o, (half, half), grid, half_width, trunc)

    plan = ReproductionPlan.symmetric(o, half_width, trunc)
    x = grid.points()
    reconstruction, tail = _centered_sum(o, plan.coeffs, x, half_width, trunc)
    target = symmetric_monomial_values(o.alpha, x)
    interior = _away_from_kink(x, grid.step)
    notes = []
    if o.is_odd_nonneg:
        notes.append("coefficients from the symmetric solver, null space removed")

    slope = None
    if measure_slope and half_width >= 2:
        coarse = reproduce_symmetric(o, grid, half_width // 2, trunc)
        fine_err = float(np.max(np.abs(reconstruction - target)[interior]))
        if fine_err > 0 and coarse.max_interior_error > 0:
            slope = math.log2(coarse.max_interior_error / fine_err)

    logger.info("reproduce_symmetric alpha=%g H=%d tail~%.3g", o.alpha, half_width, tail)
    return _result(
        SplineKind.SYMMETRIC,
        o.alpha,
        x,
        target,
        reconstruction,
        interior,
        shift_window=plan.shift_window,
        half_width=half_width,
        tail_bound=tail,
        excluded=[(-grid.step, grid.step)],
        error_slope=slope,
        notes=notes,
    )


def reproduce_even_symmetric_factorized(
    alpha_even: Order | float,
    split: tuple[float, float],
    grid: Grid1D,
    half_width: int = DEFAULT_HALF_WIDTH,
    trunc: TruncationPolicy | None = None,
) -> ReproductionResult:
    """x^α log|x| for even α as Δ*^{β1}(Δ*^{β2} B*^α), with β1 + β2 = −(α+1).

    The inner sum runs over an extended window so the outer sum sees no boundary.
    The double series only determines the result up to a polynomial of degree ≤ α,
    which is removed by a least-squares fit at ±0.5, ±1.5, ..., ±(α+1.5). Grid points on
    those nodes are pulled toward the target by the fit, so the largest interior error
    away from them is reported as ``off_node_error``.
    """
    o = as_order(alpha_even)
    if not o.is_even_nonneg:
        raise PreconditionViolated("the factorized path takes even nonnegative integer orders")
    b1, b2 = (float(b) for b in split)
    if abs(b1 + b2 + o.alpha + 1.0) > 1e-12:
        raise InvalidSplit(f"split ({b1:g}, {b2:g}) must sum to {-(o.alpha + 1.0):g}")
    for b in (b1, b2):
        if b.is_integer() and b < 0 and int(b) % 2:
            raise InvalidSplit(f"split order {b:g} is an odd negative integer")

    h = half_width
    x = grid.points()
    nodes = np.arange(0.5, o.alpha + 2.0, 1.0)
    nodes = np.concatenate([-nodes[::-1], nodes])
    pts = np.concatenate([x, nodes])
    inner = h + (h + int(math.ceil(float(np.max(np.abs(pts))))))
    reach = h + inner

    q1 = difference_coeffs(b1, SplineKind.SYMMETRIC).values(-h, h)
    q2 = difference_coeffs(b2, SplineKind.SYMMETRIC).values(-inner, inner)
    m = np.arange(-reach, reach + 1)
    splines, bound = symmetric_lattice_values(o, pts[:, None] - m[None, :], trunc)
    raw = np.array([np.dot(q1, np.correlate(row, q2, mode="valid")) for row in splines])

    degree = int(o.alpha)
    n_x = len(x)
    node_target = symmetric_monomial_values(o.alpha, nodes)
    vander = np.vander(nodes, degree + 1)
    fit, *_ = np.linalg.lstsq(vander, raw[n_x:] - node_target, rcond=None)
    reconstruction = raw[:n_x] - np.vander(x, degree + 1) @ fit
    target = symmetric_monomial_values(o.alpha, x)

    details = {f"align_c{degree - i}": float(c) for i, c in enumerate(fit)}
    details.update({"beta1": b1, "beta2": b2, "inner_half_width": float(inner)})
    interior = _away_from_kink(x, grid.step)
    off_node = interior & ~np.isclose(x[:, None], nodes[None, :], atol=1e-9).any(axis=1)
    if off_node.any():
        details["off_node_error"] = float(np.max(np.abs(reconstruction - target)[off_node]))
    logger.info("factorized reproduction alpha=%g H=%d inner=%d", o.alpha, h, inner)
    return _result(
        SplineKind.SYMMETRIC,
        o.alpha,
        x,
        target,
        reconstruction,
        interior,
        shift_window=(-h, h),
        half_width=h,
        tail_bound=bound,
        excluded=[(-grid.step, grid.step)],
        details=details,
        notes=["even-order double series converges slowly; aligned by a polynomial fit"],
    )


# ---------------------------------------------------------------------------
# Ordinary linear reproduction and convergence probes
# ---------------------------------------------------------------------------


def _shift_moments(order: Order, x: float, k_min: int, k_max: int) -> tuple[float, float]:
    """(Σ B₊^α(x − k), Σ k·B₊^α(x − k)) over k_min ≤ k ≤ min(k_max, ⌊x⌋), over Γ(α+1)."""
    top = min(k_max, int(math.floor(x)))
    if top < k_min:
        return 0.0, 0.0
    k = np.arange(k_min, top + 1, dtype=float)
    values = np.asarray(eval_causal_spline(order, x - k)) / gamma(order.alpha + 1.0)
    return float(np.sum(values)), float(np.sum(k * values))


def reproduce_linear_ordinary(
    order: Order | float,
    grid: Grid1D,
    k_min: int,
    k_max: int,
    c: float | None = None,
) -> ReproductionResult:
    """Σ_{k=k_min}^{k_max} (k + c)·B₊^α(x − k)/Γ(α+1) against x.

    c defaults to (α+1)/2.
    """
    o = as_order(order)
    shift = (o.alpha + 1.0) / 2.0 if c is None else c
    x = grid.points()
    ks = range(k_min, k_max + 1)
    weights = np.array([k + shift for k in ks], dtype=float)
    total = _shift_sum(weights, ks, lambda t: eval_causal_spline(o, t), x)
    reconstruction = total / gamma(o.alpha + 1.0)
    lo = k_min + o.ceil + 1
    interior = (x >= lo) & (x < k_max + 1)
    excluded = []
    if grid.start < lo:
        excluded.append((grid.start, float(lo)))
    if grid.stop >= k_max + 1:
        excluded.append((float(k_max + 1), grid.stop))
    return _result(
        SplineKind.CAUSAL,
        o.alpha,
        x,
        x.copy(),
        reconstruction,
        interior,
        shift_window=(k_min, k_max),
        details={"c": shift},
        excluded=excluded,
    )


def scan_linear_shift(
    order: Order | float,
    x: float,
    c_values: np.ndarray,
    window: tuple[int, int],
) -> tuple[float, float, np.ndarray]:
    """Error of Σ (k + c)B₊^α(x − k)/Γ(α+1) against x for each c.

    Returns (best c, its error, all errors).
    """
    o = as_order(order)
    s0, s1 = _shift_moments(o, x, window[0], window[1])
    cs = np.asarray(c_values, dtype=float)
    errors = np.abs(s1 + cs * s0 - x)
    best = int(np.argmin(errors))
    return float(cs[best]), float(errors[best]), errors


def probe_nonuniform_convergence(
    order: Order | float,
    windows: list[int],
    x_point: float = 2.0,
    step: float = 0.25,
    c: float | None = None,
) -> CsvTable:
    """Linear reproduction over windows [−K, K]: error at *x_point*, sup error on [0, K/2].

    A measurement table only; pointwise convergence does not imply uniform convergence.
    """
    o = as_order(order)
    shift = (o.alpha + 1.0) / 2.0 if c is None else c
    rows = []
    for k in windows:
        s0, s1 = _shift_moments(o, x_point, -k, k)
        pointwise = abs(s1 + shift * s0 - x_point)
        domain = Grid1D.closed(0.0, k / 2.0, step)
        sup = reproduce_linear_ordinary(o, domain, -k, k, shift).max_error
        logger.debug("probe K=%d pointwise=%.3g sup=%.3g", k, pointwise, sup)
        rows.append([float(k), pointwise, sup])
    return CsvTable(
        header=["window", "pointwise_error", "sup_error"],
        rows=rows,
        comments=[f"alpha={o.alpha:g}", f"c={shift:g}", f"x={x_point:g}"],
    )


def partition_of_unity_probe(
    order: Order | float, x_values: list[float], windows: list[int]
) -> CsvTable:
    """|Σ_{k=−K}^{⌊x⌋} B₊^α(x − k)/Γ(α+1) − 1| for each window K and point x."""
    o = as_order(order)
    rows = []
    for k in windows:
        for x in x_values:
            s0, _ = _shift_moments(o, x, -k, k)
            rows.append([float(k), float(x), abs(s0 - 1.0)])
    return CsvTable(
        header=["window", "x", "abs_error"], rows=rows, comments=[f"alpha={o.alpha:g}"]
    )


# ---------------------------------------------------------------------------
# Tensor-product splines
# ---------------------------------------------------------------------------


def eval_2d_spline(
    kind: SplineKind,
    order1: Order | float,
    order2: Order | float,
    x: float | np.ndarray,
    y: float | np.ndarray,
    trunc: TruncationPolicy | None = None,
) -> float | np.ndarray:
    """B^{α1}(x)·B^{α2}(y)."""
    if kind is SplineKind.CAUSAL:
        return eval_causal_spline(order1, x) * eval_causal_spline(order2, y)
    bx, _ = eval_symmetric_spline(order1, x, trunc)
    by, _ = eval_symmetric_spline(order2, y, trunc)
    return bx * by


def _reproduce_1d(
    kind: SplineKind,
    order: Order | float,
    grid: Grid1D,
    half_width: int,
    trunc: TruncationPolicy | None,
) -> ReproductionResult:
    if kind is SplineKind.CAUSAL:
        return reproduce_causal(order, grid)
    return reproduce_symmetric(order, grid, half_width, trunc)


def _result_2d(
    kind: SplineKind,
    alpha: float,
    alpha2: float,
    grid2d: Grid2D,
    target: np.ndarray,
    reconstruction: np.ndarray,
    **meta,
) -> ReproductionResult:
    x = grid2d.x.points()
    y = grid2d.y.points()
    interior = np.outer(_away_from_kink(y, grid2d.y.step), _away_from_kink(x, grid2d.x.step))
    base = _result(kind, alpha, x, target, reconstruction, interior, **meta)
    return base.model_copy(update={"y": y, "alpha2": alpha2})


def reproduce_2d(
    kind: SplineKind,
    order1: Order | float,
    order2: Order | float,
    grid2d: Grid2D,
    half_width: int = DEFAULT_HALF_WIDTH,
    trunc: TruncationPolicy | None = None,
) -> ReproductionResult:
    """Separable reproduction of x^{α1}·y^{α2}: the outer product of the two 1D sums."""
    o1, o2 = as_order(order1), as_order(order2)
    rx = _reproduce_1d(kind, o1, grid2d.x, half_width, trunc)
    ry = _reproduce_1d(kind, o2, grid2d.y, half_width, trunc)
    return _result_2d(
        kind,
        o1.alpha,
        o2.alpha,
        grid2d,
        np.outer(ry.target, rx.target),
        np.outer(ry.reconstruction, rx.reconstruction),
        half_width=None if kind is SplineKind.CAUSAL else half_width,
        tail_bound=rx.tail_bound + ry.tail_bound,
        details={"max_error_x": rx.max_error, "max_error_y": ry.max_error},
    )


def _half_sums(
    order: Order, x: np.ndarray, half_width: int, trunc: TruncationPolicy | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Σ_{k≥0}, Σ_{k≤0}, k = 0 term) of p_k B*(x − k) over |k| ≤ H."""
    seq = symmetric_reproduction_coeffs(order)
    k = np.arange(0, half_width + 1)
    pv = seq.values(0, half_width)
    shifted = np.concatenate([x[:, None] - k[None, :], x[:, None] + k[None, :]], axis=1)
    splines, _ = symmetric_lattice_values(order, shifted, trunc)
    right, left = splines[:, : len(k)], splines[:, len(k) :]
    plus = np.sum(pv * right, axis=1)
    minus = np.sum(pv * left, axis=1)
    return plus, minus, pv[0] * right[:, 0]


def reproduce_2d_quadrant(
    order1: Order | float,
    order2: Order | float,
    grid2d: Grid2D,
    mode: QuadrantMode,
    half_width: int = DEFAULT_HALF_WIDTH,
    trunc: TruncationPolicy | None = None,
) -> ReproductionResult:
    """Symmetric double sum restricted to k1·k2 ≥ 0 (same) or k1·k2 ≤ 0 (opposite).

    The target is the full monomial kept on the matching quadrant pair; the details
    give the share of |reconstruction| lying in quadrants I∪III and II∪IV.
    """
    if mode is QuadrantMode.FULL:
        return reproduce_2d(SplineKind.SYMMETRIC, order1, order2, grid2d, half_width, trunc)
    o1, o2 = as_order(order1), as_order(order2)
    x = grid2d.x.points()
    y = grid2d.y.points()
    px, mx, zx = _half_sums(o1, x, half_width, trunc)
    py, my, zy = _half_sums(o2, y, half_width, trunc)
    origin = np.outer(zy, zx)
    if mode is QuadrantMode.SAME:
        reconstruction = np.outer(py, px) + np.outer(my, mx) - origin
    else:
        reconstruction = np.outer(py, mx) + np.outer(my, px) - origin

    sign = np.outer(np.sign(y), np.sign(x))
    keep = sign >= 0 if mode is QuadrantMode.SAME else sign <= 0
    full = np.outer(symmetric_monomial_values(o2.alpha, y), symmetric_monomial_values(o1.alpha, x))
    target = np.where(keep, full, 0.0)

    mass = np.abs(reconstruction)
    total = float(np.sum(mass)) or 1.0
    details = {
        "mass_13": float(np.sum(mass[sign > 0])) / total,
        "mass_24": float(np.sum(mass[sign < 0])) / total,
    }
    return _result_2d(
        SplineKind.SYMMETRIC,
        o1.alpha,
        o2.alpha,
        grid2d,
        target,
        reconstruction,
        half_width=half_width,
        details=details,
        notes=[f"quadrant mode: {mode.value}"],
    )
