"""Fractional monomials, finite differences, B-spline evaluation and Fourier forms.

The series definitions are canonical: B₊^α = Δ₊^{α+1} x₊^α and B*^α = Δ*^{α+1} x*^α.
The closed-form transforms describe the spectrally normalized splines, which differ
from the series by the factor Γ(α+1) in the causal case.
"""

from __future__ import annotations

import functools
import logging
import math
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import gamma

from fracspline.config import INTERIOR_FRACTION, SPECTRAL_PAD_FACTOR
from fracspline.models import (
    CheckReport,
    DomainError,
    Grid1D,
    Order,
    PreconditionViolated,
    SplineKind,
    Strategy,
    TruncationPolicy,
    as_order,
)
from fracspline.sequences import forward_difference_run, symmetric_difference_run
from fracspline.special import binomial_value_to_float, gen_binomial

logger = logging.getLogger("fracspline.splines")

ArrayLike = float | np.ndarray

_LD = np.longdouble
_LEVEL = 64
_TAIL_ORDERS = tuple(range(0, 21, 2))
_TAIL_TOP = 2**18
_CHUNK_ELEMENTS = 2**20
_LATTICE_DECIMALS = 12


def _as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def _restore(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(np.ravel(values)[0]) if scalar else values


# ---------------------------------------------------------------------------
# Monomials
# ---------------------------------------------------------------------------


def causal_monomial(order: Order | float, x: ArrayLike) -> ArrayLike:
    """x₊^α, right-continuous at 0 (so x₊^0 is 1 at x = 0)."""
    alpha = as_order(order).alpha
    arr, scalar = _as_array(x)
    out = np.zeros_like(arr)
    pos = arr > 0
    out[pos] = arr[pos] ** alpha
    if alpha == 0:
        out[arr == 0] = 1.0
    return _restore(out, scalar)


def symmetric_monomial_values(alpha: float, x: np.ndarray) -> np.ndarray:
    """Like :func:`symmetric_monomial` but yields −inf for log|0| instead of raising."""
    ax = np.abs(x)
    if float(alpha).is_integer() and alpha >= 0 and int(alpha) % 2 == 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = ax**alpha * np.log(ax)
        return np.where(ax == 0, -np.inf if alpha == 0 else 0.0, out)
    return np.asarray(ax**alpha)


def symmetric_monomial(order: Order | float, x: ArrayLike) -> ArrayLike:
    """|x|^α, or x^α·log|x| for even nonnegative integer α."""
    o = as_order(order)
    arr, scalar = _as_array(x)
    if o.alpha == 0 and np.any(arr == 0):
        raise DomainError("log|x| is undefined at x = 0")
    return _restore(symmetric_monomial_values(o.alpha, arr), scalar)


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------


def forward_difference(
    beta: float,
    f: Callable[[np.ndarray], np.ndarray],
    x: ArrayLike,
    trunc: TruncationPolicy | None = None,
    support_start: float | None = None,
) -> ArrayLike:
    """Δ₊^β f(x) = Σ_{k≥0} (−1)^k binom(β, k) f(x − k).

    The sum is finite when β is a nonnegative integer or when f vanishes left of
    *support_start*; otherwise it stops after ``trunc.max_terms`` terms.
    """
    beta = float(beta)
    arr, scalar = _as_array(x)
    if beta.is_integer() and beta >= 0:
        k_max = int(beta)
    elif support_start is not None:
        k_max = max(int(math.floor(float(np.max(arr)) - support_start)), 0)
    else:
        k_max = (trunc or TruncationPolicy()).max_terms
    coeffs = forward_difference_run(beta, k_max + 1)
    total = np.zeros_like(arr)
    for k in range(k_max + 1):
        if coeffs[k] != 0.0:
            total = total + coeffs[k] * np.asarray(f(arr - k), dtype=float)
    return _restore(total, scalar)


def symmetric_difference(
    beta: float,
    f: Callable[[np.ndarray], np.ndarray],
    x: ArrayLike,
    trunc: TruncationPolicy | None = None,
) -> ArrayLike:
    """Δ*^β f(x) = Σ_k (−1)^k binom(β, k + β/2) f(x − k), summed in (k, −k) pairs."""
    beta = float(beta)
    arr, scalar = _as_array(x)
    if beta.is_integer() and beta >= 0 and int(beta) % 2 == 0:
        k_max = int(beta) // 2
    else:
        k_max = (trunc or TruncationPolicy()).max_terms
    coeffs = symmetric_difference_run(beta, k_max + 1)
    total = coeffs[0] * np.asarray(f(arr), dtype=float)
    for j in range(1, k_max + 1):
        total = total + coeffs[j] * (np.asarray(f(arr - j)) + np.asarray(f(arr + j)))
    return _restore(total, scalar)


# ---------------------------------------------------------------------------
# Causal splines
# ---------------------------------------------------------------------------


def causal_power_sum(coeffs: np.ndarray, power: float, x: np.ndarray) -> np.ndarray:
    """Σ_k coeffs[k] (x − k)₊^power, accumulated in increasing k."""
    total = np.zeros_like(x)
    k_top = min(len(coeffs) - 1, int(math.floor(float(np.max(x))))) if x.size else -1
    for k in range(k_top + 1):
        if coeffs[k] != 0.0:
            total = total + coeffs[k] * causal_monomial(power, x - k)
    return total


def eval_causal_spline(order: Order | float, x: ArrayLike) -> ArrayLike:
    """B₊^α(x) = Σ_{k=0}^{⌊x⌋} (−1)^k binom(α+1, k)(x − k)^α, an exact finite sum."""
    o = as_order(order)
    arr, scalar = _as_array(x)
    if arr.size == 0:
        return arr
    k_top = max(int(math.floor(float(np.max(arr)))), 0)
    coeffs = forward_difference_run(o.alpha + 1.0, k_top + 1)
    out = causal_power_sum(coeffs, o.alpha, arr)
    out[arr < 0] = 0.0
    if o.is_integer:
        out[arr >= o.alpha + 1.0] = 0.0
    return _restore(out, scalar)


def classical_bspline(n: int, x: ArrayLike) -> ArrayLike:
    """Degree-n cardinal B-spline on [0, n+1), by the Cox-de Boor recurrence."""
    arr, scalar = _as_array(x)
    if n < 0:
        raise PreconditionViolated("degree must be nonnegative")

    def rec(m: int, t: np.ndarray) -> np.ndarray:
        if m == 0:
            return ((t >= 0) & (t < 1)).astype(float)
        return (t * rec(m - 1, t) + (m + 1 - t) * rec(m - 1, t - 1)) / m

    return _restore(rec(n, arr), scalar)


# ---------------------------------------------------------------------------
# Symmetric splines
# ---------------------------------------------------------------------------


def _is_log_order(alpha: float) -> bool:
    return float(alpha).is_integer() and alpha >= 0 and int(alpha) % 2 == 0


def _log_series_coeffs(alpha: float, count: int) -> np.ndarray:
    """Coefficients c_n of v^n in (1+v)^α log(1+v), n = 0 .. count − 1."""
    b = np.array([gen_binomial(alpha, i).value if i <= alpha else 0.0 for i in range(count)])
    c = np.zeros(count)
    for n in range(1, count):
        i = np.arange(n)
        c[n] = np.sum(b[i] * (-1.0) ** (n - i + 1) / (n - i))
    return c


def _tail_sums(term: np.ndarray, levels: np.ndarray, with_log: bool) -> np.ndarray:
    """Σ_{j>K} term_j for each K in *levels*, the part beyond the last term extrapolated.

    Tails are accumulated from the far end, never as total minus partial sum.
    The remainder model past J is Σ_m (a_m log J + b_m)/J^m, or Σ_m b_m/J^m without
    logs, fitted on S(J) − S(top) for J = top, top/2, ..., top/16.
    """
    top = len(term)
    # suffix[m] = Σ_{j=m+1}^{top} term_j
    suffix = np.cumsum(term[::-1])[::-1]
    diffs = np.array([0.0] + [-float(suffix[top >> i]) for i in range(1, 5)])
    i = np.arange(5, dtype=float)
    cols = [np.ones(5)]
    if with_log:
        for m in (1, 2):
            cols += [2.0 ** (i * m), i * 2.0 ** (i * m)]
    else:
        for m in (1, 2, 3, 4):
            cols.append(2.0 ** (i * m))
    matrix = np.column_stack(cols)
    # diffs_i = rem(top) − rem(J_i); the constant column carries rem(top)
    sol = np.linalg.solve(matrix, diffs)
    return suffix[levels] + _LD(sol[0])


@functools.lru_cache(maxsize=16)
def _tail_tables(alpha: float) -> tuple[np.ndarray, np.ndarray | None]:
    """Tail sums Σ_{j>K} s_j j^(α−n) at K = 64, 128, ... for the even expansion orders n.

    For even integer α the log-weighted sums Σ_{j>K} s_j j^(α−n) log j come along.
    Rows follow the expansion orders, columns the K levels.
    """
    log_case = _is_log_order(alpha)
    top = _TAIL_TOP
    s = symmetric_difference_run(alpha + 1.0, top + 1, dtype=_LD)[1:]
    j = np.arange(1, top + 1, dtype=_LD)
    term = s * j ** _LD(alpha)
    log_j = np.log(j) if log_case else None
    levels = np.arange(_LEVEL, top // 4 + 1, _LEVEL)
    plain = np.empty((len(_TAIL_ORDERS), len(levels)), dtype=_LD)
    logged = np.empty_like(plain) if log_case else None
    jj = j * j
    for row, n in enumerate(_TAIL_ORDERS):
        if n:
            term = term / jj
        plain[row] = _tail_sums(term, levels, with_log=False)
        if logged is not None:
            logged[row] = _tail_sums(term * log_j, levels, with_log=True)
    logger.debug("Built symmetric tail tables for alpha=%r (%d levels)", alpha, len(levels))
    return plain, logged


def _tail_correction(alpha: float, u: np.ndarray, level: int) -> tuple[np.ndarray, float]:
    """Sum of the pairs j > K = 64·level, expanded in even powers of u/j."""
    plain, logged = _tail_tables(alpha)
    col = level - 1
    log_coeffs = _log_series_coeffs(alpha, _TAIL_ORDERS[-1] + 1) if logged is not None else None
    total = np.zeros(len(u), dtype=_LD)
    last = np.zeros(len(u), dtype=_LD)
    for row, n in enumerate(_TAIL_ORDERS):
        b = _LD(binomial_value_to_float(gen_binomial(alpha, n)))
        coef = b * plain[row, col]
        if logged is not None:
            coef = b * logged[row, col] + _LD(log_coeffs[n]) * plain[row, col]
        last = u**n * coef
        total = total + last
    return 2 * total, 2.0 * float(np.max(np.abs(last))) if len(u) else 0.0


def _kernel(y: np.ndarray, alpha: np.longdouble, log_case: bool) -> np.ndarray:
    ay = np.abs(y)
    if not log_case:
        return ay**alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        out = ay**alpha * np.log(ay)
    return np.where(ay == 0, -np.inf if alpha == 0 else 0.0, out)


def _pair_sum(alpha: float, u: np.ndarray, s: np.ndarray, k_top: int) -> np.ndarray:
    """s_0 M(u) + Σ_{j=1}^{K} s_j (M(u − j) + M(u + j)) in extended precision."""
    a = _LD(alpha)
    log_case = _is_log_order(alpha)
    j = np.arange(1, k_top + 1, dtype=_LD)
    weights = s[1 : k_top + 1]
    out = np.empty(len(u), dtype=_LD)
    rows = max(1, _CHUNK_ELEMENTS // max(k_top, 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        for lo in range(0, len(u), rows):
            uc = u[lo : lo + rows].astype(_LD)
            centre = s[0] * _kernel(uc, a, log_case)
            if k_top:
                grid = uc[:, None]
                pairs = _kernel(grid - j, a, log_case) + _kernel(grid + j, a, log_case)
                centre = centre + np.sum(pairs * weights, axis=1)
            out[lo : lo + rows] = centre
    return out


def _symmetric_abs_values(
    alpha: float, u: np.ndarray, policy: TruncationPolicy
) -> tuple[np.ndarray, float]:
    """B*^α at the distinct nonnegative abscissae *u*, plus a tail bound."""
    o = as_order(alpha)
    if o.is_odd_nonneg:
        half = int(alpha + 1) // 2
        s = symmetric_difference_run(alpha + 1.0, half + 1, dtype=_LD)
        out = _pair_sum(alpha, u, s, half)
        out[u >= half] = 0.0
        return out.astype(float), 0.0

    if not policy.tail_correction:
        k_top = policy.max_terms
        s = symmetric_difference_run(alpha + 1.0, k_top + 1, dtype=_LD)
        out = _pair_sum(alpha, u, s, k_top)
        edge = _kernel(u.astype(_LD) + k_top, _LD(alpha), _is_log_order(alpha)) + _kernel(
            u.astype(_LD) - k_top, _LD(alpha), _is_log_order(alpha)
        )
        bound = float(k_top * abs(s[k_top]) * np.max(np.abs(edge))) if len(u) else 0.0
        if bound > policy.tail_tolerance:
            logger.warning(
                "Symmetric spline tail bound %.3g exceeds tolerance %.3g (K=%d)",
                bound,
                policy.tail_tolerance,
                k_top,
            )
        return out.astype(float), bound

    levels = np.ceil((4.0 * u + 32.0) / _LEVEL).astype(int)
    max_level = _TAIL_TOP // 4 // _LEVEL
    if len(u) and levels.max() > max_level:
        raise PreconditionViolated(
            f"|x| up to {float(u.max()):g} is beyond the tail-corrected range; "
            "disable tail_correction to use a plain truncation"
        )
    out = np.empty(len(u), dtype=_LD)
    bound = 0.0
    if not len(u):
        return out.astype(float), bound
    s_all = symmetric_difference_run(alpha + 1.0, int(levels.max()) * _LEVEL + 1, dtype=_LD)
    for level in np.unique(levels):
        idx = np.flatnonzero(levels == level)
        k_top = int(level) * _LEVEL
        uc = u[idx].astype(_LD)
        tail, last = _tail_correction(alpha, uc, int(level))
        out[idx] = _pair_sum(alpha, u[idx], s_all, k_top) + tail
        bound = max(bound, last)
    return out.astype(float), bound


def eval_symmetric_spline(
    order: Order | float, x: ArrayLike, trunc: TruncationPolicy | None = None
) -> tuple[ArrayLike, float]:
    """B*^α(x) = Σ_k (−1)^k binom(α+1, k + (α+1)/2) x*^α(x − k).

    Compactly supported for odd integer α. Otherwise the pairs beyond a cut-off
    K(|x|) are summed through their expansion in even powers of |x|/j, unless
    ``trunc.tail_correction`` is off, in which case the series stops after
    ``trunc.max_terms`` pairs. Returns the values and a bound on the neglected tail.
    """
    o = as_order(order)
    policy = trunc or TruncationPolicy()
    arr, scalar = _as_array(x)
    uniq, inverse = np.unique(np.abs(arr).ravel(), return_inverse=True)
    vals, bound = _symmetric_abs_values(o.alpha, uniq, policy)
    out = vals[inverse].reshape(arr.shape)
    return _restore(out, scalar), bound


def symmetric_lattice_values(
    order: Order | float, y: np.ndarray, trunc: TruncationPolicy | None = None
) -> tuple[np.ndarray, float]:
    """B*^α on abscissae that repeat up to rounding, evaluated once per distinct |y|."""
    o = as_order(order)
    policy = trunc or TruncationPolicy()
    arr = np.asarray(y, dtype=float)
    keys = np.round(np.abs(arr).ravel(), _LATTICE_DECIMALS)
    uniq, inverse = np.unique(keys, return_inverse=True)
    vals, bound = _symmetric_abs_values(o.alpha, uniq, policy)
    return vals[inverse].reshape(arr.shape), bound


# ---------------------------------------------------------------------------
# Fourier forms
# ---------------------------------------------------------------------------


def fourier_causal_spline(order: Order | float, omega: ArrayLike) -> complex | np.ndarray:
    """((1 − e^{−iω})/(iω))^{α+1} on the principal branch; 1 at ω = 0."""
    o = as_order(order)
    w = np.asarray(omega, dtype=float)
    z = np.ones(w.shape, dtype=complex)
    nz = w != 0
    z[nz] = (1.0 - np.exp(-1j * w[nz])) / (1j * w[nz])
    out = np.zeros(w.shape, dtype=complex)
    live = z != 0
    out[live] = z[live] ** (o.alpha + 1.0)
    return complex(out) if w.ndim == 0 else out


def fourier_symmetric_spline(order: Order | float, omega: ArrayLike) -> ArrayLike:
    """|(1 − e^{−iω})/ω|^{α+1} = |2 sin(ω/2)/ω|^{α+1}; 1 at ω = 0."""
    o = as_order(order)
    w, scalar = _as_array(omega)
    ratio = np.ones_like(w)
    nz = w != 0
    ratio[nz] = np.abs(2.0 * np.sin(w[nz] / 2.0) / w[nz])
    return _restore(ratio ** (o.alpha + 1.0), scalar)


def eval_symmetric_spline_spectral(
    order: Order | float, grid: Grid1D, n_freq: int = 4096, oversample: int = 64
) -> np.ndarray:
    """Spectrally normalized B*^α on a grid symmetric about 0, by inverse FFT.

    The transform is sampled on a grid *oversample* times finer than *grid* and
    at least *n_freq* points long, which must be a power of two.
    """
    o = as_order(order)
    if n_freq < 1 or n_freq & (n_freq - 1):
        raise PreconditionViolated("n_freq must be a power of two")
    if abs(grid.start + grid.stop) > 1e-9 * max(1.0, abs(grid.start)):
        raise PreconditionViolated("grid must be symmetric about 0")
    fine_step = grid.step / oversample
    fine_count = oversample * (grid.count - 1) + 1
    n = max(n_freq, 1 << math.ceil(math.log2(4 * fine_count)))
    omega = 2.0 * np.pi * np.fft.fftfreq(n, d=fine_step)
    spectrum = fourier_symmetric_spline(o, omega) * np.exp(1j * omega * grid.start)
    values = np.fft.ifft(spectrum).real / fine_step
    return values[:fine_count:oversample]


def compare_symmetric_spectral(
    order: Order | float,
    grid: Grid1D,
    n_freq: int = 4096,
    trunc: TruncationPolicy | None = None,
    tol: float = 1e-3,
) -> CheckReport:
    """Fit series ≈ scale·spectral by least squares and report the relative misfit."""
    o = as_order(order)
    series, bound = eval_symmetric_spline(o, grid.points(), trunc)
    spectral = eval_symmetric_spline_spectral(o, grid, n_freq)
    scale = float(np.dot(series, spectral) / np.dot(spectral, spectral))
    misfit = np.abs(series - scale * spectral)
    peak = float(np.max(np.abs(series)))
    worst = int(np.argmax(misfit))
    residual = float(misfit[worst]) / peak
    return CheckReport(
        name="symmetric_spectral",
        residual=residual,
        tolerance=tol,
        passed=residual <= tol,
        alpha=o.alpha,
        location=float(grid.points()[worst]),
        details={"scale": scale, "tail_bound": bound},
    )


# ---------------------------------------------------------------------------
# Spectral fractional derivatives
# ---------------------------------------------------------------------------


def fractional_derivative_spectral(
    samples: np.ndarray,
    grid: Grid1D,
    beta: float,
    kind: SplineKind = SplineKind.CAUSAL,
    pad_factor: int = SPECTRAL_PAD_FACTOR,
) -> np.ndarray:
    """Multiply the zero-padded spectrum by (iω)^β (causal) or |ω|^β (symmetric).

    Only the real part is returned. The samples are treated as periodic once
    padded; callers discard a boundary band.
    """
    data = np.asarray(samples, dtype=float)
    if data.shape != (grid.count,):
        raise PreconditionViolated("samples must match the grid")
    if beta < 0:
        raise PreconditionViolated("beta must be nonnegative")
    n = 1 << math.ceil(math.log2(max(pad_factor, 1) * grid.count))
    padded = np.zeros(n)
    padded[: grid.count] = data
    omega = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.step)
    multiplier = np.full(n, 1.0 if beta == 0 else 0.0, dtype=complex)
    nz = omega != 0
    if kind is SplineKind.CAUSAL:
        multiplier[nz] = (1j * omega[nz]) ** beta
    else:
        multiplier[nz] = np.abs(omega[nz]) ** beta
    return np.fft.ifft(np.fft.fft(padded) * multiplier).real[: grid.count]


def derivative_relation_sides(
    alpha: float, beta: float, grid: Grid1D
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Both sides of D^β B₊^α = Γ(α+1)/Γ(α−β+1) · Δ₊^β B₊^{α−β} on *grid*.

    The left side is spectral, computed on a grid refined to a step of at most
    1/1024. The right side applies the forward difference to the lower-order
    spline, a finite sum since B₊^{α−β} vanishes left of 0. Returns x, lhs, rhs and the
    mask of points away from the knots and the boundary band.
    """
    if beta < 0 or beta >= alpha + 1.0:
        raise PreconditionViolated("the derivative order must satisfy 0 <= beta < alpha + 1")
    if grid.start > 0:
        raise PreconditionViolated("grid must start at or before 0")
    refine = max(1, math.ceil(grid.step * 1024 - 1e-9))
    fine = Grid1D(start=grid.start, step=grid.step / refine, count=(grid.count - 1) * refine + 1)
    samples = eval_causal_spline(alpha, fine.points())
    lhs = fractional_derivative_spectral(samples, fine, beta, SplineKind.CAUSAL, pad_factor=16)
    lhs = lhs[::refine]

    x = grid.points()
    factor = float(gamma(alpha + 1.0) / gamma(alpha - beta + 1.0))
    lower = alpha - beta
    rhs = factor * np.asarray(
        forward_difference(beta, lambda t: eval_causal_spline(lower, t), x, support_start=0.0)
    )

    span = grid.stop - grid.start
    band = INTERIOR_FRACTION * span
    interior = (x >= grid.start + band) & (x <= grid.stop - band)
    away = np.abs(x - np.rint(x)) >= 2.0 * grid.step * (1.0 - 1e-9)
    return x, lhs, rhs, interior & away


def check_derivative_relation(
    alpha: float, beta: float, grid: Grid1D, tol: float = 1e-3
) -> CheckReport:
    x, lhs, rhs, keep = derivative_relation_sides(alpha, beta, grid)
    diff = np.where(keep, np.abs(lhs - rhs), 0.0)
    worst = int(np.argmax(diff))
    residual = float(diff[worst])
    logger.info("D^%g B^%g: residual %.3g over %d points", beta, alpha, residual, int(keep.sum()))
    return CheckReport(
        name="derivative_relation",
        residual=residual,
        tolerance=tol,
        passed=residual <= tol,
        alpha=alpha,
        location=float(x[worst]),
        details={
            "beta": beta,
            "factor": float(gamma(alpha + 1.0) / gamma(alpha - beta + 1.0)),
            "excluded": float(grid.count - int(keep.sum())),
        },
    )


# ---------------------------------------------------------------------------
# Convolution identity and Strang-Fix
# ---------------------------------------------------------------------------


def convolution_identity_residual(
    alpha1: float, alpha2: float, count: int = 2048, tol: float = 1e-12
) -> CheckReport:
    """max |B̂^{α1} B̂^{α2} − B̂^{α1+α2+1}| over ω in [−8π, 8π], both kinds."""
    omega = np.linspace(-8.0 * np.pi, 8.0 * np.pi, count)
    alpha3 = alpha1 + alpha2 + 1.0
    causal = np.abs(
        fourier_causal_spline(alpha1, omega) * fourier_causal_spline(alpha2, omega)
        - fourier_causal_spline(alpha3, omega)
    )
    symmetric = np.abs(
        fourier_symmetric_spline(alpha1, omega) * fourier_symmetric_spline(alpha2, omega)
        - fourier_symmetric_spline(alpha3, omega)
    )
    both = np.maximum(causal, symmetric)
    worst = int(np.argmax(both))
    residual = float(both[worst])
    return CheckReport(
        name="convolution_identity",
        residual=residual,
        tolerance=tol,
        passed=residual <= tol,
        alpha=alpha1,
        location=float(omega[worst]),
        details={
            "alpha2": alpha2,
            "causal": float(causal.max()),
            "symmetric": float(symmetric.max()),
        },
    )


def convolution_time_domain_residual(
    alpha1: float,
    alpha2: float,
    x_max: float = 6.0,
    step: float = 1.0 / 256,
    tol: float | None = None,
) -> CheckReport:
    """Trapezoid convolution of sampled causal splines against the closed form.

    Series normalization gives B^{α1} ∗ B^{α2} = c · B^{α1+α2+1} with
    c = Γ(α1+1)Γ(α2+1)/Γ(α1+α2+2). The default tolerance is two steps.
    """
    n = int(round(x_max / step)) + 1
    t = step * np.arange(n, dtype=float)
    f = eval_causal_spline(alpha1, t)
    g = eval_causal_spline(alpha2, t)
    conv = np.convolve(f, g)[:n] * step
    conv -= 0.5 * step * (f[0] * g + f * g[0])
    ratio = float(gamma(alpha1 + 1.0) * gamma(alpha2 + 1.0) / gamma(alpha1 + alpha2 + 2.0))
    expected = ratio * eval_causal_spline(alpha1 + alpha2 + 1.0, t)
    err = np.abs(conv - expected)
    worst = int(np.argmax(err))
    limit = 2.0 * step if tol is None else tol
    return CheckReport(
        name="convolution_time_domain",
        residual=float(err[worst]),
        tolerance=limit,
        passed=float(err[worst]) <= limit,
        alpha=alpha1,
        location=float(t[worst]),
        details={"alpha2": alpha2, "ratio": ratio, "step": step},
    )


def strang_fix_residuals(
    order: Order | float, m_max: int | None = None, k_max: int = 3, h: float = 1e-3
) -> np.ndarray:
    """|d^m/dω^m B̂*^α(2πk)| for m = 0 .. m_max and k = 1 .. k_max.

    Derivatives are central finite differences with spacing *h* on the symmetric
    transform, whose modulus the causal transform shares. Row m, column k − 1.
    """
    o = as_order(order)
    m_top = o.ceil if m_max is None else m_max
    out = np.zeros((m_top + 1, k_max))
    for m in range(m_top + 1):
        i = np.arange(m + 1)
        weights = (-1.0) ** i * np.array([math.comb(m, int(v)) for v in i]) / h**m
        offsets = (m / 2.0 - i) * h
        for k in range(1, k_max + 1):
            values = fourier_symmetric_spline(o, 2.0 * np.pi * k + offsets)
            out[m, k - 1] = abs(float(np.dot(weights, values)))
    return out


# ---------------------------------------------------------------------------
# Spline handle
# ---------------------------------------------------------------------------


class FractionalSpline(BaseModel):
    """A fractional B-spline: kind, order and the evaluation strategy."""

    model_config = ConfigDict(frozen=True)

    kind: SplineKind
    order: Order
    strategy: Strategy = Strategy.EXACT_FINITE_SUM
    truncation: TruncationPolicy = Field(default_factory=TruncationPolicy)

    @model_validator(mode="after")
    def _strategy_fits(self) -> FractionalSpline:
        if self.kind is SplineKind.CAUSAL and self.strategy is Strategy.SPECTRAL_GRID:
            raise ValueError("spectral evaluation is available for symmetric splines only")
        if (
            self.kind is SplineKind.SYMMETRIC
            and self.strategy is Strategy.EXACT_FINITE_SUM
            and not self.order.is_odd_nonneg
        ):
            raise ValueError("an exact finite sum exists only for odd integer symmetric orders")
        return self

    @classmethod
    def default(cls, kind: SplineKind, order: Order | float) -> FractionalSpline:
        o = as_order(order)
        if kind is SplineKind.SYMMETRIC and not o.is_odd_nonneg:
            return cls(kind=kind, order=o, strategy=Strategy.TRUNCATED_SERIES)
        return cls(kind=kind, order=o)

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        if self.strategy is Strategy.SPECTRAL_GRID:
            raise PreconditionViolated("spectral evaluation needs a grid; use evaluate_grid")
        if self.kind is SplineKind.CAUSAL:
            return eval_causal_spline(self.order, x)
        values, _ = eval_symmetric_spline(self.order, x, self.truncation)
        return values

    def evaluate_grid(self, grid: Grid1D) -> np.ndarray:
        if self.strategy is Strategy.SPECTRAL_GRID:
            return eval_symmetric_spline_spectral(self.order, grid)
        return np.asarray(self.evaluate(grid.points()))

    def fourier(self, omega: ArrayLike) -> complex | np.ndarray | float:
        if self.kind is SplineKind.CAUSAL:
            return fourier_causal_spline(self.order, omega)
        return fourier_symmetric_spline(self.order, omega)
