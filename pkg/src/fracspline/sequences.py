"""Masks, reproduction coefficients, DDFT, convolution and the Strang-Fix solvers."""

from __future__ import annotations

import logging
import math
import threading
from collections.abc import Callable

import numpy as np
from scipy.linalg import solve_triangular, toeplitz

from fracspline.config import DEFAULT_REGULARIZATION, ILL_CONDITIONED
from fracspline.models import (
    CheckReport,
    ClosedFormUnavailable,
    FrequencyGrid,
    InfiniteCoefficient,
    Order,
    PreconditionViolated,
    SingularSystem,
    SolveReport,
    SplineKind,
    Support,
    as_order,
)
from fracspline.special import binomial_decay_constant, binomial_run, symmetric_binomial

logger = logging.getLogger("fracspline.sequences")

_MAX_WINDOW = 2**17
_DDFT_CHUNK = 4096

# ---------------------------------------------------------------------------
# Coefficient runs
# ---------------------------------------------------------------------------


def _alternating(count: int, dtype: type = float) -> np.ndarray:
    signs = np.ones(count, dtype=dtype)
    signs[1::2] = -1
    return signs


def forward_difference_run(beta: float, count: int, dtype: type = float) -> np.ndarray:
    """(−1)^k binom(beta, k) for k = 0 .. count − 1."""
    return _alternating(count, dtype) * binomial_run(beta, 0.0, count, dtype=dtype)


def symmetric_difference_run(beta: float, count: int, dtype: type = float) -> np.ndarray:
    """(−1)^j binom(beta, j + beta/2) for j = 0 .. count − 1, the j ≥ 0 half of an even run."""
    beta = float(beta)
    if beta.is_integer() and beta < 0:
        if int(beta) % 2:
            raise InfiniteCoefficient(f"symmetric coefficients of order {beta:g} are infinite")
        vals = [symmetric_binomial(beta, j) for j in range(count)]
        run = np.asarray([v.value if v.is_finite else 0.0 for v in vals], dtype=dtype)
        return _alternating(count, dtype) * run
    return _alternating(count, dtype) * binomial_run(beta, beta / 2.0, count, dtype=dtype)


# ---------------------------------------------------------------------------
# CoefficientSequence
# ---------------------------------------------------------------------------


class _PrefixCache:
    """Grows a prefix-stable run on demand; readers only see complete arrays."""

    def __init__(self, fn: Callable[[int], np.ndarray]) -> None:
        self._fn = fn
        self._values = np.zeros(0)
        self._lock = threading.Lock()

    def get(self, count: int) -> np.ndarray:
        values = self._values
        if len(values) >= count:
            return values[:count]
        with self._lock:
            if len(self._values) < count:
                size = max(count, 2 * len(self._values), 64)
                self._values = self._fn(size)
            return self._values[:count]


class CoefficientSequence:
    """An integer-indexed real sequence generated on demand.

    ``extent`` is the closed index range outside which the sequence vanishes, when
    that range is finite.
    """

    def __init__(
        self,
        name: str,
        support: Support,
        window_fn: Callable[[int, int], np.ndarray],
        extent: tuple[int, int] | None = None,
        even: bool = False,
    ) -> None:
        self.name = name
        self.support = support
        self.extent = extent
        self.even = even
        self._window_fn = window_fn

    def __repr__(self) -> str:
        return f"CoefficientSequence({self.name!r}, support={self.support.value})"

    @classmethod
    def one_sided(
        cls,
        name: str,
        run: Callable[[int], np.ndarray],
        extent: tuple[int, int] | None = None,
    ) -> CoefficientSequence:
        cache = _PrefixCache(run)

        def window(k_min: int, k_max: int) -> np.ndarray:
            out = np.zeros(k_max - k_min + 1)
            lo = max(k_min, 0)
            if k_max >= lo:
                out[lo - k_min :] = cache.get(k_max + 1)[lo:]
            return out

        return cls(name, Support.NONNEGATIVE_ONLY, window, extent=extent)

    @classmethod
    def two_sided_even(
        cls,
        name: str,
        run: Callable[[int], np.ndarray],
        extent: tuple[int, int] | None = None,
    ) -> CoefficientSequence:
        cache = _PrefixCache(run)

        def window(k_min: int, k_max: int) -> np.ndarray:
            k = np.abs(np.arange(k_min, k_max + 1))
            return cache.get(int(k.max()) + 1)[k]

        return cls(name, Support.ALL_INTEGERS, window, extent=extent, even=True)

    @classmethod
    def from_values(
        cls, values: np.ndarray | list[float], start: int = 0, name: str = "explicit"
    ) -> CoefficientSequence:
        """A finitely supported sequence with values[i] at index start + i."""
        stored = np.asarray(values, dtype=float).copy()
        stop = start + len(stored) - 1

        def window(k_min: int, k_max: int) -> np.ndarray:
            out = np.zeros(k_max - k_min + 1)
            lo, hi = max(k_min, start), min(k_max, stop)
            if hi >= lo:
                out[lo - k_min : hi - k_min + 1] = stored[lo - start : hi - start + 1]
            return out

        support = Support.NONNEGATIVE_ONLY if start >= 0 else Support.ALL_INTEGERS
        return cls(name, support, window, extent=(start, stop))

    # -- access ---------------------------------------------------------------

    def values(self, k_min: int, k_max: int) -> np.ndarray:
        """Coefficients for k = k_min .. k_max inclusive."""
        if k_max < k_min:
            return np.zeros(0)
        return self._window_fn(int(k_min), int(k_max))

    def coeff(self, k: int) -> float:
        return float(self.values(k, k)[0])

    def shifted(self, shift: int) -> CoefficientSequence:
        """The sequence q with q_k = self_{k − shift}."""
        extent = None
        if self.extent is not None:
            extent = (self.extent[0] + shift, self.extent[1] + shift)
        support = self.support
        if support is Support.NONNEGATIVE_ONLY and shift < 0:
            support = Support.ALL_INTEGERS

        def window(k_min: int, k_max: int) -> np.ndarray:
            return self.values(k_min - shift, k_max - shift)

        return CoefficientSequence(f"{self.name}>>{shift}", support, window, extent=extent)


def materialize(seq: CoefficientSequence, window: tuple[int, int]) -> np.ndarray:
    return seq.values(window[0], window[1])


def shifted(seq: CoefficientSequence, shift: int) -> CoefficientSequence:
    return seq.shifted(shift)


def delta() -> CoefficientSequence:
    return CoefficientSequence.from_values([1.0], 0, name="delta")


# ---------------------------------------------------------------------------
# Difference operators as sequences
# ---------------------------------------------------------------------------


def difference_coeffs(beta: float, kind: SplineKind) -> CoefficientSequence:
    """Coefficients of the causal or symmetric finite difference of order *beta*.

    Negative *beta* gives the inverse difference.
    """
    beta = float(beta)
    if kind is SplineKind.CAUSAL:
        extent = (0, int(beta)) if beta.is_integer() and beta >= 0 else None
        return CoefficientSequence.one_sided(
            f"causal_diff({beta:g})",
            lambda n: forward_difference_run(beta, n),
            extent=extent,
        )
    if beta.is_integer() and beta < 0 and int(beta) % 2:
        raise InfiniteCoefficient(f"symmetric coefficients of order {beta:g} are infinite")
    extent = None
    if beta.is_integer() and beta >= 0 and int(beta) % 2 == 0:
        half = int(beta) // 2
        extent = (-half, half)
    return CoefficientSequence.two_sided_even(
        f"symmetric_diff({beta:g})",
        lambda n: symmetric_difference_run(beta, n),
        extent=extent,
    )


# ---------------------------------------------------------------------------
# Masks
# ---------------------------------------------------------------------------


def causal_mask(order: Order | float) -> CoefficientSequence:
    """a_k = 2^(−(α+1)) binom(α+1, k), k ≥ 0."""
    alpha = as_order(order).alpha
    scale = 2.0 ** (-(alpha + 1.0))
    extent = (0, int(alpha) + 1) if as_order(order).is_integer else None
    return CoefficientSequence.one_sided(
        f"a({alpha:g})",
        lambda n: scale * binomial_run(alpha + 1.0, 0.0, n),
        extent=extent,
    )


def causal_detail_mask(order: Order | float, normalized: bool = False) -> CoefficientSequence:
    """b_k = (−1)^k a_k; unnormalized, b̃_k = (−1)^k binom(α+1, k)."""
    alpha = as_order(order).alpha
    scale = 2.0 ** (-(alpha + 1.0)) if normalized else 1.0
    extent = (0, int(alpha) + 1) if as_order(order).is_integer else None
    return CoefficientSequence.one_sided(
        f"b({alpha:g}{'' if normalized else ', unnormalized'})",
        lambda n: scale * forward_difference_run(alpha + 1.0, n),
        extent=extent,
    )


def symmetric_mask(order: Order | float) -> CoefficientSequence:
    """a*_k = 2^(−(α+1)) binom(α+1, k + (α+1)/2), even in k."""
    o = as_order(order)
    beta = o.alpha + 1.0
    scale = 2.0 ** (-beta)
    extent = None
    if o.is_odd_nonneg:
        half = int(beta) // 2
        extent = (-half, half)
    return CoefficientSequence.two_sided_even(
        f"a*({o.alpha:g})",
        lambda n: scale * binomial_run(beta, beta / 2.0, n),
        extent=extent,
    )


def symmetric_detail_mask(order: Order | float, normalized: bool = False) -> CoefficientSequence:
    """b_k = (−1)^k a*_k; unnormalized, (−1)^k binom(α+1, k + (α+1)/2)."""
    o = as_order(order)
    beta = o.alpha + 1.0
    scale = 2.0 ** (-beta) if normalized else 1.0
    extent = None
    if o.is_odd_nonneg:
        half = int(beta) // 2
        extent = (-half, half)
    return CoefficientSequence.two_sided_even(
        f"b*({o.alpha:g}{'' if normalized else ', unnormalized'})",
        lambda n: scale * symmetric_difference_run(beta, n),
        extent=extent,
    )


# ---------------------------------------------------------------------------
# Reproduction coefficients
# ---------------------------------------------------------------------------


def reproduction_coeffs_causal(order: Order | float) -> CoefficientSequence:
    """p_k = binom(k+α, k), k ≥ 0."""
    alpha = as_order(order).alpha
    seq = difference_coeffs(-alpha - 1.0, SplineKind.CAUSAL)
    seq.name = f"p({alpha:g})"
    return seq


def reproduction_coeffs_symmetric(order: Order | float) -> CoefficientSequence:
    """p_k = (−1)^k binom(−α−1, k − (α+1)/2) for non-integer α."""
    o = as_order(order)
    if o.is_integer:
        raise ClosedFormUnavailable(
            f"closed-form symmetric coefficients do not apply to integer order {o.alpha:g}"
        )
    seq = difference_coeffs(-o.alpha - 1.0, SplineKind.SYMMETRIC)
    seq.name = f"p*({o.alpha:g})"
    return seq


# ---------------------------------------------------------------------------
# Truncation windows and frequency grids
# ---------------------------------------------------------------------------


def frequency_grid(count: int) -> FrequencyGrid:
    return FrequencyGrid(count=count)


def default_window(order: Order | float, tol: float = 1e-10) -> int:
    """Window K for which the decay model C·k^(−α−2) puts the tail below *tol*."""
    o = as_order(order)
    if o.is_integer:
        return int(o.alpha) + 2
    alpha = o.alpha
    c = binomial_decay_constant(alpha, k_max=256)
    k = math.ceil((c / ((alpha + 1.0) * tol)) ** (1.0 / (alpha + 1.0)))
    k = min(max(k, 16), _MAX_WINDOW)
    logger.debug("default window for alpha=%g, tol=%g: K=%d", alpha, tol, k)
    return k


# ---------------------------------------------------------------------------
# DDFT and convolution
# ---------------------------------------------------------------------------


def ddft_values(
    values: np.ndarray, k_min: int, omega: np.ndarray | FrequencyGrid
) -> np.ndarray:
    """Σ_k values[k − k_min] e^{−ikω} for every ω.

    On a uniform :class:`FrequencyGrid` the window is folded modulo the grid size and
    transformed with one FFT; arbitrary frequencies use direct sums in chunks.
    """
    if isinstance(omega, FrequencyGrid):
        n = omega.count
        k = k_min + np.arange(len(values))
        folded = np.bincount(np.mod(k, n), weights=values, minlength=n)
        return np.fft.fft(folded)
    w = np.asarray(omega, dtype=float)
    out = np.zeros(w.shape, dtype=complex)
    for lo in range(0, len(values), _DDFT_CHUNK):
        chunk = values[lo : lo + _DDFT_CHUNK]
        k = k_min + lo + np.arange(len(chunk))
        out += np.exp(-1j * np.multiply.outer(w, k)) @ chunk
    return out


def ddft(
    seq: CoefficientSequence,
    grid: FrequencyGrid | np.ndarray,
    window: tuple[int, int],
) -> np.ndarray:
    """Truncated DDFT of *seq* over the inclusive index *window*."""
    k_min, k_max = window
    return ddft_values(seq.values(k_min, k_max), k_min, grid)


def discrete_convolution(
    p: CoefficientSequence,
    q: CoefficientSequence,
    out_window: tuple[int, int],
    inner_window: tuple[int, int] | None = None,
) -> np.ndarray:
    """(p⊛q)_n = Σ_k p_{n−k} q_k for n in *out_window*, k in *inner_window*.

    Without an explicit inner window, two one-sided operands sum over 0 ≤ k ≤ n_max;
    otherwise the finite extent of q (or of p, by commutativity) is used.
    """
    n_min, n_max = out_window
    if inner_window is None:
        if (
            p.support is Support.NONNEGATIVE_ONLY
            and q.support is Support.NONNEGATIVE_ONLY
        ):
            inner_window = (0, max(n_max, 0))
        elif q.extent is not None:
            inner_window = q.extent
        elif p.extent is not None:
            return discrete_convolution(q, p, out_window, p.extent)
        else:
            raise PreconditionViolated(
                "convolution of two infinitely supported sequences needs an inner window"
            )
    k_lo, k_hi = inner_window
    qv = q.values(k_lo, k_hi)
    pv = p.values(n_min - k_hi, n_max - k_lo)
    return np.convolve(pv, qv, mode="valid")


# ---------------------------------------------------------------------------
# Weakened Strang-Fix solvers
# ---------------------------------------------------------------------------


def solve_weak_strang_fix_causal(b: CoefficientSequence, n_terms: int) -> CoefficientSequence:
    """p_0 .. p_{n_terms−1} with (b⊛p)_n = δ_n, by forward substitution."""
    if b.support is not Support.NONNEGATIVE_ONLY:
        raise PreconditionViolated("causal solve needs a one-sided sequence")
    if n_terms < 1:
        raise PreconditionViolated("n_terms must be at least 1")
    bv = b.values(0, n_terms - 1)
    if abs(bv[0]) < 1e-300:
        raise SingularSystem("leading coefficient b_0 vanishes")
    matrix = toeplitz(bv, np.zeros(n_terms))
    rhs = np.zeros(n_terms)
    rhs[0] = 1.0
    p = solve_triangular(matrix, rhs, lower=True)
    return CoefficientSequence.from_values(p, 0, name=f"solve({b.name})")


def solve_weak_strang_fix_symmetric(
    b: CoefficientSequence,
    half_width: int,
    regularization: float = DEFAULT_REGULARIZATION,
) -> SolveReport:
    """Even p on |k| ≤ half_width minimizing ‖T[b]p − δ‖² + λ‖p‖².

    Evenness is built in: the unknowns are p_0 .. p_H and p_{−k} = p_k.
    """
    h = half_width
    column = b.values(0, 2 * h)
    row = b.values(-2 * h, 0)[::-1]
    full = toeplitz(column, row)[h:, :]  # rows n = 0 .. H, columns k = −H .. H
    fold = np.zeros((2 * h + 1, h + 1))
    for k in range(-h, h + 1):
        fold[k + h, abs(k)] = 1.0
    matrix = full @ fold
    rhs = np.zeros(h + 1)
    rhs[0] = 1.0

    if regularization > 0:
        system = np.vstack([matrix, math.sqrt(regularization) * np.eye(h + 1)])
        target = np.concatenate([rhs, np.zeros(h + 1)])
    else:
        system, target = matrix, rhs
    half, *_ = np.linalg.lstsq(system, target, rcond=None)

    condition = float(np.linalg.cond(matrix))
    ill = condition > ILL_CONDITIONED
    if ill:
        logger.warning("symmetric solve is ill-conditioned (cond=%.3g)", condition)
    else:
        logger.debug("symmetric solve: H=%d, cond=%.3g", h, condition)

    residual = float(np.max(np.abs(matrix @ half - rhs)))
    indices = np.arange(-h, h + 1)
    return SolveReport(
        indices=indices,
        coefficients=half[np.abs(indices)],
        condition=condition,
        ill_conditioned=ill,
        residual=residual,
        regularization=regularization,
    )


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


def check_delta(
    b: CoefficientSequence,
    p: CoefficientSequence,
    n_terms: int,
    tol: float,
    inner_window: tuple[int, int] | None = None,
) -> CheckReport:
    """max_n |(b⊛p)_n − δ_n| over 0 ≤ n < n_terms."""
    conv = discrete_convolution(b, p, (0, n_terms - 1), inner_window)
    target = np.zeros(n_terms)
    target[0] = 1.0
    dev = np.abs(conv - target)
    worst = int(np.argmax(dev))
    residual = float(dev[worst])
    return CheckReport(
        name="delta",
        residual=residual,
        tolerance=tol,
        passed=residual <= tol,
        location=float(worst),
        details={"observed_scale": float(conv[0]), "n_terms": float(n_terms)},
    )


def det_condition(
    a: CoefficientSequence,
    b: CoefficientSequence,
    grid: FrequencyGrid,
    window: tuple[int, int],
) -> tuple[float, float]:
    """(min |det|, argmin ω) of [[â(ω), â(ω+π)], [b̂(ω), b̂(ω+π)]] over *grid*.

    Both sequences are rescaled so the windowed â(0) is 1.
    """
    k_min, k_max = window
    av = a.values(k_min, k_max)
    bv = b.values(k_min, k_max)
    a0 = float(np.sum(av))
    if a0 != 0.0:
        av = av / a0
        bv = bv / a0
    # e^{−ik(ω+π)} = (−1)^k e^{−ikω}
    flip = _alternating(len(av))
    if k_min % 2:
        flip = -flip
    a_w = ddft_values(av, k_min, grid)
    a_wpi = ddft_values(flip * av, k_min, grid)
    b_w = ddft_values(bv, k_min, grid)
    b_wpi = ddft_values(flip * bv, k_min, grid)
    det = np.abs(a_w * b_wpi - a_wpi * b_w)
    i = int(np.argmin(det))
    return float(det[i]), float(grid.samples[i])


def _det_at_zero(a: CoefficientSequence, b: CoefficientSequence, window: tuple[int, int]) -> float:
    k_min, k_max = window
    av = a.values(k_min, k_max)
    bv = b.values(k_min, k_max)
    flip = _alternating(len(av))
    if k_min % 2:
        flip = -flip
    a0 = float(np.sum(av))
    a_zero, a_pi = 1.0, float(np.sum(flip * av)) / a0
    b_zero, b_pi = float(np.sum(bv)) / a0, float(np.sum(flip * bv)) / a0
    return a_zero * b_pi - a_pi * b_zero


def check_det_condition(
    order: Order | float,
    kind: SplineKind = SplineKind.CAUSAL,
    count: int = 512,
    window: int | None = None,
    tol: float = 1e-10,
    floor: float = 1e-6,
) -> CheckReport:
    """Determinant condition on the normalized masks of *order*.

    The symmetric pair, and the causal pair of odd integer order, vanish at ω = π/2;
    those rows are reported as skipped.
    """
    o = as_order(order)
    if kind is SplineKind.SYMMETRIC or o.is_odd_nonneg:
        return CheckReport(
            name="det_condition",
            residual=0.0,
            tolerance=tol,
            passed=True,
            skipped=True,
            alpha=o.alpha,
            note="determinant vanishes at pi/2 for this mask pair",
        )
    k = window if window is not None else default_window(o, tol=1e-7)
    a = causal_mask(o)
    b = causal_detail_mask(o, normalized=True)
    min_det, at = det_condition(a, b, frequency_grid(count), (0, k))
    det0 = _det_at_zero(a, b, (0, k))
    residual = abs(det0 - 1.0)
    return CheckReport(
        name="det_condition",
        residual=residual,
        tolerance=tol,
        passed=residual <= tol and min_det > floor,
        alpha=o.alpha,
        location=at,
        details={"min_abs_det": min_det, "window": float(k)},
    )
