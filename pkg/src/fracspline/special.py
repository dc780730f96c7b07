"""Generalized binomial coefficients via log-Gamma, with pole bookkeeping."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.special import gammaln

from fracspline.config import NEAR_POLE
from fracspline.models import BinomialKind, BinomialValue, PoleError

logger = logging.getLogger("fracspline.special")

# Integer binomials up to this top index are produced exactly with math.comb.
_EXACT_COMB_LIMIT = 1000


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------


def is_pole(x: float | np.ndarray) -> bool | np.ndarray:
    """True where *x* lies within the near-pole threshold of a nonpositive integer."""
    arr = np.asarray(x, dtype=float)
    hit = (arr <= NEAR_POLE) & (np.abs(arr - np.rint(arr)) < NEAR_POLE)
    return bool(hit) if arr.ndim == 0 else hit


def log_gamma(x: float | np.ndarray) -> tuple[float, int] | tuple[np.ndarray, np.ndarray]:
    """Return ``(log|Γ(x)|, sign Γ(x))``.

    Negative arguments go through the reflection Γ(x)Γ(1−x) = π/sin(πx), with the
    sine evaluated on the reduced argument so large |x| keeps its accuracy.
    Scalars in, scalars out; arrays in, arrays out.
    """
    arr = np.asarray(x, dtype=float)
    poles = np.asarray(is_pole(arr))
    if poles.any():
        bad = arr[poles] if arr.ndim else arr
        raise PoleError(f"Gamma has a pole at {np.ravel(bad)[0]!r}")

    log_abs = np.empty(arr.shape, dtype=float)
    sign = np.ones(arr.shape, dtype=float)

    neg = arr < 0
    pos = ~neg
    log_abs[pos] = gammaln(arr[pos])

    if neg.any():
        xn = arr[neg]
        n = np.rint(xn)
        parity = np.where(np.mod(n, 2) == 0, 1.0, -1.0)
        sin_pix = parity * np.sin(np.pi * (xn - n))
        log_abs[neg] = math.log(math.pi) - np.log(np.abs(sin_pix)) - gammaln(1.0 - xn)
        sign[neg] = np.sign(sin_pix)

    if arr.ndim == 0:
        return float(log_abs), int(sign)
    return log_abs, sign.astype(int)


# ---------------------------------------------------------------------------
# Binomials
# ---------------------------------------------------------------------------


def _comb_float(n: int, k: int) -> float:
    try:
        return float(math.comb(n, k))
    except OverflowError:
        return math.inf


def _integer_limit(m: int, n: int, denominator_pole_at_n: bool) -> float:
    """Finite limit when one numerator pole cancels one denominator pole."""
    if denominator_pole_at_n:
        # n < 0 and m >= n: binom(m, n) = binom(m, m - n)
        d = m - n
        return (-1.0) ** d * _comb_float(-n - 1, d)
    # m < 0 and n >= 0
    return (-1.0) ** n * _comb_float(n - m - 1, n)


def gen_binomial(m: float, n: float) -> BinomialValue:
    """Γ(m+1) / (Γ(n+1) Γ(m−n+1)) for any real *m*, *n*.

    Poles only in the denominator give ``Zero``; an uncancelled numerator pole gives
    ``Infinite`` signed as the right-hand limit in *m*; equal pole counts give the
    finite integer limit.
    """
    m = float(m)
    n = float(n)
    if m.is_integer() and n.is_integer() and 0 <= n <= m <= _EXACT_COMB_LIMIT:
        return BinomialValue.finite(float(math.comb(int(m), int(n))))

    a, b, c = m + 1.0, n + 1.0, m - n + 1.0
    pole_a = is_pole(a)
    pole_b = is_pole(b)
    pole_c = is_pole(c)
    den_poles = int(pole_b) + int(pole_c)

    if not pole_a:
        if den_poles:
            return BinomialValue.zero()
        la, sa = log_gamma(a)
        lb, sb = log_gamma(b)
        lc, sc = log_gamma(c)
        magnitude = float(np.exp(la - (lb + lc)))
        return BinomialValue.finite(sa * sb * sc * magnitude)

    if den_poles == 2:
        return BinomialValue.zero()
    if den_poles == 1:
        value = _integer_limit(round(m), round(n), bool(pole_b))
        return BinomialValue.finite(value)

    # Γ(-p + eps) ~ (-1)^p / (p! eps)
    p = -round(a)
    _, sb = log_gamma(b)
    _, sc = log_gamma(c)
    sign = (-1) ** p * sb * sc
    logger.debug("gen_binomial(%r, %r) is infinite (sign %+d)", m, n, sign)
    return BinomialValue.infinite(sign)


def binomial_value_to_float(value: BinomialValue) -> float:
    """Collapse a tagged binomial to a float: Zero → 0.0, Infinite → ±inf."""
    if value.kind is BinomialKind.FINITE:
        return value.value
    if value.kind is BinomialKind.ZERO:
        return 0.0
    return math.inf if value.sign > 0 else -math.inf


def symmetric_binomial(alpha: float, k: int) -> BinomialValue:
    """binom(alpha, k + alpha/2), with |k| for even negative alpha."""
    alpha = float(alpha)
    if alpha.is_integer() and alpha < 0 and int(alpha) % 2 == 0:
        return gen_binomial(alpha, abs(k) + alpha / 2.0)
    return gen_binomial(alpha, k + alpha / 2.0)


# ---------------------------------------------------------------------------
# Runs of consecutive binomials
# ---------------------------------------------------------------------------


def binomial_run(beta: float, start: float, count: int, dtype: type = float) -> np.ndarray:
    """binom(beta, start + j) for j = 0 .. count - 1.

    Integer *beta* with integer *start* ≥ 0 is produced exactly; everything else
    runs the ratio recurrence binom(β, n+1) = binom(β, n)·(β − n)/(n + 1) from a
    log-Gamma seed. The recurrence is sequential, so a longer run repeats the
    leading values bit for bit.
    """
    if count <= 0:
        return np.zeros(0, dtype=dtype)
    beta = float(beta)
    start = float(start)

    if beta.is_integer() and start.is_integer() and start >= 0:
        b, s = int(beta), int(start)
        if b >= 0:
            vals = [_comb_float(b, s + j) if s + j <= b else 0.0 for j in range(count)]
        else:
            vals = [(-1.0) ** (s + j) * _comb_float(s + j - b - 1, s + j) for j in range(count)]
        return np.asarray(vals, dtype=dtype)

    seed = gen_binomial(beta, start)
    if seed.is_infinite:
        raise PoleError(f"binom({beta!r}, {start!r}) is infinite")
    if seed.is_zero:
        return np.zeros(count, dtype=dtype)

    n = start + np.arange(count - 1, dtype=dtype)
    ratios = (dtype(beta) - n) / (n + 1)
    out = np.empty(count, dtype=dtype)
    out[0] = seed.value
    out[1:] = dtype(seed.value) * np.cumprod(ratios)
    return out


def binomial_decay_constant(alpha: float, k_max: int = 4096) -> float:
    """Smallest C with |binom(alpha+1, k)| ≤ C·k^(−alpha−2) for 2 ≤ k ≤ k_max."""
    vals = np.abs(binomial_run(alpha + 1.0, 0.0, k_max + 1))
    k = np.arange(2, k_max + 1, dtype=float)
    return float(np.max(vals[2:] * k ** (alpha + 2.0)))


def binomial_series_partial_sum(alpha: float, z: complex, n_terms: int) -> complex:
    """Σ_{k<n_terms} binom(alpha, k) z^k, the truncated power form of (1+z)^alpha."""
    coeffs = binomial_run(alpha, 0.0, n_terms)
    powers = np.asarray(z, dtype=complex) ** np.arange(n_terms)
    return complex(np.sum(coeffs * powers))
