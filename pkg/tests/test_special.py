"""Tests for Gamma and generalized binomial coefficients."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fracspline.models import BinomialKind, PoleError
from fracspline.special import (
    binomial_decay_constant,
    binomial_run,
    binomial_series_partial_sum,
    binomial_value_to_float,
    gen_binomial,
    is_pole,
    log_gamma,
    symmetric_binomial,
)

NON_INTEGER_M = [-4.7, -3.3, -2.5, -1.25, -0.6, 0.3, 1.5, 2.2, 3.75, 4.9]

# ---------------------------------------------------------------------------
# log_gamma
# ---------------------------------------------------------------------------


class TestLogGamma:
    def test_one(self):
        assert log_gamma(1.0) == (pytest.approx(0.0, abs=1e-15), 1)

    def test_half(self):
        log_abs, sign = log_gamma(0.5)
        assert log_abs == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
        assert sign == 1

    def test_pole(self):
        with pytest.raises(PoleError):
            log_gamma(-2.0)

    def test_near_pole(self):
        with pytest.raises(PoleError):
            log_gamma(-3.0 + 1e-12)

    @pytest.mark.parametrize("x", [0.1, 1.7, 5.5, 30.25, 99.0, 170.0])
    def test_positive_matches_math(self, x):
        log_abs, sign = log_gamma(x)
        assert sign == 1
        assert log_abs == pytest.approx(math.lgamma(x), rel=1e-13, abs=1e-14)

    @pytest.mark.parametrize("x", [-0.5, -1.5, -2.25, -7.8, -20.5])
    def test_negative_via_reflection(self, x):
        log_abs, sign = log_gamma(x)
        assert sign * math.exp(log_abs) == pytest.approx(math.gamma(x), rel=1e-12)

    def test_array_input(self):
        log_abs, sign = log_gamma(np.array([0.5, -0.5, 3.0]))
        assert log_abs.shape == (3,)
        assert list(sign) == [1, -1, 1]
        assert log_abs[2] == pytest.approx(math.log(2.0))

    def test_is_pole(self):
        assert is_pole(0.0)
        assert is_pole(-4.0)
        assert not is_pole(-4.5)
        assert not is_pole(1.0)


# ---------------------------------------------------------------------------
# gen_binomial
# ---------------------------------------------------------------------------


class TestGenBinomial:
    def test_pascal_integer(self):
        value = gen_binomial(2, 1)
        assert value.kind is BinomialKind.FINITE
        assert value.value == 2.0

    def test_linear_in_m(self):
        assert gen_binomial(1.5, 1).value == pytest.approx(1.5, rel=1e-14)

    def test_denominator_pole_is_zero(self):
        assert gen_binomial(-2, -1).is_zero

    def test_product_formula(self):
        m = 2.5
        expected = m * (m - 1) * (m - 2) * (m - 3) / 24.0
        assert expected == pytest.approx(-5 / 128)
        assert gen_binomial(m, 4).value == pytest.approx(expected, rel=1e-12)

    def test_integer_outside_range_is_zero(self):
        assert gen_binomial(3, 5).is_zero
        assert gen_binomial(3, -1).is_zero

    def test_negative_integer_top_is_finite_limit(self):
        # binom(-1, k) = (-1)^k
        for k in range(6):
            assert gen_binomial(-1, k).value == (-1.0) ** k

    def test_uncancelled_numerator_pole_is_infinite(self):
        value = gen_binomial(-1, 0.5)
        assert value.is_infinite
        assert binomial_value_to_float(value) in (math.inf, -math.inf)

    @pytest.mark.parametrize("m", NON_INTEGER_M)
    def test_pascal_consistency(self, m):
        for n in range(21):
            lhs = binomial_value_to_float(gen_binomial(m, n))
            rhs = binomial_value_to_float(gen_binomial(m - 1, n - 1)) + binomial_value_to_float(
                gen_binomial(m - 1, n)
            )
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-14)

    @pytest.mark.parametrize("alpha", [0.5, 1.5, 2.3])
    def test_negative_exponent_identity(self, alpha):
        for k in range(21):
            lhs = gen_binomial(-alpha - 1, k).value
            rhs = (-1) ** k * gen_binomial(k + alpha, k).value
            assert lhs == pytest.approx(rhs, rel=1e-11)


class TestBinomialValueToFloat:
    def test_kinds(self):
        assert binomial_value_to_float(gen_binomial(4, 2)) == 6.0
        assert binomial_value_to_float(gen_binomial(-2, -1)) == 0.0


# ---------------------------------------------------------------------------
# symmetric_binomial
# ---------------------------------------------------------------------------


class TestSymmetricBinomial:
    def test_integer_case(self):
        assert symmetric_binomial(2, 1).value == 1.0
        assert symmetric_binomial(2, 0).value == 2.0

    def test_odd_negative_is_infinite(self):
        assert symmetric_binomial(-1, 0).is_infinite
        assert symmetric_binomial(-3, 2).is_infinite

    def test_gamma_oracle(self):
        expected = math.gamma(4.0) / (math.gamma(2.5) * math.gamma(2.5))
        assert symmetric_binomial(3, 0).value == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 1.5, 2.2, -0.4, -2.0, 3.0])
    def test_evenness(self, alpha):
        for k in range(1, 65):
            lhs = binomial_value_to_float(symmetric_binomial(alpha, k))
            rhs = binomial_value_to_float(symmetric_binomial(alpha, -k))
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)

    def test_even_negative_uses_absolute_index(self):
        assert symmetric_binomial(-2, 3) == symmetric_binomial(-2, -3)


# ---------------------------------------------------------------------------
# Runs, decay, and the power series
# ---------------------------------------------------------------------------


class TestBinomialRun:
    def test_exact_integer(self):
        assert list(binomial_run(3, 0, 6)) == [1.0, 3.0, 3.0, 1.0, 0.0, 0.0]

    def test_exact_negative_integer(self):
        # binom(-2, k) = (-1)^k (k + 1)
        assert list(binomial_run(-2, 0, 4)) == [1.0, -2.0, 3.0, -4.0]

    def test_matches_gamma_path(self):
        run = binomial_run(1.5, 0.75, 12)
        for j, value in enumerate(run):
            assert value == pytest.approx(gen_binomial(1.5, 0.75 + j).value, rel=1e-12)

    def test_prefix_is_stable(self):
        short = binomial_run(-1.5, -0.75, 50)
        long = binomial_run(-1.5, -0.75, 500)
        assert np.array_equal(short, long[:50])

    def test_longdouble(self):
        run = binomial_run(2.5, 0.0, 10, dtype=np.longdouble)
        assert run.dtype == np.longdouble
        assert float(run[1]) == pytest.approx(2.5)


class TestDecay:
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 1.75, 2.5])
    def test_asymptotic_constant(self, alpha):
        limit = 1.0 / abs(math.gamma(-alpha - 1.0))
        k = 4096
        tail = abs(gen_binomial(alpha + 1.0, k).value) * k ** (alpha + 2.0)
        assert tail == pytest.approx(limit, rel=1e-2)
        assert binomial_decay_constant(alpha) >= tail

    def test_bound_holds(self):
        alpha = 0.5
        c = binomial_decay_constant(alpha, k_max=512)
        for k in range(2, 513):
            assert abs(gen_binomial(alpha + 1.0, k).value) <= c * k ** (-alpha - 2.0) * (1 + 1e-12)


class TestPowerSeries:
    def test_matches_closed_form_inside_disk(self):
        z = 0.3 + 0.2j
        assert binomial_series_partial_sum(0.5, z, 80) == pytest.approx((1 + z) ** 0.5, rel=1e-12)

    def test_unit_circle(self):
        omega = np.pi / 2
        z = np.exp(-1j * omega)
        expected = (1 + z) ** 1.5
        assert binomial_series_partial_sum(1.5, z, 20000) == pytest.approx(expected, abs=1e-5)
