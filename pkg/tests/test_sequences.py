"""Tests for masks, reproduction coefficients, DDFT, convolution and solvers."""

from __future__ import annotations

import threading

import numpy as np
import pytest

from fracspline.models import (
    ClosedFormUnavailable,
    FrequencyGrid,
    PreconditionViolated,
    SingularSystem,
    SplineKind,
    Support,
)
from fracspline.sequences import (
    CoefficientSequence,
    causal_detail_mask,
    causal_mask,
    check_delta,
    check_det_condition,
    ddft,
    default_window,
    delta,
    det_condition,
    difference_coeffs,
    discrete_convolution,
    frequency_grid,
    materialize,
    reproduction_coeffs_causal,
    reproduction_coeffs_symmetric,
    shifted,
    solve_weak_strang_fix_causal,
    solve_weak_strang_fix_symmetric,
    symmetric_detail_mask,
    symmetric_mask,
)
from fracspline.special import gen_binomial

DELTA_ALPHAS = [0.2, 0.5, 1.0, 1.75, 2.5]

# ---------------------------------------------------------------------------
# CoefficientSequence
# ---------------------------------------------------------------------------


class TestCoefficientSequence:
    def test_one_sided_zero_left_of_origin(self):
        seq = causal_mask(0.5)
        assert seq.support is Support.NONNEGATIVE_ONLY
        assert list(seq.values(-3, -1)) == [0.0, 0.0, 0.0]

    def test_deterministic(self):
        seq = reproduction_coeffs_causal(0.3)
        first = seq.values(0, 40).copy()
        seq.values(0, 5000)  # grow the cache
        assert np.array_equal(first, seq.values(0, 40))
        assert seq.coeff(17) == first[17]

    def test_from_values_window(self):
        seq = CoefficientSequence.from_values([1.0, 2.0, 3.0], start=-1)
        assert seq.support is Support.ALL_INTEGERS
        assert list(seq.values(-2, 2)) == [0.0, 1.0, 2.0, 3.0, 0.0]
        assert seq.extent == (-1, 1)

    def test_shifted(self):
        seq = CoefficientSequence.from_values([1.0, 2.0])
        moved = shifted(seq, 2)
        assert list(moved.values(0, 3)) == [0.0, 0.0, 1.0, 2.0]
        assert moved.extent == (2, 3)

    def test_materialize(self):
        assert list(materialize(causal_mask(1), (0, 3))) == [0.25, 0.5, 0.25, 0.0]

    def test_concurrent_readers(self):
        seq = reproduction_coeffs_causal(0.7)
        reference = reproduction_coeffs_causal(0.7).values(0, 3000)
        results: list[np.ndarray] = []

        def read(n: int) -> None:
            results.append(seq.values(0, n)[:1000])

        threads = [threading.Thread(target=read, args=(n,)) for n in (1000, 2000, 3000, 1500)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for r in results:
            assert np.array_equal(r, reference[:1000])


# ---------------------------------------------------------------------------
# Masks
# ---------------------------------------------------------------------------


class TestCausalMask:
    def test_hat(self):
        assert list(causal_mask(1).values(0, 3)) == [0.25, 0.5, 0.25, 0.0]

    def test_haar(self):
        assert list(causal_mask(0).values(0, 2)) == [0.5, 0.5, 0.0]

    def test_gamma_oracle(self):
        assert causal_mask(0.5).coeff(2) == pytest.approx(2**-1.5 * 0.375, rel=1e-14)

    def test_unit_dc_gain(self):
        value = ddft(causal_mask(0.5), np.array([0.0]), (0, 4096))[0]
        assert abs(value - 1.0) <= 1e-10


class TestCausalDetailMask:
    def test_normalized_haar(self):
        assert list(causal_detail_mask(0, normalized=True).values(0, 2)) == [0.5, -0.5, 0.0]

    def test_unnormalized_haar(self):
        assert list(causal_detail_mask(0, normalized=False).values(0, 2)) == [1.0, -1.0, 0.0]

    def test_gamma_oracle(self):
        assert causal_detail_mask(0.5).coeff(1) == pytest.approx(-1.5, rel=1e-14)


class TestSymmetricMask:
    def test_hat(self):
        assert list(symmetric_mask(1).values(-2, 2)) == [0.0, 0.25, 0.5, 0.25, 0.0]

    def test_even(self):
        vals = symmetric_mask(0.5).values(-10, 10)
        assert np.array_equal(vals, vals[::-1])

    def test_unit_dc_gain(self):
        value = ddft(symmetric_mask(0.5), np.array([0.0]), (-4096, 4096))[0]
        assert abs(value - 1.0) <= 1e-9


class TestSymmetricDetailMask:
    def test_alternates_mask(self):
        k = np.arange(-3, 4)
        detail = symmetric_detail_mask(1, normalized=True).values(-3, 3)
        mask = symmetric_mask(1).values(-3, 3)
        assert np.array_equal(detail, (-1.0) ** k * mask)

    def test_even(self):
        vals = symmetric_detail_mask(1.5).values(-12, 12)
        assert np.array_equal(vals, vals[::-1])

    def test_gamma_oracle(self):
        expected = gen_binomial(1.5, 0.75).value
        assert symmetric_detail_mask(0.5).coeff(0) == pytest.approx(expected, rel=1e-14)


# ---------------------------------------------------------------------------
# Reproduction coefficients
# ---------------------------------------------------------------------------


class TestReproductionCoeffs:
    def test_causal_integer(self):
        assert list(reproduction_coeffs_causal(1).values(0, 5)) == [1, 2, 3, 4, 5, 6]

    @pytest.mark.parametrize("alpha", [0.0, 0.37, 1.5, 4.2])
    def test_causal_p0(self, alpha):
        assert reproduction_coeffs_causal(alpha).coeff(0) == 1.0

    def test_causal_half(self):
        assert reproduction_coeffs_causal(0.5).coeff(1) == pytest.approx(1.5, rel=1e-14)

    def test_causal_matches_gamma(self):
        p = reproduction_coeffs_causal(0.5).values(0, 50)
        for k in range(51):
            assert p[k] == pytest.approx(gen_binomial(k + 0.5, k).value, rel=1e-12)

    def test_symmetric_gamma_oracle(self):
        expected = gen_binomial(-1.5, -0.75).value
        assert reproduction_coeffs_symmetric(0.5).coeff(0) == pytest.approx(expected, rel=1e-14)

    def test_symmetric_even(self):
        vals = reproduction_coeffs_symmetric(1.5).values(-30, 30)
        assert np.array_equal(vals, vals[::-1])

    @pytest.mark.parametrize("alpha", [1, 2, 3])
    def test_symmetric_integer_unavailable(self, alpha):
        with pytest.raises(ClosedFormUnavailable):
            reproduction_coeffs_symmetric(alpha)


# ---------------------------------------------------------------------------
# DDFT
# ---------------------------------------------------------------------------


class TestDdft:
    def test_delta(self):
        values = ddft(delta(), frequency_grid(16), (0, 0))
        np.testing.assert_allclose(values, np.ones(16), atol=1e-15)

    def test_two_term(self):
        grid = frequency_grid(32)
        seq = CoefficientSequence.from_values([0.5, 0.5])
        expected = (1 + np.exp(-1j * grid.samples)) / 2
        np.testing.assert_allclose(ddft(seq, grid, (0, 1)), expected, atol=1e-15)

    def test_causal_mask_closed_form(self):
        omega = np.array([np.pi / 2])
        value = ddft(causal_mask(0.5), omega, (0, 1024))[0]
        expected = ((1 + np.exp(-1j * np.pi / 2)) / 2) ** 1.5
        assert abs(value - expected) <= 1e-6

    def test_shift(self):
        grid = frequency_grid(64)
        seq = CoefficientSequence.from_values([1.0, -2.0, 0.5, 3.0])
        moved = ddft(shifted(seq, 3), grid, (3, 6))
        expected = np.exp(-3j * grid.samples) * ddft(seq, grid, (0, 3))
        np.testing.assert_allclose(moved, expected, atol=1e-14)

    def test_grid_matches_direct_sum(self):
        grid = frequency_grid(24)
        seq = causal_mask(0.5)
        fast = ddft(seq, grid, (0, 100))
        direct = ddft(seq, grid.samples, (0, 100))
        np.testing.assert_allclose(fast, direct, atol=1e-13)

    def test_convolution_homomorphism(self):
        grid = frequency_grid(40)
        p = CoefficientSequence.from_values([1.0, 2.0, -1.0])
        q = CoefficientSequence.from_values([0.5, 0.25, 3.0, 1.0])
        conv = CoefficientSequence.from_values(discrete_convolution(p, q, (0, 5)))
        lhs = ddft(conv, grid, (0, 5))
        rhs = ddft(p, grid, (0, 2)) * ddft(q, grid, (0, 3))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_frequency_grid(self):
        grid = FrequencyGrid(count=8)
        assert grid.samples[0] == 0.0
        assert np.all(np.diff(grid.samples) > 0)
        assert grid.samples[-1] < 2 * np.pi


# ---------------------------------------------------------------------------
# Convolution
# ---------------------------------------------------------------------------


class TestDiscreteConvolution:
    def test_delta_identity(self):
        p = reproduction_coeffs_causal(0.5)
        np.testing.assert_array_equal(discrete_convolution(p, delta(), (0, 20)), p.values(0, 20))

    def test_telescoping(self):
        ones = CoefficientSequence.one_sided("ones", lambda n: np.ones(n))
        diff = CoefficientSequence.from_values([1.0, -1.0])
        result = discrete_convolution(diff, ones, (0, 20))
        expected = np.zeros(21)
        expected[0] = 1.0
        np.testing.assert_array_equal(result, expected)

    def test_detail_times_p_is_delta(self):
        p = reproduction_coeffs_causal(0.5)
        result = discrete_convolution(causal_detail_mask(0.5), p, (0, 63))
        expected = np.zeros(64)
        expected[0] = 1.0
        np.testing.assert_allclose(result, expected, atol=1e-10)

    def test_two_infinite_sequences_need_window(self):
        a = symmetric_mask(0.5)
        with pytest.raises(PreconditionViolated):
            discrete_convolution(a, a, (0, 4))

    def test_explicit_inner_window(self):
        a = symmetric_mask(1)
        result = discrete_convolution(a, a, (-2, 2), inner_window=(-1, 1))
        np.testing.assert_allclose(result, [1 / 16, 4 / 16, 6 / 16, 4 / 16, 1 / 16])

    def test_inverse_differences_compose(self):
        half = difference_coeffs(-1.5, SplineKind.CAUSAL)
        full = difference_coeffs(-3.0, SplineKind.CAUSAL)
        composed = discrete_convolution(half, half, (0, 63))
        np.testing.assert_allclose(composed, full.values(0, 63), rtol=1e-8)


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


class TestCausalSolver:
    def test_delta(self):
        p = solve_weak_strang_fix_causal(delta(), 8)
        assert list(p.values(0, 7)) == [1.0] + [0.0] * 7

    def test_geometric(self):
        p = solve_weak_strang_fix_causal(CoefficientSequence.from_values([1.0, -1.0]), 10)
        np.testing.assert_allclose(p.values(0, 9), np.ones(10))

    @pytest.mark.parametrize("alpha", DELTA_ALPHAS)
    def test_matches_closed_form(self, alpha):
        p = solve_weak_strang_fix_causal(causal_detail_mask(alpha), 64)
        np.testing.assert_allclose(
            p.values(0, 63), reproduction_coeffs_causal(alpha).values(0, 63), rtol=1e-10
        )

    def test_singular(self):
        with pytest.raises(SingularSystem):
            solve_weak_strang_fix_causal(CoefficientSequence.from_values([0.0, 1.0]), 4)

    def test_needs_one_sided(self):
        with pytest.raises(PreconditionViolated):
            solve_weak_strang_fix_causal(symmetric_mask(0.5), 4)

    @pytest.mark.parametrize("n_terms", [0, -3])
    def test_needs_at_least_one_term(self, n_terms):
        with pytest.raises(PreconditionViolated):
            solve_weak_strang_fix_causal(causal_detail_mask(0.5), n_terms)


class TestSymmetricSolver:
    def test_delta(self):
        report = solve_weak_strang_fix_symmetric(delta(), 8, regularization=0.0)
        expected = np.zeros(17)
        expected[8] = 1.0
        np.testing.assert_allclose(report.coefficients, expected, atol=1e-14)

    def test_even(self):
        report = solve_weak_strang_fix_symmetric(symmetric_detail_mask(0.5), 32)
        c = report.coefficients
        assert np.array_equal(c, c[::-1])
        assert list(report.indices[:2]) == [-32, -31]

    def test_hat_detail_is_affine_in_abs_k(self):
        report = solve_weak_strang_fix_symmetric(symmetric_detail_mask(1, normalized=True), 64)
        k = report.indices
        interior = np.abs(k) <= 16
        x = np.abs(k[interior]).astype(float)
        y = report.coefficients[interior]
        slope, intercept = np.polyfit(x, y, 1)
        fit = slope * x + intercept
        assert slope < 0
        assert np.max(np.abs(fit - y)) <= 1e-3 * np.max(np.abs(report.coefficients))

    def test_residual_unregularized(self):
        report = solve_weak_strang_fix_symmetric(
            symmetric_detail_mask(0.5), 128, regularization=0.0
        )
        assert report.residual <= 1e-8
        assert not report.ill_conditioned

    def test_residual_default_regularization(self):
        report = solve_weak_strang_fix_symmetric(symmetric_detail_mask(0.5), 128)
        assert report.residual <= 1e-5
        assert report.regularization == pytest.approx(1e-12)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


class TestCheckDelta:
    @pytest.mark.parametrize("alpha", DELTA_ALPHAS)
    def test_passes(self, alpha):
        p = reproduction_coeffs_causal(alpha)
        report = check_delta(causal_detail_mask(alpha), p, 64, 1e-10)
        assert report.passed, report

    def test_normalized_fails_with_scale(self):
        alpha = 0.5
        report = check_delta(
            causal_detail_mask(alpha, normalized=True),
            reproduction_coeffs_causal(alpha),
            64,
            1e-10,
        )
        assert not report.passed
        assert report.location == 0.0
        assert report.details["observed_scale"] == pytest.approx(2 ** -(alpha + 1), rel=1e-12)
        assert report.residual == pytest.approx(1 - 2 ** -(alpha + 1), rel=1e-12)


class TestDetCondition:
    def test_haar(self):
        a, b = causal_mask(0), causal_detail_mask(0, normalized=True)
        min_det, _ = det_condition(a, b, frequency_grid(64), (0, 1))
        assert min_det == pytest.approx(1.0, abs=1e-14)

    def test_identical_rows(self):
        a = causal_mask(0.5)
        min_det, _ = det_condition(a, a, frequency_grid(64), (0, 256))
        assert min_det == 0.0

    def test_half_order_sweep(self):
        a, b = causal_mask(0.5), causal_detail_mask(0.5, normalized=True)
        min_det, _ = det_condition(a, b, frequency_grid(512), (0, 4096))
        assert min_det > 1e-6

    @pytest.mark.parametrize("alpha", [0.5, 1.5])
    def test_check_report(self, alpha):
        report = check_det_condition(alpha, tol=1e-12)
        assert report.passed, report
        assert report.residual <= 1e-12
        assert report.details["min_abs_det"] > 1e-6

    def test_odd_integer_skipped(self):
        report = check_det_condition(1)
        assert report.skipped
        assert report.passed

    def test_symmetric_skipped(self):
        assert check_det_condition(0.5, kind=SplineKind.SYMMETRIC).skipped


class TestDefaultWindow:
    def test_integer_is_finite(self):
        assert default_window(3) == 5

    def test_tighter_tolerance_grows_window(self):
        assert default_window(0.5, tol=1e-12) > default_window(0.5, tol=1e-6)
