import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macdkit import (
    ExpansionSpec,
    InsufficientSamplesError,
    UniformSignal,
    WindowSpec,
    aligned_values,
    centered_avg,
    check_difference_identity,
    check_lp_bound,
    check_macd_derivative,
    check_window_monotonicity,
    check_phase_corrected_form,
    check_recursive_decomposition,
    check_recursive_expansion,
    classify_trend,
    delay,
    double_right_avg,
    expansion_rhs,
    macd,
    right_avg,
    smoothed_derivative,
)
from macdkit.identities import check_macd_derivative_central, default_tolerance


def ramp(n, dt=1.0):
    return UniformSignal(0.0, dt, np.arange(float(n)))


def constant(n, c=3.25):
    return UniformSignal(0.0, 1.0, np.full(n, c))


# --- ExpansionSpec -----------------------------------------------------------

@given(n=st.integers(min_value=1, max_value=64), kb=st.integers(min_value=1, max_value=16))
@settings(max_examples=100, deadline=None)
def test_expansion_spec_invariants(n, kb):
    spec = ExpansionSpec.of(n, kb, 1.0)
    assert abs(math.fsum(spec.weights) - 1.0) <= 1e-14
    assert spec.a.k == n * kb
    assert len(spec.weights) == n


def test_expansion_spec_rejects_bad_term_count():
    with pytest.raises(ValueError):
        ExpansionSpec.of(0, 4, 1.0)


# --- recursive decomposition -------------------------------------------------

def test_decomposition_small_example_is_exact():
    sig = UniformSignal(0.0, 1.0, [1, 2, 3, 4, 5, 6])
    report = check_recursive_decomposition(sig, 1, 2)
    assert report.max_rel_residual <= 1e-15  # rounding of the 1/3, 2/3 weights
    assert report.valid_range == (2, 5)
    # the raw numbers behind the residual at index 5
    lhs = right_avg(sig, 3).values[-1]
    rhs = (1 / 3) * 6.0 + (2 / 3) * 4.5
    assert lhs == rhs == 5.0


def test_decomposition_constant():
    assert check_recursive_decomposition(constant(50), 4, 9).max_abs_residual == 0.0


def test_decomposition_random_10k(random_signal):
    sig = random_signal(10_000)
    report = check_recursive_decomposition(sig, 5, 7)
    assert report.max_rel_residual <= 1e-12


def test_decomposition_insufficient():
    with pytest.raises(InsufficientSamplesError):
        check_recursive_decomposition(constant(5), 3, 3)


# --- difference identity -------------------------------------------------------

def test_difference_identity_constant_and_ramp():
    assert check_difference_identity(constant(40), 3, 5).max_abs_residual == 0.0
    report = check_difference_identity(ramp(40), 2, 2)
    assert report.max_abs_residual == 0.0
    # both sides equal 1.0 on a unit ramp with two 2-sample windows
    short = right_avg(ramp(40), 2)
    assert macd(ramp(40), 2).values[0] == 1.0
    assert 0.5 * (short.values[2] - short.values[0]) == 1.0


def test_difference_identity_random_10k(random_signal):
    report = check_difference_identity(random_signal(10_000), 6, 4)
    assert report.max_rel_residual <= 1e-12


# --- derivative form ------------------------------------------------------------

def test_macd_derivative_constant_and_ramp():
    assert check_macd_derivative(constant(30), 3).max_abs_residual == 0.0
    sig = ramp(30)
    report = check_macd_derivative(sig, 2)
    assert report.max_abs_residual == 0.0
    assert np.all(macd(sig, 2).values == 1.0)
    assert np.all(smoothed_derivative(sig, 2).values == 1.0)


def test_macd_derivative_random_10k(random_signal):
    report = check_macd_derivative(random_signal(10_000), 8)
    assert report.max_rel_residual <= 1e-12


def test_central_difference_cross_check_is_only_approximate(rng):
    # Smooth signal: the symmetric-difference variant carries an O(dt^2)
    # truncation error, far above the exact checks but still small.
    t = np.linspace(0.0, 2 * np.pi, 1000)
    sig = UniformSignal(0.0, float(t[1] - t[0]), np.sin(t))
    exact = check_macd_derivative(sig, 4)
    approx = check_macd_derivative_central(sig, 4)
    assert exact.max_rel_residual <= 1e-12
    assert 1e-9 < approx.max_rel_residual < 1e-2


# --- phase-corrected form ---------------------------------------------------------

def test_phase_corrected_rejects_odd_window():
    with pytest.raises(ValueError, match="even"):
        check_phase_corrected_form(ramp(60), 3)


def test_phase_corrected_constant_and_ramp():
    assert check_phase_corrected_form(constant(30), 2).max_abs_residual == 0.0
    assert check_phase_corrected_form(ramp(30), 2).max_abs_residual == 0.0


def test_phase_corrected_random_10k(random_signal):
    report = check_phase_corrected_form(random_signal(10_000), 10)
    assert report.max_rel_residual <= 1e-12


def test_delayed_double_centered_equals_double_trailing(random_signal):
    # The shift identity behind the phase-corrected form, bit for bit.
    sig = random_signal(200)
    k = 6
    shifted = delay(centered_avg(centered_avg(sig, k), k), k)
    plain = double_right_avg(sig, k)
    sv, pv = aligned_values(shifted, plain)
    assert np.array_equal(sv, pv)


def test_centered_block_equals_trailing_block_one_lag_earlier(random_signal):
    # For even blocks, the centered double average at lag i*b reads the same
    # samples as the trailing double average at lag (i-1)*b.
    sig = random_signal(300)
    kb = 4
    for i in (1, 2, 3):
        cen = delay(centered_avg(centered_avg(sig, kb), kb), i * kb)
        tra = delay(double_right_avg(sig, kb), (i - 1) * kb)
        cv, tv = aligned_values(cen, tra)
        assert np.array_equal(cv, tv)


# --- recursive expansion -----------------------------------------------------------

def test_expansion_single_term_matches_derivative_form_bitwise(random_signal):
    sig = random_signal(500)
    spec = ExpansionSpec.of(1, 6, sig.dt)
    via_expansion = expansion_rhs(sig, spec)
    via_derivative = smoothed_derivative(sig, 6)
    ev, dv = aligned_values(via_expansion, via_derivative)
    assert np.max(np.abs(ev - dv)) <= 1e-14


def test_expansion_constant():
    spec = ExpansionSpec.of(3, 4, 1.0)
    assert check_recursive_expansion(constant(100), spec).max_abs_residual == 0.0


def test_expansion_random_10k(random_signal):
    sig = random_signal(10_000)
    report = check_recursive_expansion(sig, ExpansionSpec.of(5, 4, sig.dt))
    assert report.max_rel_residual <= 1e-12


def test_expansion_insufficient():
    spec = ExpansionSpec.of(4, 4, 1.0)
    with pytest.raises(InsufficientSamplesError) as err:
        check_recursive_expansion(constant(30), spec)
    assert err.value.required == (2 * 4 + 2) * 4


# --- norm bound ----------------------------------------------------------------------

@pytest.mark.parametrize("p", [1, 2, math.inf])
def test_lp_bound_on_random_signals(p, rng):
    for trial in range(20):
        sig = UniformSignal(0.0, 0.5, rng.uniform(-1, 1, 600))
        ratio = check_lp_bound(sig, int(rng.integers(1, 12)), p)
        assert ratio <= 2.0
        assert ratio <= 1.0 + 1e-12


def test_lp_bound_constant_is_zero():
    for p in (1, 2, math.inf):
        assert check_lp_bound(constant(40), 4, p) == 0.0


def test_lp_bound_zero_signal_rejected():
    zero = UniformSignal(0.0, 1.0, np.zeros(40))
    with pytest.raises(ValueError, match="undefined ratio"):
        check_lp_bound(zero, 4, 2)


def test_lp_bound_rejects_unknown_order():
    with pytest.raises(ValueError, match="norm order"):
        check_lp_bound(constant(40), 4, 3)


# --- monotonicity ---------------------------------------------------------------------

def test_monotonicity_on_strict_ramp():
    result = check_window_monotonicity(ramp(100), 3, 8)
    assert result.passed
    assert result.first_violation is None
    assert result.hypothesis_count == result.scanned  # increasing: always fires
    assert result.equality_passed


def test_monotonicity_vacuous_on_constant():
    result = check_window_monotonicity(constant(100), 3, 8)
    assert result.passed
    assert result.hypothesis_count == 0


def test_monotonicity_random_batch(rng):
    for _ in range(50):
        sig = UniformSignal(0.0, 1.0, rng.uniform(-1, 1, 512))
        result = check_window_monotonicity(sig, 3, 8)
        assert result.passed
        assert result.equality_passed


def test_monotonicity_requires_longer_second_window():
    with pytest.raises(ValueError, match="exceed"):
        check_window_monotonicity(ramp(50), 8, 8)


# --- trend classification ----------------------------------------------------------------

def test_classify_trend_examples():
    up = classify_trend(ramp(50), 30, 2, 2)
    assert up.label == "increasing"
    assert up.margin == 1.0

    flat = classify_trend(constant(50), 30, 2, 2)
    assert flat.label == "linear"
    assert flat.margin == 0.0

    down = classify_trend(UniformSignal(0.0, 1.0, -np.arange(50.0)), 30, 2, 2)
    assert down.label == "decreasing"
    assert down.margin == -1.0


def test_classify_trend_antisymmetry(rng):
    sig = UniformSignal(0.0, 1.0, rng.uniform(-1, 1, 200))
    flipped = UniformSignal(0.0, 1.0, -sig.values)
    swap = {"increasing": "decreasing", "decreasing": "increasing", "linear": "linear"}
    for index in (20, 57, 199):
        a = classify_trend(sig, index, 3, 5, tol=1e-9)
        b = classify_trend(flipped, index, 3, 5, tol=1e-9)
        assert b.label == swap[a.label]
        assert b.margin == -a.margin


def test_classify_trend_scale_invariance(rng):
    sig = UniformSignal(0.0, 1.0, rng.uniform(-1, 1, 200))
    alpha = 37.5
    scaled = UniformSignal(0.0, 1.0, alpha * sig.values)
    tol = 1e-6
    for index in (30, 100, 150):
        base = classify_trend(sig, index, 4, 4, tol=tol)
        big = classify_trend(scaled, index, 4, 4, tol=tol * alpha)
        assert big.label == base.label
        assert big.margin == pytest.approx(alpha * base.margin, rel=1e-12)


def test_classify_trend_index_bounds():
    sig = ramp(20)
    with pytest.raises(IndexError):
        classify_trend(sig, 2, 2, 2)  # needs index >= a.k + b.k - 1 = 3
    with pytest.raises(IndexError):
        classify_trend(sig, 20, 2, 2)
    classify_trend(sig, 3, 2, 2)  # boundary index is valid


def test_default_tolerance_tracks_magnitude():
    sig = UniformSignal(0.0, 1.0, np.array([0.5, -4.0, 1.0]))
    assert default_tolerance(sig) == pytest.approx(4e-9)


def test_identity_battery_with_non_representable_spacing(rng):
    # dt = 0.1 is inexact in binary; the deep delay/derivative compositions
    # must still re-align on the sample grid and stay at noise level.
    sig = UniformSignal(5.3, 0.1, rng.uniform(-1, 1, 20_000))
    reports = [
        check_recursive_decomposition(sig, 9, 14),
        check_difference_identity(sig, 11, 7),
        check_macd_derivative(sig, 13),
        check_phase_corrected_form(sig, 12),
        check_recursive_expansion(sig, ExpansionSpec.of(8, 8, sig.dt)),
    ]
    for report in reports:
        assert report.max_rel_residual <= 1e-12, report


# --- residual report scale invariance ------------------------------------------------------

def test_residual_rel_scale_invariance(random_signal):
    sig = random_signal(2000)
    big = UniformSignal(sig.t0, sig.dt, 1e9 * sig.values)
    r1 = check_recursive_decomposition(sig, 5, 7)
    r2 = check_recursive_decomposition(big, 5, 7)
    assert r2.max_rel_residual <= 1e-12
    assert r2.max_rel_residual == pytest.approx(r1.max_rel_residual, rel=1e-3, abs=1e-15)
