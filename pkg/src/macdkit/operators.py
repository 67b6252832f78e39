"""Trailing, centered and double box averages, MACD and exact derivatives.

All operators are pure functions on :class:`~macdkit.signals.UniformSignal`.
The continuous average over the trailing interval is realized as the
arithmetic mean of the ``k`` most recent samples (the signal is treated as
piecewise-constant on sample cells), which makes every algebraic relation
between the operators exact rather than merely first-order in ``dt``.

Window sums are evaluated either by direct convolution (small windows) or by
a segmented two-pointer scheme whose rounding error is re-anchored with an
exact block sum every few outputs, so large windows stay accurate without an
O(n*k) cost.  Both paths reduce sums of identical values to identical
floats, which is what makes e.g. ``macd(constant) == 0`` hold bit-exactly.
"""

from __future__ import annotations

import numpy as np

from .signals import InsufficientSamplesError, UniformSignal, WindowSpec, as_window

__all__ = [
    "right_avg",
    "centered_avg",
    "double_right_avg",
    "macd",
    "delay",
    "windowed_derivative",
    "sliding_sums",
]

# Direct convolution below this many multiply-adds; segmented rebasing above.
_DIRECT_WORK_LIMIT = 1 << 25


def sliding_sums(values: np.ndarray, k: int) -> np.ndarray:
    """Sums of every length-``k`` window of ``values`` (length ``n - k + 1``).

    Output ``j`` is the sum of ``values[j : j + k]``.  Accuracy is a few
    units in the last place of the window sum regardless of the signal
    length: the segmented path recomputes an exact anchor sum every
    ``max(32, k // 8)`` outputs instead of letting a running sum drift.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    if k < 1:
        raise ValueError("window must be at least 1 sample")
    if n < k:
        raise InsufficientSamplesError(
            f"insufficient samples for window sums: signal has {n}, needs at least {k}",
            required=k,
        )
    if k == 1:
        return values.copy()
    if n * k <= _DIRECT_WORK_LIMIT:
        return np.convolve(values, np.ones(k), mode="valid")
    m = n - k + 1
    out = np.empty(m)
    seg = max(32, k // 8)
    for s in range(0, m, seg):
        e = min(s + seg, m)
        out[s] = values[s : s + k].sum()
        if e > s + 1:
            steps = values[s + k : e + k - 1] - values[s : e - 1]
            out[s + 1 : e] = out[s] + np.cumsum(steps)
    return out


def right_avg(signal: UniformSignal, w: WindowSpec | int) -> UniformSignal:
    """Trailing (causal) box average over the last ``k`` samples.

    Output sample ``j`` is the mean of ``values[j : j + k]``; it is anchored
    at the time of input sample ``j + k - 1``, so a sample of the output and
    the input sample at the same timestamp share the window's right endpoint.
    The result is ``k - 1`` samples shorter than the input.
    """
    w = as_window(w, signal.dt)
    k = w.k
    signal.require(k, f"a {k}-sample average")
    sums = sliding_sums(signal.values, k)
    return UniformSignal(signal.t0 + (k - 1) * signal.dt, signal.dt, sums / k)


def centered_avg(signal: UniformSignal, w: WindowSpec | int) -> UniformSignal:
    """Centered (phase-corrected) box average; requires an even window.

    Identical sample values to :func:`right_avg`, re-anchored half a window
    earlier: the output at time ``t`` equals the trailing average at
    ``t + k/2`` samples.  Odd windows would need half-sample interpolation
    and are rejected.
    """
    w = as_window(w, signal.dt)
    k = w.k
    if k % 2 != 0:
        raise ValueError(f"centered window must have an even sample count, got {k}")
    signal.require(k, f"a {k}-sample centered average")
    trailing = right_avg(signal, w)
    return trailing.with_values(trailing.values, t0=trailing.t0 - (k // 2) * signal.dt)


def double_right_avg(signal: UniformSignal, w: WindowSpec | int) -> UniformSignal:
    """Trailing box average applied twice with the same window.

    Equivalent to convolving with a triangular kernel spanning ``2k - 1``
    samples.
    """
    w = as_window(w, signal.dt)
    signal.require(2 * w.k - 1, f"a doubled {w.k}-sample average")
    return right_avg(right_avg(signal, w), w)


def macd(signal: UniformSignal, a: WindowSpec | int) -> UniformSignal:
    """Short-minus-long trend indicator: ``k``-average minus ``2k``-average.

    Evaluated as ``(S(i) - S(i-k)) / (2k)`` with ``S`` the sliding window
    sum, which is algebraically identical to the difference of the two means
    and cancels bit-exactly on constant signals.  Defined from input index
    ``2k - 1`` onward.
    """
    a = as_window(a, signal.dt)
    k = a.k
    signal.require(2 * k, f"a {k}/{2 * k}-sample average difference")
    sums = sliding_sums(signal.values, k)
    out = (sums[k:] - sums[:-k]) / (2 * k)
    return UniformSignal(signal.t0 + (2 * k - 1) * signal.dt, signal.dt, out)


def delay(signal: UniformSignal, lag_samples: int) -> UniformSignal:
    """Shift the signal ``lag_samples`` into the past.

    The output at time ``t`` reads the input at ``t - lag*dt``, so the
    result starts ``lag`` samples later than the input and ends with it;
    the valid range shrinks by ``lag`` samples.
    """
    lag = int(lag_samples)
    if lag < 0:
        raise ValueError(f"lag must be non-negative, got {lag_samples}")
    n = len(signal)
    if lag >= n:
        raise InsufficientSamplesError(
            f"insufficient samples for a lag of {lag}: signal has {n}, needs at least {lag + 1}",
            required=lag + 1,
        )
    if lag == 0:
        return signal
    return UniformSignal(signal.t0 + lag * signal.dt, signal.dt, signal.values[: n - lag])


def windowed_derivative(signal: UniformSignal, w: WindowSpec | int) -> UniformSignal:
    """Lag-``k`` difference quotient ``(f(i) - f(i-k)) / (k*dt)``.

    For any signal that is itself a trailing ``k``-average this equals the
    exact rate of change of that average in the piecewise-constant model,
    so derivative-form identities hold with no truncation error.
    """
    w = as_window(w, signal.dt)
    k = w.k
    signal.require(k + 1, f"a lag-{k} difference quotient")
    out = (signal.values[k:] - signal.values[:-k]) / (k * signal.dt)
    return UniformSignal(signal.t0 + k * signal.dt, signal.dt, out)
