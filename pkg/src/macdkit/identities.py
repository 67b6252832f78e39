"""Residual checks for the box-average operator identities.

Each check evaluates both sides of one algebraic identity on a concrete
signal and reports the worst absolute and relative residual over the index
range where both sides are defined.  In the piecewise-constant discrete
model every identity holds exactly, so residuals are pure floating-point
noise: a few ulps, orders of magnitude below the default 1e-12 gate.

The relative residual is taken against ``max |lhs|`` over the common range
(0/0 counts as zero) so that signals of wildly different magnitude can share
one gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    centered_avg,
    delay,
    double_right_avg,
    macd,
    right_avg,
    windowed_derivative,
)
from .signals import UniformSignal, WindowSpec, aligned_values, as_window, sample_offset

__all__ = [
    "ResidualReport",
    "ExpansionSpec",
    "TrendLabel",
    "MonotonicityResult",
    "check_recursive_decomposition",
    "check_difference_identity",
    "check_macd_derivative",
    "check_macd_derivative_central",
    "check_phase_corrected_form",
    "check_recursive_expansion",
    "check_lp_bound",
    "check_window_monotonicity",
    "classify_trend",
    "expansion_rhs",
    "smoothed_derivative",
    "default_tolerance",
]


@dataclass(frozen=True)
class ResidualReport:
    """Worst-case residual of one identity over its valid index range."""

    identity_name: str
    valid_range: tuple[int, int] | None
    max_abs_residual: float
    max_rel_residual: float
    insufficient: bool = False
    required: int | None = None

    def passes(self, rel_tol: float = 1e-12) -> bool:
        return not self.insufficient and self.max_rel_residual <= rel_tol

    @classmethod
    def for_insufficient_samples(cls, name: str, required: int) -> "ResidualReport":
        """Flagged report for a check skipped on a too-short signal."""
        return cls(name, None, math.nan, math.nan, insufficient=True, required=required)


@dataclass(frozen=True)
class ExpansionSpec:
    """Term count and block window of the delayed-derivative expansion.

    The long window is ``a = n * b`` by construction and the term weights
    ``2i / (n(n+1))`` for ``i = 1..n`` sum to one.
    """

    n: int
    b: WindowSpec
    weights: tuple[float, ...] = field(init=False)
    a: WindowSpec = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"term count must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        n = self.n
        object.__setattr__(
            self, "weights", tuple(2.0 * i / (n * (n + 1)) for i in range(1, n + 1))
        )
        object.__setattr__(self, "a", WindowSpec(n * self.b.k, n * self.b.length))

    @classmethod
    def of(cls, n: int, kb: int, dt: float) -> "ExpansionSpec":
        return cls(n, WindowSpec.of(kb, dt))


@dataclass(frozen=True)
class TrendLabel:
    """Local trend call: 'increasing', 'decreasing' or 'linear', with margin."""

    label: str
    margin: float


@dataclass(frozen=True)
class MonotonicityResult:
    """Outcome of the window-monotonicity scan."""

    passed: bool
    first_violation: int | None
    hypothesis_count: int
    scanned: int
    equality_passed: bool
    equality_count: int


def default_tolerance(signal: UniformSignal) -> float:
    """Classifier tolerance proportional to the data magnitude."""
    return 1e-9 * float(np.max(np.abs(signal.values)))


def _report(name: str, lhs: UniformSignal, rhs: UniformSignal,
            reference: UniformSignal) -> ResidualReport:
    lv, rv = aligned_values(lhs, rhs)
    start = max(sample_offset(lhs, reference), sample_offset(rhs, reference))
    resid = np.abs(lv - rv)
    max_abs = float(resid.max())
    denom = float(np.abs(lv).max())
    if denom == 0.0:
        max_rel = 0.0 if max_abs == 0.0 else math.inf
    else:
        max_rel = max_abs / denom
    return ResidualReport(name, (start, start + lv.size - 1), max_abs, max_rel)


def check_recursive_decomposition(signal: UniformSignal, t1: WindowSpec | int,
                                  t2: WindowSpec | int) -> ResidualReport:
    """Split a long trailing average into two shorter ones.

    The average over ``t1 + t2`` samples equals the ``t1``-weighted average
    of the recent block plus the ``t2``-weighted average of the block before
    it.
    """
    t1 = as_window(t1, signal.dt)
    t2 = as_window(t2, signal.dt)
    signal.require(t1.k + t2.k, "the decomposition check")
    total = WindowSpec.of(t1.k + t2.k, signal.dt)
    lhs = right_avg(signal, total)
    w1 = t1.k / total.k
    w2 = t2.k / total.k
    recent, older = aligned_values(right_avg(signal, t1), delay(right_avg(signal, t2), t1.k))
    start = t1.k + t2.k - 1
    rhs = UniformSignal(signal.t0 + start * signal.dt, signal.dt, w1 * recent + w2 * older)
    return _report("recursive_decomposition", lhs, rhs, signal)


def check_difference_identity(signal: UniformSignal, a: WindowSpec | int,
                              b: WindowSpec | int) -> ResidualReport:
    """Short-minus-long average as a scaled difference of block averages."""
    a = as_window(a, signal.dt)
    b = as_window(b, signal.dt)
    signal.require(a.k + b.k, "the difference-identity check")
    long_w = WindowSpec.of(a.k + b.k, signal.dt)
    la, ll = aligned_values(right_avg(signal, a), right_avg(signal, long_w))
    lhs = UniformSignal(signal.t0 + (long_w.k - 1) * signal.dt, signal.dt, la - ll)
    ra, rb = aligned_values(right_avg(signal, a), delay(right_avg(signal, b), a.k))
    factor = b.k / long_w.k
    rhs = UniformSignal(signal.t0 + (long_w.k - 1) * signal.dt, signal.dt, factor * (ra - rb))
    return _report("difference_identity", lhs, rhs, signal)


def smoothed_derivative(signal: UniformSignal, a: WindowSpec | int) -> UniformSignal:
    """Half-window-scaled exact rate of change of the double average.

    Computed as the lag-``k`` difference quotient of the single trailing
    average times ``a/2``; differentiating the outer average of the double
    average leaves exactly this expression.
    """
    a = as_window(a, signal.dt)
    length = a.k * signal.dt
    der = windowed_derivative(right_avg(signal, a), a)
    return der.with_values(der.values * (length / 2.0))


def check_macd_derivative(signal: UniformSignal, a: WindowSpec | int) -> ResidualReport:
    """Short-minus-long average equals the smoothed-derivative form."""
    a = as_window(a, signal.dt)
    signal.require(2 * a.k, "the derivative-form check")
    return _report("macd_derivative", macd(signal, a), smoothed_derivative(signal, a), signal)


def check_macd_derivative_central(signal: UniformSignal,
                                  a: WindowSpec | int) -> ResidualReport:
    """Approximate cross-check using a central difference for the derivative.

    Replaces the exact lag-window difference quotient by the symmetric
    two-sample estimate of the double average's slope.  Unlike every other
    check this one carries an O(dt^2 * curvature) truncation error, so it is
    reported but never gated at the exact-identity tolerance.
    """
    a = as_window(a, signal.dt)
    signal.require(2 * a.k + 2, "the central-difference cross-check")
    smooth = double_right_avg(signal, a)
    central = (smooth.values[2:] - smooth.values[:-2]) / (2.0 * signal.dt)
    der = UniformSignal(smooth.t0 + signal.dt, signal.dt, central * (a.k * signal.dt / 2.0))
    return _report("macd_derivative_central", macd(signal, a), der, signal)


def check_phase_corrected_form(signal: UniformSignal,
                               a: WindowSpec | int) -> ResidualReport:
    """Short-minus-long average as a delayed derivative of the centered smooth.

    Builds the double centered average with two centered passes and delays
    it a full window; that delayed signal coincides with the double trailing
    average, and it is a trailing average of the re-aligned single centered
    average, so its exact rate of change is the lag-window difference
    quotient of the latter.
    """
    a = as_window(a, signal.dt)
    k = a.k
    if k % 2 != 0:
        raise ValueError(f"centered window must have an even sample count, got {k}")
    signal.require(3 * k, "the phase-corrected check")
    length = k * signal.dt

    # Exhibit the shift identity: the delayed double centered average is the
    # double trailing average, sample for sample.
    centered_twice = delay(centered_avg(centered_avg(signal, a), a), k)
    trailing_twice = double_right_avg(signal, a)
    cv, tv = aligned_values(centered_twice, trailing_twice)
    if not np.array_equal(cv, tv):
        raise AssertionError("centered/trailing shift identity violated")

    inner = delay(centered_avg(signal, a), k // 2)
    rhs = windowed_derivative(inner, a)
    rhs = rhs.with_values(rhs.values * (length / 2.0))
    return _report("phase_corrected_form", macd(signal, a), rhs, signal)


def expansion_rhs(signal: UniformSignal, spec: ExpansionSpec) -> UniformSignal:
    """The ``n``-term weighted sum of delayed, smoothed difference quotients."""
    kb = spec.b.k
    block_len = kb * signal.dt
    base = right_avg(signal, spec.b)
    terms = [
        windowed_derivative(delay(base, (i - 1) * kb), spec.b)
        for i in range(1, spec.n + 1)
    ]
    aligned = aligned_values(*terms) if len(terms) > 1 else (terms[-1].values,)
    acc = np.zeros_like(aligned[-1])
    for w, vals in zip(spec.weights, aligned):
        acc += w * (block_len / 2.0) * vals
    start = (spec.n + 1) * kb - 1
    return UniformSignal(signal.t0 + start * signal.dt, signal.dt, acc)


def check_recursive_expansion(signal: UniformSignal,
                              spec: ExpansionSpec) -> ResidualReport:
    """Long-window difference as the ``n``-term delayed-derivative sum."""
    kb = spec.b.k
    signal.require((2 * spec.n + 2) * kb, "the expansion check")
    short = right_avg(signal, spec.a)
    long_ = right_avg(signal, WindowSpec.of(spec.a.k + kb, signal.dt))
    sv, lv = aligned_values(short, long_)
    lhs = UniformSignal(signal.t0 + (spec.a.k + kb - 1) * signal.dt, signal.dt, sv - lv)
    return _report("recursive_expansion", lhs, expansion_rhs(signal, spec), signal)


def check_lp_bound(signal: UniformSignal, a: WindowSpec | int, p) -> float:
    """Operator-norm ratio ``|macd(signal)|_p / |signal|_p`` (dt-weighted).

    The ratio never exceeds 2 and, because the expanded kernel has total
    absolute weight 1, in practice never exceeds 1 beyond rounding.
    """
    a = as_window(a, signal.dt)
    out = macd(signal, a)

    def norm(vals: np.ndarray) -> float:
        if p == 1:
            return float(np.sum(np.abs(vals)) * signal.dt)
        if p == 2:
            return float(math.sqrt(np.sum(vals * vals) * signal.dt))
        if p in (math.inf, np.inf, "inf"):
            return float(np.max(np.abs(vals)))
        raise ValueError(f"unsupported norm order: {p!r}")

    denom = norm(signal.values)
    if denom == 0.0:
        raise ValueError("undefined ratio: zero signal")
    return norm(out.values) / denom


def check_window_monotonicity(signal: UniformSignal, a: WindowSpec | int,
                                 b: WindowSpec | int,
                                 eq_tol: float | None = None) -> MonotonicityResult:
    """Scan the window-monotonicity implication over every valid index.

    Wherever the short average exceeds the long one, the short average must
    also exceed the ``(b-a)``-average taken ``a`` samples earlier.  The
    equality case is checked in tolerance form: a near-tie of the two
    anchored averages forces a near-tie of the displaced pair, amplified by
    ``b / (b - a)``.
    """
    a = as_window(a, signal.dt)
    b = as_window(b, signal.dt)
    if b.k <= a.k:
        raise ValueError(f"long window must exceed short window: {b.k} <= {a.k}")
    short, long_, displaced = aligned_values(
        right_avg(signal, a),
        right_avg(signal, b),
        delay(right_avg(signal, WindowSpec.of(b.k - a.k, signal.dt)), a.k),
    )
    start = b.k - 1
    hypothesis = short > long_
    violations = hypothesis & ~(short > displaced)
    first = int(np.flatnonzero(violations)[0]) + start if violations.any() else None

    if eq_tol is None:
        eq_tol = default_tolerance(signal)
    amplify = b.k / (b.k - a.k)
    near_tie = np.abs(short - long_) <= eq_tol
    eq_ok = np.abs(short - displaced) <= eq_tol * amplify * (1 + 1e-9)
    eq_passed = bool(np.all(eq_ok[near_tie]))

    return MonotonicityResult(
        passed=first is None,
        first_violation=first,
        hypothesis_count=int(hypothesis.sum()),
        scanned=int(short.size),
        equality_passed=eq_passed,
        equality_count=int(near_tie.sum()),
    )


def classify_trend(signal: UniformSignal, index: int, a: WindowSpec | int,
                   b: WindowSpec | int, tol: float | None = None) -> TrendLabel:
    """Label the local trend at ``index`` from two anchored averages.

    The margin is the short average minus the ``(a+b)``-window average, both
    ending at ``index``.  A positive margin beyond ``tol`` means the recent
    block sits above the older history (locally increasing); negative means
    decreasing; within tolerance the signal is locally linear (a symmetric
    profile also lands here).
    """
    a = as_window(a, signal.dt)
    b = as_window(b, signal.dt)
    total = a.k + b.k
    n = len(signal)
    if index < total - 1 or index >= n:
        raise IndexError(
            f"index {index} outside the valid range [{total - 1}, {n - 1}] "
            f"of the {total}-sample average"
        )
    if tol is None:
        tol = default_tolerance(signal)
    short = right_avg(signal, a)
    long_ = right_avg(signal, WindowSpec.of(total, signal.dt))
    margin = float(
        short.values[index - (a.k - 1)] - long_.values[index - (total - 1)]
    )
    if margin > tol:
        label = "increasing"
    elif margin < -tol:
        label = "decreasing"
    else:
        label = "linear"
    return TrendLabel(label, margin)
