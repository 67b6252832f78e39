"""Explicit FIR kernels for every operator and their composition algebra.

Each operator in :mod:`macdkit.operators` is linear and time-invariant, so it
has a finite impulse response: a list of integer sample lags (0 = current
sample, positive = past, negative = future) with one weight per lag.
:func:`build_kernel` turns a small declarative description into that kernel,
and :func:`apply_kernel` evaluates it by direct convolution, which must agree
with the direct operator evaluation on any signal.

Descriptions are nested tuples:

    ("avg", k)            trailing box average over k samples
    ("centered", k)       centered box average (k even)
    ("delay", L)          shift L samples into the past
    ("deriv", k)          lag-k difference quotient, scaled by 1/(k*dt)
    ("scale", alpha, d)   alpha times the kernel of d
    ("compose", d1, ...)  operator composition (kernel convolution)
    ("sum", d1, ...)      pointwise sum of kernels
    ("diff", d1, d2)      d1 minus d2

Averaging compositions have weights summing to 1, difference kernels to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signals import InsufficientSamplesError, UniformSignal

__all__ = [
    "KernelRep",
    "build_kernel",
    "apply_kernel",
    "box_kernel",
    "centered_box_kernel",
    "delay_kernel",
    "derivative_kernel",
    "macd_kernel",
    "triangular_kernel",
    "smoothed_derivative_kernel",
    "expansion_kernel",
    "kernel_difference",
]


@dataclass(frozen=True)
class KernelRep:
    """FIR kernel: strictly increasing integer lags with one weight each."""

    offsets: tuple[int, ...]
    weights: np.ndarray = field(repr=False)
    scale_note: str = ""

    def __post_init__(self):
        offs = tuple(int(o) for o in self.offsets)
        w = np.array(self.weights, dtype=np.float64, copy=True).reshape(-1)
        if len(offs) == 0:
            raise ValueError("kernel needs at least one tap")
        if len(offs) != w.size:
            raise ValueError("offsets and weights must have the same length")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError("offsets must be strictly increasing")
        if not np.all(np.isfinite(w)):
            raise ValueError("kernel weights must be finite")
        w.flags.writeable = False
        object.__setattr__(self, "offsets", offs)
        object.__setattr__(self, "weights", w)

    @property
    def weight_sum(self) -> float:
        return float(self.weights.sum())

    @property
    def abs_weight_sum(self) -> float:
        return float(np.abs(self.weights).sum())

    def is_averaging(self, tol: float = 1e-14) -> bool:
        return abs(self.weight_sum - 1.0) <= tol

    def is_difference(self, tol: float = 1e-14) -> bool:
        return abs(self.weight_sum) <= tol

    def dense(self) -> tuple[int, np.ndarray]:
        """(first offset, contiguous weight array) over the full support."""
        lo, hi = self.offsets[0], self.offsets[-1]
        w = np.zeros(hi - lo + 1)
        w[np.asarray(self.offsets) - lo] = self.weights
        return lo, w


def _from_items(items: dict[int, float], note: str) -> KernelRep:
    offs = sorted(items)
    return KernelRep(tuple(offs), np.array([items[o] for o in offs]), note)


def box_kernel(k: int) -> KernelRep:
    """Trailing box average of ``k`` samples: weight ``1/k`` on lags 0..k-1."""
    if k < 1:
        raise ValueError("window must be at least 1 sample")
    return KernelRep(tuple(range(k)), np.full(k, 1.0 / k), f"avg k={k}")


def centered_box_kernel(k: int) -> KernelRep:
    """Centered box average of ``k`` samples (k even): lags -k/2..k/2-1.

    Matches the shifted-trailing-average convention: the tap window around
    index ``i`` covers samples ``i - k/2 + 1 .. i + k/2``.
    """
    if k < 1 or k % 2 != 0:
        raise ValueError(f"centered window must be a positive even sample count, got {k}")
    h = k // 2
    return KernelRep(tuple(range(-h, h)), np.full(k, 1.0 / k), f"centered k={k}")


def delay_kernel(lag: int) -> KernelRep:
    """Pure delay of ``lag`` samples."""
    if lag < 0:
        raise ValueError("lag must be non-negative")
    return KernelRep((int(lag),), np.ones(1), f"delay {lag}")


def derivative_kernel(k: int, dt: float = 1.0) -> KernelRep:
    """Lag-``k`` difference quotient: ``(+1, -1) / (k*dt)`` on lags 0 and k."""
    if k < 1:
        raise ValueError("window must be at least 1 sample")
    q = 1.0 / (k * dt)
    return KernelRep((0, k), np.array([q, -q]), f"deriv k={k}")


def macd_kernel(k: int) -> KernelRep:
    """Difference of ``k``- and ``2k``-sample box averages, expanded.

    The two box kernels combine into ``+1/(2k)`` on the ``k`` most recent
    lags and ``-1/(2k)`` on the ``k`` lags before those; the weights sum to
    zero, so constants are rejected analytically.
    """
    if k < 1:
        raise ValueError("window must be at least 1 sample")
    q = 1.0 / (2 * k)
    w = np.concatenate([np.full(k, q), np.full(k, -q)])
    return KernelRep(tuple(range(2 * k)), w, f"macd k={k}")


def triangular_kernel(k: int) -> KernelRep:
    """Self-convolution of the ``k``-sample box: the double-average kernel."""
    kern = build_kernel(("compose", ("avg", k), ("avg", k)))
    return KernelRep(kern.offsets, kern.weights, f"triangle k={k}")


def smoothed_derivative_kernel(k: int, dt: float = 1.0) -> KernelRep:
    """Rate of change of the double ``k``-average, times half a window length.

    Differentiating the outer average of the double average leaves the
    lag-``k`` difference quotient of the inner average, so the kernel is the
    difference-quotient kernel convolved with a single box, scaled by
    ``k*dt/2``.  It reproduces :func:`macd_kernel` exactly.
    """
    a = k * dt
    kern = build_kernel(("scale", a / 2.0, ("compose", ("deriv", k), ("avg", k))), dt=dt)
    return KernelRep(kern.offsets, kern.weights, f"smoothed-deriv k={k}")


def expansion_kernel(n: int, kb: int, dt: float = 1.0) -> KernelRep:
    """Kernel of the ``n``-term delayed-derivative expansion with block ``kb``.

    Weighted sum over ``i = 1..n`` of ``2i/(n(n+1))`` times the smoothed
    difference quotient of the block average delayed by ``(i-1)*kb`` samples,
    all scaled by half a block length.  Equals the difference of the
    ``n*kb``- and ``(n+1)*kb``-sample box kernels.
    """
    if n < 1:
        raise ValueError("expansion needs at least one term")
    b = kb * dt
    terms = [
        (
            "scale",
            (2 * i / (n * (n + 1))) * (b / 2.0),
            ("compose", ("deriv", kb), ("delay", (i - 1) * kb), ("avg", kb)),
        )
        for i in range(1, n + 1)
    ]
    kern = build_kernel(("sum", *terms), dt=dt)
    return KernelRep(kern.offsets, kern.weights, f"expansion n={n} kb={kb}")


def kernel_difference(k_short: int, k_long: int) -> KernelRep:
    """Expanded difference of two box kernels (short minus long)."""
    kern = build_kernel(("diff", ("avg", k_short), ("avg", k_long)))
    return KernelRep(kern.offsets, kern.weights, f"avg-diff {k_short}-{k_long}")


def _kernel_items(kern: KernelRep) -> dict[int, float]:
    return {o: float(w) for o, w in zip(kern.offsets, kern.weights)}


def _convolve_items(a: dict[int, float], b: dict[int, float]) -> dict[int, float]:
    out: dict[int, float] = {}
    for oa in sorted(a):
        wa = a[oa]
        for ob in sorted(b):
            key = oa + ob
            out[key] = out.get(key, 0.0) + wa * b[ob]
    return out


def build_kernel(description, dt: float = 1.0) -> KernelRep:
    """Build the FIR kernel of a composed operator description.

    See the module docstring for the description grammar.  ``dt`` only
    enters through difference-quotient stages.
    """
    items = _build_items(description, dt)
    if not items:
        raise ValueError("empty composition")
    return _from_items(items, _describe(description))


def _build_items(description, dt: float) -> dict[int, float]:
    if isinstance(description, KernelRep):
        return _kernel_items(description)
    if not isinstance(description, tuple) or not description:
        raise ValueError(f"malformed kernel description: {description!r}")
    head = description[0]
    if head == "avg":
        return _kernel_items(box_kernel(description[1]))
    if head == "centered":
        return _kernel_items(centered_box_kernel(description[1]))
    if head == "delay":
        return _kernel_items(delay_kernel(description[1]))
    if head == "deriv":
        return _kernel_items(derivative_kernel(description[1], dt))
    if head == "scale":
        _, alpha, inner = description
        return {o: alpha * w for o, w in _build_items(inner, dt).items()}
    if head == "compose":
        parts = description[1:]
        if not parts:
            raise ValueError("empty composition")
        items = _build_items(parts[0], dt)
        for part in parts[1:]:
            items = _convolve_items(items, _build_items(part, dt))
        return items
    if head == "sum":
        parts = description[1:]
        if not parts:
            raise ValueError("empty composition")
        out: dict[int, float] = {}
        for part in parts:
            for o, w in _build_items(part, dt).items():
                out[o] = out.get(o, 0.0) + w
        return out
    if head == "diff":
        _, d1, d2 = description
        return _build_items(("sum", d1, ("scale", -1.0, d2)), dt)
    raise ValueError(f"unknown kernel stage: {head!r}")


def _describe(description) -> str:
    if isinstance(description, KernelRep):
        return description.scale_note
    if isinstance(description, tuple):
        return "(" + " ".join(_describe(p) if isinstance(p, (tuple, KernelRep)) else str(p)
                              for p in description) + ")"
    return str(description)


def apply_kernel(kernel: KernelRep, signal: UniformSignal) -> UniformSignal:
    """Evaluate a kernel on a signal by direct convolution.

    The output covers exactly the indices where every tap lands inside the
    input, matching the valid-range convention of the direct operators.
    """
    n = len(signal)
    first, last = kernel.offsets[0], kernel.offsets[-1]
    lo = max(last, 0)
    hi = (n - 1) + min(first, 0)
    if hi < lo:
        need = lo - min(first, 0)
        raise InsufficientSamplesError(
            f"insufficient samples for kernel '{kernel.scale_note}': "
            f"signal has {n}, needs at least {need + 1}",
            required=need + 1,
        )
    out = np.zeros(hi - lo + 1)
    for o, w in zip(kernel.offsets, kernel.weights):
        out += w * signal.values[lo - o : hi - o + 1]
    return UniformSignal(signal.t0 + lo * signal.dt, signal.dt, out)
