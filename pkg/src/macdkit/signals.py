"""Uniformly sampled signals, averaging windows and alignment helpers.

Every operator in this package consumes and produces :class:`UniformSignal`
values.  Operators shrink the valid index range instead of padding, and the
output carries an explicit ``t0`` so that the index-to-time mapping survives
arbitrary composition: two signals derived from the same input can always be
re-aligned by comparing start times.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UniformSignal",
    "WindowSpec",
    "InsufficientSamplesError",
    "as_window",
    "sample_offset",
    "aligned_values",
]


class InsufficientSamplesError(ValueError):
    """Signal too short for the requested window / lag combination."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


def _check_length(n: int, required: int, what: str) -> None:
    if n < required:
        raise InsufficientSamplesError(
            f"insufficient samples for {what}: signal has {n}, needs at least {required}",
            required=required,
        )


@dataclass(frozen=True)
class UniformSignal:
    """A finite, uniformly sampled real-valued series.

    Sample ``i`` represents time ``t0 + i * dt``.  Values are stored as an
    immutable float64 array; non-finite samples are rejected at construction
    rather than propagated.
    """

    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if vals.size < 1:
            raise ValueError("signal needs at least one sample")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValueError(f"non-finite value at sample {bad}")
        vals.flags.writeable = False
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return int(self.values.size)

    def times(self) -> np.ndarray:
        """Sample timestamps ``t0 + i*dt``."""
        return self.t0 + self.dt * np.arange(self.values.size)

    def with_values(self, values: np.ndarray, t0: float | None = None) -> "UniformSignal":
        """New signal on the same grid, optionally re-anchored at ``t0``."""
        return UniformSignal(self.t0 if t0 is None else t0, self.dt, values)

    def require(self, n: int, what: str) -> None:
        """Raise :class:`InsufficientSamplesError` unless at least ``n`` samples."""
        _check_length(len(self), n, what)


@dataclass(frozen=True)
class WindowSpec:
    """An averaging window: ``k`` samples spanning ``length = k*dt`` time units."""

    k: int
    length: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"window needs a positive integer sample count, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "length", float(self.length))

    @classmethod
    def of(cls, k: int, dt: float) -> "WindowSpec":
        """Window of ``k`` samples on a grid with spacing ``dt``."""
        return cls(k, k * dt)


def as_window(w: WindowSpec | int, dt: float) -> WindowSpec:
    """Normalize an integer sample count or an existing spec to a WindowSpec."""
    if isinstance(w, WindowSpec):
        return w
    return WindowSpec.of(int(w), dt)


def sample_offset(sig: UniformSignal, reference: UniformSignal) -> int:
    """Integer number of samples by which ``sig`` starts after ``reference``.

    Both signals must share the sample spacing and start on the same grid;
    operators guarantee this for anything derived from a common input.
    """
    if abs(sig.dt - reference.dt) > 1e-12 * max(sig.dt, reference.dt):
        raise ValueError(f"sample spacings differ: {sig.dt} vs {reference.dt}")
    raw = (sig.t0 - reference.t0) / reference.dt
    offset = round(raw)
    if abs(raw - offset) > 1e-6:
        raise ValueError(f"signals are not grid-aligned (offset {raw} samples)")
    return int(offset)


def aligned_values(*signals: UniformSignal) -> tuple[np.ndarray, ...]:
    """Trim signals to their common time range and return the value arrays.

    Raises if the overlap is empty.  The returned arrays all have the same
    length and index ``j`` refers to the same instant in every one of them.
    """
    if not signals:
        raise ValueError("need at least one signal")
    base = signals[0]
    offsets = [sample_offset(s, base) for s in signals]
    start = max(offsets)
    stop = min(off + len(s) for off, s in zip(offsets, signals))
    if stop <= start:
        raise ValueError("signals have no overlapping samples")
    return tuple(
        s.values[start - off : stop - off] for off, s in zip(offsets, signals)
    )
