"""Transfer functions of FIR kernels and the band-pass verdict.

A kernel with lags ``o_j`` and weights ``w_j`` has discrete-time frequency
response ``H(w) = sum_j w_j * exp(-i*w*o_j)`` on normalized angular
frequencies in [0, pi].  Unit-sum (averaging) kernels have ``H(0) = 1``;
zero-sum (difference) kernels reject DC entirely, and the band-pass verdict
additionally demands an interior response peak and attenuation at the
Nyquist frequency relative to that peak.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelRep

__all__ = [
    "FrequencyResponse",
    "BandpassVerdict",
    "NotDifferenceKernelError",
    "transfer_function",
    "bandpass_check",
    "DEFAULT_GRID",
    "DENSE_GRID",
]

DEFAULT_GRID = 4096
DENSE_GRID = 65536


class NotDifferenceKernelError(ValueError):
    """Band-pass analysis applied to a kernel that does not reject DC."""


@dataclass(frozen=True)
class FrequencyResponse:
    """Sampled transfer function of one kernel on [0, pi]."""

    frequencies: np.ndarray = field(repr=False)
    magnitudes: np.ndarray = field(repr=False)
    phases: np.ndarray = field(repr=False)
    kernel_tag: str = ""

    def __post_init__(self):
        for name in ("frequencies", "magnitudes", "phases"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if np.any(self.magnitudes < 0):
            raise ValueError("magnitudes must be non-negative")


@dataclass(frozen=True)
class BandpassVerdict:
    """Outcome of the three band-pass assertions, with diagnostics."""

    passed: bool
    dc_magnitude: float
    peak_frequency: float
    peak_magnitude: float
    nyquist_magnitude: float
    failures: tuple[str, ...] = ()


def transfer_function(kernel: KernelRep, grid_size: int = DEFAULT_GRID) -> FrequencyResponse:
    """Evaluate the kernel's frequency response on a uniform [0, pi] grid."""
    if grid_size < 2:
        raise ValueError(f"grid needs at least 2 points, got {grid_size}")
    omega = np.linspace(0.0, np.pi, grid_size)
    offsets = np.asarray(kernel.offsets, dtype=np.float64)
    response = np.exp(-1j * np.outer(omega, offsets)) @ kernel.weights
    return FrequencyResponse(
        frequencies=omega,
        magnitudes=np.abs(response),
        phases=np.angle(response),
        kernel_tag=kernel.scale_note,
    )


def bandpass_check(resp: FrequencyResponse, dc_tol: float = 1e-12) -> BandpassVerdict:
    """Verify DC rejection, an interior response peak and Nyquist attenuation.

    Rejects responses of averaging kernels outright: a kernel whose response
    does not vanish at frequency zero is not a difference kernel and has no
    band to pass.
    """
    mag = resp.magnitudes
    dc = float(mag[0])
    if dc > 1e-3:
        raise NotDifferenceKernelError(
            f"not a difference kernel: |H(0)| = {dc:.3g} (tag: {resp.kernel_tag!r})"
        )
    peak_idx = int(np.argmax(mag))
    peak = float(mag[peak_idx])
    nyquist = float(mag[-1])
    failures = []
    if dc > dc_tol:
        failures.append(f"|H(0)| = {dc:.3g} exceeds {dc_tol:.3g}")
    if peak_idx in (0, mag.size - 1):
        failures.append("response peak sits on a grid endpoint")
    if not nyquist < peak:
        failures.append(f"no attenuation at pi: |H(pi)| = {nyquist:.3g} >= peak {peak:.3g}")
    return BandpassVerdict(
        passed=not failures,
        dc_magnitude=dc,
        peak_frequency=float(resp.frequencies[peak_idx]),
        peak_magnitude=peak,
        nyquist_magnitude=nyquist,
        failures=tuple(failures),
    )
