"""Time and frequency quantities of a free-running clock.

A clock is described by its measured phase ``theta_c(t)`` (cycles) against a
nominal frequency ``f0``. Everything else (measured time, accuracy, windowed
stability, misalignment) is derived from phase or instantaneous frequency;
the output voltage waveform itself is never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InsufficientDataError, InvalidIntervalError, InvalidParameterError

SHORT_TERM_WINDOW = 100.0  # s, upper limit of "short-term" stability windows
LONG_TERM_WINDOW = 86400.0  # s, lower limit of "long-term" stability windows


@dataclass(frozen=True)
class NominalClock:
    f0: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        if not self.f0 > 0:
            raise InvalidParameterError(f"nominal frequency must be positive, got {self.f0!r}")

    def phase(self, t: float) -> float:
        """Nominal phase in cycles, ``f0 * t``."""
        return self.f0 * t


@dataclass(frozen=True)
class ClockSample:
    t: float
    theta_c: float
    F_c: float

    def measured_time(self, f0: float) -> float:
        return self.theta_c / f0


@dataclass(frozen=True)
class FrequencyMetrics:
    delta_F: float
    delta_T: float
    y: float
    y_s: float
    F_bar: float
    T0: float


@dataclass(frozen=True)
class StabilityResult:
    y_s: float
    F_bar: float


@dataclass(frozen=True)
class SyncRequirement:
    """Loose-synchronization threshold ``T_L`` and workshop reset period ``T_R``."""

    T_L: float
    T_R: float

    def __post_init__(self) -> None:
        if not self.T_L > 0:
            raise InvalidParameterError(f"T_L must be positive, got {self.T_L!r}")
        if not self.T_R > 0:
            raise InvalidParameterError(f"T_R must be positive, got {self.T_R!r}")


def accuracy(F_c: float, f0: float) -> float:
    """Fractional frequency accuracy ``(F_c - f0) / f0``."""
    if not f0 > 0:
        raise InvalidParameterError(f"nominal frequency must be positive, got {f0!r}")
    return (F_c - f0) / f0


def misalignment_from_phase(theta_c: float, t: float, f0: float) -> float:
    """``T_c(t) - t`` with ``T_c = theta_c / f0``."""
    return theta_c / f0 - t


def stability_class(T0: float) -> str:
    """Label an averaging window as short-term, long-term or intermediate.

    The label is descriptive metadata only; nothing downstream branches on it.
    """
    if T0 < SHORT_TERM_WINDOW:
        return "short-term"
    if T0 > LONG_TERM_WINDOW:
        return "long-term"
    return "intermediate"


SampleInput = Union[Sequence[ClockSample], tuple[np.ndarray, np.ndarray]]


def _as_arrays(samples: SampleInput) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(samples, tuple) and len(samples) == 2 and not isinstance(samples[0], ClockSample):
        t, F = (np.asarray(a, dtype=float) for a in samples)
    else:
        t = np.fromiter((s.t for s in samples), dtype=float)
        F = np.fromiter((s.F_c for s in samples), dtype=float)
    if t.shape != F.shape or t.ndim != 1:
        raise InvalidParameterError("time and frequency arrays must be 1-D and of equal length")
    return t, F


def _window_integral(t: np.ndarray, v: np.ndarray, a: float, b: float) -> float:
    """Trapezoidal integral of samples ``v(t)`` over ``[a, b]``, interpolating the ends."""
    lo = int(np.searchsorted(t, a, side="right"))
    hi = int(np.searchsorted(t, b, side="left"))
    inner_t = t[lo:hi]
    inner_v = v[lo:hi]
    va = float(np.interp(a, t, v))
    vb = float(np.interp(b, t, v))
    grid = np.concatenate(([a], inner_t, [b]))
    vals = np.concatenate(([va], inner_v, [vb]))
    return float(np.trapezoid(vals, grid))


def stability_over_window(samples: SampleInput, T0: float, t: float, f0: float) -> StabilityResult:
    """Average frequency over a centered window and the stability at ``t``.

    ``samples`` is either a sequence of :class:`ClockSample` or a ``(t, F_c)``
    pair of arrays sorted by time. ``F_bar`` is the trapezoidal mean of
    ``F_c`` over ``[t - T0/2, t + T0/2]``; ``y_s`` is the deviation
    ``F_c(t) - F_bar`` normalized by ``f0``, which makes
    ``y == y_s + (F_bar - f0) / f0`` hold to rounding.

    Raises InsufficientDataError if the samples do not span the full window.
    """
    if not T0 > 0:
        raise InvalidParameterError(f"averaging window must be positive, got {T0!r}")
    if not f0 > 0:
        raise InvalidParameterError(f"nominal frequency must be positive, got {f0!r}")
    ts, F = _as_arrays(samples)
    a, b = t - T0 / 2.0, t + T0 / 2.0
    if ts.size < 2 or a < ts[0] or b > ts[-1]:
        raise InsufficientDataError(
            f"samples do not cover the window [{a!r}, {b!r}] around t={t!r}"
        )
    # work in deviation space to keep the identity exact at the 1e-16 level
    dev = F - f0
    mean_dev = _window_integral(ts, dev, a, b) / T0
    dev_t = float(np.interp(t, ts, dev))
    return StabilityResult(y_s=(dev_t - mean_dev) / f0, F_bar=f0 + mean_dev)


def frequency_metrics(
    samples: SampleInput, T0: float, t: float, f0: float, delta_T: float = 0.0
) -> FrequencyMetrics:
    ts, F = _as_arrays(samples)
    stab = stability_over_window((ts, F), T0, t, f0)
    F_t = float(np.interp(t, ts, F))
    return FrequencyMetrics(
        delta_F=F_t - f0,
        delta_T=delta_T,
        y=accuracy(F_t, f0),
        y_s=stab.y_s,
        F_bar=stab.F_bar,
        T0=T0,
    )


def integrate_misalignment(times: np.ndarray, y: np.ndarray, t0: float, t: float) -> float:
    """Misalignment ``integral_{t0}^{t} y(tau) dtau`` by the trapezoidal rule.

    ``times``/``y`` sample the accuracy; interval ends falling between
    samples are linearly interpolated. ``integrate_misalignment(.., t0, t0)``
    is exactly zero.
    """
    if t < t0:
        raise InvalidIntervalError(f"end time {t!r} precedes start time {t0!r}")
    ts = np.asarray(times, dtype=float)
    ys = np.asarray(y, dtype=float)
    if ts.size == 0 or t0 < ts[0] or t > ts[-1]:
        raise InsufficientDataError(f"samples do not cover [{t0!r}, {t!r}]")
    if t == t0:
        return 0.0
    return _window_integral(ts, ys, t0, t)


def sync_ok(delta_T: float, req: SyncRequirement) -> bool:
    """Loose-sync predicate ``|delta_T| <= T_L``."""
    return abs(delta_T) <= req.T_L
