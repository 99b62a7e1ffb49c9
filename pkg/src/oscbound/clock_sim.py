"""Synthetic clock-error trajectories and the loose-sync gate.

A run samples the accuracy ``y(t)`` of the active oscillator on a fixed grid,
integrates it into the misalignment ``dT(t)`` (zeroed at every workshop
reset) and records the intervals where ``|dT| > T_L``.

Accuracy realizations are deterministic: the temperature term follows the
oscillator's analytic model where one exists (parabolic/linear), otherwise
a seeded residual uniform in ``[-Y_temp, +Y_temp]`` held over fixed blocks.
Aging follows an :class:`AgingFit` anchored to the datasheet figure.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .clock_model import SyncRequirement
from .error_budget import (
    AgingSpec,
    OscillatorSpec,
    TempModelKind,
    accuracy_bound_dominates,
    cumulative_bound_array,
)
from .errors import FitValidationError, InvalidParameterError, OutOfRangeError, ScenarioError
from .units import DAY, HOUR

DEFAULT_KNEE = 30 * DAY
DOMINANCE_ATOL = 1e-9  # s
DOMINANCE_RTOL = 1e-9


# --------------------------------------------------------------------------
# temperature profiles


class TemperatureProfile:
    """Deterministic temperature (degC) as a function of elapsed seconds."""

    def at(self, t: np.ndarray | float) -> np.ndarray:
        raise NotImplementedError

    def extent(self) -> tuple[float, float]:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantProfile(TemperatureProfile):
    x: float

    def at(self, t):
        return np.full(np.shape(t), float(self.x))

    def extent(self):
        return (self.x, self.x)

    def describe(self):
        return f"constant {self.x!r} C"


@dataclass(frozen=True)
class RampProfile(TemperatureProfile):
    """Linear ramp from ``x_start`` to ``x_end`` over ``ramp_time``, then hold."""

    x_start: float
    x_end: float
    ramp_time: float

    def __post_init__(self):
        if not self.ramp_time > 0:
            raise InvalidParameterError("ramp time must be positive")

    def at(self, t):
        frac = np.clip(np.asarray(t, dtype=float) / self.ramp_time, 0.0, 1.0)
        return self.x_start + (self.x_end - self.x_start) * frac

    def extent(self):
        return (min(self.x_start, self.x_end), max(self.x_start, self.x_end))

    def describe(self):
        return f"ramp {self.x_start!r} C {self.x_end!r} C {self.ramp_time!r} s"


@dataclass(frozen=True)
class DiurnalProfile(TemperatureProfile):
    x_mean: float
    amplitude: float
    period: float = DAY

    def __post_init__(self):
        if not self.period > 0:
            raise InvalidParameterError("diurnal period must be positive")
        if self.amplitude < 0:
            raise InvalidParameterError("diurnal amplitude must be >= 0")

    def at(self, t):
        return self.x_mean + self.amplitude * np.sin(2.0 * np.pi * np.asarray(t, dtype=float) / self.period)

    def extent(self):
        return (self.x_mean - self.amplitude, self.x_mean + self.amplitude)

    def describe(self):
        return f"diurnal {self.x_mean!r} C {self.amplitude!r} C {self.period!r} s"


@dataclass(frozen=True)
class CyclingProfile(TemperatureProfile):
    """Square-wave temperature cycling, ``x_plus`` first, each level held for ``dwell``."""

    x_plus: float = 60.0
    x_minus: float = -40.0
    dwell: float = HOUR

    def __post_init__(self):
        if not self.dwell > 0:
            raise InvalidParameterError("dwell must be positive")

    def at(self, t):
        phase = np.floor(np.asarray(t, dtype=float) / self.dwell).astype(np.int64) % 2
        return np.where(phase == 0, float(self.x_plus), float(self.x_minus))

    def extent(self):
        return (min(self.x_plus, self.x_minus), max(self.x_plus, self.x_minus))

    def describe(self):
        return f"cycling {self.x_plus!r} C {self.x_minus!r} C {self.dwell!r} s"


# --------------------------------------------------------------------------
# aging fits


class FitKind(str, Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class AgingFit:
    """Aging realization ``A*t + C`` (linear) or ``B*ln(D*t + 1)`` (logarithmic)."""

    kind: FitKind
    p1: float
    p2: float

    def __post_init__(self):
        object.__setattr__(self, "kind", FitKind(self.kind))
        if self.kind is FitKind.LOG and self.p2 < 0:
            raise InvalidParameterError("logarithmic fit rate D must be >= 0")

    @classmethod
    def linear(cls, A_fit: float, C_fit: float) -> AgingFit:
        return cls(FitKind.LINEAR, A_fit, C_fit)

    @classmethod
    def logarithmic(cls, B_fit: float, D_fit: float) -> AgingFit:
        return cls(FitKind.LOG, B_fit, D_fit)

    @classmethod
    def default_log(cls, aging: AgingSpec, knee: float = DEFAULT_KNEE) -> AgingFit:
        """Log fit reaching half its ``t_data`` value at ``knee``, anchored at ``t_data``.

        ``(D*knee + 1)**2 = D*t_data + 1`` gives ``D = (t_data - 2*knee) / knee**2``.
        """
        if aging.y_age == 0.0:
            return cls.logarithmic(0.0, 0.0)
        Td = aging.t_data
        D = (Td - 2.0 * knee) / (knee * knee) if Td > 2.0 * knee else 1.0 / knee
        return cls.logarithmic(aging.y_age / math.log1p(D * Td), D)

    @classmethod
    def secant_linear(cls, aging: AgingSpec, knee: float = DEFAULT_KNEE) -> AgingFit:
        """Line through the default log fit at ``knee`` and the anchor at ``t_data``.

        The intercept is clamped to ``[0, y_age]`` so the line stays under the
        prudential bound.
        """
        Td = aging.t_data
        if aging.y_age == 0.0:
            return cls.linear(0.0, 0.0)
        log_fit = cls.default_log(aging, knee)
        k = min(knee, 0.5 * Td)
        A = (aging.y_age - float(log_fit(k))) / (Td - k)
        C = min(max(aging.y_age - A * Td, 0.0), aging.y_age)
        return cls.linear((aging.y_age - C) / Td, C)

    def __call__(self, elapsed):
        e = np.asarray(elapsed, dtype=float)
        if self.kind is FitKind.LINEAR:
            return self.p1 * e + self.p2
        return self.p1 * np.log1p(self.p2 * e)

    def describe(self) -> str:
        return f"{self.kind.value} {self.p1!r} {self.p2!r}"


def _bound_curve(aging: AgingSpec, t: np.ndarray) -> np.ndarray:
    return np.where(t <= aging.t_data, aging.y_age, aging.y_age * t / aging.t_data)


def validate_fit(fit: AgingFit, aging: AgingSpec, horizon: float, step: float | None = None) -> None:
    """Raise FitValidationError at the first sample where ``fit`` exceeds the bound."""
    if step is None:
        step = horizon / 2000.0
    t = _grid(horizon, step)
    _check_fit(fit, aging, t, fit.kind.value)


def _check_fit(fit: AgingFit, aging: AgingSpec, t: np.ndarray, name: str) -> np.ndarray:
    vals = fit(t)
    bound = _bound_curve(aging, t)
    bad = np.flatnonzero(vals > bound + 1e-12 * np.maximum(bound, 1e-30))
    if bad.size:
        i = int(bad[0])
        raise FitValidationError(
            f"{name} aging fit exceeds the prudential bound at t = {t[i]!r} s "
            f"({vals[i]!r} > {bound[i]!r})",
            crossing_time=float(t[i]),
        )
    return vals


@dataclass(frozen=True)
class FitComparison:
    t: np.ndarray
    y_lin: np.ndarray
    y_log: np.ndarray
    bound: np.ndarray

    def rows(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self.t.tolist(), self.y_lin.tolist(), self.y_log.tolist(), self.bound.tolist()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t_s,y_lin_frac,y_log_frac,bound_frac\n")
        for r in self.rows():
            buf.write(",".join(repr(v) for v in r) + "\n")
        return buf.getvalue()


def aging_fit_compare(
    spec: AgingSpec, fit_linear: AgingFit, fit_log: AgingFit, horizon: float, step: float
) -> FitComparison:
    """Sample both fits and the prudential aging bound on ``[0, horizon]``.

    Raises FitValidationError naming the first sample where either fit
    rises above the bound.
    """
    if not horizon > 0:
        raise InvalidParameterError(f"horizon must be positive, got {horizon!r}")
    if not step > 0:
        raise InvalidParameterError(f"step must be positive, got {step!r}")
    t = _grid(horizon, step)
    y_lin = _check_fit(fit_linear, spec, t, "linear")
    y_log = _check_fit(fit_log, spec, t, "logarithmic")
    return FitComparison(t=t, y_lin=y_lin, y_log=y_log, bound=_bound_curve(spec, t))


# --------------------------------------------------------------------------
# scenarios


class Mode(str, Enum):
    HIGH_POWER = "high_power"
    POWER_LIMITED = "power_limited"


class AccuracyMode(str, Enum):
    MODEL = "model"  # analytic / seeded realization inside the bounds
    BOUND = "bound"  # accuracy pinned at the worst-case bound


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario.

    ``duty`` lists the intervals ``[start, end)`` (seconds from the first
    calibration) during which the primary clock is powered; outside them the
    secondary clock keeps time. Without ``t_r`` no workshop resets happen;
    without ``t_l`` no violations are recorded.
    """

    mode: Mode
    primary: OscillatorSpec
    profile: TemperatureProfile
    secondary: OscillatorSpec | None = None
    duty: tuple[tuple[float, float], ...] = ()
    aging_fit: AgingFit | None = None
    secondary_aging_fit: AgingFit | None = None
    t_l: float | None = None
    t_r: float | None = None
    sample_step: float = HOUR
    seed: int = 0
    accuracy: AccuracyMode = AccuracyMode.MODEL
    restart_aging: bool = False
    residual_block: float = HOUR

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "accuracy", AccuracyMode(self.accuracy))
        object.__setattr__(self, "duty", tuple((float(a), float(b)) for a, b in self.duty))
        if self.mode is Mode.POWER_LIMITED and self.secondary is None:
            raise ScenarioError("power-limited scenario requires a secondary oscillator")
        if self.mode is Mode.HIGH_POWER and self.secondary is not None:
            raise ScenarioError("high-power scenario must not define a secondary oscillator")
        if self.mode is Mode.HIGH_POWER and self.duty:
            raise ScenarioError("duty schedule only applies to power-limited scenarios")
        if not self.sample_step > 0:
            raise ScenarioError(f"sample_step must be positive, got {self.sample_step!r}")
        if self.t_l is not None:
            if not self.t_l > 0:
                raise ScenarioError(f"T_L must be positive, got {self.t_l!r}")
            if self.sample_step > self.t_l / 10.0:
                raise ScenarioError(
                    f"sample_step {self.sample_step!r} s exceeds T_L/10 = {self.t_l / 10.0!r} s"
                )
        if self.t_r is not None and not self.t_r > 0:
            raise ScenarioError(f"T_R must be positive, got {self.t_r!r}")
        if not self.residual_block > 0:
            raise ScenarioError("residual_block must be positive")
        prev_end = -math.inf
        for a, b in self.duty:
            if not (0 <= a < b):
                raise ScenarioError(f"invalid duty interval [{a}, {b})")
            if a < prev_end:
                raise ScenarioError("duty intervals must be sorted and non-overlapping")
            prev_end = b

    @property
    def req(self) -> SyncRequirement | None:
        if self.t_l is None or self.t_r is None:
            return None
        return SyncRequirement(self.t_l, self.t_r)

    def specs(self) -> list[OscillatorSpec]:
        return [self.primary] if self.secondary is None else [self.primary, self.secondary]

    def fit_for(self, which: int) -> AgingFit:
        spec = self.primary if which == 0 else self.secondary
        fit = self.aging_fit if which == 0 else self.secondary_aging_fit
        return fit if fit is not None else AgingFit.default_log(spec.aging)


ACTIVE_NAMES = ("primary", "secondary")


@dataclass(frozen=True)
class ClockTrajectory:
    """Sampled run.

    Each reset instant appears twice, pre-reset then post-reset (``dT = 0``);
    clock handovers are duplicated the same way with the outgoing and
    incoming clock's accuracy.
    """

    t: np.ndarray
    y: np.ndarray
    delta_t: np.ndarray
    active: np.ndarray
    reset_mask: np.ndarray
    aging_elapsed: np.ndarray
    resets: tuple[float, ...]
    violations: tuple[tuple[float, float], ...]
    t_l: float | None = None

    def __post_init__(self):
        for name in ("t", "y", "delta_t", "active", "reset_mask", "aging_elapsed"):
            getattr(self, name).setflags(write=False)

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def last_reset(self) -> np.ndarray:
        """Time of the most recent reset at or before each sample (0 before the first)."""
        epochs = np.cumsum(self.reset_mask)
        starts = np.concatenate(([0.0], np.asarray(self.resets, dtype=float)))
        return starts[epochs]

    @property
    def max_abs_delta_t(self) -> float:
        return float(np.max(np.abs(self.delta_t))) if len(self) else 0.0

    def frequency_series(self, f0: float) -> tuple[np.ndarray, np.ndarray]:
        """``(t, F_c)`` with ``F_c = f0 * (1 + y)``."""
        return self.t, f0 * (1.0 + self.y)

    def to_csv(self, every: int = 1) -> str:
        buf = io.StringIO()
        self.write_csv(buf, every=every)
        return buf.getvalue()

    def write_csv(self, fh, every: int = 1) -> None:
        fh.write("t_s,y_frac,delta_t_s,active_clock,violation\n")
        idx = np.arange(0, len(self), max(1, int(every)))
        if len(self) and idx[-1] != len(self) - 1:
            idx = np.append(idx, len(self) - 1)
        viol = (
            np.abs(self.delta_t) > self.t_l if self.t_l is not None else np.zeros(len(self), dtype=bool)
        )
        names = np.array(ACTIVE_NAMES)
        chunk = 200_000
        for lo in range(0, idx.size, chunk):
            sel = idx[lo : lo + chunk]
            lines = [
                f"{t!r},{y!r},{d!r},{a},{int(v)}"
                for t, y, d, a, v in zip(
                    self.t[sel].tolist(),
                    self.y[sel].tolist(),
                    self.delta_t[sel].tolist(),
                    names[self.active[sel]].tolist(),
                    viol[sel].tolist(),
                )
            ]
            fh.write("\n".join(lines))
            fh.write("\n")


def _grid(duration: float, step: float) -> np.ndarray:
    n = int(math.floor(duration / step + 1e-9))
    t = np.arange(n + 1, dtype=float) * step
    if t[-1] > duration:
        t[-1] = duration
    elif duration - t[-1] > 1e-9 * step:
        t = np.append(t, duration)
    return t


def _temperature_component(
    spec: OscillatorSpec, temps: np.ndarray, t: np.ndarray, seed: int, stream: int, block: float
) -> np.ndarray:
    model = spec.temperature
    if model.kind is TempModelKind.PARABOLIC:
        dx = temps - model.x0
        return model.coefficient * dx * dx
    if model.kind is TempModelKind.LINEAR:
        return model.coefficient * (temps - model.x0)
    y_temp = model.coefficient
    if y_temp == 0.0 or t.size == 0:
        return np.zeros_like(t)
    blocks = np.floor(t / block).astype(np.int64)
    rng = np.random.default_rng([int(seed), int(stream)])
    draws = rng.random(int(blocks[-1]) + 1)
    return y_temp * (2.0 * draws[blocks] - 1.0)


def _check_range(spec: OscillatorSpec, t: np.ndarray, temps: np.ndarray) -> None:
    model = spec.temperature
    low = temps < model.x_min
    high = temps > model.x_max
    bad = np.flatnonzero(low | high)
    if bad.size:
        i = int(bad[0])
        limit = "x_min" if low[i] else "x_max"
        bound = model.x_min if low[i] else model.x_max
        raise OutOfRangeError(
            f"{spec.label}: profile temperature {temps[i]!r} C at t = {t[i]!r} s violates "
            f"{limit} = {bound!r} C",
            limit=limit,
            value=float(temps[i]),
            time=float(t[i]),
        )


def _accuracy_series(
    spec: OscillatorSpec,
    fit: AgingFit,
    t: np.ndarray,
    temps: np.ndarray,
    aging_elapsed: np.ndarray,
    mode: AccuracyMode,
    seed: int,
    stream: int,
    block: float,
) -> np.ndarray:
    if mode is AccuracyMode.BOUND:
        y = spec.y_temp + spec.minor.total + np.zeros_like(t)
        if not spec.aging.included_in_accuracy and spec.aging.y_age > 0:
            y = y + _bound_curve(spec.aging, aging_elapsed)
        return y
    y = _temperature_component(spec, temps, t, seed, stream, block)
    if not spec.aging.included_in_accuracy:
        y = y + fit(aging_elapsed)
    if spec.minor.y_calib:
        y = y + spec.minor.y_calib
    return y


def instantaneous_accuracy(
    spec: OscillatorSpec,
    profile: TemperatureProfile,
    fit: AgingFit | None,
    t_elapsed: float,
    seed: int = 0,
    *,
    stream: int = 0,
    block: float = HOUR,
) -> float:
    """Accuracy of ``spec`` at ``t_elapsed`` seconds after calibration.

    Sum of the temperature term, the aging fit and the calibration offset.
    Gravity, vibration and supply terms are taken as zero.
    """
    t = np.array([float(t_elapsed)])
    temps = np.asarray(profile.at(t), dtype=float)
    _check_range(spec, t, temps)
    fit = fit if fit is not None else AgingFit.default_log(spec.aging)
    return float(_accuracy_series(spec, fit, t, temps, t, AccuracyMode.MODEL, seed, stream, block)[0])


def _active_mask(config: ScenarioConfig, t: np.ndarray, pre: np.ndarray) -> np.ndarray:
    """0 where the primary keeps time, 1 for the secondary.

    ``pre`` flags the first copy of a duplicated event instant; it takes the
    state just before the instant, the second copy the state from it on.
    """
    active = np.zeros(t.shape, dtype=np.int64)
    if config.mode is Mode.POWER_LIMITED:
        on = np.zeros(t.shape, dtype=bool)
        for a, b in config.duty:
            on |= np.where(pre, (t > a) & (t <= b), (t >= a) & (t < b))
        active[~on] = 1
    return active


def simulate(config: ScenarioConfig, duration: float) -> ClockTrajectory:
    """Integrate the clock error of ``config`` over ``[0, duration]``."""
    if not duration >= config.sample_step:
        raise ScenarioError(f"duration {duration!r} s is shorter than sample_step")
    base = _grid(duration, config.sample_step)

    resets: list[float] = []
    if config.t_r is not None:
        k = 1
        while k * config.t_r < duration:
            resets.append(k * config.t_r)
            k += 1
    r = np.asarray(resets, dtype=float)
    # duty edges are handovers; duplicating them keeps the trapezoid from
    # smearing one clock's accuracy into the other's interval
    edges = np.asarray([e for ab in config.duty for e in ab if 0.0 < e < duration], dtype=float)
    events = np.union1d(r, edges)
    base = np.union1d(base, events) if events.size else base
    eidx = np.searchsorted(base, events)
    t = np.insert(base, eidx, base[eidx]) if events.size else base
    pre = np.zeros(t.shape, dtype=bool)
    pre[eidx + np.arange(events.size)] = True
    reset_mask = np.zeros(t.shape, dtype=np.uint8)
    if r.size:
        k = np.searchsorted(events, r)
        reset_mask[eidx[k] + k + 1] = 1

    if config.restart_aging and r.size:
        starts = np.concatenate(([0.0], r))
        aging_elapsed = t - starts[np.cumsum(reset_mask)]
    else:
        aging_elapsed = t.copy()

    temps = np.asarray(config.profile.at(t), dtype=float)
    for spec in config.specs():
        _check_range(spec, t, temps)

    active = _active_mask(config, t, pre)
    ys = []
    for which, spec in enumerate(config.specs()):
        fit = config.fit_for(which)
        if config.accuracy is AccuracyMode.MODEL and not spec.aging.included_in_accuracy:
            _check_fit(fit, spec.aging, np.unique(aging_elapsed), "configured")
        ys.append(
            _accuracy_series(
                spec, fit, t, temps, aging_elapsed, config.accuracy, config.seed, which, config.residual_block
            )
        )
    y = ys[0] if len(ys) == 1 else np.where(active == 0, ys[0], ys[1])

    delta_t = kernels.integrate_resets(t, y, reset_mask)
    violations = tuple(kernels.violation_runs(t, delta_t, config.t_l)) if config.t_l is not None else ()
    return ClockTrajectory(
        t=t,
        y=y,
        delta_t=delta_t,
        active=active,
        reset_mask=reset_mask,
        aging_elapsed=aging_elapsed,
        resets=tuple(resets),
        violations=violations,
        t_l=config.t_l,
    )


def first_violation(traj: ClockTrajectory, req: SyncRequirement | float) -> float | None:
    """Earliest sample time with ``|dT| > T_L``, or None."""
    t_l = req.T_L if isinstance(req, SyncRequirement) else float(req)
    hits = np.flatnonzero(np.abs(traj.delta_t) > t_l)
    return float(traj.t[hits[0]]) if hits.size else None


def envelope_spec(config: ScenarioConfig) -> list[OscillatorSpec]:
    """Specs whose summed bound covers every sample of a run.

    A single spec when one accuracy bound dominates the other pointwise,
    otherwise both (their sum is then the envelope).
    """
    if config.secondary is None:
        return [config.primary]
    p, s = config.primary, config.secondary
    if accuracy_bound_dominates(s, p):
        return [s]
    if accuracy_bound_dominates(p, s):
        return [p]
    return [p, s]


def dominance_bound(traj: ClockTrajectory, config: ScenarioConfig) -> np.ndarray:
    """Per-sample misalignment bound since the last reset.

    Equal to ``B(t - last_reset)`` whenever aging restarts at each reset or
    no reset has happened yet; otherwise the aging term is integrated over
    the same stretch of time since the first calibration.
    """
    start = traj.aging_elapsed - (traj.t - traj.last_reset)
    out = np.zeros(len(traj))
    for spec in envelope_spec(config):
        out += cumulative_bound_array(spec, traj.aging_elapsed) - cumulative_bound_array(spec, start)
    return out


def dominance_margin(traj: ClockTrajectory, config: ScenarioConfig) -> float:
    """``min(bound - |dT|)`` over the run; negative means the bound was exceeded."""
    return -kernels.max_excess(traj.delta_t, dominance_bound(traj, config))


def check_dominance(
    traj: ClockTrajectory, config: ScenarioConfig, atol: float = DOMINANCE_ATOL, rtol: float = DOMINANCE_RTOL
) -> bool:
    bound = dominance_bound(traj, config)
    return kernels.max_excess(traj.delta_t, bound * (1.0 + rtol) + atol) <= 0.0


def summarize(traj: ClockTrajectory, config: ScenarioConfig) -> dict[str, float | None]:
    fv = first_violation(traj, config.t_l) if config.t_l is not None else None
    bound = dominance_bound(traj, config)
    pos = bound > 0
    usage = float(np.max(np.abs(traj.delta_t[pos]) / bound[pos])) if pos.any() else 0.0
    return {
        "samples": float(len(traj)),
        "max_abs_delta_t_s": traj.max_abs_delta_t,
        "final_delta_t_s": float(traj.delta_t[-1]),
        "first_violation_s": fv,
        "bound_margin_s": -kernels.max_excess(traj.delta_t, bound),
        "bound_usage": usage,
    }
