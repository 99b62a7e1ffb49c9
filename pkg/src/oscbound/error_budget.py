"""Worst-case accuracy budget of a crystal oscillator and the misalignment bound.

Every source of accuracy loss is bounded separately and the bounds are summed
(no cross-correlation is assumed). Integrating the summed accuracy bound over
a holdover period of length ``T_R`` gives the misalignment bound ``B(T_R)``;
``max_reset_period`` inverts it for a loose-sync threshold ``T_L``.

All quantities are SI: seconds, hertz, dimensionless fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping

import numpy as np

from .clock_model import SyncRequirement
from .errors import InvalidParameterError, OutOfRangeError
from .units import YEAR

BISECT_LO = 1.0
BISECT_HI = 100 * YEAR
BISECT_RTOL = 1e-9


class TempModelKind(str, Enum):
    CONSTANT = "const"
    LINEAR = "linear"
    PARABOLIC = "parabolic"


class OscillatorClass(str, Enum):
    XO = "xo"
    TCXO = "tcxo"
    OCXO = "ocxo"
    CMOS = "cmos"


@dataclass(frozen=True)
class TemperatureModel:
    """Temperature-induced accuracy loss over an operating range.

    ``coefficient`` is interpreted per ``kind``: the constant bound
    ``Y_temp`` (fraction), the linear slope ``A'`` (fraction per degC) or the
    parabolic coefficient ``A`` (fraction per degC^2, usually negative).
    """

    kind: TempModelKind
    coefficient: float
    x_min: float
    x_max: float
    x0: float = 25.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TempModelKind(self.kind))
        if not self.x_min < self.x_max:
            raise InvalidParameterError(
                f"operating range must satisfy x_min < x_max, got [{self.x_min}, {self.x_max}]"
            )
        if not self.x_min <= self.x0 <= self.x_max:
            raise InvalidParameterError(
                f"calibration temperature {self.x0} C outside [{self.x_min}, {self.x_max}] C"
            )
        if self.kind is TempModelKind.CONSTANT and self.coefficient < 0:
            raise InvalidParameterError(f"constant temperature bound must be >= 0, got {self.coefficient}")
        if not math.isfinite(self.coefficient):
            raise InvalidParameterError("temperature coefficient must be finite")

    @classmethod
    def constant(cls, y_temp: float, x_min: float, x_max: float, x0: float = 25.0) -> TemperatureModel:
        return cls(TempModelKind.CONSTANT, y_temp, x_min, x_max, x0)

    @classmethod
    def linear(cls, slope: float, x_min: float, x_max: float, x0: float = 25.0) -> TemperatureModel:
        return cls(TempModelKind.LINEAR, slope, x_min, x_max, x0)

    @classmethod
    def parabolic(cls, A: float, x_min: float, x_max: float, x0: float = 25.0) -> TemperatureModel:
        return cls(TempModelKind.PARABOLIC, A, x_min, x_max, x0)


@dataclass(frozen=True)
class AgingSpec:
    y_age: float = 0.0
    t_data: float = YEAR
    included_in_accuracy: bool = False

    def __post_init__(self) -> None:
        if self.y_age < 0:
            raise InvalidParameterError(f"aging figure must be >= 0, got {self.y_age}")
        if not self.t_data > 0:
            raise InvalidParameterError(f"aging horizon must be positive, got {self.t_data}")


@dataclass(frozen=True)
class MinorSources:
    """Secondary loss terms, all zero unless a datasheet or design says otherwise.

    ``f_tol`` is the off-the-shelf frequency tolerance, kept as metadata only.
    """

    k_vib: float = 0.0  # fraction per g
    a_max: float = 0.0  # g
    y_supp: float = 0.0
    y_calib: float = 0.0
    y_grav: float = 0.0
    f_tol: float | None = None

    def __post_init__(self) -> None:
        for name in ("k_vib", "a_max", "y_supp", "y_calib", "y_grav"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise InvalidParameterError(f"{name} must be a finite value >= 0, got {v!r}")
        if self.f_tol is not None and self.f_tol < 0:
            raise InvalidParameterError(f"f_tol must be >= 0, got {self.f_tol}")

    @property
    def total(self) -> float:
        return vibration_accuracy(self.k_vib, self.a_max) + self.y_supp + self.y_calib + self.y_grav

    def is_default(self) -> bool:
        return self.total == 0.0


@dataclass(frozen=True)
class OscillatorSpec:
    manufacturer: str
    model: str
    osc_class: OscillatorClass
    temperature: TemperatureModel
    aging: AgingSpec = field(default_factory=AgingSpec)
    minor: MinorSources = field(default_factory=MinorSources)
    f0: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "osc_class", OscillatorClass(self.osc_class))
        if not self.manufacturer.strip() or not self.model.strip():
            raise InvalidParameterError("manufacturer and model must be non-empty")
        if self.f0 is not None and not self.f0 > 0:
            raise InvalidParameterError(f"f0 must be positive, got {self.f0}")

    @property
    def y_temp(self) -> float:
        """Worst-case temperature accuracy loss over the operating range."""
        return worst_case_temp_accuracy(self.temperature)

    @property
    def key(self) -> tuple[str, str, float]:
        return (self.manufacturer, self.model, self.y_temp)

    @property
    def label(self) -> str:
        return f"{self.manufacturer} {self.model}"


@dataclass(frozen=True)
class BoundResult:
    """Misalignment bound at one reset period plus the inverse solutions.

    ``t_r_max`` maps each requested ``T_L`` to the largest admissible reset
    period (``math.inf`` when the spec has no positive bound). ``verdicts``
    maps each ``T_L`` to the suitability test ``B <= T_L``.
    """

    spec: OscillatorSpec
    t_reset: float
    B: float
    breakdown: Mapping[str, float]
    t_r_max: Mapping[float, float] = field(default_factory=dict)
    verdicts: Mapping[float, bool] = field(default_factory=dict)

    @property
    def suitable(self) -> bool | None:
        if not self.verdicts:
            return None
        return all(self.verdicts.values())

    @property
    def T_R_max_15(self) -> float | None:
        return self.t_r_max.get(15.0)

    @property
    def T_R_max_165(self) -> float | None:
        return self.t_r_max.get(165.0)


def temp_accuracy(model: TemperatureModel, x: float) -> float:
    """Magnitude of the temperature-induced accuracy loss at ``x`` degC."""
    if x < model.x_min:
        raise OutOfRangeError(
            f"temperature {x} C below operating minimum x_min = {model.x_min} C",
            limit="x_min",
            value=x,
        )
    if x > model.x_max:
        raise OutOfRangeError(
            f"temperature {x} C above operating maximum x_max = {model.x_max} C",
            limit="x_max",
            value=x,
        )
    if model.kind is TempModelKind.CONSTANT:
        return model.coefficient
    dx = x - model.x0
    if model.kind is TempModelKind.LINEAR:
        return abs(model.coefficient) * abs(dx)
    return abs(model.coefficient) * dx * dx


def worst_case_temp_accuracy(model: TemperatureModel) -> float:
    """Max of :func:`temp_accuracy` over ``[x_min, x_max]``.

    Linear and parabolic losses grow with ``|x - x0|`` so the maximum sits on
    a range endpoint.
    """
    if model.kind is TempModelKind.CONSTANT:
        return model.coefficient
    return max(temp_accuracy(model, model.x_min), temp_accuracy(model, model.x_max))


def prudential_aging_bound(y_age: float, t_data: float, elapsed: float) -> float:
    """Constant up to ``t_data``, then growing linearly through the origin."""
    if elapsed <= t_data:
        return y_age
    return y_age * elapsed / t_data


def aging_bound(spec: AgingSpec, elapsed: float) -> float:
    if elapsed < 0:
        raise InvalidParameterError(f"elapsed time must be >= 0, got {elapsed}")
    if spec.included_in_accuracy:
        return 0.0
    return prudential_aging_bound(spec.y_age, spec.t_data, elapsed)


def vibration_accuracy(K: float, a: float) -> float:
    return K * a


def total_accuracy_bound(spec: OscillatorSpec, elapsed: float) -> float:
    return spec.y_temp + aging_bound(spec.aging, elapsed) + spec.minor.total


def aging_misalignment(spec: AgingSpec, elapsed: float) -> float:
    """Integral of the aging bound from the calibration instant to ``elapsed``."""
    if spec.included_in_accuracy or spec.y_age == 0.0:
        return 0.0
    T = elapsed
    Td = spec.t_data
    if T <= Td:
        return spec.y_age * T
    return 0.5 * spec.y_age * (Td + T * T / Td)


def _linear_rate(spec: OscillatorSpec) -> float:
    return spec.y_temp + spec.minor.total


def misalignment_breakdown(spec: OscillatorSpec, T_R: float) -> dict[str, float]:
    m = spec.minor
    return {
        "temperature": spec.y_temp * T_R,
        "aging": aging_misalignment(spec.aging, T_R),
        "vibration": vibration_accuracy(m.k_vib, m.a_max) * T_R,
        "supply": m.y_supp * T_R,
        "calibration": m.y_calib * T_R,
        "gravity": m.y_grav * T_R,
    }


def bound_value(spec: OscillatorSpec, T_R: float) -> float:
    """``B(T_R)`` as a bare float; see :func:`misalignment_bound`."""
    if not T_R > 0:
        raise InvalidParameterError(f"reset period must be positive, got {T_R!r}")
    return _linear_rate(spec) * T_R + aging_misalignment(spec.aging, T_R)


def misalignment_bound(spec: OscillatorSpec, T_R: float) -> BoundResult:
    """Worst-case misalignment accumulated over a holdover period ``T_R``.

    For ``T_R <= T_data`` the aging term integrates the constant branch,
    ``(Y_temp + Y_age) * T_R``; beyond it the linear branch gives
    ``Y_temp*T_R + Y_age/2 * (T_data + T_R**2/T_data)``. Specs whose
    temperature figure already covers aging use ``Y_temp * T_R``.
    """
    B = bound_value(spec, T_R)
    return BoundResult(spec=spec, t_reset=T_R, B=B, breakdown=misalignment_breakdown(spec, T_R))


def misalignment_bound_between(spec: OscillatorSpec, start: float, end: float) -> float:
    """Bound on misalignment accumulated from ``start`` to ``end``.

    Both times are measured from the first calibration, which matters when
    the aging clock keeps running through later phase resets.
    """
    if end < start or start < 0:
        raise InvalidParameterError(f"invalid interval [{start}, {end}]")
    rate = _linear_rate(spec)
    return rate * (end - start) + aging_misalignment(spec.aging, end) - aging_misalignment(spec.aging, start)


def cumulative_bound_array(spec: OscillatorSpec, elapsed: np.ndarray) -> np.ndarray:
    """Vectorized integral of the total accuracy bound from 0 to each ``elapsed``."""
    T = np.asarray(elapsed, dtype=float)
    out = _linear_rate(spec) * T
    a = spec.aging
    if not a.included_in_accuracy and a.y_age > 0.0:
        Td = a.t_data
        out = out + np.where(T <= Td, a.y_age * T, 0.5 * a.y_age * (Td + T * T / Td))
    return out


def max_reset_period(spec: OscillatorSpec, T_L: float) -> float:
    """Largest reset period whose bound does not exceed ``T_L``.

    Solved in closed form: linear while the root stays inside the aging
    horizon, otherwise the positive root of the quadratic branch. Returns
    ``math.inf`` when every bound is zero.
    """
    if not T_L > 0:
        raise InvalidParameterError(f"T_L must be positive, got {T_L!r}")
    rate = _linear_rate(spec)
    a = spec.aging
    y_age = 0.0 if a.included_in_accuracy else a.y_age
    if rate == 0.0 and y_age == 0.0:
        return math.inf
    T = T_L / (rate + y_age)
    if y_age == 0.0 or T <= a.t_data:
        return T
    # (y_age / (2 Td)) T^2 + rate T + (y_age Td / 2 - T_L) = 0, cancellation-free form
    qa = y_age / (2.0 * a.t_data)
    rhs = T_L - 0.5 * y_age * a.t_data
    return 2.0 * rhs / (rate + math.sqrt(rate * rate + 4.0 * qa * rhs))


def bisect_increasing(
    f: Callable[[float], float],
    target: float,
    lo: float = BISECT_LO,
    hi: float = BISECT_HI,
    rtol: float = BISECT_RTOL,
) -> float:
    """Solve ``f(x) = target`` for an increasing ``f`` by bisection.

    The bracket is widened geometrically when the target lies outside it.
    Iteration stops once the bracket is narrower than ``rtol`` relative to
    its midpoint.
    """
    while f(lo) > target:
        lo /= 2.0
        if lo < 1e-300:
            raise InvalidParameterError("target below the reachable range of f")
    while f(hi) < target:
        hi *= 2.0
        if not math.isfinite(hi):
            raise InvalidParameterError("target above the reachable range of f")
    while hi - lo > rtol * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def max_reset_period_bisect(spec: OscillatorSpec, T_L: float, rtol: float = 1e-13) -> float:
    """Bisection counterpart of :func:`max_reset_period`, used as a cross-check."""
    if not T_L > 0:
        raise InvalidParameterError(f"T_L must be positive, got {T_L!r}")
    if _linear_rate(spec) == 0.0 and (spec.aging.included_in_accuracy or spec.aging.y_age == 0.0):
        return math.inf
    return bisect_increasing(lambda T: bound_value(spec, T), T_L, rtol=rtol)


def suitability(spec: OscillatorSpec, req: SyncRequirement) -> BoundResult:
    return evaluate(spec, req.T_R, [req.T_L])


def evaluate(spec: OscillatorSpec, T_R: float, T_Ls: Iterable[float]) -> BoundResult:
    """Bound at ``T_R`` with the inverse solution and verdict for each ``T_L``."""
    res = misalignment_bound(spec, T_R)
    T_Ls = list(T_Ls)
    t_r_max = {T_L: max_reset_period(spec, T_L) for T_L in T_Ls}
    verdicts = {T_L: res.B <= T_L for T_L in T_Ls}
    return BoundResult(
        spec=spec, t_reset=T_R, B=res.B, breakdown=res.breakdown, t_r_max=t_r_max, verdicts=verdicts
    )


def accuracy_bound_dominates(a: OscillatorSpec, b: OscillatorSpec) -> bool:
    """True if ``a``'s total accuracy bound is >= ``b``'s at every elapsed time.

    Both bounds are piecewise linear with knees at the aging horizons, so it
    suffices to compare at zero, at each knee, and the slopes beyond.
    """
    knees = sorted({0.0, a.aging.t_data, b.aging.t_data})
    for t in knees:
        if total_accuracy_bound(a, t) < total_accuracy_bound(b, t):
            return False

    def tail_slope(s: OscillatorSpec) -> float:
        if s.aging.included_in_accuracy:
            return 0.0
        return s.aging.y_age / s.aging.t_data

    return tail_slope(a) >= tail_slope(b)
