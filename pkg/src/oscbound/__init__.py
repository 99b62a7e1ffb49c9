"""Worst-case misalignment bounds for crystal-oscillator real-time clocks.

Datasheet figures (temperature, aging, minor sources) are summed into an
accuracy bound, integrated into a misalignment bound ``B(T_R)`` over a
workshop reset period, and compared against a loose time-synchronization
threshold ``T_L``. A deterministic simulator produces clock-error
trajectories that the bound must dominate.
"""

from .clock_model import (
    ClockSample,
    FrequencyMetrics,
    NominalClock,
    SyncRequirement,
    accuracy,
    integrate_misalignment,
    stability_over_window,
    sync_ok,
)
from .error_budget import (
    AgingSpec,
    BoundResult,
    MinorSources,
    OscillatorClass,
    OscillatorSpec,
    TemperatureModel,
    aging_bound,
    max_reset_period,
    misalignment_bound,
    suitability,
    temp_accuracy,
    total_accuracy_bound,
    vibration_accuracy,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AgingSpec",
    "BoundResult",
    "ClockSample",
    "FrequencyMetrics",
    "MinorSources",
    "NominalClock",
    "OscillatorClass",
    "OscillatorSpec",
    "SyncRequirement",
    "TemperatureModel",
    "accuracy",
    "aging_bound",
    "integrate_misalignment",
    "max_reset_period",
    "misalignment_bound",
    "stability_over_window",
    "suitability",
    "sync_ok",
    "temp_accuracy",
    "total_accuracy_bound",
    "vibration_accuracy",
]
