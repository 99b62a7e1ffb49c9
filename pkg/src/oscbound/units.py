"""Unit conversions used at the I/O boundary.

Internally time is in seconds, frequency in hertz and accuracy in
dimensionless fractions. Decimal arithmetic keeps text <-> float conversion
exact so that rendered values re-parse to the identical float.
"""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation

from .errors import InvalidParameterError

PPM = 1e-6
PPB = 1e-9

MINUTE = 60.0
HOUR = 3600.0
DAY = 86400.0
YEAR = 365.0 * DAY  # 31_536_000 s; the convention that reproduces the published tables

DURATION_UNITS: dict[str, Decimal] = {
    "s": Decimal(1),
    "sec": Decimal(1),
    "min": Decimal(60),
    "h": Decimal(3600),
    "d": Decimal(86400),
    "day": Decimal(86400),
    "days": Decimal(86400),
    "y": Decimal(31_536_000),
    "year": Decimal(31_536_000),
    "years": Decimal(31_536_000),
}

FRACTION_UNITS: dict[str, Decimal] = {
    "ppm": Decimal("1e-6"),
    "ppb": Decimal("1e-9"),
}

FREQUENCY_UNITS: dict[str, Decimal] = {
    "hz": Decimal(1),
    "khz": Decimal(1000),
    "mhz": Decimal(1_000_000),
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z_°%][A-Za-z0-9_°]*)\s*$")


def split_quantity(text: str) -> tuple[Decimal, str]:
    """Split ``"0.5 ppm"`` into ``(Decimal("0.5"), "ppm")``.

    A unit token is mandatory; a bare number raises.
    """
    m = _QUANTITY.match(text)
    if not m:
        if re.fullmatch(r"\s*[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?\s*", text):
            raise InvalidParameterError(f"missing unit in {text.strip()!r}")
        raise InvalidParameterError(f"malformed quantity {text.strip()!r}")
    try:
        value = Decimal(m.group(1))
    except InvalidOperation as exc:  # pragma: no cover - regex already guards
        raise InvalidParameterError(f"malformed number {m.group(1)!r}") from exc
    return value, m.group(2)


def _convert(text: str, table: dict[str, Decimal], kind: str, case_insensitive: bool = False) -> float:
    value, unit = split_quantity(text)
    key = unit.lower() if case_insensitive else unit
    if key not in table:
        raise InvalidParameterError(
            f"unit {unit!r} is not a {kind} unit (expected one of {', '.join(table)})"
        )
    return float(value * table[key])


def parse_duration(text: str) -> float:
    """``"2y"`` -> 63072000.0; ``"90 d"``, ``"3600s"``, ``"1.5h"`` likewise."""
    return _convert(text, DURATION_UNITS, "duration")


def parse_fraction(text: str) -> float:
    """``"0.5 ppm"`` -> 5e-07."""
    return _convert(text, FRACTION_UNITS, "accuracy", case_insensitive=True)


def parse_frequency(text: str) -> float:
    return _convert(text, FREQUENCY_UNITS, "frequency", case_insensitive=True)


def parse_temperature(text: str) -> float:
    value, unit = split_quantity(text)
    if unit not in ("C", "°C", "degC"):
        raise InvalidParameterError(f"unit {unit!r} is not a temperature unit (expected C)")
    return float(value)


def format_scaled(value: float, scale: Decimal | float | str) -> str:
    """Render ``value / scale`` as the shortest decimal that re-parses exactly.

    ``format_scaled(5e-7, "1e-6")`` gives ``"0.5"``.
    """
    d = Decimal(repr(float(value))) / Decimal(str(scale))
    text = format(d.normalize(), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text if text not in ("-0", "") else "0"


def format_duration(seconds: float) -> str:
    """Pick the largest unit that divides ``seconds`` exactly."""
    d = Decimal(repr(float(seconds)))
    for unit in ("year", "d", "h", "min"):
        q = d / DURATION_UNITS[unit]
        if q == q.to_integral_value() and q != 0:
            text = format_scaled(seconds, DURATION_UNITS[unit])
            if unit == "year" and text != "1":
                unit = "years"
            return f"{text} {unit}"
    return f"{format_scaled(seconds, 1)} s"
