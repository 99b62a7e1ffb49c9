"""Oscillator spec files, the embedded datasheet catalog, and evaluation reports.

Spec-file grammar: UTF-8, line-oriented ``key = value`` records separated by
blank lines, ``#`` starting a comment. Every numeric value carries a unit::

    manufacturer = SEIKO EPSON
    model = TG-5035CJ
    class = tcxo
    temp_range = -40..105 C
    temp_model = const 0.5 ppm
    y_age = 1 ppm @ 1 year

``temp_model`` is one of ``const <v> ppm``, ``linear <v> ppb_per_C [at <x0> C]``
or ``parabolic <A> ppm_per_C2 [at <x0> C]``; ``y_temp = <v> ppm`` is
shorthand for the constant form. Optional keys: ``aging_included``,
``k_vib``, ``a_max``, ``y_supp``, ``y_calib``, ``y_grav``, ``f_tol``, ``f0``.
Scenario files add ``scenario.*`` keys (see :func:`parse_scenario`).
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import units
from .clock_sim import (
    AccuracyMode,
    AgingFit,
    ConstantProfile,
    CyclingProfile,
    DiurnalProfile,
    Mode,
    RampProfile,
    ScenarioConfig,
    TemperatureProfile,
)
from .error_budget import (
    AgingSpec,
    BoundResult,
    MinorSources,
    OscillatorClass,
    OscillatorSpec,
    TemperatureModel,
    TempModelKind,
    evaluate,
)
from .errors import InvalidParameterError, OscboundError, SpecParseError

MANDATORY_KEYS = ("manufacturer", "model", "class", "temp_range")
OSC_KEYS = {
    "manufacturer",
    "model",
    "class",
    "temp_range",
    "temp_model",
    "y_temp",
    "y_age",
    "aging_included",
    "k_vib",
    "a_max",
    "y_supp",
    "y_calib",
    "y_grav",
    "f_tol",
    "f0",
}
SCENARIO_KEYS = {
    "mode",
    "role",
    "primary",
    "secondary",
    "duty",
    "profile",
    "seed",
    "sample_step",
    "t_l",
    "t_r",
    "accuracy",
    "aging_fit",
    "secondary_aging_fit",
    "restart_aging",
    "residual_block",
}

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_RANGE = re.compile(rf"^({_NUM})\s*(?:C|°C)?\s*\.\.\s*({_NUM})\s*(C|°C)$")
_AT = re.compile(rf"^(.*?)\s+at\s+({_NUM}\s*(?:C|°C))$")

SLOPE_UNITS = {"ppb_per_C": Decimal("1e-9"), "ppm_per_C": Decimal("1e-6")}
CURVATURE_UNITS = {"ppm_per_C2": Decimal("1e-6"), "ppb_per_C2": Decimal("1e-9")}
VIB_UNITS = {"ppb_per_g": Decimal("1e-9"), "ppm_per_g": Decimal("1e-6")}
ACCEL_UNITS = {"g": Decimal(1)}
RATE_UNITS = {"per_s": Decimal(1), "per_day": 1 / Decimal(86400), "per_year": 1 / Decimal(31_536_000)}
DRIFT_UNITS = {
    "ppm_per_s": Decimal("1e-6"),
    "ppm_per_day": Decimal("1e-6") / Decimal(86400),
    "ppm_per_year": Decimal("1e-6") / Decimal(31_536_000),
}


# --------------------------------------------------------------------------
# record splitting


@dataclass
class _Record:
    start: int
    fields: dict[str, tuple[str, int]] = field(default_factory=dict)

    def get(self, key: str) -> tuple[str, int] | None:
        return self.fields.get(key)


def _records(text: str, allow_scenario: bool) -> list[_Record]:
    records: list[_Record] = []
    cur: _Record | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if cur is not None and not raw.strip().startswith("#"):
                records.append(cur)
                cur = None
            continue
        if "=" not in line:
            raise SpecParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("scenario."):
            if not allow_scenario or key[len("scenario.") :] not in SCENARIO_KEYS:
                raise SpecParseError(f"unknown key {key!r}", lineno)
        elif key not in OSC_KEYS:
            raise SpecParseError(f"unknown key {key!r}", lineno)
        if not value:
            raise SpecParseError(f"empty value for {key!r}", lineno)
        if cur is None:
            cur = _Record(start=lineno)
        if key in cur.fields:
            raise SpecParseError(f"duplicate key {key!r} in entry", lineno)
        cur.fields[key] = (value, lineno)
    if cur is not None:
        records.append(cur)
    return records


def _conv(value: str, line: int, fn):
    try:
        return fn(value)
    except SpecParseError:
        raise
    except ValueError as exc:
        raise SpecParseError(str(exc), line) from exc


def _scaled(value: str, table: Mapping[str, Decimal], kind: str) -> float:
    num, unit = units.split_quantity(value)
    if unit not in table:
        raise InvalidParameterError(f"unit {unit!r} is not a {kind} unit (expected one of {', '.join(table)})")
    return float(num * table[unit])


def _bool(value: str) -> bool:
    v = value.lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise InvalidParameterError(f"expected true or false, got {value!r}")


def _temp_model(value: str, x_min: float, x_max: float) -> TemperatureModel:
    x0 = 25.0
    m = _AT.match(value)
    if m:
        value, x0 = m.group(1).strip(), units.parse_temperature(m.group(2))
    kind, _, rest = value.partition(" ")
    rest = rest.strip()
    if kind == "const":
        return TemperatureModel.constant(units.parse_fraction(rest), x_min, x_max, x0)
    if kind == "linear":
        return TemperatureModel.linear(_scaled(rest, SLOPE_UNITS, "slope"), x_min, x_max, x0)
    if kind == "parabolic":
        return TemperatureModel.parabolic(_scaled(rest, CURVATURE_UNITS, "curvature"), x_min, x_max, x0)
    raise InvalidParameterError(f"unknown temperature model {kind!r} (expected const, linear or parabolic)")


def _aging(value: str) -> tuple[float, float]:
    if "@" not in value:
        raise InvalidParameterError(f"y_age needs '<value> ppm @ <horizon>', got {value!r}")
    a, h = value.split("@", 1)
    return units.parse_fraction(a), units.parse_duration(h)


def _spec_from_record(rec: _Record) -> OscillatorSpec:
    for key in MANDATORY_KEYS:
        if rec.get(key) is None:
            raise SpecParseError(f"missing mandatory key {key!r}", rec.start)
    manufacturer = rec.get("manufacturer")[0]
    model = rec.get("model")[0]
    cls_text, cls_line = rec.get("class")
    try:
        osc_class = OscillatorClass(cls_text.lower())
    except ValueError:
        raise SpecParseError(f"unknown oscillator class {cls_text!r}", cls_line) from None

    rng_text, rng_line = rec.get("temp_range")
    m = _RANGE.match(rng_text)
    if not m:
        if re.fullmatch(rf"\s*{_NUM}\s*\.\.\s*{_NUM}\s*", rng_text):
            raise SpecParseError(f"missing unit in temp_range {rng_text!r}", rng_line)
        raise SpecParseError(f"malformed temp_range {rng_text!r} (expected '<min>..<max> C')", rng_line)
    x_min, x_max = float(Decimal(m.group(1))), float(Decimal(m.group(2)))
    if not x_min < x_max:
        raise SpecParseError(f"temp_range requires x_min < x_max, got {rng_text!r}", rng_line)

    tm, ty = rec.get("temp_model"), rec.get("y_temp")
    if tm and ty:
        raise SpecParseError("give either temp_model or y_temp, not both", ty[1])
    if tm:
        temperature = _conv(tm[0], tm[1], lambda v: _temp_model(v, x_min, x_max))
    elif ty:
        temperature = _conv(
            ty[0], ty[1], lambda v: TemperatureModel.constant(units.parse_fraction(v), x_min, x_max)
        )
    else:
        raise SpecParseError("missing mandatory key 'temp_model'", rec.start)

    included = False
    if rec.get("aging_included"):
        included = _conv(*rec.get("aging_included"), _bool)
    ya = rec.get("y_age")
    if ya:
        y_age, t_data = _conv(ya[0], ya[1], _aging)
    elif included:
        y_age, t_data = 0.0, units.YEAR
    else:
        raise SpecParseError("missing mandatory key 'y_age' (or set aging_included = true)", rec.start)

    minor_kw: dict[str, float] = {}
    for key, fn in (
        ("k_vib", lambda v: _scaled(v, VIB_UNITS, "vibration sensitivity")),
        ("a_max", lambda v: _scaled(v, ACCEL_UNITS, "acceleration")),
        ("y_supp", units.parse_fraction),
        ("y_calib", units.parse_fraction),
        ("y_grav", units.parse_fraction),
        ("f_tol", units.parse_fraction),
    ):
        if rec.get(key):
            minor_kw[key] = _conv(*rec.get(key), fn)
    f0 = _conv(*rec.get("f0"), units.parse_frequency) if rec.get("f0") else None

    try:
        return OscillatorSpec(
            manufacturer=manufacturer,
            model=model,
            osc_class=osc_class,
            temperature=temperature,
            aging=AgingSpec(y_age, t_data, included),
            minor=MinorSources(**minor_kw),
            f0=f0,
        )
    except InvalidParameterError as exc:
        raise SpecParseError(str(exc), rec.start) from exc


def _has_osc_keys(rec: _Record) -> bool:
    return any(not k.startswith("scenario.") for k in rec.fields)


def parse_spec_file(text: str) -> list[OscillatorSpec]:
    """Parse spec-file text into validated specs (empty text gives an empty list)."""
    specs: list[OscillatorSpec] = []
    seen: dict[tuple, int] = {}
    for rec in _records(text, allow_scenario=False):
        spec = _spec_from_record(rec)
        if spec.key in seen:
            raise SpecParseError(
                f"duplicate entry {spec.manufacturer} {spec.model} at the same Y_temp "
                f"(first defined at line {seen[spec.key]})",
                rec.start,
            )
        seen[spec.key] = rec.start
        specs.append(spec)
    return specs


@dataclass(frozen=True)
class SpecFile:
    path: Path
    entries: tuple[OscillatorSpec, ...]


def read_spec_file(path: str | Path) -> SpecFile:
    p = Path(path)
    return SpecFile(path=p, entries=tuple(parse_spec_file(p.read_text(encoding="utf-8"))))


# --------------------------------------------------------------------------
# rendering specs back to text


def _frac(v: float) -> str:
    return f"{units.format_scaled(v, '1e-6')} ppm"


def _temp(x: float) -> str:
    return units.format_scaled(x, 1)


def render_spec(spec: OscillatorSpec) -> str:
    tm = spec.temperature
    if tm.kind is TempModelKind.CONSTANT:
        model = f"const {_frac(tm.coefficient)}"
    elif tm.kind is TempModelKind.LINEAR:
        model = f"linear {units.format_scaled(tm.coefficient, '1e-9')} ppb_per_C"
    else:
        model = f"parabolic {units.format_scaled(tm.coefficient, '1e-6')} ppm_per_C2"
    if tm.x0 != 25.0 or tm.kind is not TempModelKind.CONSTANT:
        model += f" at {_temp(tm.x0)} C"
    lines = [
        f"manufacturer = {spec.manufacturer}",
        f"model = {spec.model}",
        f"class = {spec.osc_class.value}",
        f"temp_range = {_temp(tm.x_min)}..{_temp(tm.x_max)} C",
        f"temp_model = {model}",
        f"y_age = {_frac(spec.aging.y_age)} @ {units.format_duration(spec.aging.t_data)}",
        f"aging_included = {'true' if spec.aging.included_in_accuracy else 'false'}",
    ]
    m = spec.minor
    if m.k_vib:
        lines.append(f"k_vib = {units.format_scaled(m.k_vib, '1e-9')} ppb_per_g")
    if m.a_max:
        lines.append(f"a_max = {units.format_scaled(m.a_max, 1)} g")
    for key in ("y_supp", "y_calib", "y_grav"):
        if getattr(m, key):
            lines.append(f"{key} = {_frac(getattr(m, key))}")
    if m.f_tol is not None:
        lines.append(f"f_tol = {_frac(m.f_tol)}")
    if spec.f0 is not None:
        lines.append(f"f0 = {units.format_scaled(spec.f0, 1)} Hz")
    return "\n".join(lines) + "\n"


def render_spec_file(specs: Iterable[OscillatorSpec]) -> str:
    return "\n".join(render_spec(s) for s in specs)


# --------------------------------------------------------------------------
# embedded catalog


@dataclass(frozen=True)
class Expected:
    """Published figures in the table's display units; None marks an empty cell."""

    B: float
    t_r_max: Mapping[float, float | None]


@dataclass(frozen=True)
class CatalogEntry:
    spec: OscillatorSpec
    table: int
    name: str
    expected: Expected


@dataclass(frozen=True)
class TableLayout:
    b_unit: str = "s"
    t_r_max_units: Mapping[float, str] = field(default_factory=dict)
    default_unit: str = "days"

    def unit_for(self, t_l: float) -> str:
        return self.t_r_max_units.get(t_l, self.default_unit)


DISPLAY_UNITS = {"s": 1.0, "min": units.MINUTE, "h": units.HOUR, "days": units.DAY, "years": units.YEAR}

TABLE_LAYOUTS = {
    2: TableLayout("s", {15.0: "days", 165.0: "years"}),
    3: TableLayout("min", {15.0: "days", 165.0: "days"}),
}
TABLE_T_R = 2 * units.YEAR
TABLE_T_L = (15.0, 165.0)

# Table 2: TCXO datasheets. (manufacturer, model, x_min, x_max, Y_temp ppm, Y_age ppm, B s, T15 days, T165 years)
_TABLE2 = [
    ("SEIKO EPSON", "TG-5035CJ", -40, 105, "0.5", "1", 110.38, 115.74, 2.62),
    ("SEIKO EPSON", "TG2016SMN", -40, 90, "0.5", "0.5", 70.96, 173.61, 3.57),
    ("SEIKO EPSON", "TG2016SLN", -40, 85, "0.5", "1", 110.38, 115.74, 2.62),
    ("SEIKO EPSON", "TG-5006CJ", -30, 85, "0.5", "1", 110.38, 115.74, 2.62),
    ("SEIKO EPSON", "TG2016SKA", -40, 105, "0.5", "1", 110.38, 115.74, 2.62),
    ("VECTRON", "VT-803", -40, 85, "1", "0.5", 102.49, 115.74, 2.89),
    ("VECTRON", "VT-706", -40, 85, "0.5", "1", 110.38, 115.74, 2.62),
    ("VECTRON", "VT-702", -40, 85, "0.5", "1", 110.38, 115.74, 2.62),
    ("VECTRON", "VT-804", -40, 85, "2", "1", 204.98, 57.87, 1.67),
    ("NDK", "NT2520SE", -40, 105, "0.5", "1", 110.38, 115.74, 2.62),
    ("NDK", "NT1612AA", -30, 85, "0.5", "1", 110.38, 115.74, 2.62),
    ("NDK", "NT1612AJA", -30, 85, "0.5", "1", 110.38, 115.74, 2.62),
    ("NDK", "NT2016SA", -30, 85, "0.5", "1", 110.38, 115.74, 2.62),
    ("Maxim Integrated", "DS3231", -40, 85, "3.5", "1", 299.59, 38.58, 1.16),
    ("Micro Crystal Switzerland", "RV-8803-C7", -40, 85, "3", "3", 425.73, 28.94, 0.87),
]

# Table 3: CMOS RTC datasheets. (..., Y_age ppm or None, aging included, B min, T15 days, T165 days)
_TABLE3 = [
    ("MICREL", "DSC1003", -40, 105, "10", "5", False, 17.08, 11.57, 127.31),
    ("MICREL", "DSC1003", -40, 105, "25", "5", False, 32.85, 5.78, 63.66),
    ("MICREL", "DSC1003", -40, 105, "50", "5", False, 59.13, 3.16, 34.72),
    ("TXC", "7X", -40, 85, "20", "3", True, 21.02, 8.68, 95.49),
    ("TXC", "7X", -40, 85, "25", "3", True, 26.28, 6.94, 76.39),
    ("TXC", "7X", -40, 85, "50", "3", True, 52.56, 3.47, 38.19),
    ("TXC", "7C", -40, 85, "15", "3", True, 15.76, 11.57, 127.31),
    ("TXC", "7C", -40, 85, "25", "3", True, 26.28, 6.94, 76.39),
    ("TXC", "7C", -40, 85, "30", "3", True, 31.52, 5.79, 63.66),
    ("TXC", "7C", -40, 85, "50", "3", True, 52.56, 3.47, 38.19),
    ("ECS", "ECS-327ATQ2016MV", -40, 125, "50", None, True, 52.56, 3.47, None),
]


def _ppm(text: str) -> float:
    return float(Decimal(text) * Decimal("1e-6"))


def _build_catalog() -> list[CatalogEntry]:
    entries: list[CatalogEntry] = []
    for man, model, lo, hi, yt, ya, B, t15, t165 in _TABLE2:
        spec = OscillatorSpec(
            man,
            model,
            OscillatorClass.TCXO,
            TemperatureModel.constant(_ppm(yt), lo, hi),
            AgingSpec(_ppm(ya), units.YEAR, False),
        )
        entries.append(CatalogEntry(spec, 2, model, Expected(B, {15.0: t15, 165.0: t165})))
    multi = {m for _, m, *_ in _TABLE3 if sum(1 for r in _TABLE3 if r[1] == m) > 1}
    for man, model, lo, hi, yt, ya, inc, B, t15, t165 in _TABLE3:
        spec = OscillatorSpec(
            man,
            model,
            OscillatorClass.CMOS,
            TemperatureModel.constant(_ppm(yt), lo, hi),
            AgingSpec(_ppm(ya) if ya else 0.0, units.YEAR, inc),
        )
        name = f"{model}@{yt}ppm" if model in multi else model
        entries.append(CatalogEntry(spec, 3, name, Expected(B, {15.0: t15, 165.0: t165})))
    return entries


_CATALOG = tuple(_build_catalog())


def embedded_catalog() -> list[CatalogEntry]:
    """Every row of the published TCXO (table 2) and CMOS RTC (table 3) evaluations."""
    return list(_CATALOG)


def catalog_table(table: int) -> list[CatalogEntry]:
    if table not in TABLE_LAYOUTS:
        raise InvalidParameterError(f"no table {table!r}; choose 2 or 3")
    return [e for e in _CATALOG if e.table == table]


def lookup(name: str) -> CatalogEntry:
    """Find a catalog device by model name, or ``model@<Y_temp>ppm`` for multi-grade parts."""
    key = name.strip().lower()
    for e in _CATALOG:
        if e.name.lower() == key:
            return e
    grades = [e.name for e in _CATALOG if e.spec.model.lower() == key]
    if grades:
        raise InvalidParameterError(f"device {name!r} is ambiguous; choose one of {', '.join(grades)}")
    raise InvalidParameterError(f"unknown device {name!r}")


# --------------------------------------------------------------------------
# reports


def _fmt2(v: float) -> str:
    if math.isinf(v):
        return "inf"
    return f"{v:.2f}"


def _ppm_text(v: float) -> str:
    return f"{v / units.PPM:.6g} ppm"


def _aging_text(spec: OscillatorSpec) -> str:
    a = spec.aging
    if a.included_in_accuracy and a.y_age == 0.0:
        return "/"
    text = _ppm_text(a.y_age)
    if a.t_data != units.YEAR:
        text += f" @ {units.format_duration(a.t_data)}"
    return text


def _t_l_label(t_l: float) -> str:
    return units.format_duration(t_l).replace(" ", "")


def _compare(computed: float, published: float | None, tol: float) -> bool | None:
    if published is None:
        return None
    return abs(computed - published) <= tol + 1e-9


GOLDEN_TOL = 0.01


def check_entry(entry: CatalogEntry, result: BoundResult, layout: TableLayout) -> list[str]:
    """Names of cells whose recomputed value misses the published one by more than 0.01."""
    bad = []
    b = result.B / DISPLAY_UNITS[layout.b_unit]
    if not _compare(b, entry.expected.B, GOLDEN_TOL):
        bad.append(f"B {b:.3f}!={entry.expected.B}")
    for t_l, pub in entry.expected.t_r_max.items():
        if t_l not in result.t_r_max:
            continue
        v = result.t_r_max[t_l] / DISPLAY_UNITS[layout.unit_for(t_l)]
        if _compare(v, pub, GOLDEN_TOL) is False:
            bad.append(f"T_R_max@{_t_l_label(t_l)} {v:.3f}!={pub}")
    return bad


def render_report(
    results: Sequence[BoundResult],
    format: str = "markdown",
    *,
    layout: TableLayout | None = None,
    expected: Sequence[Expected | None] | None = None,
    checks: Sequence[str] | None = None,
    breakdown: bool = False,
) -> str:
    """Tabulate bound results as CSV or a Markdown pipe table.

    Numbers are rounded to two decimals in the layout's display units.
    ``expected`` (aligned with ``results``) flags cells that are computed but
    absent from the published tables; ``checks`` adds a PASS/FAIL column.
    """
    if format not in ("csv", "markdown"):
        raise InvalidParameterError(f"unknown report format {format!r}")
    layout = layout or TableLayout()
    t_ls: list[float] = []
    for r in results:
        for t_l in r.t_r_max:
            if t_l not in t_ls:
                t_ls.append(t_l)
    t_r_text = units.format_duration(results[0].t_reset) if results else "T_R"
    header = ["Manufacturer", "Model", "x_min", "x_max", "Y_temp", "Y_age(1 year)", "aging"]
    header.append(f"B(T_R={t_r_text}) [{layout.b_unit}]")
    header += [f"T_R_max@T_L={_t_l_label(t)} [{layout.unit_for(t)}]" for t in t_ls]
    if breakdown:
        header += [f"B_{k} [{layout.b_unit}]" for k in ("temperature", "aging", "minor")]
    header += [f"suitable@T_L={_t_l_label(t)}" for t in t_ls]
    header.append("computed_not_published")
    if checks is not None:
        header.append("check")

    rows: list[list[str]] = []
    for i, r in enumerate(results):
        s = r.spec
        row = [
            s.manufacturer,
            s.model,
            _temp(s.temperature.x_min),
            _temp(s.temperature.x_max),
            _ppm_text(s.y_temp),
            _aging_text(s),
            "included" if s.aging.included_in_accuracy else "separate",
            _fmt2(r.B / DISPLAY_UNITS[layout.b_unit]),
        ]
        unpublished = []
        exp = expected[i] if expected is not None else None
        for t in t_ls:
            v = r.t_r_max.get(t)
            row.append("" if v is None else _fmt2(v / DISPLAY_UNITS[layout.unit_for(t)]))
            if exp is not None and exp.t_r_max.get(t, 0.0) is None:
                unpublished.append(f"T_R_max@T_L={_t_l_label(t)}")
        if breakdown:
            bd = r.breakdown
            minor = sum(v for k, v in bd.items() if k not in ("temperature", "aging"))
            scale = DISPLAY_UNITS[layout.b_unit]
            row += [_fmt2(bd["temperature"] / scale), _fmt2(bd["aging"] / scale), _fmt2(minor / scale)]
        for t in t_ls:
            v = r.verdicts.get(t)
            row.append("" if v is None else ("yes" if v else "no"))
        row.append(";".join(unpublished))
        if checks is not None:
            row.append(checks[i])
        rows.append(row)

    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def reproduce_table(table: int) -> tuple[list[CatalogEntry], list[BoundResult], list[list[str]]]:
    """Recompute a published table; returns entries, results and per-row mismatches."""
    entries = catalog_table(table)
    layout = TABLE_LAYOUTS[table]
    results = [evaluate(e.spec, TABLE_T_R, TABLE_T_L) for e in entries]
    mismatches = [check_entry(e, r, layout) for e, r in zip(entries, results)]
    return entries, results, mismatches


def render_table(table: int, format: str = "markdown") -> tuple[str, bool]:
    entries, results, mismatches = reproduce_table(table)
    checks = ["PASS" if not m else "FAIL: " + "; ".join(m) for m in mismatches]
    text = render_report(
        results,
        format,
        layout=TABLE_LAYOUTS[table],
        expected=[e.expected for e in entries],
        checks=checks,
    )
    return text, all(not m for m in mismatches)


# --------------------------------------------------------------------------
# scenario files


def parse_profile(value: str) -> TemperatureProfile:
    """``constant 25 C`` | ``ramp -20 C 85 C 30 d`` | ``diurnal 25 C 20 C 1 d`` | ``cycling 60 C -40 C 12 h``."""
    kind, _, rest = value.strip().partition(" ")
    parts = re.findall(rf"({_NUM})\s*([A-Za-z°]+)", rest)
    leftover = re.sub(rf"({_NUM})\s*([A-Za-z°]+)", "", rest).strip()
    if leftover:
        raise InvalidParameterError(f"malformed profile arguments {rest!r}")
    q = [f"{n} {u}" for n, u in parts]

    def need(n: int):
        if len(q) != n:
            raise InvalidParameterError(f"profile {kind!r} takes {n} quantities, got {len(q)}")

    if kind == "constant":
        need(1)
        return ConstantProfile(units.parse_temperature(q[0]))
    if kind == "ramp":
        need(3)
        return RampProfile(units.parse_temperature(q[0]), units.parse_temperature(q[1]), units.parse_duration(q[2]))
    if kind == "diurnal":
        need(3)
        return DiurnalProfile(
            units.parse_temperature(q[0]), units.parse_temperature(q[1]), units.parse_duration(q[2])
        )
    if kind == "cycling":
        need(3)
        return CyclingProfile(
            units.parse_temperature(q[0]), units.parse_temperature(q[1]), units.parse_duration(q[2])
        )
    raise InvalidParameterError(f"unknown profile {kind!r}")


def parse_duty(value: str, duration: float | None) -> tuple[tuple[float, float], ...]:
    """``always_off`` | ``always_on`` | ``periodic <on> <period>`` | ``<a>..<b>, <c>..<d>``."""
    v = value.strip()
    if v == "always_off":
        return ()
    if v == "always_on":
        return ((0.0, math.inf),)
    if v.startswith("periodic"):
        parts = re.findall(rf"({_NUM}\s*[A-Za-z]+)", v[len("periodic") :])
        if len(parts) != 2:
            raise InvalidParameterError("periodic duty needs '<on duration> <period>'")
        on, period = units.parse_duration(parts[0]), units.parse_duration(parts[1])
        if not 0 < on <= period:
            raise InvalidParameterError("periodic duty needs 0 < on <= period")
        if duration is None:
            raise InvalidParameterError("periodic duty needs the simulation duration")
        n = int(math.ceil(duration / period))
        return tuple((k * period, k * period + on) for k in range(n + 1))
    out = []
    for chunk in v.split(","):
        if ".." not in chunk:
            raise InvalidParameterError(f"duty interval {chunk.strip()!r} needs '<start>..<end>'")
        a, b = chunk.split("..", 1)
        out.append((units.parse_duration(a), units.parse_duration(b)))
    return tuple(out)


def parse_aging_fit(value: str, aging: AgingSpec) -> AgingFit | None:
    """``default_log`` | ``secant_linear`` | ``linear <A> ppm_per_year <C> ppm`` | ``log <B> ppm <D> per_year``."""
    v = value.strip()
    if v in ("default", "default_log"):
        return None
    if v == "secant_linear":
        return AgingFit.secant_linear(aging)
    kind, _, rest = v.partition(" ")
    parts = re.findall(rf"({_NUM})\s*([A-Za-z_]+)", rest)
    if len(parts) != 2:
        raise InvalidParameterError(f"aging fit {kind!r} takes two quantities")
    (n1, u1), (n2, u2) = parts
    if kind == "linear":
        return AgingFit.linear(_scaled(f"{n1} {u1}", DRIFT_UNITS, "drift"), units.parse_fraction(f"{n2} {u2}"))
    if kind == "log":
        return AgingFit.logarithmic(units.parse_fraction(f"{n1} {u1}"), _scaled(f"{n2} {u2}", RATE_UNITS, "rate"))
    raise InvalidParameterError(f"unknown aging fit {kind!r}")


def parse_scenario(text: str, duration: float | None = None) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from spec-file text with ``scenario.*`` keys.

    Oscillators are given as full spec entries (role taken from
    ``scenario.role`` or entry order) or by catalog name through
    ``scenario.primary`` / ``scenario.secondary``.
    """
    recs = _records(text, allow_scenario=True)
    settings: dict[str, tuple[str, int]] = {}
    by_role: dict[str, OscillatorSpec] = {}
    ordered: list[OscillatorSpec] = []
    for rec in recs:
        role = None
        for key, (value, line) in rec.fields.items():
            if not key.startswith("scenario."):
                continue
            short = key[len("scenario.") :]
            if short == "role":
                role = (value, line)
                continue
            if short in settings:
                raise SpecParseError(f"duplicate scenario key {key!r}", line)
            settings[short] = (value, line)
        if _has_osc_keys(rec):
            osc = _Record(rec.start, {k: v for k, v in rec.fields.items() if not k.startswith("scenario.")})
            spec = _spec_from_record(osc)
            if role is not None:
                if role[0] not in ("primary", "secondary"):
                    raise SpecParseError(f"scenario.role must be primary or secondary, got {role[0]!r}", role[1])
                if role[0] in by_role:
                    raise SpecParseError(f"two entries claim role {role[0]!r}", role[1])
                by_role[role[0]] = spec
            else:
                ordered.append(spec)

    for name in ("primary", "secondary"):
        if name in settings:
            value, line = settings.pop(name)
            if name in by_role:
                raise SpecParseError(f"{name} oscillator defined twice", line)
            by_role[name] = _conv(value, line, lambda v: lookup(v).spec)
    for spec in ordered:
        slot = "primary" if "primary" not in by_role else "secondary"
        if slot in by_role:
            raise SpecParseError("more than two oscillator entries in scenario", 1)
        by_role[slot] = spec
    if "primary" not in by_role:
        raise SpecParseError("scenario defines no primary oscillator", 1)

    def get(key, fn, default=None):
        if key not in settings:
            return default
        value, line = settings[key]
        return _conv(value, line, fn)

    primary = by_role["primary"]
    secondary = by_role.get("secondary")
    mode = get("mode", lambda v: Mode(v.lower()), None)
    if mode is None:
        mode = Mode.POWER_LIMITED if secondary is not None else Mode.HIGH_POWER
    t_l = get("t_l", units.parse_duration)
    kw = dict(
        mode=mode,
        primary=primary,
        secondary=secondary,
        profile=get("profile", parse_profile, ConstantProfile(primary.temperature.x0)),
        duty=get("duty", lambda v: parse_duty(v, duration), ()),
        aging_fit=get("aging_fit", lambda v: parse_aging_fit(v, primary.aging)),
        secondary_aging_fit=get(
            "secondary_aging_fit", lambda v: parse_aging_fit(v, secondary.aging) if secondary else None
        ),
        t_l=t_l,
        t_r=get("t_r", units.parse_duration),
        sample_step=get(
            "sample_step", units.parse_duration, (t_l / 10.0 if t_l is not None else units.HOUR)
        ),
        seed=get("seed", lambda v: int(v)),
        accuracy=get("accuracy", lambda v: AccuracyMode(v.lower()), AccuracyMode.MODEL),
        restart_aging=get("restart_aging", _bool, False),
        residual_block=get("residual_block", units.parse_duration, units.HOUR),
    )
    if kw["seed"] is None:
        kw["seed"] = 0
    try:
        return ScenarioConfig(**kw)
    except OscboundError as exc:
        raise SpecParseError(str(exc)) from exc
