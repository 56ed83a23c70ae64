"""Plain-text simulation config: one ``key = value`` per line, dotted keys.

Example::

    # times
    start_time_h = 9
    duration_s = 21600
    dt_s = 60
    temperature_mode = model        # or: replay
    controller.threshold = 50
    controller.hysteresis = 0
    battery1.capacity_ah = 200
    battery1.resistance_ohm = 0.05
    battery1.voltage_v = 12
    battery1.initial_soc = 90
    profile1.file = bundled:table1.csv
    profile1.current_scale = 1
    load1.file = bundled:load1.cfg
    load2.label = kitchen
    load2.appliances = Bulb:100*4, LCD TV:200*1
    thermal.ambient_c = 30
    thermal.heat_coeff = 1.75
    thermal.relax_rate = 0.0016667

Relative file paths resolve against the config file's directory; the
``bundled:`` prefix names a fixture shipped in ``solarshare/data``.  Every
key is optional.
"""

from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from .battery import BatteryParams, ThermalParams
from .controller import ControllerConfig
from .engine import TEMPERATURE_MODES, SystemConfig
from .errors import DomainError, ValidationError
from .loads import LOAD1, LOAD2, LoadConstitution, parse_appliances
from .pv import load_bundled_profile, parse_profile

BUNDLED = "bundled:"

_NUMBER_KEYS = {
    "start_time_h": ("system", "start_time"),
    "duration_s": ("system", "duration"),
    "dt_s": ("system", "dt"),
    "controller.threshold": ("controller", "threshold"),
    "controller.hysteresis": ("controller", "hysteresis"),
    "thermal.ambient_c": ("thermal", "ambient"),
    "thermal.heat_coeff": ("thermal", "heat_coeff"),
    "thermal.relax_rate": ("thermal", "relax_rate"),
}
for _n in ("1", "2"):
    _NUMBER_KEYS.update(
        {
            f"battery{_n}.capacity_ah": (f"battery{_n}", "nominal_capacity"),
            f"battery{_n}.resistance_ohm": (f"battery{_n}", "internal_resistance"),
            f"battery{_n}.voltage_v": (f"battery{_n}", "nominal_voltage"),
            f"battery{_n}.initial_soc": (f"battery{_n}", "initial_soc"),
            f"profile{_n}.current_scale": (f"profile{_n}", "current_scale"),
        }
    )
_TEXT_KEYS = {
    "temperature_mode",
    "profile1.file", "profile2.file",
    "load1.file", "load2.file",
    "load1.label", "load2.label",
    "load1.appliances", "load2.appliances",
}


def parse_pairs(text: str) -> Dict[str, Tuple[str, int]]:
    """Split config text into ``{key: (value, line)}``, rejecting duplicates."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValidationError("expected 'key = value'", line=lineno)
        if key in pairs:
            raise ValidationError(f"duplicate key (first set on line {pairs[key][1]})", lineno, key)
        pairs[key] = (value.strip(), lineno)
    return pairs


def _resolve(value: str, base_dir: Optional[Path]):
    from importlib.resources import files

    if value.startswith(BUNDLED):
        return files("solarshare.data").joinpath(value[len(BUNDLED):])
    path = Path(value)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return path


def _read(value, base_dir, key, line) -> str:
    try:
        return _resolve(value, base_dir).read_text(encoding="utf-8")
    except (OSError, FileNotFoundError) as exc:
        raise ValidationError(f"cannot read {value!r}: {exc}", line, key) from None


def parse_load_file(text: str, default_label: str = "load") -> LoadConstitution:
    """A load file holds ``label`` and ``appliances`` keys."""
    pairs = parse_pairs(text)
    for key, (_, line) in pairs.items():
        if key not in ("label", "appliances"):
            raise ValidationError("unknown key", line, key)
    label = pairs.get("label", (default_label, 0))[0]
    value, line = pairs.get("appliances", ("", 0))
    try:
        return LoadConstitution(label, parse_appliances(value))
    except (ValueError, DomainError) as exc:
        raise ValidationError(str(exc), line or None, "appliances") from None


def _load(n, pairs, base_dir, default):
    file_key, apps_key, label_key = f"load{n}.file", f"load{n}.appliances", f"load{n}.label"
    if file_key in pairs and apps_key in pairs:
        raise ValidationError(f"conflicts with {file_key}", pairs[apps_key][1], apps_key)
    load = default
    if file_key in pairs:
        value, line = pairs[file_key]
        try:
            load = parse_load_file(_read(value, base_dir, file_key, line), f"load{n}")
        except ValidationError as exc:
            raise ValidationError(f"in {value!r}: {exc}", line, file_key) from None
    elif apps_key in pairs:
        value, line = pairs[apps_key]
        try:
            load = LoadConstitution(f"load{n}", parse_appliances(value))
        except (ValueError, DomainError) as exc:
            raise ValidationError(str(exc), line, apps_key) from None
    if label_key in pairs:
        load = replace(load, label=pairs[label_key][0])
    return load


def _profile(n, pairs, base_dir, scale):
    key = f"profile{n}.file"
    if key in pairs:
        value, line = pairs[key]
        try:
            profile = parse_profile(_read(value, base_dir, key, line))
        except ValidationError as exc:
            raise ValidationError(f"in {value!r}: {exc}", line, key) from None
    else:
        profile = load_bundled_profile()
    if scale != 1.0:
        profile = profile.scaled(scale)
    return profile


def parse_config(text: str, base_dir: Union[str, Path, None] = None) -> SystemConfig:
    """Parse and validate config text into a :class:`SystemConfig`."""
    base_dir = Path(base_dir) if base_dir is not None else None
    pairs = parse_pairs(text)
    groups: Dict[str, Dict[str, float]] = {}
    origin: Dict[Tuple[str, str], Tuple[str, int]] = {}
    for key, (value, line) in pairs.items():
        if key in _NUMBER_KEYS:
            try:
                number = float(value)
            except ValueError:
                raise ValidationError(f"expected a number, got {value!r}", line, key) from None
            if not math.isfinite(number):
                raise ValidationError(f"expected a finite number, got {value!r}", line, key)
            group, name = _NUMBER_KEYS[key]
            groups.setdefault(group, {})[name] = number
            origin[group, name] = (key, line)
        elif key not in _TEXT_KEYS:
            raise ValidationError("unknown key", line, key)

    def build(group, cls):
        values = groups.get(group, {})
        try:
            return cls(**values)
        except DomainError as exc:
            name = str(exc).split()[0]
            key, line = origin.get((group, name), (None, None))
            raise ValidationError(str(exc), line, key) from None

    for n in ("1", "2"):
        scale = groups.get(f"profile{n}", {}).get("current_scale", 1.0)
        if not scale >= 0:
            key, line = origin[f"profile{n}", "current_scale"]
            raise ValidationError(f"current_scale must be >= 0, got {scale}", line, key)

    mode, mode_line = pairs.get("temperature_mode", ("model", None))
    if mode not in TEMPERATURE_MODES:
        raise ValidationError(
            f"expected one of {', '.join(TEMPERATURE_MODES)}, got {mode!r}", mode_line, "temperature_mode"
        )
    system = dict(groups.get("system", {}))
    system.update(
        battery1=build("battery1", BatteryParams),
        battery2=build("battery2", BatteryParams),
        load1=_load("1", pairs, base_dir, LOAD1),
        load2=_load("2", pairs, base_dir, LOAD2),
        profile1=_profile("1", pairs, base_dir, groups.get("profile1", {}).get("current_scale", 1.0)),
        profile2=_profile("2", pairs, base_dir, groups.get("profile2", {}).get("current_scale", 1.0)),
        controller=build("controller", ControllerConfig),
        thermal=build("thermal", ThermalParams),
        temperature_mode=mode,
    )
    groups["system"] = system
    return build("system", SystemConfig)


def load_config(path: Union[str, Path]) -> SystemConfig:
    """Read and parse a config file.  Raises ``OSError`` if it cannot be read."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_config(text, base_dir=path.parent)


def load_bundled_config(name: str = "default.cfg") -> SystemConfig:
    from importlib.resources import files

    return parse_config(files("solarshare.data").joinpath(name).read_text("utf-8"))
