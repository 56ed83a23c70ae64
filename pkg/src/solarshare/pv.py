"""Measured PV generation profiles and their interpolation."""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, List, TextIO, Tuple, Union

from .errors import DomainError, ValidationError

HEADER = ("time_h", "voltage_v", "current_a", "temp_c")


@dataclass(frozen=True)
class PVSample:
    time: float  # hour of day
    voltage: float  # V
    current: float  # A
    temperature: float  # degC

    def __post_init__(self):
        if not self.voltage >= 0:
            raise DomainError(f"voltage must be >= 0, got {self.voltage}")
        if not self.current >= 0:
            raise DomainError(f"current must be >= 0, got {self.current}")


class PVProfile:
    """An immutable, time-ordered sequence of :class:`PVSample`."""

    __slots__ = ("samples", "times")

    def __init__(self, samples: Iterable[PVSample]):
        samples = tuple(samples)
        if not samples:
            raise ValidationError("a profile needs at least one sample")
        for prev, cur in zip(samples, samples[1:]):
            if not cur.time > prev.time:
                raise ValidationError(
                    f"sample times must be strictly increasing ({prev.time} then {cur.time})"
                )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "times", tuple(s.time for s in samples))

    def __setattr__(self, name, value):
        raise AttributeError("PVProfile is immutable")

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    def __eq__(self, other):
        return isinstance(other, PVProfile) and self.samples == other.samples

    def __hash__(self):
        return hash(self.samples)

    def __repr__(self):
        return f"PVProfile({len(self.samples)} samples, {self.times[0]}-{self.times[-1]} h)"

    def scaled(self, factor: float) -> "PVProfile":
        """Same profile with every current multiplied by ``factor``."""
        return PVProfile(
            PVSample(s.time, s.voltage, s.current * factor, s.temperature) for s in self.samples
        )

    def columns(self) -> Tuple[List[float], List[float], List[float], List[float]]:
        return (
            list(self.times),
            [s.voltage for s in self.samples],
            [s.current for s in self.samples],
            [s.temperature for s in self.samples],
        )


def _normalize_hour(t: float, prev: Union[float, None]) -> float:
    # 12-hour clock readings that would run backwards continue into the afternoon.
    if prev is not None and t <= prev and t < 12:
        return t + 12
    return t


def parse_profile(text: Union[str, TextIO]) -> PVProfile:
    """Parse a profile CSV.  The ``time_h,voltage_v,current_a,temp_c`` header is optional."""
    if isinstance(text, str):
        text = io.StringIO(text, newline="")
    samples = []
    prev = None
    for lineno, row in enumerate(csv.reader(text), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if lineno == 1 and tuple(c.strip() for c in row) == HEADER:
            continue
        if len(row) != 4:
            raise ValidationError(f"expected 4 columns, got {len(row)}", line=lineno)
        try:
            values = [float(c) for c in row]
        except ValueError:
            raise ValidationError(f"non-numeric field in {row!r}", line=lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise ValidationError(f"non-finite field in {row!r}", line=lineno)
        t = _normalize_hour(values[0], prev)
        if prev is not None and not t > prev:
            raise ValidationError(f"time {values[0]} does not increase after {prev}", line=lineno)
        try:
            samples.append(PVSample(t, values[1], values[2], values[3]))
        except DomainError as exc:
            raise ValidationError(str(exc), line=lineno) from None
        prev = t
    if not samples:
        raise ValidationError("profile has no data rows")
    return PVProfile(samples)


def _fmt(x: float) -> str:
    return str(int(x)) if x.is_integer() and abs(x) < 1e15 else repr(x)


def format_profile(profile: PVProfile) -> str:
    lines = [",".join(HEADER)]
    for s in profile:
        lines.append(",".join(_fmt(v) for v in (s.time, s.voltage, s.current, s.temperature)))
    return "\n".join(lines) + "\n"


def _interp(times, values, t: float) -> float:
    if t <= times[0]:
        return values[0]
    if t >= times[-1]:
        return values[-1]
    j = bisect.bisect_right(times, t) - 1
    t0 = times[j]
    v0 = values[j]
    v1 = values[j + 1]
    v = v0 + (v1 - v0) * ((t - t0) / (times[j + 1] - t0))
    # round-off must not overshoot the bracketing samples
    lo, hi = (v0, v1) if v0 <= v1 else (v1, v0)
    return min(max(v, lo), hi)


def voltage_current_at(profile: PVProfile, time: float) -> Tuple[float, float]:
    times, volts, amps, _ = profile.columns()
    return _interp(times, volts, time), _interp(times, amps, time)


def power_at(profile: PVProfile, time: float) -> float:
    """Generation power V(t) * I(t) with linear interpolation and boundary hold."""
    v, i = voltage_current_at(profile, time)
    return v * i


def temperature_at(profile: PVProfile, time: float) -> float:
    times, _, _, temps = profile.columns()
    return _interp(times, temps, time)


def load_bundled_profile() -> PVProfile:
    from importlib.resources import files

    return parse_profile(files("solarshare.data").joinpath("table1.csv").read_text("utf-8"))
