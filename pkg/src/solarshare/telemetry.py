"""Telemetry CSV serialization and run summaries."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, TextIO

from .engine import COLUMNS, SystemConfig, TelemetryRecord
from .errors import ValidationError

_BOOL_COLUMNS = {"s12", "s21", "l1", "l2", "clamp1", "clamp2"}


def _cell(name, value) -> str:
    if name in _BOOL_COLUMNS:
        return "1" if value else "0"
    if name == "scenario":
        return str(value)
    return repr(float(value))  # shortest repr round-trips exactly


def write_telemetry(records: Iterable[TelemetryRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([_cell(c, v) for c, v in zip(COLUMNS, _values(r))])


def _values(r: TelemetryRecord):
    return (
        r.time, r.soc1, r.soc2, r.v1, r.v2, r.i1, r.i2, r.temp1, r.temp2,
        r.p_pv1, r.p_pv2, r.p_load1, r.p_load2,
        r.s12, r.s21, r.l1, r.l2, r.scenario, r.clamp1, r.clamp2,
    )


def telemetry_csv(records: Iterable[TelemetryRecord]) -> str:
    buf = io.StringIO()
    write_telemetry(records, buf)
    return buf.getvalue()


def read_telemetry(stream) -> List[TelemetryRecord]:
    if isinstance(stream, str):
        stream = io.StringIO(stream, newline="")
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(header) != COLUMNS:
        raise ValidationError(f"telemetry header must be {','.join(COLUMNS)}", line=1)
    records = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(COLUMNS):
            raise ValidationError(f"expected {len(COLUMNS)} columns, got {len(row)}", line=lineno)
        try:
            values = []
            for name, cell in zip(COLUMNS, row):
                if name in _BOOL_COLUMNS:
                    if cell not in ("0", "1"):
                        raise ValueError(f"{name} must be 0 or 1, got {cell!r}")
                    values.append(cell == "1")
                elif name == "scenario":
                    values.append(int(cell))
                else:
                    values.append(float(cell))
        except ValueError as exc:
            raise ValidationError(str(exc), line=lineno) from None
        records.append(TelemetryRecord(*values))
    return records


@dataclass
class RunReport:
    scenario_counts: Dict[int, int] = field(default_factory=lambda: {1: 0, 2: 0, 3: 0, 4: 0})
    final_soc1: float = math.nan
    final_soc2: float = math.nan
    energy_served1: float = 0.0  # Wh
    energy_served2: float = 0.0  # Wh
    clamp_event_count: int = 0

    @classmethod
    def from_records(cls, records: Sequence[TelemetryRecord], config: SystemConfig) -> "RunReport":
        report = cls()
        hours = config.dt / 3600.0
        for r in records:
            report.scenario_counts[r.scenario] += 1
            report.clamp_event_count += int(r.clamp1) + int(r.clamp2)
        report.energy_served1 = math.fsum(r.p_load1 * hours for r in records)
        report.energy_served2 = math.fsum(r.p_load2 * hours for r in records)
        if records:
            report.final_soc1 = records[-1].soc1
            report.final_soc2 = records[-1].soc2
        return report

    @property
    def total_steps(self) -> int:
        return sum(self.scenario_counts.values())

    def format(self) -> str:
        lines = [f"steps: {self.total_steps}"]
        for s in sorted(self.scenario_counts):
            lines.append(f"scenario {s}: {self.scenario_counts[s]} steps")
        lines += [
            f"final SOC1: {self.final_soc1:.3f} %",
            f"final SOC2: {self.final_soc2:.3f} %",
            f"energy served to load 1: {self.energy_served1:.3f} Wh",
            f"energy served to load 2: {self.energy_served2:.3f} Wh",
            f"clamp events: {self.clamp_event_count}",
        ]
        return "\n".join(lines)
