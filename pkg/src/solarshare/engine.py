"""Fixed-step simulation of two PV+battery subsystems with battery sharing.

Within each step the controller reads the SOCs at the start of the step,
PV power is sampled at the start time, and both batteries are integrated
over the step.  Telemetry state columns (SOC, voltage, current,
temperature) are end-of-step values stamped with the end-of-step time; the
power and relay columns are the values applied during the step.

The bulk loop in :func:`run` is executed by a compiled kernel when the
extension is built and by an equivalent pure-Python loop otherwise.
:func:`step` composes the per-operation functions and serves as the
readable reference the kernels are tested against.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Sequence, Tuple

from . import _kernel_py
from .battery import BatteryParams, BatteryState, ThermalParams, step_battery
from .controller import ControllerConfig, SwitchState, decide, scenario_of
from .errors import DomainError, SimulationError
from .loads import LOAD1, LOAD2, LoadConstitution, demand, total_power
from .pv import PVProfile, load_bundled_profile, power_at, temperature_at

log = logging.getLogger(__name__)

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = ("compiled", "python")
DEFAULT_BACKEND = "compiled" if _compiled is not None else "python"

TEMPERATURE_MODES = ("model", "replay")


def _bundled_profile():
    return load_bundled_profile()


@dataclass(frozen=True)
class SystemConfig:
    battery1: BatteryParams = field(default_factory=BatteryParams)
    battery2: BatteryParams = field(default_factory=BatteryParams)
    load1: LoadConstitution = LOAD1
    load2: LoadConstitution = LOAD2
    profile1: PVProfile = field(default_factory=_bundled_profile)
    profile2: PVProfile = field(default_factory=_bundled_profile)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    dt: float = 60.0  # s
    start_time: float = 9.0  # hour of day
    duration: float = 6 * 3600.0  # s
    temperature_mode: str = "model"
    thermal: ThermalParams = field(default_factory=ThermalParams)

    def __post_init__(self):
        if not self.dt > 0 or not math.isfinite(self.dt):
            raise DomainError(f"dt must be > 0, got {self.dt}")
        if not self.duration > 0 or not math.isfinite(self.duration):
            raise DomainError(f"duration must be > 0, got {self.duration}")
        if not math.isfinite(self.start_time):
            raise DomainError(f"start_time must be finite, got {self.start_time}")
        if self.temperature_mode not in TEMPERATURE_MODES:
            raise DomainError(
                f"temperature_mode must be one of {TEMPERATURE_MODES}, got {self.temperature_mode!r}"
            )

    @property
    def n_steps(self) -> int:
        return math.ceil(self.duration / self.dt)

    def swapped(self) -> "SystemConfig":
        """The same world with subsystems 1 and 2 exchanged."""
        return replace(
            self,
            battery1=self.battery2,
            battery2=self.battery1,
            load1=self.load2,
            load2=self.load1,
            profile1=self.profile2,
            profile2=self.profile1,
        )


@dataclass(frozen=True)
class TelemetryRecord:
    time: float
    soc1: float
    soc2: float
    v1: float
    v2: float
    i1: float
    i2: float
    temp1: float
    temp2: float
    p_pv1: float
    p_pv2: float
    p_load1: float
    p_load2: float
    s12: bool
    s21: bool
    l1: bool
    l2: bool
    scenario: int
    clamp1: bool
    clamp2: bool

    @property
    def switches(self) -> SwitchState:
        return SwitchState(self.s12, self.s21, self.l1, self.l2)

    def mirrored(self) -> "TelemetryRecord":
        m = self.switches.mirrored()
        return TelemetryRecord(
            self.time,
            self.soc2, self.soc1, self.v2, self.v1, self.i2, self.i1,
            self.temp2, self.temp1, self.p_pv2, self.p_pv1, self.p_load2, self.p_load1,
            m.s12, m.s21, m.l1, m.l2, scenario_of(m), self.clamp2, self.clamp1,
        )

    @classmethod
    def from_row(cls, row: Sequence[float]) -> "TelemetryRecord":
        values = []
        for f, x in zip(_FIELDS, row):
            if f.type == "bool":
                values.append(bool(x))
            elif f.type == "int":
                values.append(int(x))
            else:
                values.append(float(x))
        return cls(*values)


_FIELDS = fields(TelemetryRecord)
COLUMNS = ("time_h",) + tuple(f.name for f in _FIELDS[1:])


@dataclass(frozen=True)
class WorldState:
    step: int
    battery1: BatteryState
    battery2: BatteryState
    switches: Optional[SwitchState] = None  # decision of the previous step

    @classmethod
    def initial(cls, config: SystemConfig) -> "WorldState":
        ambient = config.thermal.ambient
        return cls(
            0,
            BatteryState.initial(config.battery1, ambient),
            BatteryState.initial(config.battery2, ambient),
        )


def step(world: WorldState, config: SystemConfig) -> Tuple[WorldState, TelemetryRecord]:
    """Advance the world by one ``config.dt`` step."""
    k = world.step
    try:
        t = config.start_time + k * config.dt / 3600.0
        t_end = config.start_time + (k + 1) * config.dt / 3600.0
        p_pv1 = power_at(config.profile1, t)
        p_pv2 = power_at(config.profile2, t)

        sw = decide(world.battery1.soc, world.battery2.soc, config.controller, world.switches)
        p1 = total_power(config.load1)
        p2 = total_power(config.load2)
        # l1 draws from subsystem 2 when S21 is closed, l2 from subsystem 1 when S12 is.
        fed1 = (p1 if sw.l1 and not sw.s21 else 0.0) + (p2 if sw.s12 else 0.0)
        fed2 = (p2 if sw.l2 and not sw.s12 else 0.0) + (p1 if sw.s21 else 0.0)

        b1 = step_battery(world.battery1, config.battery1, p_pv1 - fed1, config.dt, config.thermal)
        b2 = step_battery(world.battery2, config.battery2, p_pv2 - fed2, config.dt, config.thermal)
        if config.temperature_mode == "replay":
            b1 = replace(b1, temperature=temperature_at(config.profile1, t_end))
            b2 = replace(b2, temperature=temperature_at(config.profile2, t_end))
        record = TelemetryRecord(
            t_end,
            b1.soc, b2.soc, b1.terminal_voltage, b2.terminal_voltage,
            b1.current, b2.current, b1.temperature, b2.temperature,
            p_pv1, p_pv2, demand(config.load1, sw.l1), demand(config.load2, sw.l2),
            sw.s12, sw.s21, sw.l1, sw.l2, scenario_of(sw), b1.clamped, b2.clamped,
        )
    except DomainError as exc:
        raise SimulationError(k, exc) from exc
    return WorldState(k + 1, b1, b2, sw), record


def _kernel_args(config: SystemConfig):
    b1, b2, th = config.battery1, config.battery2, config.thermal
    return (
        config.profile1.columns(),
        config.profile2.columns(),
        total_power(config.load1),
        total_power(config.load2),
        (b1.nominal_capacity, b1.internal_resistance, b1.nominal_voltage, b1.initial_soc),
        (b2.nominal_capacity, b2.internal_resistance, b2.nominal_voltage, b2.initial_soc),
        config.controller.threshold,
        config.controller.hysteresis,
        config.dt,
        config.start_time,
        config.n_steps,
        config.temperature_mode == "replay",
        th.ambient,
        th.heat_coeff,
        th.relax_rate,
    )


def run_table(config: SystemConfig, backend: Optional[str] = None):
    """Run ``config`` and return telemetry as an ``(n_steps, 20)`` array in :data:`COLUMNS` order."""
    backend = backend or DEFAULT_BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available; build the extension")
        kernel = _compiled
    elif backend == "python":
        kernel = _kernel_py
    else:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return kernel.simulate(*_kernel_args(config))


def run(config: SystemConfig, backend: Optional[str] = None) -> List[TelemetryRecord]:
    """Simulate ``ceil(duration / dt)`` steps and return one record per step."""
    table = run_table(config, backend)
    records = [TelemetryRecord.from_row(row) for row in table.tolist()]
    for k, r in enumerate(records):
        if r.clamp1 or r.clamp2:
            log.debug("step %d: SOC clamped (battery1=%s, battery2=%s)", k, r.clamp1, r.clamp2)
    return records


def run_stepwise(config: SystemConfig) -> List[TelemetryRecord]:
    """Same as :func:`run`, but driven through :func:`step`."""
    world = WorldState.initial(config)
    records = []
    for _ in range(config.n_steps):
        world, record = step(world, config)
        records.append(record)
    return records


def stored_energy(soc: float, params: BatteryParams) -> float:
    """Energy held by a battery in Wh at nominal voltage."""
    return soc / 100.0 * params.nominal_capacity * params.nominal_voltage


def energy_balance(records: Sequence[TelemetryRecord], config: SystemConfig) -> float:
    """Absolute Wh residual of PV in minus load served minus change in storage."""
    if any(r.clamp1 or r.clamp2 for r in records):
        raise ValueError("energy balance is undefined for a run with SOC clamp events")
    if not records:
        return 0.0
    hours = config.dt / 3600.0
    pv_in = math.fsum((r.p_pv1 + r.p_pv2) * hours for r in records)
    served = math.fsum((r.p_load1 + r.p_load2) * hours for r in records)
    last = records[-1]
    delta = (
        stored_energy(last.soc1, config.battery1)
        - stored_energy(config.battery1.initial_soc, config.battery1)
        + stored_energy(last.soc2, config.battery2)
        - stored_energy(config.battery2.initial_soc, config.battery2)
    )
    return abs(pv_in - served - delta)
