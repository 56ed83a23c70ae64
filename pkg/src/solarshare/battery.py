"""Lead-acid battery model: ohmic voltage drop, coulomb counting and a
first-order thermal model.

Sign convention: battery current is positive while charging and negative
while discharging.  The discharge current ``I_D`` used by the voltage-drop
relation is therefore ``max(-current, 0)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Tuple

from .errors import DomainError

log = logging.getLogger(__name__)

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class BatteryParams:
    """Static ratings of one battery (defaults: 12 V, 200 Ah lead-acid)."""

    nominal_capacity: float = 200.0  # Ah
    internal_resistance: float = 0.05  # ohm
    nominal_voltage: float = 12.0  # V
    initial_soc: float = 50.0  # percent

    def __post_init__(self):
        if not self.nominal_capacity > 0:
            raise DomainError(f"nominal_capacity must be > 0, got {self.nominal_capacity}")
        if not self.internal_resistance >= 0:
            raise DomainError(f"internal_resistance must be >= 0, got {self.internal_resistance}")
        if not self.nominal_voltage > 0:
            raise DomainError(f"nominal_voltage must be > 0, got {self.nominal_voltage}")
        if not 0 <= self.initial_soc <= 100:
            raise DomainError(f"initial_soc must be in [0, 100], got {self.initial_soc}")


@dataclass(frozen=True)
class ThermalParams:
    """Coefficients of the first-order battery temperature model."""

    ambient: float = 30.0  # degC
    heat_coeff: float = 1.75  # degC per A
    relax_rate: float = 1.0 / 600.0  # 1/s

    def __post_init__(self):
        if not self.heat_coeff >= 0:
            raise DomainError(f"heat_coeff must be >= 0, got {self.heat_coeff}")
        if not self.relax_rate >= 0:
            raise DomainError(f"relax_rate must be >= 0, got {self.relax_rate}")


@dataclass(frozen=True)
class BatteryState:
    soc: float  # percent
    current: float  # A, positive = charging
    terminal_voltage: float  # V
    temperature: float  # degC
    clamped: bool = False  # SOC hit a bound during the last update

    @classmethod
    def initial(cls, params: BatteryParams, temperature: float = ThermalParams.ambient):
        return cls(
            soc=params.initial_soc,
            current=0.0,
            terminal_voltage=params.nominal_voltage,
            temperature=temperature,
        )


class SocUpdate(NamedTuple):
    soc: float
    clamped: bool


def terminal_voltage_drop(discharge_current: float, internal_resistance: float) -> float:
    """Voltage lost across the internal resistance, ``I_D * R``."""
    if internal_resistance < 0:
        raise DomainError(f"internal_resistance must be >= 0, got {internal_resistance}")
    return discharge_current * internal_resistance


def soc_update(
    soc_start: float,
    current_samples: Iterable[Tuple[float, float]],
    nominal_capacity: float,
) -> SocUpdate:
    """Advance SOC by coulomb counting over piecewise-constant current samples.

    Each sample is ``(amperes, seconds)``.  The charge moved is integrated
    with the rectangle rule and added as a percentage of ``nominal_capacity``
    (Ah).  The result is clamped to [0, 100]; ``clamped`` reports whether the
    unclamped value left that range.
    """
    if not nominal_capacity > 0:
        raise DomainError(f"nominal_capacity must be > 0, got {nominal_capacity}")
    if not 0 <= soc_start <= 100:
        raise DomainError(f"soc_start must be in [0, 100], got {soc_start}")
    charges = []
    for current, duration in current_samples:
        if not duration > 0:
            raise DomainError(f"sample duration must be > 0, got {duration}")
        charges.append(current * duration / SECONDS_PER_HOUR)
    soc = soc_start + math.fsum(charges) / nominal_capacity * 100.0
    if soc < 0.0:
        return SocUpdate(0.0, True)
    if soc > 100.0:
        return SocUpdate(100.0, True)
    return SocUpdate(soc, False)


def average_discharge_current(
    soc_high: float,
    soc_low: float,
    nominal_capacity: float,
    t_start: float,
    t_end: float,
) -> float:
    """Mean discharge current (A) that moves SOC from ``soc_high`` to ``soc_low``.

    Times are in seconds.  A negative result means net charging.
    """
    if not t_end > t_start:
        raise DomainError(f"t_end must be > t_start, got [{t_start}, {t_end}]")
    if not nominal_capacity > 0:
        raise DomainError(f"nominal_capacity must be > 0, got {nominal_capacity}")
    hours = (t_end - t_start) / SECONDS_PER_HOUR
    return (soc_high - soc_low) * nominal_capacity / 100.0 / hours


def temperature_step(
    temp: float,
    current: float,
    dt: float,
    ambient: float,
    heat_coeff: float,
    relax_rate: float,
) -> float:
    """Relax ``temp`` toward ``ambient + heat_coeff * |current|`` over ``dt`` seconds.

    Uses the exact solution of the linear ODE, so any ``dt`` is stable.
    """
    target = ambient + heat_coeff * abs(current)
    return temp + (target - temp) * -math.expm1(-relax_rate * dt)


def step_battery(
    state: BatteryState,
    params: BatteryParams,
    net_power: float,
    dt: float,
    thermal: ThermalParams = ThermalParams(),
) -> BatteryState:
    """Apply ``net_power`` watts (positive charges) to the battery for ``dt`` seconds."""
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    current = net_power / params.nominal_voltage
    soc, clamped = soc_update(state.soc, [(current, dt)], params.nominal_capacity)
    if clamped:
        log.debug("SOC clamped to %s (net_power=%s W, dt=%s s)", soc, net_power, dt)
    drop = terminal_voltage_drop(max(-current, 0.0), params.internal_resistance)
    voltage = max(params.nominal_voltage - drop, 0.0)
    temperature = temperature_step(
        state.temperature, current, dt, thermal.ambient, thermal.heat_coeff, thermal.relax_rate
    )
    return replace(
        state,
        soc=soc,
        current=current,
        terminal_voltage=voltage,
        temperature=temperature,
        clamped=clamped,
    )
