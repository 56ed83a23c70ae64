"""Two-subsystem solar+battery microgrid simulator with rule-based battery sharing."""

from .battery import (
    BatteryParams,
    BatteryState,
    ThermalParams,
    average_discharge_current,
    soc_update,
    step_battery,
    temperature_step,
    terminal_voltage_drop,
)
from .controller import ControllerConfig, SwitchState, decide, scenario_of
from .engine import SystemConfig, TelemetryRecord, energy_balance, run, step
from .errors import DomainError, SimulationError, ValidationError
from .loads import LOAD1, LOAD2, Appliance, LoadConstitution, demand, total_power
from .pv import PVProfile, PVSample, parse_profile, power_at, temperature_at

__version__ = "0.1.0"
