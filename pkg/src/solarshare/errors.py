"""Exception hierarchy shared across the package."""


class SolarShareError(Exception):
    """Base class for all package errors."""


class DomainError(SolarShareError, ValueError):
    """An argument lies outside the domain of an operation."""


class ValidationError(SolarShareError, ValueError):
    """Input data (config, profile, telemetry) failed validation.

    ``line`` is the 1-based source line when known.
    """

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if key is not None:
            parts.append(f"key {key!r}")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class SimulationError(SolarShareError):
    """A step of a simulation run failed."""

    def __init__(self, step_index, cause):
        self.step_index = step_index
        self.cause = cause
        super().__init__(f"step {step_index}: {cause}")
