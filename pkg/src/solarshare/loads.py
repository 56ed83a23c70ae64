"""Appliance banks fed by each subsystem's DC bus."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

from .errors import DomainError


@dataclass(frozen=True)
class Appliance:
    name: str
    unit_power: float  # W
    count: int = 1

    def __post_init__(self):
        if not self.unit_power > 0:
            raise DomainError(f"{self.name}: unit_power must be > 0, got {self.unit_power}")
        if isinstance(self.count, bool) or not isinstance(self.count, int) or self.count < 1:
            raise DomainError(f"{self.name}: count must be a positive integer, got {self.count!r}")

    @property
    def power(self) -> float:
        return self.unit_power * self.count


@dataclass(frozen=True)
class LoadConstitution:
    label: str
    appliances: Tuple[Appliance, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "appliances", tuple(self.appliances))

    def __add__(self, other: "LoadConstitution") -> "LoadConstitution":
        return LoadConstitution(self.label, self.appliances + other.appliances)


def total_power(constitution: LoadConstitution) -> float:
    """Rated power of the whole bank in watts."""
    return float(sum(a.power for a in constitution.appliances))


def demand(constitution: LoadConstitution, relay_on: bool) -> float:
    return total_power(constitution) if relay_on else 0.0


# Row totals rather than the unit column are authoritative: only 100 W for
# the computer and 200 W for the TV reproduce the 930 W / 870 W bank totals.
LOAD1 = LoadConstitution(
    "load1",
    (
        Appliance("Tube light", 45.0, 6),
        Appliance("Ceiling fan", 80.0, 7),
        Appliance("Computer", 100.0, 1),
    ),
)

LOAD2 = LoadConstitution(
    "load2",
    (
        Appliance("Tube light", 45.0, 6),
        Appliance("Bulb", 100.0, 4),
        Appliance("LCD TV", 200.0, 1),
    ),
)


def parse_appliances(text: str) -> Tuple[Appliance, ...]:
    """Parse ``"Tube light:45*6, Bulb:100*4"``; an empty string is no appliances.

    The ``*count`` part may be omitted for a single unit.
    """
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, rating = item.rpartition(":")
        if not sep or not name.strip():
            raise ValueError(f"appliance {item!r} is not of the form name:watts*count")
        watts, _, count = rating.partition("*")
        try:
            unit_power = float(watts)
            n = int(count) if count.strip() else 1
        except ValueError:
            raise ValueError(f"appliance {item!r} has a malformed rating") from None
        out.append(Appliance(name.strip(), unit_power, n))
    return tuple(out)


def format_appliances(appliances) -> str:
    return ", ".join(f"{a.name}:{a.unit_power:g}*{a.count}" for a in appliances)
