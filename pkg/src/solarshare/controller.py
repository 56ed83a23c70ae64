"""Rule-based battery-sharing controller for two PV+battery subsystems.

Each battery is classified as *sufficient* when its SOC is at least the
threshold.  The pair of classifications selects one of four scenarios:

=========  ==========  ==========  ===========================
scenario   battery 1   battery 2   relays closed
=========  ==========  ==========  ===========================
1          sufficient  low         S12, L2 (load 1 shed)
2          sufficient  sufficient  L1, L2
3          low         low         none
4          low         sufficient  S21, L1 (load 2 shed)
=========  ==========  ==========  ===========================

S12 lets battery 1 feed load 2, S21 lets battery 2 feed load 1.  A donating
system drops its own load, since the sharing bus supplies one load at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import DomainError

ADVANTAGE = {
    1: "No supply to the load 1",
    2: "Maximum supply to the loads",
    3: "No supply to the loads",
    4: "No supply to the load 2",
}


@dataclass(frozen=True)
class ControllerConfig:
    threshold: float = 50.0  # percent
    hysteresis: float = 0.0  # percent, half-width of the dead band

    def __post_init__(self):
        if not 0 < self.threshold < 100:
            raise DomainError(f"threshold must be in (0, 100), got {self.threshold}")
        if not self.hysteresis >= 0:
            raise DomainError(f"hysteresis must be >= 0, got {self.hysteresis}")
        if not (0 < self.threshold - self.hysteresis and self.threshold + self.hysteresis < 100):
            raise DomainError(
                f"threshold +/- hysteresis must stay within (0, 100), "
                f"got {self.threshold} +/- {self.hysteresis}"
            )


@dataclass(frozen=True)
class SwitchState:
    s12: bool = False
    s21: bool = False
    l1: bool = False
    l2: bool = False

    def is_valid(self) -> bool:
        if self.s12 and self.s21:
            return False
        if self.s12 and (self.l1 or not self.l2):
            return False
        if self.s21 and (self.l2 or not self.l1):
            return False
        return True

    def mirrored(self) -> "SwitchState":
        return SwitchState(s12=self.s21, s21=self.s12, l1=self.l2, l2=self.l1)

    def __str__(self):
        on = lambda b: "ON" if b else "OFF"  # noqa: E731
        return f"S12={on(self.s12)} S21={on(self.s21)} L1={on(self.l1)} L2={on(self.l2)}"


_PATTERNS = {
    (True, False): SwitchState(s12=True, l2=True),
    (True, True): SwitchState(l1=True, l2=True),
    (False, False): SwitchState(),
    (False, True): SwitchState(s21=True, l1=True),
}
_SCENARIO = {
    _PATTERNS[True, False]: 1,
    _PATTERNS[True, True]: 2,
    _PATTERNS[False, False]: 3,
    _PATTERNS[False, True]: 4,
}
_CLASSES = {v: k for k, v in _PATTERNS.items()}


def classify(soc: float, config: ControllerConfig, previous: Optional[bool] = None) -> bool:
    """Whether a battery at ``soc`` counts as sufficient.

    Without a previous classification, or with zero hysteresis, this is
    ``soc >= threshold``.  Otherwise the classification turns on at
    ``>= threshold + h``, off at ``< threshold - h`` and holds in between.
    """
    t, h = config.threshold, config.hysteresis
    if previous is None or h == 0:
        return soc >= t
    if previous:
        return not soc < t - h
    return soc >= t + h


def switches_for(sufficient1: bool, sufficient2: bool) -> SwitchState:
    return _PATTERNS[bool(sufficient1), bool(sufficient2)]


def classifications(state: SwitchState) -> Tuple[bool, bool]:
    """Invert :func:`switches_for`."""
    try:
        return _CLASSES[state]
    except KeyError:
        raise DomainError(f"switch state {state} is not a controller output") from None


def decide(
    soc1: float,
    soc2: float,
    config: ControllerConfig = ControllerConfig(),
    previous: Optional[SwitchState] = None,
) -> SwitchState:
    """Relay pattern for the given battery SOCs."""
    for name, soc in (("soc1", soc1), ("soc2", soc2)):
        if not 0 <= soc <= 100:
            raise DomainError(f"{name} must be in [0, 100], got {soc}")
    prev1 = prev2 = None
    if previous is not None:
        prev1, prev2 = classifications(previous)
    return switches_for(classify(soc1, config, prev1), classify(soc2, config, prev2))


def scenario_of(decision: SwitchState) -> int:
    if not decision.is_valid():
        raise DomainError(f"switch state {decision} violates the sharing invariants")
    try:
        return _SCENARIO[decision]
    except KeyError:
        raise DomainError(f"switch state {decision} matches no scenario") from None
