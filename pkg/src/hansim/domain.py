"""Core vocabulary: load classes, schedule windows, the day clock and demand limits.

Everything here is a plain value type plus pure validation; the scheduler,
nodes and simulator all build on these rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import HansimError

MINUTES_PER_DAY = 1440


class DomainError(HansimError):
    pass


class ConfigError(DomainError):
    """A (alpha, beta, gamma) triple that violates the window rules."""


class WindowReversed(ConfigError):
    pass


class InfeasibleGamma(ConfigError):
    pass


class NonPositiveGamma(ConfigError):
    pass


class OutOfHorizon(ConfigError):
    pass


class GammaNotMultiple(ConfigError):
    """Run time must be a whole number of scheduling intervals."""


class InvalidTimeModel(DomainError):
    pass


class InvalidLoadSpec(DomainError):
    pass


class InvalidMdlProfile(DomainError):
    pass


class LoadClass(Enum):
    """Appliance category; decides whether the master may command the load."""

    NINSL = "NINSL"  # non-interruptible, non-schedulable: runs at the user's whim
    NISL = "NISL"    # non-interruptible, schedulable: flexible start, runs to completion
    ISL = "ISL"      # interruptible, schedulable: may be paused and resumed

    @property
    def schedulable(self) -> bool:
        return self is not LoadClass.NINSL


@dataclass(frozen=True)
class TimeModel:
    """One simulated day sliced into equal scheduling intervals.

    interval_minutes must divide 60 so that intervals tile both the hour and
    the day; the default matches an hourly demand-limit profile.  The clock
    offset is minutes east of GMT (+330 = GMT+5:30).
    """

    interval_minutes: int = 60
    utc_offset_minutes: int = 330

    def __post_init__(self) -> None:
        if self.interval_minutes <= 0 or 60 % self.interval_minutes != 0:
            raise InvalidTimeModel(
                f"interval_minutes must be a positive divisor of 60, got {self.interval_minutes}"
            )

    @property
    def horizon(self) -> int:
        """Number of intervals in one day."""
        return MINUTES_PER_DAY // self.interval_minutes

    @property
    def interval_seconds(self) -> float:
        return self.interval_minutes * 60.0


@dataclass(frozen=True)
class ScheduleConfig:
    """Consumer-logged window: start interval, completion-deadline interval
    (inclusive) and required run time in minutes."""

    alpha: int
    beta: int
    gamma_minutes: int


#: Canonical triple stored for loads the scheduler never touches.
NINSL_CONFIG = ScheduleConfig(0, 0, 0)


def validate_config(load_class: LoadClass, cfg: ScheduleConfig, tm: TimeModel) -> ScheduleConfig:
    """Check a logged (alpha, beta, gamma) triple against the window rules.

    Non-schedulable loads take no user input: whatever was supplied collapses
    to the canonical all-zero triple.  Schedulable configs are returned
    unchanged iff every rule holds.
    """
    if load_class is LoadClass.NINSL:
        return NINSL_CONFIG
    if cfg.alpha < 0 or cfg.beta >= tm.horizon:
        raise OutOfHorizon(
            f"window [{cfg.alpha}, {cfg.beta}] outside day of {tm.horizon} intervals"
        )
    if cfg.alpha > cfg.beta:
        raise WindowReversed(f"alpha {cfg.alpha} > beta {cfg.beta}")
    if cfg.gamma_minutes <= 0:
        raise NonPositiveGamma(f"gamma must be positive, got {cfg.gamma_minutes}")
    if cfg.gamma_minutes % tm.interval_minutes != 0:
        raise GammaNotMultiple(
            f"gamma {cfg.gamma_minutes} min is not a multiple of {tm.interval_minutes}-min intervals"
        )
    capacity = (cfg.beta - cfg.alpha + 1) * tm.interval_minutes
    if cfg.gamma_minutes > capacity:
        raise InfeasibleGamma(
            f"gamma {cfg.gamma_minutes} min exceeds window capacity {capacity} min"
        )
    return cfg


def required_intervals(cfg: ScheduleConfig, tm: TimeModel) -> int:
    """Run time expressed in whole intervals; exact for validated configs."""
    return cfg.gamma_minutes // tm.interval_minutes


@dataclass(frozen=True)
class LoadSpec:
    """One household load as the system sees it.

    Schedulable loads carry a window config and draw rated_kw while on.
    Non-schedulable loads instead carry an exogenous per-interval demand
    series the user drives directly.
    """

    load_id: str
    name: str
    load_class: LoadClass
    rated_kw: float
    config: ScheduleConfig | None = None
    ninsl_demand: tuple[float, ...] | None = None

    def validated(self, tm: TimeModel) -> "LoadSpec":
        """Return self with coherence and window rules checked."""
        if not self.load_id:
            raise InvalidLoadSpec("load_id must be non-empty")
        if self.load_class.schedulable:
            if self.config is None:
                raise InvalidLoadSpec(f"{self.load_id}: schedulable load without a window config")
            if self.ninsl_demand is not None:
                raise InvalidLoadSpec(f"{self.load_id}: demand series only applies to NINSL loads")
            if not self.rated_kw > 0:
                raise InvalidLoadSpec(f"{self.load_id}: rated_kw must be > 0")
            validate_config(self.load_class, self.config, tm)
        else:
            if self.config is not None:
                raise InvalidLoadSpec(f"{self.load_id}: NINSL loads take no window config")
            if self.ninsl_demand is None:
                raise InvalidLoadSpec(f"{self.load_id}: NINSL load needs a demand series")
            if len(self.ninsl_demand) != tm.horizon:
                raise InvalidLoadSpec(
                    f"{self.load_id}: demand series length {len(self.ninsl_demand)} != horizon {tm.horizon}"
                )
            if any(d < 0 for d in self.ninsl_demand):
                raise InvalidLoadSpec(f"{self.load_id}: demand series entries must be >= 0")
            if self.rated_kw < 0:
                raise InvalidLoadSpec(f"{self.load_id}: rated_kw must be >= 0")
        return self


@dataclass(frozen=True)
class MdlProfile:
    """Day-ahead maximum demand limit, one kW ceiling per interval."""

    limits: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.limits:
            raise InvalidMdlProfile("empty demand-limit profile")
        if any(not x > 0 for x in self.limits):
            raise InvalidMdlProfile("demand limits must all be > 0")

    def check_horizon(self, tm: TimeModel) -> "MdlProfile":
        if len(self.limits) != tm.horizon:
            raise InvalidMdlProfile(
                f"profile length {len(self.limits)} != horizon {tm.horizon}"
            )
        return self

    def __getitem__(self, t: int) -> float:
        return self.limits[t]

    def __len__(self) -> int:
        return len(self.limits)
