"""The master: registers node configurations and schedules relays each interval.

Scheduling is a dynamic-priority greedy under the utility's per-interval
demand limit.  Priority is the slack ratio remaining/(beta - t + 1): it is
recomputed every interval, lives in (0, 1], and hits exactly 1 when the load
must run in every interval left in its window.  Policy per interval, in
order:

  (a) budget = limit - exogenous non-schedulable demand (never curtailed);
  (b) started, unfinished non-interruptible loads stay on and consume budget;
  (c) zero-slack loads switch on regardless of budget: the consumer's
      deadline beats the limit, and the overshoot is penalized, not refused;
  (d) everyone else is admitted greedily in priority order (ties: earlier
      deadline, smaller rating, id) while their rating fits the budget;
  (e) in-window interruptible loads that were not admitted are switched off;
      unstarted non-interruptible loads are simply not started;
  (f) no command ever targets a non-schedulable load or leaves the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import domain
from .domain import LoadClass, LoadSpec, MdlProfile, ScheduleConfig, TimeModel
from .errors import HansimError
from .protocol import Action, Command, ConfigLog


class LmuError(HansimError):
    pass


class InvalidConfig(LmuError):
    pass


class DuplicateActiveLoad(LmuError):
    """Re-configuration of a load that has already started running."""


class NotSchedulable(LmuError):
    pass


class OutsideWindow(LmuError):
    pass


class MdlMissing(LmuError):
    pass


class CorruptRegistry(LmuError):
    pass


class LengthMismatch(LmuError):
    pass


@dataclass
class LoadEntry:
    """The master's book-keeping for one registered load."""

    spec: LoadSpec
    remaining_minutes: int
    started: bool = False
    running: bool = False

    @property
    def config(self) -> ScheduleConfig:
        return self.spec.config if self.spec.config else domain.NINSL_CONFIG


@dataclass
class Registry:
    """Registered loads keyed by id, in registration order."""

    tm: TimeModel
    entries: dict[str, LoadEntry] = field(default_factory=dict)

    def register(self, cfg: ConfigLog) -> LoadEntry:
        """Insert or reset a load from its config line.

        Re-registration is a reset while the load has not started; once it has
        started the old run must finish first.
        """
        existing = self.entries.get(cfg.node_id)
        if existing is not None and existing.started:
            raise DuplicateActiveLoad(f"{cfg.node_id} already started; finish before re-logging")
        try:
            validated = domain.validate_config(
                cfg.load_class, ScheduleConfig(cfg.alpha, cfg.beta, cfg.gamma_minutes), self.tm
            )
        except domain.ConfigError as exc:
            raise InvalidConfig(f"{cfg.node_id}: {exc}") from exc
        if cfg.load_class.schedulable:
            spec = LoadSpec(cfg.node_id, cfg.node_id, cfg.load_class, cfg.rated_kw, validated)
            entry = LoadEntry(spec=spec, remaining_minutes=validated.gamma_minutes)
        else:
            # Stored for completeness; the scheduler never consults it.
            spec = LoadSpec(cfg.node_id, cfg.node_id, cfg.load_class, cfg.rated_kw,
                            None, tuple(0.0 for _ in range(self.tm.horizon)))
            entry = LoadEntry(spec=spec, remaining_minutes=0)
        self.entries[cfg.node_id] = entry
        return entry

    def schedulable_entries(self) -> list[LoadEntry]:
        return [e for e in self.entries.values() if e.spec.load_class.schedulable]

    def check(self) -> None:
        interval = self.tm.interval_minutes
        for e in self.schedulable_entries():
            cfg = e.config
            if e.remaining_minutes < 0 or e.remaining_minutes % interval != 0:
                raise CorruptRegistry(f"{e.spec.load_id}: remaining {e.remaining_minutes} min")
            if e.remaining_minutes > cfg.gamma_minutes:
                raise CorruptRegistry(f"{e.spec.load_id}: remaining exceeds gamma")
            if (e.spec.load_class is LoadClass.NISL and e.started
                    and e.remaining_minutes > 0 and not e.running):
                raise CorruptRegistry(f"{e.spec.load_id}: paused mid-run despite non-interruption")

    def complete_interval(self) -> None:
        """Close out the interval the running set just spent on the wire."""
        for e in self.schedulable_entries():
            if e.running:
                e.remaining_minutes -= self.tm.interval_minutes
                if e.remaining_minutes <= 0:
                    e.remaining_minutes = 0
                    e.running = False


def priority(entry: LoadEntry, t: int, tm: TimeModel) -> float:
    """Slack ratio in (0, 1]: 1 means the load must run every remaining interval."""
    if not entry.spec.load_class.schedulable or entry.remaining_minutes <= 0:
        raise NotSchedulable(f"{entry.spec.load_id} has nothing left to schedule")
    cfg = entry.config
    if t < cfg.alpha or t > cfg.beta:
        raise OutsideWindow(f"interval {t} outside [{cfg.alpha}, {cfg.beta}]")
    remaining = entry.remaining_minutes // tm.interval_minutes
    return remaining / (cfg.beta - t + 1)


def _is_critical(entry: LoadEntry, t: int, tm: TimeModel) -> bool:
    # Integer form of priority == 1.0, immune to float rounding.
    return entry.remaining_minutes // tm.interval_minutes >= entry.config.beta - t + 1


def schedule_interval(reg: Registry, t: int, mdl: MdlProfile,
                      ninsl_total_kw: float, issued_at: float | None = None) -> list[Command]:
    """Decide the relay set for interval t and return the commands to send."""
    if t < 0 or t >= len(mdl):
        raise MdlMissing(f"interval {t} outside the {len(mdl)}-interval limit profile")
    reg.check()
    tm = reg.tm
    at = issued_at if issued_at is not None else t * tm.interval_seconds
    budget = mdl[t] - ninsl_total_kw

    on: list[LoadEntry] = []
    off: list[LoadEntry] = []
    candidates: list[LoadEntry] = []
    for e in reg.schedulable_entries():
        cfg = e.config
        if t < cfg.alpha or t > cfg.beta or e.remaining_minutes <= 0:
            e.running = e.running and e.remaining_minutes > 0
            continue
        if e.spec.load_class is LoadClass.NISL and e.started:
            on.append(e)  # (b) locked: non-interruptible mid-run
            budget -= e.spec.rated_kw
        else:
            candidates.append(e)

    forced = [e for e in candidates if _is_critical(e, t, tm)]
    for e in forced:  # (c) deadline beats the limit
        on.append(e)
        budget -= e.spec.rated_kw

    rest = [e for e in candidates if not _is_critical(e, t, tm)]
    rest.sort(key=lambda e: (-priority(e, t, tm), e.config.beta,
                             e.spec.rated_kw, e.spec.load_id))
    for e in rest:  # (d) greedy admission
        if e.spec.rated_kw <= budget:
            on.append(e)
            budget -= e.spec.rated_kw
        else:
            off.append(e)

    commands: list[Command] = []
    for e in on:
        e.started = True
        e.running = True
        commands.append(Command(e.spec.load_id, Action.ON, at))
    for e in off:  # (e) interruptible loads get an explicit OFF; non-started NISLs just wait
        e.running = False
        if e.spec.load_class is LoadClass.ISL:
            commands.append(Command(e.spec.load_id, Action.OFF, at))
    return commands


def baseline_schedule(reg: Registry) -> list[list[Command]]:
    """The unscheduled consumer: every load runs back-to-back from its start
    interval, with no awareness of the demand limit."""
    tm = reg.tm
    per_interval: list[list[Command]] = [[] for _ in range(tm.horizon)]
    for e in reg.schedulable_entries():
        cfg = e.config
        for t in range(cfg.alpha, cfg.alpha + domain.required_intervals(cfg, tm)):
            per_interval[t].append(Command(e.spec.load_id, Action.ON, t * tm.interval_seconds))
    return per_interval


@dataclass(frozen=True)
class PenaltyReport:
    """Energy beyond the limit and what it costs at the utility's rate."""

    energy_over_kwh: float
    rate_x: float
    penalty: float
    intervals_over: int


def penalty(profile: list[float], mdl: MdlProfile, rate_x: float,
            tm: TimeModel) -> PenaltyReport:
    """Integrate every exceedance of the limit and price it at rate_x per kWh."""
    if len(profile) != len(mdl):
        raise LengthMismatch(f"profile has {len(profile)} intervals, limit profile {len(mdl)}")
    hours = tm.interval_minutes / 60.0
    energy_over = 0.0
    intervals_over = 0
    for load_kw, limit_kw in zip(profile, mdl.limits):
        if load_kw > limit_kw:
            energy_over += (load_kw - limit_kw) * hours
            intervals_over += 1
    return PenaltyReport(energy_over, rate_x, energy_over * rate_x, intervals_over)
