"""Deterministic discrete-time simulation of the whole network for one day.

Messages between nodes and master cross a virtual link with seeded uniform
latency.  Commands for interval t are issued one guard time (= the worst-case
delay) before the boundary so they always land before the interval starts;
config lines go out even earlier.  Identical (scenario, algorithm, seed)
triples replay bit-identically.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import lmu, protocol
from .domain import LoadClass, LoadSpec, MdlProfile, ScheduleConfig, TimeModel
from .errors import HansimError
from .lmu import PenaltyReport, Registry
from .protocol import Action, Command, ConfigLog, Message, format_number
from .sln import SmartLoadNode


class SimError(HansimError):
    pass


class InfeasibleScenario(SimError):
    pass


@dataclass(frozen=True)
class LinkModel:
    """Uniform random one-way latency, identical in both directions."""

    min_delay_s: float = 7.0
    max_delay_s: float = 9.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.min_delay_s <= self.max_delay_s:
            raise SimError(f"need 0 <= min <= max delay, got [{self.min_delay_s}, {self.max_delay_s}]")


@dataclass(frozen=True)
class Delivery:
    """A message scheduled to arrive: ordering key is (time, send sequence)."""

    time: float
    seq: int
    msg: Message

    def __lt__(self, other: "Delivery") -> bool:
        return (self.time, self.seq) < (other.time, other.seq)


class Link:
    """Seeded latency sampler; same seed and send order, same delays."""

    def __init__(self, model: LinkModel):
        self.model = model
        self._rng = random.Random(model.seed)
        self._seq = 0

    def send(self, msg: Message, at: float) -> Delivery:
        delay = self._rng.uniform(self.model.min_delay_s, self.model.max_delay_s)
        self._seq += 1
        return Delivery(at + delay, self._seq, msg)


@dataclass(frozen=True)
class Scenario:
    """One day's inputs: clock, demand limits, loads, link and penalty rate."""

    tm: TimeModel
    mdl: MdlProfile
    loads: tuple[LoadSpec, ...]
    link: LinkModel = LinkModel()
    penalty_rate_x: float = 1.0

    def validated(self) -> "Scenario":
        try:
            self.mdl.check_horizon(self.tm)
        except HansimError as exc:
            raise InfeasibleScenario(str(exc)) from exc
        seen: set[str] = set()
        for spec in self.loads:
            if spec.load_id in seen:
                raise InfeasibleScenario(f"duplicate load id {spec.load_id}")
            seen.add(spec.load_id)
            try:
                spec.validated(self.tm)
            except HansimError as exc:
                raise InfeasibleScenario(str(exc)) from exc
        if self.link.max_delay_s >= self.tm.interval_seconds:
            raise InfeasibleScenario(
                f"link delay {self.link.max_delay_s}s must stay below one "
                f"{self.tm.interval_seconds:.0f}s interval"
            )
        if not self.penalty_rate_x >= 0:
            raise InfeasibleScenario("penalty rate must be >= 0")
        return self

    def ninsl_total(self, t: int) -> float:
        return sum(s.ninsl_demand[t] for s in self.loads if s.ninsl_demand is not None)

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, link=replace(self.link, seed=seed))


def _load_from_dict(obj: dict, where: str) -> LoadSpec:
    try:
        cls = LoadClass(obj["class"])
        cfg = None
        demand = None
        if cls.schedulable:
            cfg = ScheduleConfig(int(obj["alpha"]), int(obj["beta"]), int(obj["gamma_minutes"]))
        else:
            demand = tuple(float(x) for x in obj["ninsl_demand"])
        return LoadSpec(
            load_id=str(obj["id"]),
            name=str(obj.get("name", obj["id"])),
            load_class=cls,
            rated_kw=float(obj.get("rated_kw", 0.0)),
            config=cfg,
            ninsl_demand=demand,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise InfeasibleScenario(f"{where}: {exc!r}") from exc


def scenario_from_dict(obj: dict) -> Scenario:
    try:
        tm = TimeModel(interval_minutes=int(obj.get("time_model", {}).get("interval_minutes", 60)))
        mdl = MdlProfile(tuple(float(x) for x in obj["mdl"]))
        loads = tuple(_load_from_dict(entry, f"loads[{i}]")
                      for i, entry in enumerate(obj.get("loads", [])))
        link_obj = obj.get("link", {})
        link = LinkModel(
            min_delay_s=float(link_obj.get("min_s", 7.0)),
            max_delay_s=float(link_obj.get("max_s", 9.0)),
            seed=int(link_obj.get("seed", 0)),
        )
        rate = float(obj.get("penalty_rate_x", 1.0))
    except HansimError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise InfeasibleScenario(f"malformed scenario: {exc!r}") from exc
    return Scenario(tm=tm, mdl=mdl, loads=loads, link=link, penalty_rate_x=rate).validated()


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InfeasibleScenario(f"cannot read scenario {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InfeasibleScenario(f"scenario {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(obj)


@dataclass
class SimResult:
    """Everything one day produced, in interval order."""

    aggregate_profile: list[float]
    per_load_on: dict[str, list[int]]
    penalty_report: PenaltyReport
    event_log: list[tuple[float, str]] = field(default_factory=list)

    def over_profile(self, mdl: MdlProfile) -> list[float]:
        return [max(0.0, kw - limit) for kw, limit in zip(self.aggregate_profile, mdl.limits)]


@dataclass(frozen=True)
class IntervalSnapshot:
    """What one interval looked like, for live streaming."""

    t: int
    aggregate_kw: float
    mdl_kw: float
    over_kw: float
    delivered: list[tuple[float, str]]
    relays: dict[str, Action]


class DayEngine:
    """The interval loop shared by batch runs and the live dashboard mode."""

    def __init__(self, scenario: Scenario, algorithm: str = "priority",
                 seed: int | None = None):
        if algorithm not in ("none", "priority"):
            raise SimError(f"unknown algorithm {algorithm!r} (use 'none' or 'priority')")
        self.scenario = scenario.validated() if seed is None else scenario.with_seed(seed).validated()
        self.algorithm = algorithm
        tm = self.scenario.tm
        self.tm = tm
        self.link = Link(self.scenario.link)
        self.guard_s = self.scenario.link.max_delay_s
        self.registry = Registry(tm)
        self.nodes: dict[str, SmartLoadNode] = {
            spec.load_id: SmartLoadNode(spec, tm)
            for spec in sorted(self.scenario.loads, key=lambda s: s.load_id)
        }
        self._heap: list[Delivery] = []
        self._baseline: list[list[Command]] | None = None
        self._intervals_done = 0
        self.aggregate: list[float] = []
        self.per_load_on: dict[str, list[int]] = {nid: [] for nid in self.nodes}
        self.event_log: list[tuple[float, str]] = []
        self._send_config_logs()

    # -- message plumbing ------------------------------------------------------

    def _send(self, msg: Message, at: float) -> None:
        heapq.heappush(self._heap, self.link.send(msg, at))

    def _deliver_due(self, now: float) -> list[tuple[float, str]]:
        """Hand over every message due by `now`, in (time, send order)."""
        delivered: list[tuple[float, str]] = []
        while self._heap and self._heap[0].time <= now:
            d = heapq.heappop(self._heap)
            line = protocol.encode(d.msg)
            delivered.append((d.time, line))
            self.event_log.append((d.time, line))
            self._dispatch(d)
        return delivered

    def _dispatch(self, d: Delivery) -> None:
        msg = d.msg
        if isinstance(msg, ConfigLog):
            try:
                self.registry.register(msg)
                status = "stored"
            except lmu.DuplicateActiveLoad:
                status = "rejected_duplicate"
            except lmu.InvalidConfig:
                status = "rejected_invalid"
            self._send(protocol.Ack(msg.node_id, "CFG", status), d.time)
        elif isinstance(msg, Command):
            node = self.nodes[msg.node_id]
            ack = node.apply_command(msg)
            self._send(ack, d.time)
        # Telemetry and acks terminate at the master; the scheduler does not
        # depend on them, they exist for the record.

    def _send_config_logs(self) -> None:
        """Data-logging phase: every node reports its configuration day-ahead."""
        at = -3.0 * max(self.guard_s, 1.0)
        for node in self.nodes.values():
            node.press_menu()
            node.select_node_config()
            node.open_data_logging()
            spec = node.spec
            if spec.load_class.schedulable:
                cfg = node.log_config(spec.load_class, spec.config.alpha,
                                      spec.config.beta, spec.config.gamma_minutes)
            else:
                cfg = node.log_config(spec.load_class, 0, 0, 0)
            self._send(cfg, at)

    # -- live-mode input (queued by the bridge, applied at interval boundaries) --

    def submit_time(self) -> float:
        """Sim-time stamp for a consumer input landing before the next interval."""
        if self._intervals_done == 0:
            return -2.0 * max(self.guard_s, 1.0)
        return (self._intervals_done - 1) * self.tm.interval_seconds + 1.0

    def submit_config(self, node_id: str, load_class: LoadClass, alpha: int,
                      beta: int, gamma_minutes: int) -> ConfigLog:
        """Re-log a node's configuration live; the config line rides the link."""
        node = self.nodes[node_id]
        entry = self.registry.entries.get(node_id)
        if entry is not None and entry.started:
            raise lmu.DuplicateActiveLoad(f"{node_id} already started; finish before re-logging")
        cfg = node.log_config(load_class, alpha, beta, gamma_minutes)
        self._send(cfg, self.submit_time())
        return cfg

    # -- the interval loop ------------------------------------------------------

    def _commands_for(self, t: int, issued_at: float) -> list[Command]:
        if self.algorithm == "none":
            if self._baseline is None:
                self._baseline = lmu.baseline_schedule(self.registry)
            return [replace(cmd, issued_at=issued_at) for cmd in self._baseline[t]]
        return lmu.schedule_interval(self.registry, t, self.scenario.mdl,
                                     self.scenario.ninsl_total(t), issued_at=issued_at)

    def run_interval(self, t: int) -> IntervalSnapshot:
        if t != self._intervals_done:
            raise SimError(f"intervals must run in order; expected {self._intervals_done}, got {t}")
        tm = self.tm
        boundary = t * tm.interval_seconds
        sched_at = boundary - self.guard_s
        delivered = self._deliver_due(sched_at)
        if t > 0:
            # Project the closing interval's run into the books before planning t.
            self.registry.complete_interval()
        for cmd in self._commands_for(t, sched_at):
            self._send(cmd, sched_at)
        delivered += self._deliver_due(boundary)

        agg = self.scenario.ninsl_total(t)
        relays: dict[str, Action] = {}
        for nid, node in sorted(self.nodes.items()):
            tel = node.tick(t)
            relays[nid] = tel.relay
            if node.spec.load_class.schedulable and tel.relay is Action.ON:
                agg += node.spec.rated_kw
                self.per_load_on[nid].append(t)
            self._send(tel, tel.timestamp)
        self.aggregate.append(agg)
        self._intervals_done += 1
        mdl_kw = self.scenario.mdl[t]
        return IntervalSnapshot(
            t=t,
            aggregate_kw=agg,
            mdl_kw=mdl_kw,
            over_kw=max(0.0, agg - mdl_kw),
            delivered=delivered,
            relays=relays,
        )

    def finish(self) -> SimResult:
        if self._intervals_done != self.tm.horizon:
            raise SimError(f"day incomplete: {self._intervals_done}/{self.tm.horizon} intervals")
        self.registry.complete_interval()
        # Drain in-flight telemetry/acks so the log is complete.
        self._deliver_due(self.tm.horizon * self.tm.interval_seconds + 10.0 * max(self.guard_s, 1.0))
        report = lmu.penalty(self.aggregate, self.scenario.mdl,
                             self.scenario.penalty_rate_x, self.tm)
        return SimResult(
            aggregate_profile=self.aggregate,
            per_load_on=self.per_load_on,
            penalty_report=report,
            event_log=self.event_log,
        )


def run_day(scenario: Scenario, algorithm: str = "priority",
            seed: int | None = None) -> SimResult:
    """Simulate one full day; a pure function of (scenario, algorithm, seed)."""
    engine = DayEngine(scenario, algorithm, seed)
    for t in range(engine.tm.horizon):
        engine.run_interval(t)
    return engine.finish()


# -- artifact writers -------------------------------------------------------------


def profile_csv(result: SimResult, scenario: Scenario) -> str:
    """Per-interval profile with one relay column per schedulable load."""
    sched_ids = sorted(s.load_id for s in scenario.loads if s.load_class.schedulable)
    on_sets = {nid: set(result.per_load_on.get(nid, ())) for nid in sched_ids}
    lines = ["interval,aggregate_kw,mdl_kw,over_kw" + "".join("," + nid for nid in sched_ids)]
    for t, agg in enumerate(result.aggregate_profile):
        limit = scenario.mdl[t]
        over = max(0.0, agg - limit)
        cells = [str(t), format_number(agg), format_number(limit), format_number(over)]
        cells += [("ON" if t in on_sets[nid] else "OFF") for nid in sched_ids]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def event_log_text(result: SimResult) -> str:
    """Delivered messages in arrival order, each prefixed with its sim-time."""
    return "".join(f"{time:.3f} {line}" for time, line in result.event_log)
