"""Shared test machinery: seeded scenario generation and schedule legality checks."""

from __future__ import annotations

import random

from hansim import lmu
from hansim.domain import LoadClass, LoadSpec, MdlProfile, ScheduleConfig, TimeModel, required_intervals
from hansim.protocol import ConfigLog
from hansim.simnet import LinkModel, Scenario


def random_scenario(seed: int, interval_minutes: int = 60, max_sched: int = 6,
                    degenerate: bool = False) -> Scenario:
    """A feasible-by-construction household: windows always fit their run time.

    With degenerate=True every window is exactly as wide as its run time, so
    the scheduler has no freedom at all.
    """
    rng = random.Random(seed)
    tm = TimeModel(interval_minutes)
    horizon = tm.horizon
    loads: list[LoadSpec] = []

    for i in range(rng.randint(0, 2)):
        level = rng.uniform(0.1, 0.8)
        series = []
        for _ in range(horizon):
            level = max(0.0, min(2.0, level + rng.uniform(-0.25, 0.25)))
            series.append(round(level, 3))
        loads.append(LoadSpec(f"bg{i}", f"background {i}", LoadClass.NINSL, 0.0,
                              None, tuple(series)))

    for i in range(rng.randint(1, max_sched)):
        cls = rng.choice([LoadClass.NISL, LoadClass.ISL])
        alpha = rng.randrange(horizon)
        width = rng.randint(1, min(8, horizon - alpha))
        beta = alpha + width - 1
        req = width if degenerate else rng.randint(1, width)
        rated = round(rng.uniform(0.3, 3.0), 2)
        loads.append(LoadSpec(f"ld{i}", f"load {i}", cls, rated,
                              ScheduleConfig(alpha, beta, req * interval_minutes)))

    base = rng.uniform(2.0, 5.0)
    mdl = tuple(round(max(0.5, base + rng.uniform(-0.8, 0.8)), 3) for _ in range(horizon))
    link = LinkModel(7.0, 9.0, seed=rng.randrange(2**31))
    return Scenario(tm=tm, mdl=MdlProfile(mdl), loads=tuple(loads), link=link,
                    penalty_rate_x=1.0).validated()


def config_log_for(spec: LoadSpec) -> ConfigLog:
    cfg = spec.config or ScheduleConfig(0, 0, 0)
    return ConfigLog(spec.load_id, spec.load_class, cfg.alpha, cfg.beta,
                     cfg.gamma_minutes, spec.rated_kw)


def registry_for(scenario: Scenario) -> lmu.Registry:
    reg = lmu.Registry(scenario.tm)
    for spec in scenario.loads:
        reg.register(config_log_for(spec))
    return reg


def drive_registry_day(scenario: Scenario) -> tuple[list[float], dict[str, list[int]]]:
    """Run the scheduler over one day at the registry level (no network, no nodes)."""
    reg = registry_for(scenario)
    tm = scenario.tm
    profile: list[float] = []
    on: dict[str, list[int]] = {s.load_id: [] for s in scenario.loads if s.load_class.schedulable}
    for t in range(tm.horizon):
        lmu.schedule_interval(reg, t, scenario.mdl, scenario.ninsl_total(t))
        total = scenario.ninsl_total(t)
        for e in reg.schedulable_entries():
            if e.running:
                total += e.spec.rated_kw
                on[e.spec.load_id].append(t)
        profile.append(total)
        reg.complete_interval()
    return profile, on


def baseline_profile(scenario: Scenario) -> tuple[list[float], dict[str, list[int]]]:
    """Every load back-to-back from alpha, ignoring the limit."""
    tm = scenario.tm
    profile = [scenario.ninsl_total(t) for t in range(tm.horizon)]
    on: dict[str, list[int]] = {}
    for spec in scenario.loads:
        if not spec.load_class.schedulable:
            continue
        req = required_intervals(spec.config, tm)
        on[spec.load_id] = list(range(spec.config.alpha, spec.config.alpha + req))
        for t in on[spec.load_id]:
            profile[t] += spec.rated_kw
    return profile, on


def energy_over(profile: list[float], mdl: MdlProfile, tm: TimeModel) -> float:
    hours = tm.interval_minutes / 60.0
    return sum(max(0.0, kw - limit) * hours for kw, limit in zip(profile, mdl.limits))


def check_class_legal(spec: LoadSpec, on_intervals: list[int], tm: TimeModel) -> None:
    """Assert one load's ON set satisfies its class contract."""
    cfg = spec.config
    req = required_intervals(cfg, tm)
    assert len(on_intervals) == req, \
        f"{spec.load_id}: ran {len(on_intervals)} intervals, needs {req}"
    assert all(cfg.alpha <= t <= cfg.beta for t in on_intervals), \
        f"{spec.load_id}: ON outside window [{cfg.alpha}, {cfg.beta}]: {on_intervals}"
    assert on_intervals == sorted(set(on_intervals)), f"{spec.load_id}: duplicate intervals"
    if spec.load_class is LoadClass.NISL and on_intervals:
        first, last = on_intervals[0], on_intervals[-1]
        assert on_intervals == list(range(first, last + 1)), \
            f"{spec.load_id}: non-contiguous run for a non-interruptible load: {on_intervals}"
