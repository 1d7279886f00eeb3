import math

import pytest

from helpers import (
    baseline_profile, check_class_legal, config_log_for, drive_registry_day,
    energy_over, random_scenario, registry_for,
)
from oracle import min_energy_over

from hansim import lmu
from hansim.domain import LoadClass, LoadSpec, MdlProfile, ScheduleConfig, TimeModel
from hansim.protocol import Action, ConfigLog
from hansim.simnet import LinkModel, Scenario

TM = TimeModel()


def cfg_line(node_id, cls, alpha, beta, gamma, rated=1.0):
    return ConfigLog(node_id, cls, alpha, beta, gamma, rated)


def scenario_of(loads, limits, rate=1.0):
    return Scenario(tm=TM, mdl=MdlProfile(tuple(limits)), loads=tuple(loads),
                    link=LinkModel(seed=1), penalty_rate_x=rate).validated()


# -- registration -------------------------------------------------------------


def test_register_fresh_load():
    reg = lmu.Registry(TM)
    entry = reg.register(cfg_line("n1", LoadClass.NISL, 10, 14, 120))
    assert entry.remaining_minutes == 120
    assert not entry.started and not entry.running


def test_reregistration_before_start_resets():
    reg = lmu.Registry(TM)
    reg.register(cfg_line("n1", LoadClass.NISL, 10, 14, 120))
    entry = reg.register(cfg_line("n1", LoadClass.NISL, 10, 14, 60))
    assert entry.remaining_minutes == 60


def test_reregistration_after_start_is_rejected():
    reg = lmu.Registry(TM)
    entry = reg.register(cfg_line("n1", LoadClass.NISL, 10, 14, 120))
    entry.started = True
    with pytest.raises(lmu.DuplicateActiveLoad):
        reg.register(cfg_line("n1", LoadClass.NISL, 10, 14, 60))


def test_register_validates_window():
    reg = lmu.Registry(TM)
    with pytest.raises(lmu.InvalidConfig):
        reg.register(cfg_line("n1", LoadClass.ISL, 5, 6, 180))


# -- priority -----------------------------------------------------------------


def entry_for(cls, alpha, beta, gamma, rated=1.0, load_id="x"):
    spec = LoadSpec(load_id, load_id, cls, rated, ScheduleConfig(alpha, beta, gamma))
    return lmu.LoadEntry(spec=spec, remaining_minutes=gamma)


def test_priority_is_one_with_zero_slack():
    e = entry_for(LoadClass.ISL, 0, 5, 120)
    assert lmu.priority(e, 4, TM) == 1.0  # 2 intervals left, 2 remaining


def test_priority_quarter():
    e = entry_for(LoadClass.ISL, 0, 5, 60)
    assert lmu.priority(e, 2, TM) == 0.25  # 1 remaining, 4 window intervals left


def test_priority_requires_remaining_work():
    e = entry_for(LoadClass.ISL, 0, 5, 60)
    e.remaining_minutes = 0
    with pytest.raises(lmu.NotSchedulable):
        lmu.priority(e, 2, TM)


def test_priority_outside_window():
    e = entry_for(LoadClass.ISL, 3, 5, 60)
    with pytest.raises(lmu.OutsideWindow):
        lmu.priority(e, 2, TM)
    with pytest.raises(lmu.OutsideWindow):
        lmu.priority(e, 6, TM)


def test_priority_rejects_ninsl():
    spec = LoadSpec("tv", "tv", LoadClass.NINSL, 0.0, None, tuple(0.0 for _ in range(24)))
    e = lmu.LoadEntry(spec=spec, remaining_minutes=0)
    with pytest.raises(lmu.NotSchedulable):
        lmu.priority(e, 2, TM)


# -- schedule_interval ----------------------------------------------------------


def test_single_nisl_starts_at_alpha_when_it_fits():
    # Brute force over all legal starts confirms any of {0, 1, 2} is optimal
    # (flat 1 kW limit, 1 kW load); the tie-break picks the earliest.
    load = LoadSpec("n1", "n1", LoadClass.NISL, 1.0, ScheduleConfig(0, 3, 120))
    sc = scenario_of([load], [1.0] * 24)
    assert min_energy_over([load], sc.mdl, TM) == 0.0
    profile, on = drive_registry_day(sc)
    assert on["n1"] == [0, 1]
    assert energy_over(profile, sc.mdl, TM) == 0.0


def test_forced_set_overrides_budget():
    # Zero budget everywhere, deadline at hand: rule (c) switches it on anyway.
    load = LoadSpec("big", "big", LoadClass.ISL, 3.0, ScheduleConfig(2, 2, 60))
    sc = scenario_of([load], [0.001] * 24)
    reg = registry_for(sc)
    cmds = lmu.schedule_interval(reg, 2, sc.mdl, 0.0)
    assert cmds == [c for c in cmds if c.action is Action.ON]
    assert {c.node_id for c in cmds} == {"big"}


def test_higher_priority_admitted_first():
    a = LoadSpec("a", "a", LoadClass.ISL, 1.0, ScheduleConfig(0, 5, 60))   # 1/6
    b = LoadSpec("b", "b", LoadClass.ISL, 1.0, ScheduleConfig(0, 9, 60))   # 1/10
    sc = scenario_of([a, b], [1.0] * 24)
    reg = registry_for(sc)
    cmds = lmu.schedule_interval(reg, 0, sc.mdl, 0.0)
    actions = {c.node_id: c.action for c in cmds}
    assert actions["a"] is Action.ON
    assert actions["b"] is Action.OFF


def test_tiebreak_on_equal_priority_prefers_earlier_beta():
    a = LoadSpec("z", "z", LoadClass.ISL, 1.0, ScheduleConfig(0, 3, 120))
    b = LoadSpec("y", "y", LoadClass.ISL, 1.0, ScheduleConfig(0, 7, 240))
    # both priorities at t=0: 2/4 and 4/8 -> 0.5 exactly
    sc = scenario_of([a, b], [1.0] * 24)
    reg = registry_for(sc)
    cmds = lmu.schedule_interval(reg, 0, sc.mdl, 0.0)
    actions = {c.node_id: c.action for c in cmds}
    assert actions["z"] is Action.ON
    assert actions["y"] is Action.OFF


def test_started_nisl_is_locked_in():
    nisl = LoadSpec("w", "w", LoadClass.NISL, 2.0, ScheduleConfig(0, 5, 120))
    rival = LoadSpec("r", "r", LoadClass.ISL, 1.0, ScheduleConfig(1, 9, 60))
    sc = scenario_of([nisl, rival], [2.0] * 24)
    profile, on = drive_registry_day(sc)
    check_class_legal(nisl, on["w"], TM)
    assert on["w"] == [0, 1]  # stayed on despite the rival


def test_ninsl_demand_consumes_budget_first():
    load = LoadSpec("d", "d", LoadClass.ISL, 1.0, ScheduleConfig(0, 9, 60))
    bg = LoadSpec("bg", "bg", LoadClass.NINSL, 0.0, None,
                  tuple([2.5] * 5 + [0.0] * 19))
    sc = scenario_of([load, bg], [3.0] * 24)
    profile, on = drive_registry_day(sc)
    # 3.0 - 2.5 leaves no room for a 1 kW load until the background drops.
    assert on["d"] == [5]


def test_no_commands_outside_window_or_to_ninsl():
    sc = random_scenario(123)
    reg = registry_for(sc)
    for t in range(TM.horizon):
        for cmd in lmu.schedule_interval(reg, t, sc.mdl, sc.ninsl_total(t)):
            entry = reg.entries[cmd.node_id]
            assert entry.spec.load_class.schedulable
            assert entry.config.alpha <= t <= entry.config.beta
        reg.complete_interval()


def test_mdl_missing():
    sc = random_scenario(5)
    reg = registry_for(sc)
    with pytest.raises(lmu.MdlMissing):
        lmu.schedule_interval(reg, 24, sc.mdl, 0.0)
    with pytest.raises(lmu.MdlMissing):
        lmu.schedule_interval(reg, -1, sc.mdl, 0.0)


def test_corrupt_registry_detected():
    sc = random_scenario(6)
    reg = registry_for(sc)
    entry = reg.schedulable_entries()[0]
    entry.remaining_minutes = -60
    with pytest.raises(lmu.CorruptRegistry):
        lmu.schedule_interval(reg, 0, sc.mdl, 0.0)


# -- penalty ---------------------------------------------------------------------


@pytest.mark.parametrize("x", [1.0, 2.0, 0.5])
def test_penalty_matches_published_arithmetic(x):
    mdl = MdlProfile((1.0,) * 24)
    profile_one = [1.0] * 24
    profile_one[3] = 6.5  # 5.5 kWh beyond the 1 kW line for one hour
    r1 = lmu.penalty(profile_one, mdl, x, TM)
    assert r1.energy_over_kwh == 5.5
    assert r1.penalty == 5.5 * x
    profile_two = [1.0] * 24
    profile_two[3] = 2.0
    r2 = lmu.penalty(profile_two, mdl, x, TM)
    assert r2.energy_over_kwh == 1.0
    assert r2.penalty == 1.0 * x
    assert r1.penalty - r2.penalty == 4.5 * x


def test_penalty_zero_when_under_limit():
    mdl = MdlProfile((2.0,) * 24)
    r = lmu.penalty([1.9] * 24, mdl, 3.0, TM)
    assert r.energy_over_kwh == 0.0
    assert r.penalty == 0.0
    assert r.intervals_over == 0


def test_penalty_counts_strict_exceedances():
    mdl = MdlProfile((2.0,) * 24)
    profile = [2.0] * 24  # touching the limit is not over it
    profile[5] = 2.5
    profile[6] = 2.0000
    r = lmu.penalty(profile, mdl, 1.0, TM)
    assert r.intervals_over == 1
    assert math.isclose(r.energy_over_kwh, 0.5)


def test_penalty_length_mismatch():
    with pytest.raises(lmu.LengthMismatch):
        lmu.penalty([1.0] * 23, MdlProfile((1.0,) * 24), 1.0, TM)


def test_penalty_identity_holds_on_random_profiles():
    import random
    rng = random.Random(17)
    for _ in range(50):
        mdl = MdlProfile(tuple(rng.uniform(0.5, 4.0) for _ in range(24)))
        profile = [rng.uniform(0.0, 6.0) for _ in range(24)]
        r = lmu.penalty(profile, mdl, rng.uniform(0.1, 9.0), TM)
        assert r.penalty == r.energy_over_kwh * r.rate_x  # exact by construction
        assert r.energy_over_kwh >= 0.0


# -- baseline ----------------------------------------------------------------------


def test_baseline_runs_from_alpha():
    reg = lmu.Registry(TM)
    reg.register(cfg_line("w", LoadClass.NISL, 2, 10, 120))
    reg.register(cfg_line("p", LoadClass.ISL, 0, 5, 60))
    per_interval = lmu.baseline_schedule(reg)
    on = {t: [c.node_id for c in cmds] for t, cmds in enumerate(per_interval) if cmds}
    assert on == {0: ["p"], 2: ["w"], 3: ["w"]}


def test_baseline_empty_registry():
    reg = lmu.Registry(TM)
    assert all(cmds == [] for cmds in lmu.baseline_schedule(reg))


# -- whole-day properties over seeded scenarios --------------------------------------


def test_scheduler_meets_class_contracts_on_seeded_scenarios():
    for seed in range(60):
        sc = random_scenario(seed)
        _, on = drive_registry_day(sc)
        for spec in sc.loads:
            if spec.load_class.schedulable:
                check_class_legal(spec, on[spec.load_id], sc.tm)


def test_degenerate_windows_reproduce_baseline_exactly():
    # With no slack anywhere the greedy has no choices left: it must equal
    # the start-at-alpha schedule interval for interval.
    for seed in range(40):
        sc = random_scenario(seed, degenerate=True)
        scheduled, on_s = drive_registry_day(sc)
        unscheduled, on_b = baseline_profile(sc)
        assert scheduled == unscheduled
        assert on_s == on_b


def test_scheduler_beats_baseline_on_net():
    # The greedy is not dominance-guaranteed for general windows: deferral can
    # strand a never-fitting load on a worse tail of its window (see the
    # decisions ledger).  Empirically it must still win on net and regress
    # only rarely.
    wins = ties = losses = 0
    net = 0.0
    for seed in range(400):
        sc = random_scenario(seed)
        scheduled, _ = drive_registry_day(sc)
        unscheduled, _ = baseline_profile(sc)
        diff = (energy_over(unscheduled, sc.mdl, sc.tm)
                - energy_over(scheduled, sc.mdl, sc.tm))
        net += diff
        if diff > 1e-9:
            wins += 1
        elif diff < -1e-9:
            losses += 1
        else:
            ties += 1
    assert net > 0.0, "scheduling must reduce exceedance on net"
    assert (wins + ties) / (wins + ties + losses) >= 0.85
    assert wins > losses
