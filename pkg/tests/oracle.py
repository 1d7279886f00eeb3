"""Exhaustive scheduling oracle for small instances.

Enumerates every class-legal ON/OFF assignment (contiguous blocks for
non-interruptible loads, arbitrary in-window subsets for interruptible ones)
and returns the minimum achievable energy beyond the limit.  Branch-and-bound
is sound because adding a load can only raise the exceedance.
"""

from __future__ import annotations

import itertools

from hansim.domain import LoadClass, LoadSpec, MdlProfile, TimeModel, required_intervals


def legal_on_sets(spec: LoadSpec, tm: TimeModel) -> list[tuple[int, ...]]:
    cfg = spec.config
    req = required_intervals(cfg, tm)
    window = range(cfg.alpha, cfg.beta + 1)
    if spec.load_class is LoadClass.NISL:
        return [tuple(range(s, s + req)) for s in range(cfg.alpha, cfg.beta - req + 2)]
    return [tuple(c) for c in itertools.combinations(window, req)]


def min_energy_over(loads: list[LoadSpec], mdl: MdlProfile, tm: TimeModel,
                    ninsl_series: list[float] | None = None) -> float:
    hours = tm.interval_minutes / 60.0
    base = list(ninsl_series) if ninsl_series else [0.0] * tm.horizon
    choices = [(spec, legal_on_sets(spec, tm)) for spec in loads]
    best = float("inf")

    def over_of(profile: list[float]) -> float:
        return sum(max(0.0, kw - limit) * hours for kw, limit in zip(profile, mdl.limits))

    def walk(idx: int, profile: list[float]) -> None:
        nonlocal best
        partial = over_of(profile)
        if partial >= best:
            return
        if idx == len(choices):
            best = partial
            return
        spec, on_sets = choices[idx]
        for on in on_sets:
            for t in on:
                profile[t] += spec.rated_kw
            walk(idx + 1, profile)
            for t in on:
                profile[t] -= spec.rated_kw

    walk(0, base[:])
    return best


def search_space(loads: list[LoadSpec], tm: TimeModel) -> int:
    n = 1
    for spec in loads:
        n *= len(legal_on_sets(spec, tm))
    return n
