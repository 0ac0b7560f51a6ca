"""Mission executor and the multi-day learn/fly/record/reset loop."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import regression
from .decision import GO, DecisionInputs, Policy, decide
from .experience import (
    ExperienceMemory,
    MissionContext,
    PenaltyLog,
    reset1_check,
    reset1_ready,
    reset2_check,
    reset2_ready,
)
from .kinematics import KinematicParams, flight_time, penalty_time
from .rng import hash_keys
from .world import HOURS, ConfigError, MissionPlan, Trace, WorldModel, truth_table

RESET_MODES = ("none", "reset1", "reset2")


@dataclass(frozen=True)
class TimingParams:
    senseT: float = 1.0
    procT: float = 10.0
    actionT: float = 10.0

    def __post_init__(self):
        for name in ("senseT", "procT", "actionT"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class VisitRecord:
    wp_id: int
    hour: int
    decision: int
    event: int
    visit_time: float
    penalty_incurred: float
    gain_realized: float
    sense_clock: float  # seconds since midnight when sensing finished


@dataclass
class MissionReport:
    day: int
    policy: str
    mission_time: float
    visits: list[VisitRecord]
    total_penalty: float
    takeoff_time: float
    first_leg_time: float
    land_time: float

    @property
    def decisions_summary(self) -> dict[str, int]:
        go = sum(v.decision for v in self.visits)
        return {"wait": len(self.visits) - go, "go": go}


@dataclass(frozen=True)
class Legs:
    """Per-leg flight times and turn-back penalties of a plan."""

    flight: tuple[float, ...]  # leg k goes from waypoints[k] to waypoints[k + 1]
    penalty: tuple[float, ...]  # indexed like plan.interior


@lru_cache(maxsize=64)
def plan_legs(plan: MissionPlan, timing: TimingParams, k: KinematicParams) -> Legs:
    dist = plan.legs()
    flight = tuple(flight_time(d, k) for d in dist)
    for i, t in enumerate(flight[1:], start=1):
        if not timing.procT < t:
            raise ConfigError(
                f"procT={timing.procT} s is not below the {t:.2f} s flight from "
                f"waypoint {plan.waypoints[i].id}"
            )
    penalty = tuple(penalty_time(d, timing.procT, k) for d in dist[1:])
    return Legs(flight, penalty)


def visit_time(timing: TimingParams, flight: float, penalty: float, d: int, e: int) -> float:
    return (
        timing.senseT
        + timing.procT
        + flight
        + e * d * penalty
        - (1 - e) * d * timing.procT
        + e * timing.actionT
    )


def run_mission(
    plan: MissionPlan,
    timing: TimingParams,
    kinematics: KinematicParams,
    policy: Policy,
    probs: np.ndarray | None,
    trace: Trace,
    day: int,
) -> MissionReport:
    """Fly ``plan`` once against the trace events of ``day``.

    ``probs`` is an (n_interior, 24) table of estimated (or true) event
    probabilities; NaN or ``None`` means no knowledge. Events are looked up
    at the hour in which sensing completes.
    """
    legs = plan_legs(plan, timing, kinematics)
    clock = plan.start_hour * 3600.0 + kinematics.takeoff_time + legs.flight[0]
    visits = []
    total = kinematics.takeoff_time + legs.flight[0]
    penalty_sum = 0.0
    for i, wp in enumerate(plan.interior):
        sense_clock = clock + timing.senseT
        hour = int(sense_clock // 3600.0) % HOURS
        e = trace.event(day, wp.id, hour)
        p = None if probs is None else float(probs[i, hour])
        pen = legs.penalty[i]
        d = decide(policy, DecisionInputs(p, pen, timing.procT))
        vt = visit_time(timing, legs.flight[i + 1], pen, d, e)
        incurred = pen if (d == GO and e == 1) else 0.0
        gain = timing.procT if (d == GO and e == 0) else 0.0
        visits.append(VisitRecord(wp.id, hour, d, e, vt, incurred, gain, sense_clock))
        penalty_sum += incurred
        total += vt
        clock += vt
    total += kinematics.land_time
    return MissionReport(
        day,
        policy.kind,
        total,
        visits,
        penalty_sum,
        kinematics.takeoff_time,
        legs.flight[0],
        kinematics.land_time,
    )


def expected_mission(
    plan: MissionPlan,
    timing: TimingParams,
    kinematics: KinematicParams,
    prob: Callable[[int, int], float],
    choose: Callable[[float, float, float], int],
) -> tuple[float, list[float]]:
    """Expected mission time, summing the two event outcomes per waypoint.

    ``prob(i, hour)`` is the true event probability at interior waypoint
    ``i``; ``choose(p, penalty, procT)`` returns the decision. Hours follow
    the expected clock, so the result is exact when probabilities do not
    change within the mission. Also returns the expected sensing clocks.
    """
    legs = plan_legs(plan, timing, kinematics)
    clock = plan.start_hour * 3600.0 + kinematics.takeoff_time + legs.flight[0]
    total = kinematics.takeoff_time + legs.flight[0]
    clocks = []
    for i in range(len(plan.interior)):
        sense_clock = clock + timing.senseT
        clocks.append(sense_clock)
        p = prob(i, int(sense_clock // 3600.0) % HOURS)
        d = choose(p, legs.penalty[i], timing.procT)
        vt = sum(
            pe * visit_time(timing, legs.flight[i + 1], legs.penalty[i], d, e)
            for e, pe in ((0, 1.0 - p), (1, p))
        )
        total += vt
        clock += vt
    return total + kinematics.land_time, clocks


def oracle_choice(p: float, penalty: float, procT: float) -> int:
    return decide(Policy("oracle"), DecisionInputs(p, penalty, procT))


def default_opT(plan: MissionPlan, timing: TimingParams, kinematics: KinematicParams) -> int:
    """Hours of autonomy covering the slowest possible run of ``plan``."""
    legs = plan_legs(plan, timing, kinematics)
    worst = kinematics.takeoff_time + sum(legs.flight) + kinematics.land_time
    worst += sum(
        timing.senseT + timing.procT + timing.actionT + max(p, 0.0) for p in legs.penalty
    )
    end = plan.start_hour + worst / 3600.0
    return max(1, math.ceil(end) - math.floor(plan.start_hour))


@dataclass
class ExperimentResult:
    """Outcome of one configuration over a set of traces.

    Arrays are indexed (trace, day).
    """

    scenario: str
    world: str
    policy: str
    estimator: str
    H: int | None
    reset: str
    procT: float
    trace_seeds: list[int]
    mission_time: np.ndarray
    oracle_time: np.ndarray
    total_penalty: np.ndarray
    reset_checked: np.ndarray
    reset_fired: np.ndarray
    reports: list[list[MissionReport]] = field(repr=False, default_factory=list)

    @property
    def ri(self) -> np.ndarray:
        return (self.mission_time - self.oracle_time) / self.oracle_time

    def ri_by_day(self) -> np.ndarray:
        return self.ri.mean(axis=0)

    def mean_ri(self, first_day: int, last_day: int) -> float:
        return float(self.ri[:, first_day : last_day + 1].mean())


def _check_reset(mode, log, day, H, seed):
    """Returns (checked, fired)."""
    if mode == "reset1":
        return reset1_ready(log, day, H), reset1_check(log, day, H)
    if mode == "reset2":
        iso_seed = int(hash_keys(seed, day, 2)) >> 1
        return reset2_ready(log, day, H), reset2_check(log, day, H, seed=iso_seed)
    return False, False


def run_experiment(
    plan: MissionPlan,
    world: WorldModel,
    traces: Sequence[Trace],
    policy: str = "learn",
    estimator: str = "tree",
    H: int | None = 12,
    reset: str = "none",
    days: int = 31,
    timing: TimingParams = TimingParams(),
    kinematics: KinematicParams = KinematicParams(),
    features: str = "coords",
    opT: int | None = None,
    random_seed: int = 0,
    scenario: str = "",
    world_kind: str = "",
    keep_reports: bool = False,
) -> ExperimentResult:
    """Run ``days`` consecutive missions per trace and compare with the oracle.

    The learning policy flies day 0 with an empty memory (so it waits
    everywhere), refits its estimator on the relevant experience before each
    later day, records every visit afterwards and, if ``reset`` fires, drops
    all experience but that day's.
    """
    if reset not in RESET_MODES:
        raise ConfigError(f"unknown reset mode {reset!r}")
    if reset != "none" and H is None:
        raise ConfigError("reset detectors need a finite H")
    if not traces:
        raise ConfigError("at least one trace is required")
    for tr in traces:
        if tr.days < days:
            raise ConfigError(f"trace {tr.seed} covers {tr.days} days, need {days}")
        if tr.plan_digest and tr.plan_digest != plan.digest():
            raise ConfigError(f"trace {tr.seed} was generated for a different plan")
    regression.make_estimator(estimator)
    plan_legs(plan, timing, kinematics)  # rejects procT >= any decision leg
    truth = truth_table(world, plan, days)
    if opT is None:
        opT = default_opT(plan, timing, kinematics)
    ctx = MissionContext(frozenset(plan.interior_ids), int(math.floor(plan.start_hour)), opT)
    encoder = regression.FeatureEncoder(plan, features)
    grid = encoder.grid()
    n_wp = len(plan.interior)

    shape = (len(traces), days)
    mission = np.zeros(shape)
    oracle = np.zeros(shape)
    penalties = np.zeros(shape)
    checked = np.zeros(shape, dtype=bool)
    fired = np.zeros(shape, dtype=bool)
    all_reports = []

    for t, trace in enumerate(traces):
        oracle_policy = Policy("oracle")
        pol = Policy(policy, seed=int(hash_keys(random_seed, trace.seed, 7)) >> 1)
        memory = ExperienceMemory(H)
        log = PenaltyLog()
        reports = []
        for day in range(days):
            oracle[t, day] = run_mission(
                plan, timing, kinematics, oracle_policy, truth[day], trace, day
            ).mission_time
            if policy == "learn":
                entries = memory.relevant_entries(ctx)
                if entries:
                    wp_ids, hours, events, _ = zip(*entries)
                    X = encoder.encode(wp_ids, hours)
                    est = regression.fit(estimator, X, np.array(events, dtype=np.float64))
                    probs = est.predict(grid).reshape(n_wp, HOURS)
                else:
                    probs = None
            elif policy == "oracle":
                probs = truth[day]
            else:
                probs = None
            rep = run_mission(plan, timing, kinematics, pol, probs, trace, day)
            mission[t, day] = rep.mission_time
            penalties[t, day] = rep.total_penalty
            if keep_reports:
                reports.append(rep)
            if policy != "learn":
                continue
            for v in rep.visits:
                memory.record(v.wp_id, v.hour, v.event, day)
            log.add(day, rep.total_penalty)
            checked[t, day], fired[t, day] = _check_reset(reset, log, day, H, trace.seed)
            if fired[t, day]:
                memory.reset(keep_day=day)
                log.restart(day + 1)
        all_reports.append(reports)

    return ExperimentResult(
        scenario=scenario,
        world=world_kind,
        policy=policy,
        estimator=estimator if policy == "learn" else "-",
        H=H if policy == "learn" else None,
        reset=reset if policy == "learn" else "none",
        procT=timing.procT,
        trace_seeds=[tr.seed for tr in traces],
        mission_time=mission,
        oracle_time=oracle,
        total_penalty=penalties,
        reset_checked=checked,
        reset_fired=fired,
        reports=all_reports,
    )
