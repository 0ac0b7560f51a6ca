"""Built-in evaluation scenarios on the 450 m x 200 m, 50-waypoint grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .kinematics import KinematicParams
from .sim import TimingParams, expected_mission, oracle_choice
from .world import ConfigError, MissionPlan, WorldModel, column_regions, grid_plan

SCENARIOS = ("out", "out_in", "in_out")
WORLD_KINDS = ("stable", "changing")
CHANGE_DAY = 21
OUT_START_HOUR = 8.0
# grid columns 4..8: the path scans 20 green waypoints, all 25 red, then 5 green
RED_COLUMNS = (4, 5, 6, 7, 8)

_BOUNDARY = {"out_in": 12.0, "in_out": 16.0}


@dataclass(frozen=True)
class Scenario:
    name: str
    world_kind: str
    plan: MissionPlan
    world: WorldModel


def solve_start_hour(
    plan: MissionPlan,
    world: WorldModel,
    boundary_hour: float,
    timing: TimingParams = TimingParams(),
    kinematics: KinematicParams = KinematicParams(),
) -> float:
    """Start hour whose oracle-expected mission is centred on ``boundary_hour``.

    Bisection on ``start + T(start) / 2 - boundary``, where ``T`` is the
    expected mission time under oracle decisions with the day-0 field.
    Rounded to whole seconds.
    """
    field = world.field_on(0)
    interior = plan.interior

    def imbalance(start_h: float) -> float:
        p = plan.with_start(start_h)
        total, _ = expected_mission(
            p, timing, kinematics, lambda i, h: field.prob(interior[i], h), oracle_choice
        )
        return start_h + total / 7200.0 - boundary_hour

    lo, hi = boundary_hour - 3.0, boundary_hour
    if not (imbalance(lo) < 0 <= imbalance(hi)):
        raise ConfigError("mission is too long to centre on the time-window boundary")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if imbalance(mid) < 0:
            lo = mid
        else:
            hi = mid
    return round(hi * 3600.0) / 3600.0


def builtin_scenario(
    name: str,
    world_kind: str = "stable",
    timing: TimingParams = TimingParams(),
    kinematics: KinematicParams = KinematicParams(),
    red_columns: Sequence[int] = RED_COLUMNS,
    change_day: int = CHANGE_DAY,
) -> tuple[MissionPlan, WorldModel]:
    """Plan and world for ``out``, ``out_in`` or ``in_out``.

    Green waypoints see events with probability 0.1, rising to 0.6 during
    12:00-15:59; red ones the reverse. The changing world swaps the two from
    ``change_day`` on.
    """
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")
    if world_kind not in WORLD_KINDS:
        raise ConfigError(f"unknown world {world_kind!r}; expected one of {WORLD_KINDS}")
    plan = grid_plan(name=name)
    before = column_regions(plan, red_columns)
    if world_kind == "changing":
        world = WorldModel(before, before.reversed(), change_day)
    else:
        world = WorldModel(before)
    if name == "out":
        start = OUT_START_HOUR
    else:
        start = solve_start_hour(plan, world, _BOUNDARY[name], timing, kinematics)
    return plan.with_start(start), world


def load_scenario(name: str, world_kind: str = "stable", **kwargs) -> Scenario:
    plan, world = builtin_scenario(name, world_kind, **kwargs)
    return Scenario(name, world_kind, plan, world)
