"""Trapezoidal-velocity flight model.

Every movement delay in a mission comes from here: straight-line flight
between two hover points, vertical takeoff/landing, and the extra time spent
turning back when the drone left a waypoint too early.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class KinematicParams:
    cruise_speed: float = 4.0  # m/s
    accel: float = 2.0  # m/s^2, same magnitude for braking
    takeoff_time: float = 8.0  # s
    land_time: float = 10.0  # s
    turnaround_overhead: float = 2.0  # s, yaw/settle once per turn-back

    def __post_init__(self):
        if not self.cruise_speed > 0:
            raise ValueError(f"cruise_speed must be > 0, got {self.cruise_speed}")
        if not self.accel > 0:
            raise ValueError(f"accel must be > 0, got {self.accel}")
        for name in ("takeoff_time", "land_time", "turnaround_overhead"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def ramp_distance(self) -> float:
        """Shortest distance over which cruise speed is reached and shed again."""
        return self.cruise_speed**2 / self.accel


def flight_time(distance: float, k: KinematicParams) -> float:
    """Rest-to-rest flight time over ``distance`` meters."""
    if distance < 0:
        raise ValueError(f"distance must be >= 0, got {distance}")
    if distance >= k.ramp_distance:
        return distance / k.cruise_speed + k.cruise_speed / k.accel
    return 2.0 * math.sqrt(distance / k.accel)


def position_after(elapsed: float, distance: float, k: KinematicParams) -> tuple[float, float]:
    """Position and speed ``elapsed`` seconds into a rest-to-rest flight."""
    total = flight_time(distance, k)
    if elapsed < 0 or elapsed > total:
        raise ValueError(f"elapsed={elapsed} outside [0, {total}]")
    a = k.accel
    if distance >= k.ramp_distance:
        v_peak = k.cruise_speed
        t_ramp = v_peak / a
    else:
        t_ramp = total / 2.0
        v_peak = a * t_ramp
    if elapsed <= t_ramp:
        return 0.5 * a * elapsed**2, a * elapsed
    t_brake = total - t_ramp
    d_ramp = 0.5 * a * t_ramp**2
    if elapsed <= t_brake:
        return d_ramp + v_peak * (elapsed - t_ramp), v_peak
    remaining = total - elapsed
    return distance - 0.5 * a * remaining**2, a * remaining


def penalty_time(distance: float, proc_time: float, k: KinematicParams) -> float:
    """Extra time, versus hovering, of aborting the leg once processing ends.

    The drone left right after sensing and learns ``proc_time`` seconds into
    the leg that it must go back. It brakes, turns around and flies back to
    the waypoint it came from.
    """
    total = flight_time(distance, k)
    if not 0 <= proc_time < total:
        raise ValueError(
            f"proc_time={proc_time} must be below the leg flight time {total:.3f} s"
        )
    x, v = position_after(proc_time, distance, k)
    t_stop = v / k.accel
    x_stop = x + v * v / (2.0 * k.accel)
    return t_stop + k.turnaround_overhead + flight_time(x_stop, k)
