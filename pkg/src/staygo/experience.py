"""Experience memory, daily penalty log and the two reset detectors."""

from __future__ import annotations

import csv
import io
import os
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .isoforest import IsolationForest
from .world import atomic_write_text


class ExperienceEntry(NamedTuple):
    wp_id: int
    hour: int
    event: int
    day: int


@dataclass(frozen=True)
class MissionContext:
    """Which stored experience is relevant to the next mission.

    ``t_start`` is the hour of day the mission starts and ``opT`` the
    drone's operational autonomy in hours.
    """

    waypoint_ids: frozenset[int]
    t_start: int
    opT: int

    def __post_init__(self):
        if self.opT <= 0:
            raise ValueError("opT must be > 0")
        object.__setattr__(self, "waypoint_ids", frozenset(self.waypoint_ids))

    def hours(self) -> set[int]:
        span = min(self.opT, 23)
        return {(self.t_start + k) % 24 for k in range(span + 1)}


class ExperienceMemory:
    """Per-(waypoint, hour) FIFO lists of observations, capped at ``capacity``.

    ``capacity=None`` keeps everything.
    """

    def __init__(self, capacity: int | None = None):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be a positive integer or None")
        self.capacity = capacity
        self.store: dict[tuple[int, int], deque[ExperienceEntry]] = {}

    def record(self, wp_id: int, hour: int, event: int, day: int) -> ExperienceMemory:
        if not 0 <= hour < 24:
            raise ValueError(f"hour must be in 0..23, got {hour}")
        if event not in (0, 1):
            raise ValueError(f"event must be 0 or 1, got {event}")
        key = (wp_id, hour)
        q = self.store.get(key)
        if q is None:
            q = self.store[key] = deque(maxlen=self.capacity)
        q.append(ExperienceEntry(wp_id, hour, int(event), day))
        return self

    def entries(self) -> list[ExperienceEntry]:
        return [e for key in sorted(self.store) for e in self.store[key]]

    def relevant_entries(self, ctx: MissionContext) -> list[ExperienceEntry]:
        hours = ctx.hours()
        return [
            e
            for key in sorted(self.store)
            if key[0] in ctx.waypoint_ids and key[1] in hours
            for e in self.store[key]
        ]

    def reset(self, keep_day: int) -> ExperienceMemory:
        """Drop everything except the entries recorded on ``keep_day``."""
        kept: dict[tuple[int, int], deque[ExperienceEntry]] = {}
        for key, q in self.store.items():
            keep = [e for e in q if e.day == keep_day]
            if keep:
                kept[key] = deque(keep, maxlen=self.capacity)
        self.store = kept
        return self

    def __len__(self):
        return sum(len(q) for q in self.store.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["day", "wp_id", "hour", "event"])
        for e in sorted(self.entries(), key=lambda e: (e.day, e.wp_id, e.hour)):
            w.writerow([e.day, e.wp_id, e.hour, e.event])
        return buf.getvalue()

    def save(self, path: str | os.PathLike):
        atomic_write_text(path, self.to_csv())

    @classmethod
    def load(cls, path: str | os.PathLike, capacity: int | None = None) -> ExperienceMemory:
        mem = cls(capacity)
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                mem.record(int(row["wp_id"]), int(row["hour"]), int(row["event"]), int(row["day"]))
        return mem


class PenaltyLog:
    """Daily turn-back penalty totals (seconds).

    ``learning_start`` is the first day of the current learning period; it
    moves forward whenever the memory is reset.
    """

    def __init__(self):
        self.daily_totals: dict[int, float] = {}
        self.learning_start = 0

    def add(self, day: int, seconds: float):
        if seconds < 0:
            raise ValueError("penalty must be >= 0")
        self.daily_totals[day] = self.daily_totals.get(day, 0.0) + seconds

    def restart(self, day: int):
        self.learning_start = day

    def days_learned(self, current_day: int) -> int:
        return current_day - self.learning_start

    def window(self, first: int, last: int) -> list[float]:
        return [self.daily_totals.get(d, 0.0) for d in range(first, last + 1)]

    def to_csv(self) -> str:
        lines = ["day,total_penalty_s"]
        lines += [f"{d},{self.daily_totals[d]!r}" for d in sorted(self.daily_totals)]
        return "\n".join(lines) + "\n"

    def save(self, path: str | os.PathLike):
        atomic_write_text(path, self.to_csv())

    @classmethod
    def load(cls, path: str | os.PathLike) -> PenaltyLog:
        log = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                log.add(int(row["day"]), float(row["total_penalty_s"]))
        return log


def reset1_ready(log: PenaltyLog, current_day: int, H: int) -> bool:
    return log.days_learned(current_day) >= H


def reset1_check(log: PenaltyLog, current_day: int, H: int) -> bool:
    """Today's penalty exceeds the worst day of the first ``H`` learning days."""
    if not reset1_ready(log, current_day, H):
        return False
    start = log.learning_start
    baseline = max(log.window(start, start + H - 1))
    return log.daily_totals.get(current_day, 0.0) > baseline


def reset2_ready(log: PenaltyLog, current_day: int, H: int) -> bool:
    return log.days_learned(current_day) + 1 >= H


def reset2_check(
    log: PenaltyLog,
    current_day: int,
    H: int,
    contamination: float = 0.01,
    n_trees: int = 100,
    seed: int = 0,
) -> bool:
    """Isolation-forest outlier test of today's total within the last ``H`` days.

    The window ends at (and includes) ``current_day``. Returns False while
    fewer than ``H`` days of the current learning period exist.
    """
    if not reset2_ready(log, current_day, H):
        return False
    window = log.window(current_day - H + 1, current_day)
    if max(window) == min(window):
        return False
    forest = IsolationForest(n_trees, 256, contamination, seed).fit(window)
    return bool(forest.train_scores_[-1] > forest.threshold_)

