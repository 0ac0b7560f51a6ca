"""Ground truth: mission geometry, probability fields and event traces.

The simulator never sees a :class:`WorldModel`; it only replays a
:class:`Trace`. The oracle benchmark is the one consumer of true
probabilities, and it gets them through :func:`truth_table`.
"""

from __future__ import annotations

import hashlib
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .rng import uniforms

HOURS = 24


class ConfigError(ValueError):
    """Inconsistent scenario or world definition."""


class TraceMiss(KeyError):
    """A (day, waypoint, hour) lookup outside the pre-generated trace."""


@dataclass(frozen=True)
class Waypoint:
    id: int
    x: float
    y: float

    def distance_to(self, other: Waypoint) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


@dataclass(frozen=True)
class MissionPlan:
    """Ordered waypoints; the first and last one are the home location.

    ``start_hour`` is a fractional hour of day (11.5 is 11:30).
    """

    waypoints: tuple[Waypoint, ...]
    start_hour: float = 8.0
    name: str = "plan"

    def __post_init__(self):
        wps = tuple(self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if len(wps) < 3:
            raise ConfigError("a plan needs home, at least one point of interest, home")
        first, last = wps[0], wps[-1]
        if (first.x, first.y) != (last.x, last.y):
            raise ConfigError("first and last waypoint must both be the home location")
        ids = [w.id for w in self.interior]
        if len(set(ids)) != len(ids) or first.id in ids:
            raise ConfigError("waypoint ids must be unique")
        if not all(math.isfinite(w.x) and math.isfinite(w.y) for w in wps):
            raise ConfigError("waypoint coordinates must be finite")
        if not 0.0 <= self.start_hour < HOURS:
            raise ConfigError(f"start_hour must be in [0, 24), got {self.start_hour}")

    @property
    def interior(self) -> tuple[Waypoint, ...]:
        """Points of interest, without the two home entries."""
        return self.waypoints[1:-1]

    @property
    def interior_ids(self) -> tuple[int, ...]:
        return tuple(w.id for w in self.interior)

    def legs(self) -> list[float]:
        """Distances of consecutive legs, home to home."""
        wps = self.waypoints
        return [wps[i].distance_to(wps[i + 1]) for i in range(len(wps) - 1)]

    def with_start(self, start_hour: float) -> MissionPlan:
        return MissionPlan(self.waypoints, start_hour, self.name)

    def digest(self) -> str:
        """Hash of the waypoint geometry (not the start hour)."""
        h = hashlib.sha256()
        for w in self.waypoints:
            h.update(f"{w.id}:{w.x!r}:{w.y!r};".encode())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class Region:
    """Half-open axis-aligned rectangle [x0, x1) x [y0, y1)."""

    x0: float
    x1: float
    y0: float
    y1: float
    base_prob: float
    window_prob: float
    name: str = ""

    def __post_init__(self):
        for p in (self.base_prob, self.window_prob):
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"probability {p} outside [0, 1]")

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1


@dataclass(frozen=True)
class ProbabilityField:
    regions: tuple[Region, ...]
    time_window: tuple[int, int] = (12, 16)  # [start, end) hours

    def region_of(self, wp: Waypoint) -> Region:
        hits = [r for r in self.regions if r.contains(wp.x, wp.y)]
        if len(hits) != 1:
            raise ConfigError(f"waypoint {wp.id} lies in {len(hits)} regions, expected 1")
        return hits[0]

    def in_window(self, hour: int) -> bool:
        lo, hi = self.time_window
        return lo <= hour < hi

    def prob(self, wp: Waypoint, hour: int) -> float:
        r = self.region_of(wp)
        return r.window_prob if self.in_window(hour) else r.base_prob

    def reversed(self) -> ProbabilityField:
        """Swap every region's base and window probability."""
        regions = tuple(
            Region(r.x0, r.x1, r.y0, r.y1, r.window_prob, r.base_prob, r.name)
            for r in self.regions
        )
        return ProbabilityField(regions, self.time_window)


@dataclass(frozen=True)
class WorldModel:
    field_before: ProbabilityField
    field_after: ProbabilityField | None = None
    change_day: int | None = None

    def __post_init__(self):
        if self.change_day is not None:
            if self.change_day < 1:
                raise ConfigError("change_day must be >= 1")
            if self.field_after is None:
                raise ConfigError("a change_day needs a field_after")

    def field_on(self, day: int) -> ProbabilityField:
        if self.change_day is not None and day >= self.change_day:
            return self.field_after
        return self.field_before

    def validate(self, plan: MissionPlan):
        for f in (self.field_before, self.field_after):
            if f is not None:
                for wp in plan.interior:
                    f.region_of(wp)


def true_prob(world: WorldModel, wp: Waypoint, day: int, hour: int) -> float:
    if not 0 <= hour < HOURS:
        raise ValueError(f"hour must be in 0..23, got {hour}")
    return world.field_on(day).prob(wp, hour)


def truth_table(world: WorldModel, plan: MissionPlan, days: int) -> np.ndarray:
    """True probabilities, shape (days, n_interior, 24)."""
    out = np.empty((days, len(plan.interior), HOURS))
    cache: dict[int, np.ndarray] = {}
    for day in range(days):
        f = world.field_on(day)
        if id(f) not in cache:
            cache[id(f)] = np.array(
                [[f.prob(wp, h) for h in range(HOURS)] for wp in plan.interior]
            )
        out[day] = cache[id(f)]
    return out


@dataclass(frozen=True)
class Trace:
    """Pre-sampled detection events, indexed by (day, waypoint id, hour)."""

    seed: int
    wp_ids: tuple[int, ...]
    events: np.ndarray = field(repr=False)  # uint8, (days, n_wp, 24)
    plan_digest: str = ""

    def __post_init__(self):
        ev = np.array(self.events, dtype=np.uint8)
        ev.setflags(write=False)
        object.__setattr__(self, "events", ev)
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.wp_ids)})

    @property
    def days(self) -> int:
        return self.events.shape[0]

    def event(self, day: int, wp_id: int, hour: int) -> int:
        i = self._index.get(wp_id)
        if i is None or not 0 <= day < self.days or not 0 <= hour < HOURS:
            raise TraceMiss((day, wp_id, hour))
        return int(self.events[day, i, hour])

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.wp_ids == other.wp_ids
            and self.plan_digest == other.plan_digest
            and np.array_equal(self.events, other.events)
        )

    __hash__ = None


def generate_trace(world: WorldModel, plan: MissionPlan, days: int, seed: int) -> Trace:
    """Bernoulli events for every (day, waypoint, hour), keyed on the seed."""
    if days < 1:
        raise ValueError("days must be >= 1")
    world.validate(plan)
    probs = truth_table(world, plan, days)
    ids = np.array(plan.interior_ids)
    u = uniforms(seed, np.arange(days)[:, None, None], ids[None, :, None],
                 np.arange(HOURS)[None, None, :])
    events = (u < probs).astype(np.uint8)
    return Trace(seed, plan.interior_ids, events, plan.digest())


def write_trace(trace: Trace, path: str | os.PathLike):
    """Write a trace file atomically: ``#`` header lines then sorted CSV rows."""
    lines = [
        f"# seed={trace.seed}",
        f"# days={trace.days}",
        f"# plan={trace.plan_digest}",
        "day,wp_id,hour,event",
    ]
    order = np.argsort(trace.wp_ids, kind="stable")
    for day in range(trace.days):
        for i in order:
            wp = trace.wp_ids[i]
            row = trace.events[day, i]
            lines.extend(f"{day},{wp},{h},{row[h]}" for h in range(HOURS))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_trace(path: str | os.PathLike) -> Trace:
    meta: dict[str, str] = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            elif line[0].isdigit():
                rows.append([int(v) for v in line.split(",")])
    if "seed" not in meta or "days" not in meta:
        raise ConfigError(f"{path}: missing trace header")
    data = np.array(rows, dtype=np.int64).reshape(-1, 4)
    days = int(meta["days"])
    ids = tuple(sorted(set(data[:, 1].tolist())))
    if len(data) != days * len(ids) * HOURS:
        raise ConfigError(f"{path}: expected {days * len(ids) * HOURS} rows, got {len(data)}")
    col = {w: i for i, w in enumerate(ids)}
    events = np.zeros((days, len(ids), HOURS), dtype=np.uint8)
    events[data[:, 0], [col[w] for w in data[:, 1]], data[:, 2]] = data[:, 3]
    return Trace(int(meta["seed"]), ids, events, meta.get("plan", ""))


def atomic_write_text(path: str | os.PathLike, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def grid_plan(
    columns: int = 10,
    rows: int = 5,
    spacing: float = 50.0,
    home: tuple[float, float] = (-30.0, 0.0),
    start_hour: float = 8.0,
    name: str = "grid",
) -> MissionPlan:
    """Column-wise boustrophedon over a ``columns x rows`` grid, home to home."""
    home_wp = Waypoint(0, *home)
    pts = []
    for c in range(columns):
        ys = range(rows) if c % 2 == 0 else reversed(range(rows))
        pts.extend((c * spacing, r * spacing) for r in ys)
    wps = [Waypoint(i + 1, x, y) for i, (x, y) in enumerate(pts)]
    return MissionPlan((home_wp, *wps, home_wp), start_hour, name)


def column_regions(
    plan: MissionPlan,
    red_columns: Sequence[int],
    spacing: float = 50.0,
    green: tuple[float, float] = (0.1, 0.6),
    red: tuple[float, float] = (0.6, 0.1),
    time_window: tuple[int, int] = (12, 16),
) -> ProbabilityField:
    """Two-colour field: whole grid columns ``red_columns`` are red, the rest green.

    Consecutive runs of columns form one rectangle each.
    """
    xs = sorted({w.x for w in plan.interior})
    ys = [w.y for w in plan.interior]
    y0, y1 = min(ys) - spacing / 2, max(ys) + spacing / 2
    red_set = set(red_columns)
    regions = []
    start = 0
    for c in range(1, len(xs) + 1):
        if c == len(xs) or ((c in red_set) != (start in red_set)):
            is_red = start in red_set
            probs = red if is_red else green
            regions.append(
                Region(
                    xs[start] - spacing / 2,
                    xs[c - 1] + spacing / 2,
                    y0,
                    y1,
                    *probs,
                    name="red" if is_red else "green",
                )
            )
            start = c
    return ProbabilityField(tuple(regions), time_window)
