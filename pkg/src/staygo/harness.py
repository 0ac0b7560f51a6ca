"""Experiment configuration, sweeps, trace files, results CSV and reports.

The CSV written by :func:`cmd_run` is the ground truth for every summary
and chart; :func:`summarize` gives identical numbers whether it is fed the
in-memory results or the rows read back from disk.
"""

from __future__ import annotations

import configparser
import csv
import io
import itertools
import logging
import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import svg
from .decision import POLICY_KINDS
from .kinematics import KinematicParams
from .regression import KINDS as ESTIMATOR_KINDS
from .scenarios import SCENARIOS, WORLD_KINDS, load_scenario
from .sim import RESET_MODES, ExperimentResult, TimingParams, run_experiment
from .world import ConfigError, atomic_write_text, generate_trace, read_trace, write_trace

log = logging.getLogger(__name__)

RESULT_COLUMNS = (
    "scenario",
    "world",
    "policy",
    "estimator",
    "H",
    "reset",
    "trace_seed",
    "day",
    "mission_time_s",
    "total_penalty_s",
    "ri",
    "procT",
    "reset_checked",
    "reset_fired",
)
SWEEP_AXES = ("H", "procT", "estimator", "policy", "reset")
DEFAULT_DAYS = {"stable": 31, "changing": 41}
STEADY_FROM = 12  # first day counted as converged


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "out"
    world: str = "stable"
    days: int | None = None  # None: 31 stable, 41 changing
    num_traces: int = 20
    seed: int = 0
    timing: TimingParams = TimingParams()
    kinematics: KinematicParams = KinematicParams()
    policy: str = "learn"
    estimator: str = "tree"
    H: int | None = 12
    reset: str = "none"
    features: str = "coords"
    out_dir: str = "results"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.world not in WORLD_KINDS:
            raise ConfigError(f"unknown world {self.world!r}; expected one of {WORLD_KINDS}")
        if self.policy not in POLICY_KINDS:
            raise ConfigError(f"unknown policy {self.policy!r}; expected one of {POLICY_KINDS}")
        if self.estimator not in ESTIMATOR_KINDS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        if self.reset not in RESET_MODES:
            raise ConfigError(f"unknown reset mode {self.reset!r}")
        if self.num_traces < 1:
            raise ConfigError("num_traces must be >= 1")
        if self.H is not None and self.H < 1:
            raise ConfigError("H must be a positive integer or inf")
        if self.days is not None and self.days < 1:
            raise ConfigError("days must be >= 1")

    @property
    def horizon(self) -> int:
        return self.days if self.days is not None else DEFAULT_DAYS[self.world]

    @property
    def trace_seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.num_traces)]

    @property
    def trace_dir(self) -> Path:
        return Path(self.out_dir) / "traces" / self.world


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"cannot sweep {self.axis!r}; axes are {SWEEP_AXES}")
        if not self.values:
            raise ConfigError(f"sweep over {self.axis} has no values")
        for v in self.values:
            _check_axis_value(self.axis, v)

    @classmethod
    def parse(cls, text: str) -> SweepSpec:
        """Parse ``axis=v1,v2,...`` (``inf`` allowed for H)."""
        axis, sep, rest = text.partition("=")
        if not sep:
            raise ConfigError(f"sweep {text!r} must look like axis=v1,v2")
        axis = axis.strip()
        return cls(axis, tuple(parse_axis_value(axis, v) for v in rest.split(",") if v.strip()))


def parse_H(text) -> int | None:
    if text is None:
        return None
    s = str(text).strip().lower()
    if s in ("inf", "none", "∞"):
        return None
    return int(s)


def parse_axis_value(axis: str, text: str):
    text = text.strip()
    if axis == "H":
        return parse_H(text)
    if axis == "procT":
        return float(text)
    return text


def _check_axis_value(axis, v):
    if axis == "H" and v is not None and v < 1:
        raise ConfigError("H values must be >= 1 or inf")
    if axis == "procT" and not v > 0:
        raise ConfigError("procT values must be > 0")
    if axis == "estimator" and v not in ESTIMATOR_KINDS:
        raise ConfigError(f"unknown estimator {v!r}")
    if axis == "policy" and v not in POLICY_KINDS:
        raise ConfigError(f"unknown policy {v!r}")
    if axis == "reset" and v not in RESET_MODES:
        raise ConfigError(f"unknown reset mode {v!r}")


def fmt_H(H: int | None) -> str:
    return "inf" if H is None else str(H)


# -- config file -------------------------------------------------------------

_SECTION_EXPERIMENT = "experiment"


def load_config(path: str | os.PathLike, **overrides) -> ExperimentConfig:
    """Read an INI-style config; ``overrides`` (not None) win over the file.

    Sections: ``[experiment]`` for the ExperimentConfig scalars,
    ``[timing]`` and ``[kinematics]`` for the parameter blocks.
    """
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep "H" and "procT" as written
    if not cp.read(path):
        raise ConfigError(f"cannot read config file {path}")
    kwargs = {}
    if cp.has_section(_SECTION_EXPERIMENT):
        for key, value in cp.items(_SECTION_EXPERIMENT):
            kwargs[key] = value
    kwargs = _coerce_experiment(kwargs)
    if cp.has_section("timing"):
        kwargs["timing"] = _params(TimingParams, cp.items("timing"))
    if cp.has_section("kinematics"):
        kwargs["kinematics"] = _params(KinematicParams, cp.items("kinematics"))
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kwargs)


def _params(cls, items):
    names = {f.name for f in fields(cls)}
    unknown = [k for k, _ in items if k not in names]
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys {unknown}")
    try:
        return cls(**{k: float(v) for k, v in items})
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _coerce_experiment(raw: dict) -> dict:
    names = {f.name for f in fields(ExperimentConfig)}
    out = {}
    for key, value in raw.items():
        if key not in names or key in ("timing", "kinematics"):
            raise ConfigError(f"unknown experiment key {key!r}")
        if key in ("num_traces", "seed"):
            out[key] = int(value)
        elif key == "days":
            out[key] = None if value.strip().lower() in ("", "auto") else int(value)
        elif key == "H":
            out[key] = parse_H(value)
        else:
            out[key] = value.strip()
    return out


def dump_config(cfg: ExperimentConfig) -> str:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp[_SECTION_EXPERIMENT] = {
        "scenario": cfg.scenario,
        "world": cfg.world,
        "days": "auto" if cfg.days is None else str(cfg.days),
        "num_traces": str(cfg.num_traces),
        "seed": str(cfg.seed),
        "policy": cfg.policy,
        "estimator": cfg.estimator,
        "H": fmt_H(cfg.H),
        "reset": cfg.reset,
        "features": cfg.features,
        "out_dir": cfg.out_dir,
    }
    cp["timing"] = {f.name: repr(getattr(cfg.timing, f.name)) for f in fields(TimingParams)}
    cp["kinematics"] = {
        f.name: repr(getattr(cfg.kinematics, f.name)) for f in fields(KinematicParams)
    }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# -- traces ------------------------------------------------------------------


def trace_path(cfg: ExperimentConfig, seed: int) -> Path:
    return cfg.trace_dir / f"trace_{seed}.csv"


def cmd_gen_traces(cfg: ExperimentConfig) -> list[Path]:
    """Write ``num_traces`` trace files for the configured world."""
    sc = load_scenario(cfg.scenario, cfg.world, timing=cfg.timing, kinematics=cfg.kinematics)
    try:
        cfg.trace_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create {cfg.trace_dir}: {exc}") from exc
    paths = []
    for seed in cfg.trace_seeds:
        path = trace_path(cfg, seed)
        write_trace(generate_trace(sc.world, sc.plan, cfg.horizon, seed), path)
        paths.append(path)
    log.info("wrote %d traces to %s", len(paths), cfg.trace_dir)
    return paths


def load_traces(cfg: ExperimentConfig):
    traces = []
    for seed in cfg.trace_seeds:
        path = trace_path(cfg, seed)
        if not path.exists():
            raise ConfigError(
                f"missing trace {path}; run `staygo gen-traces --world {cfg.world} "
                f"--traces {cfg.num_traces} --seed {cfg.seed} --out-dir {cfg.out_dir}` first"
            )
        traces.append(read_trace(path))
    return traces


# -- sweeps ------------------------------------------------------------------


def expand(cfg: ExperimentConfig, sweeps: Sequence[SweepSpec] = ()) -> list[ExperimentConfig]:
    """Cross product of the sweep axes over ``cfg``, duplicates removed.

    Benchmark policies ignore H, estimator and reset, so those collapse.
    """
    axes = {s.axis: s.values for s in sweeps}
    names = list(axes)
    out, seen = [], set()
    for combo in itertools.product(*(axes[n] for n in names)):
        updates = {}
        for name, value in zip(names, combo):
            if name == "procT":
                updates["timing"] = replace(cfg.timing, procT=value)
            else:
                updates[name] = value
        c = replace(cfg, **updates)
        if c.policy != "learn":
            c = replace(c, H=None, estimator="tree", reset="none")
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def run_config(cfg: ExperimentConfig, traces=None) -> ExperimentResult:
    sc = load_scenario(cfg.scenario, cfg.world, timing=cfg.timing, kinematics=cfg.kinematics)
    if traces is None:
        traces = load_traces(cfg)
    return run_experiment(
        sc.plan,
        sc.world,
        traces,
        policy=cfg.policy,
        estimator=cfg.estimator,
        H=cfg.H,
        reset=cfg.reset,
        days=cfg.horizon,
        timing=cfg.timing,
        kinematics=cfg.kinematics,
        features=cfg.features,
        random_seed=cfg.seed,
        scenario=cfg.scenario,
        world_kind=cfg.world,
    )


def result_rows(res: ExperimentResult) -> list[dict]:
    rows = []
    ri = res.ri
    for t, seed in enumerate(res.trace_seeds):
        for day in range(res.mission_time.shape[1]):
            rows.append(
                {
                    "scenario": res.scenario,
                    "world": res.world,
                    "policy": res.policy,
                    "estimator": res.estimator,
                    "H": fmt_H(res.H) if res.policy == "learn" else "-",
                    "reset": res.reset,
                    "trace_seed": seed,
                    "day": day,
                    "mission_time_s": float(res.mission_time[t, day]),
                    "total_penalty_s": float(res.total_penalty[t, day]),
                    "ri": float(ri[t, day]),
                    "procT": float(res.procT),
                    "reset_checked": int(res.reset_checked[t, day]),
                    "reset_fired": int(res.reset_fired[t, day]),
                }
            )
    return rows


_SORT_KEY = ("scenario", "world", "policy", "estimator", "H", "reset", "procT", "trace_seed", "day")


def _sort_key(row):
    return tuple(_H_order(row[k]) if k == "H" else row[k] for k in _SORT_KEY)


def _H_order(h: str):
    return (1, 0) if h == "inf" else (0, int(h)) if h.isdigit() else (-1, 0)


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in sorted(rows, key=_sort_key):
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def read_results(path: str | os.PathLike) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RESULT_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"{path}: malformed results CSV, missing columns {sorted(missing)}")
        rows = []
        for i, raw in enumerate(reader, start=2):
            try:
                rows.append(
                    {
                        **raw,
                        "trace_seed": int(raw["trace_seed"]),
                        "day": int(raw["day"]),
                        "mission_time_s": float(raw["mission_time_s"]),
                        "total_penalty_s": float(raw["total_penalty_s"]),
                        "ri": float(raw["ri"]),
                        "procT": float(raw["procT"]),
                        "reset_checked": int(raw["reset_checked"]),
                        "reset_fired": int(raw["reset_fired"]),
                    }
                )
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{path}:{i}: malformed row ({exc})") from exc
    return rows


def cmd_run(
    cfg: ExperimentConfig,
    sweeps: Sequence[SweepSpec] = (),
    policies: Sequence[str] | None = None,
    scenarios: Sequence[str] | None = None,
    svg_out: bool = False,
) -> Path:
    """Run the sweep cross product and write ``results.csv`` (and charts)."""
    sweeps = list(sweeps)
    if policies:
        sweeps = [s for s in sweeps if s.axis != "policy"] + [SweepSpec("policy", tuple(policies))]
    rows: list[dict] = []
    cache: dict = {}
    for scen in scenarios or [cfg.scenario]:
        for c in expand(replace(cfg, scenario=scen), sweeps):
            key = (c.world, c.seed, c.num_traces)
            if key not in cache:
                cache[key] = load_traces(c)
            log.info("running %s/%s %s", c.scenario, c.world, _label_cfg(c))
            rows.extend(result_rows(run_config(c, cache[key])))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "results.csv"
    atomic_write_text(path, rows_to_csv(rows))
    if svg_out:
        write_charts(rows, out)
    return path


def _label_cfg(c: ExperimentConfig) -> str:
    if c.policy != "learn":
        return f"{c.policy} procT={c.timing.procT:g}"
    return f"learn {c.estimator} H={fmt_H(c.H)} {c.reset} procT={c.timing.procT:g}"


# -- reporting ---------------------------------------------------------------

CONFIG_KEYS = ("scenario", "world", "policy", "estimator", "H", "reset", "procT")
SUMMARY_COLUMNS = (
    *CONFIG_KEYS,
    "traces",
    "ri_steady",
    "ri_pre_change",
    "ri_post_change",
    "mission_time_steady_s",
    "reset_checks",
    "false_resets",
    "fpr",
    "improvement_vs_wait",
    "improvement_vs_go",
    "improvement_vs_random",
)


def config_label(key: dict) -> str:
    if key["policy"] != "learn":
        return key["policy"]
    return f"{key['estimator']} H={key['H']} {key['reset']}"


def summarize(rows: Iterable[dict], change_day: int = 21) -> list[dict]:
    """Per-configuration aggregates.

    Steady-state means use days >= 12 (and, in the changing world, days
    before the change). Resets fired before the change day, or at any time
    in the stable world, count as false positives.
    """
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = tuple(row[k] for k in CONFIG_KEYS)
        groups.setdefault(key, []).append(row)
    summary = []
    for key in sorted(groups, key=lambda k: _sort_key(dict(zip(CONFIG_KEYS, k), trace_seed=0, day=0))):
        g = groups[key]
        k = dict(zip(CONFIG_KEYS, key))
        changing = k["world"] == "changing"
        days = np.array([r["day"] for r in g])
        ri = np.array([r["ri"] for r in g])
        mt = np.array([r["mission_time_s"] for r in g])
        checked = np.array([r["reset_checked"] for r in g], dtype=bool)
        fired = np.array([r["reset_fired"] for r in g], dtype=bool)
        steady = days >= STEADY_FROM
        pre = days < change_day if changing else np.ones_like(steady)
        no_change = pre
        n_checks = int((checked & no_change).sum())
        n_false = int((fired & no_change).sum())
        summary.append(
            {
                **k,
                "traces": len({r["trace_seed"] for r in g}),
                "ri_steady": _mean(ri[steady & pre]),
                "ri_pre_change": _mean(ri[steady & pre]) if changing else math.nan,
                "ri_post_change": _mean(ri[days >= change_day]) if changing else math.nan,
                "mission_time_steady_s": _mean(mt[steady & pre]),
                "reset_checks": n_checks,
                "false_resets": n_false,
                "fpr": n_false / n_checks if n_checks else math.nan,
            }
        )
    _add_improvements(summary)
    return summary


def _mean(a: np.ndarray) -> float:
    return float(a.mean()) if a.size else math.nan


def _add_improvements(summary: list[dict]):
    bench = {}
    for s in summary:
        if s["policy"] in ("wait", "go", "random"):
            bench[(s["scenario"], s["world"], s["procT"], s["policy"])] = s["mission_time_steady_s"]
    for s in summary:
        for other in ("wait", "go", "random"):
            ref = bench.get((s["scenario"], s["world"], s["procT"], other))
            col = f"improvement_vs_{other}"
            if s["policy"] == "learn" and ref:
                s[col] = 1.0 - s["mission_time_steady_s"] / ref
            else:
                s[col] = math.nan


def format_table(summary: list[dict]) -> str:
    cols = ("scenario", "world", "config", "procT", "ri_steady", "ri_post_change", "fpr",
            "improvement_vs_wait", "improvement_vs_go", "improvement_vs_random")
    head = ("scenario", "world", "config", "procT", "RI steady", "RI post", "FPR",
            "vs Wait", "vs Go", "vs Random")
    body = []
    for s in summary:
        cells = []
        for c in cols:
            if c == "config":
                cells.append(config_label(s))
            elif c == "procT":
                cells.append(f"{s['procT']:g}")
            elif c in ("scenario", "world"):
                cells.append(s[c])
            else:
                v = s[c]
                cells.append("-" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{100 * v:.2f}%")
        body.append(cells)
    widths = [max(len(r[i]) for r in [head, *body]) for i in range(len(head))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) if i >= 3 else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))) for r in body]
    return "\n".join(lines)


def summary_to_csv(summary: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    w.writeheader()
    for s in summary:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in s.items()})
    return buf.getvalue()


def cmd_report(results_csv: str | os.PathLike, out: str | os.PathLike | None = None) -> tuple[str, list[dict]]:
    """Summarize a results CSV; writes ``summary.csv`` next to it (or to ``out``)."""
    rows = read_results(results_csv)
    if not rows:
        raise ConfigError(f"{results_csv}: no result rows")
    summary = summarize(rows)
    dest = Path(out) if out else Path(results_csv).with_name("summary.csv")
    atomic_write_text(dest, summary_to_csv(summary))
    return format_table(summary), summary


# -- charts ------------------------------------------------------------------


def write_charts(rows: list[dict], out_dir: Path) -> list[Path]:
    """One RI-vs-day chart per (scenario, world, procT) and a procT bar chart."""
    out_dir = Path(out_dir)
    paths = []
    panels: dict[tuple, dict[str, dict[int, list[float]]]] = {}
    for r in rows:
        panel = panels.setdefault((r["scenario"], r["world"], r["procT"]), {})
        panel.setdefault(config_label(r), {}).setdefault(r["day"], []).append(r["ri"])
    for (scen, world, procT), series in sorted(panels.items()):
        lines = {
            label: [(d, float(np.mean(v))) for d, v in sorted(by_day.items())]
            for label, by_day in series.items()
        }
        path = out_dir / f"ri_{scen}_{world}_procT{procT:g}.svg"
        atomic_write_text(path, svg.line_chart(lines, f"{scen}, {world} world, procT={procT:g} s", "day", "RI"))
        paths.append(path)
    summary = summarize(rows)
    procTs = sorted({s["procT"] for s in summary})
    if len(procTs) > 1:
        for scen in sorted({s["scenario"] for s in summary}):
            groups = {}
            for s in summary:
                if s["scenario"] == scen and s["world"] == "stable":
                    groups.setdefault(f"{s['procT']:g} s", {})[config_label(s)] = s["mission_time_steady_s"] / 60.0
            if groups:
                path = out_dir / f"procT_{scen}.svg"
                atomic_write_text(path, svg.bar_chart(groups, f"{scen}: mission time, days 12-30", "minutes"))
                paths.append(path)
    return paths
