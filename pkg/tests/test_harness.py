import math
from dataclasses import replace

import pytest

from staygo.cli import main
from staygo.harness import (
    RESULT_COLUMNS,
    ExperimentConfig,
    SweepSpec,
    cmd_gen_traces,
    cmd_report,
    cmd_run,
    dump_config,
    expand,
    load_config,
    read_results,
    result_rows,
    run_config,
    summarize,
)
from staygo.sim import TimingParams
from staygo.world import ConfigError


@pytest.fixture
def small(tmp_path):
    return ExperimentConfig(days=14, num_traces=2, seed=5, out_dir=str(tmp_path))


def test_default_config_writes_twenty(tmp_path):
    cfg = ExperimentConfig(days=1, out_dir=str(tmp_path))
    paths = cmd_gen_traces(cfg)
    assert len(paths) == 20
    assert sorted(p.name for p in cfg.trace_dir.iterdir()) == sorted(f"trace_{s}.csv" for s in range(20))


def test_gen_traces_idempotent(small):
    first = [p.read_bytes() for p in cmd_gen_traces(small)]
    second = [p.read_bytes() for p in cmd_gen_traces(small)]
    assert first == second


def test_single_trace(tmp_path):
    assert len(cmd_gen_traces(ExperimentConfig(num_traces=1, days=2, out_dir=str(tmp_path)))) == 1


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(num_traces=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(scenario="upside_down")
    with pytest.raises(ConfigError):
        ExperimentConfig(estimator="svm")
    assert ExperimentConfig(world="changing").horizon == 41
    assert ExperimentConfig().horizon == 31


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig(
        scenario="in_out", world="changing", days=20, num_traces=3, seed=9, H=None,
        reset="reset1", timing=TimingParams(procT=12.0), out_dir=str(tmp_path),
    )
    path = tmp_path / "exp.ini"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg
    assert load_config(path, seed=1).seed == 1


def test_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[experiment]\ncolour = blue\n")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


def test_sweep_parse():
    s = SweepSpec.parse("H=8,12,16,20,inf")
    assert s.axis == "H" and s.values == (8, 12, 16, 20, None)
    assert SweepSpec.parse("procT=8,10,12").values == (8.0, 10.0, 12.0)
    for bad in ("H", "speed=1,2", "H=0", "estimator=svm", "procT=-1"):
        with pytest.raises(ConfigError):
            SweepSpec.parse(bad)


def test_expand_collapses_benchmarks():
    cfg = ExperimentConfig()
    configs = expand(cfg, [SweepSpec("policy", ("learn", "wait")), SweepSpec("H", (8, 12))])
    assert len(configs) == 3
    assert sum(c.policy == "wait" for c in configs) == 1


def test_missing_traces_message(small):
    with pytest.raises(ConfigError, match="gen-traces"):
        cmd_run(small)


def test_run_and_report(small):
    cmd_gen_traces(small)
    path = cmd_run(small, [SweepSpec("policy", ("learn", "wait", "go", "oracle"))], svg_out=True)
    rows = read_results(path)
    assert path.read_text().splitlines()[0] == ",".join(RESULT_COLUMNS)
    assert len(rows) == 4 * 2 * 14
    table, summary = cmd_report(path)
    assert (path.parent / "summary.csv").exists()
    assert "oracle" in table
    by_policy = {s["policy"]: s for s in summary}
    assert by_policy["oracle"]["ri_steady"] == 0.0
    assert not math.isnan(by_policy["learn"]["improvement_vs_wait"])
    assert list(path.parent.glob("ri_*.svg"))


def test_summary_round_trip(small):
    cmd_gen_traces(small)
    cfg = replace(small, reset="reset1", H=4)
    path = cmd_run(cfg, [SweepSpec("policy", ("learn", "wait"))])
    in_memory = result_rows(run_config(cfg)) + result_rows(run_config(replace(cfg, policy="wait")))
    from_disk = summarize(read_results(path))
    assert from_disk == summarize(in_memory)
    assert len(from_disk) == 2


def test_procT_sweep_regenerates_start_hours(small):
    cmd_gen_traces(small)
    path = cmd_run(replace(small, scenario="out_in"), [SweepSpec("procT", (8.0, 12.0)),
                                                       SweepSpec("policy", ("wait",))])
    rows = read_results(path)
    assert {r["procT"] for r in rows} == {8.0, 12.0}


def test_malformed_results(tmp_path):
    path = tmp_path / "results.csv"
    path.write_text("scenario,world\nout,stable\n")
    with pytest.raises(ConfigError):
        cmd_report(path)


def test_cli_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["gen-traces", "--traces", "2", "--days", "3", "--out-dir", out]) == 0
    assert main(["run", "--traces", "2", "--days", "3", "--out-dir", out, "--policy", "all",
                 "--scenario", "all"]) == 0
    assert main(["report", f"{out}/results.csv"]) == 0
    assert "vs Wait" in capsys.readouterr().out
    assert main(["run", "--traces", "2", "--days", "3", "--out-dir", out, "--procT", "20"]) == 2
    assert "procT" in capsys.readouterr().err
    assert main(["run", "--traces", "3", "--days", "3", "--out-dir", out]) == 2
    assert main(["run", "--out-dir", out, "--sweep", "H=zero"]) == 2
    with pytest.raises(SystemExit):
        main(["run", "--policy", "sometimes"])


def test_cli_config_file(tmp_path):
    cfg = ExperimentConfig(days=2, num_traces=1, out_dir=str(tmp_path))
    ini = tmp_path / "exp.ini"
    ini.write_text(dump_config(cfg))
    assert main(["gen-traces", "--config", str(ini)]) == 0
    assert main(["run", "--config", str(ini), "--H", "inf"]) == 0
    rows = read_results(tmp_path / "results.csv")
    assert {r["H"] for r in rows} == {"inf"}
