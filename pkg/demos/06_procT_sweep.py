"""
Longer processing, bigger savings
=================================

The slower onboard processing is, the more there is to gain by leaving
early when nothing is expected. Run the harness end to end: write traces,
sweep procT, then summarize the CSV.
"""

import tempfile

from staygo.harness import ExperimentConfig, SweepSpec, cmd_gen_traces, cmd_report, cmd_run

out = tempfile.mkdtemp(prefix="staygo-")
cfg = ExperimentConfig(scenario="out", num_traces=5, H=12, reset="reset1", out_dir=out)
cmd_gen_traces(cfg)

path = cmd_run(
    cfg,
    [SweepSpec("procT", (8.0, 10.0, 12.0)), SweepSpec("policy", ("learn", "wait", "go"))],
    svg_out=True,
)
table, summary = cmd_report(path)
print(table)
print("charts and CSVs in", out)
