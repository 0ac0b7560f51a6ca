"""
Learning in a stable world
==========================

Repeat the same mission for 31 days. The learner starts out waiting, then
refits a regression tree on its experience before every flight. How fast it
approaches the oracle depends on the memory size H.
"""

from staygo import builtin_scenario, generate_trace, run_experiment

plan, world = builtin_scenario("out")
traces = [generate_trace(world, plan, 31, seed) for seed in range(8)]

for H in (8, 12, None):
    res = run_experiment(plan, world, traces, policy="learn", estimator="tree", H=H, days=31)
    ri = res.ri_by_day()
    label = "inf" if H is None else H
    print(f"H={label}: day 0 {100 * ri[0]:.1f}%, day 5 {100 * ri[5]:.2f}%, "
          f"days 12-30 {100 * res.mean_ri(12, 30):.2f}%")

for kind in ("wait", "go", "random"):
    res = run_experiment(plan, world, traces, policy=kind, days=31)
    print(f"{kind:>6}: {100 * res.mean_ri(12, 30):.2f}%")
