"""
When the world changes
======================

On day 21 the two regions swap probabilities. A drone that never forgets
keeps trusting stale experience; one that resets its memory after an
unusually bad day relearns quickly.
"""

import numpy as np

from staygo import builtin_scenario, generate_trace, run_experiment

plan, world = builtin_scenario("in_out", "changing")
traces = [generate_trace(world, plan, 41, seed) for seed in range(8)]

runs = {
    "H=inf": dict(H=None),
    "H=12 reset1": dict(H=12, reset="reset1"),
    "H=12 reset2": dict(H=12, reset="reset2"),
}
np.set_printoptions(precision=3, suppress=True)
for label, kw in runs.items():
    res = run_experiment(plan, world, traces, policy="learn", days=41, **kw)
    print(label)
    print("  RI days 18-33:", res.ri_by_day()[18:34])
    fired = np.argwhere(res.reset_fired)
    print("  resets (trace, day):", [(int(t), int(d)) for t, d in fired[:8]])
