"""
One mission over the 50-waypoint grid
=====================================

Fly the out-in scenario once with each benchmark policy against the same
trace and look at where time goes.
"""

from staygo import Policy, TimingParams, builtin_scenario, generate_trace, run_mission
from staygo.kinematics import KinematicParams
from staygo.world import truth_table

plan, world = builtin_scenario("out_in")
h = int(plan.start_hour)
m = round((plan.start_hour - h) * 60)
print(f"start {h:02d}:{m:02d}, {len(plan.interior)} waypoints")

trace = generate_trace(world, plan, days=1, seed=3)
truth = truth_table(world, plan, 1)[0]
timing, k = TimingParams(), KinematicParams()

for kind in ("wait", "go", "random", "oracle"):
    probs = truth if kind == "oracle" else None
    rep = run_mission(plan, timing, k, Policy(kind, seed=1), probs, trace, day=0)
    print(
        f"{kind:>6}: {rep.mission_time / 60:6.2f} min, "
        f"penalties {rep.total_penalty:6.1f} s, {rep.decisions_summary}"
    )

# the oracle waits over waypoints that are likely to need an action
rep = run_mission(plan, timing, k, Policy("oracle"), truth, trace, day=0)
for v in rep.visits[15:25]:
    print(v.wp_id, v.hour, "go" if v.decision else "wait", "event" if v.event else "-")
