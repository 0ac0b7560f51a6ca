"""
Wait or go
==========

Waiting saves the turn-back penalty when an event shows up; going saves
the processing time when none does. The drone picks the larger expected
saving, and waits on a tie.
"""

import numpy as np

from staygo import DecisionInputs, KinematicParams, Policy, decide, expected_saving, penalty_time
from staygo.decision import indifference_prob

procT = 10.0
penalty = penalty_time(50.0, procT, KinematicParams())
p_star = indifference_prob(penalty, procT)
print(f"penalty {penalty:.1f} s, go below p* = {p_star:.3f}")

learn = Policy("learn")
for p in np.linspace(0, 1, 11):
    inp = DecisionInputs(p, penalty, procT)
    e0, e1 = expected_saving(0, inp), expected_saving(1, inp)
    print(f"p={p:.1f}  E(wait)={e0:5.2f}  E(go)={e1:5.2f}  ->  {'go' if decide(learn, inp) else 'wait'}")

# before any experience exists the learner behaves like Wait
print(decide(learn, DecisionInputs(None, penalty, procT)))
