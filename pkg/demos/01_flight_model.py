"""
Flight times and the cost of turning back
=========================================

Every movement delay comes from a trapezoidal speed profile: accelerate
to cruise speed, hold it, brake in time to stop on the next waypoint.
"""

import numpy as np

from staygo import KinematicParams, flight_time, penalty_time, position_after

k = KinematicParams()
print(k)

# short hops never reach cruise speed (triangular profile)
for d in (2.0, 8.0, 25.0, 50.0, 100.0):
    print(f"{d:6.1f} m  ->  {flight_time(d, k):6.2f} s")

# where is the drone 10 s into a 50 m leg?
x, v = position_after(10.0, 50.0, k)
print(f"after 10 s: {x:.1f} m out, moving at {v:.1f} m/s")

# Leaving right after sensing and learning procT seconds later that an
# action is needed means braking, turning and flying back.
for procT in np.arange(2.0, 14.5, 2.0):
    print(f"procT={procT:4.1f} s  penalty={penalty_time(50.0, procT, k):5.2f} s")

# past 12.5 s the drone is already braking for the next waypoint, so the
# penalty shrinks again
