"""Learned wait-or-go decisions for drone sensing missions.

A drone hovering over a point of interest can either wait for onboard
processing to finish or leave immediately and come back if an action turns
out to be needed. This package estimates per-waypoint, per-hour event
probabilities from past missions and picks whichever choice saves more
expected time, and simulates multi-day missions to evaluate that policy
against fixed benchmarks.
"""

from .decision import DecisionInputs, Policy, decide, expected_saving
from .experience import ExperienceMemory, MissionContext, PenaltyLog, reset1_check, reset2_check
from .kinematics import KinematicParams, flight_time, penalty_time, position_after
from .regression import FeatureEncoder, fit
from .scenarios import Scenario, builtin_scenario, load_scenario
from .sim import MissionReport, TimingParams, run_experiment, run_mission
from .world import (
    MissionPlan,
    ProbabilityField,
    Trace,
    Waypoint,
    WorldModel,
    generate_trace,
    true_prob,
)

__version__ = "0.1.0"
