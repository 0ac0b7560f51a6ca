import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from staygo.kinematics import KinematicParams, flight_time, penalty_time, position_after

K = KinematicParams(cruise_speed=4.0, accel=2.0, turnaround_overhead=0.0)
DT = 1e-4


def simulate_leg(distance, k, dt=DT, stop_after=None):
    """Time-stepped bang-bang flight: speed up, cruise, brake in time.

    Returns (time, position, speed) on arrival or at ``stop_after`` seconds.
    """
    t = x = v = 0.0
    while True:
        if stop_after is not None and t >= stop_after - dt / 2:
            return t, x, v
        remaining = distance - x
        if remaining <= 1e-9 and v <= 1e-9:
            return t, x, v
        if v * v / (2 * k.accel) >= remaining:
            a = -k.accel
        elif v < k.cruise_speed:
            a = k.accel
        else:
            a = 0.0
        v_new = min(max(v + a * dt, 0.0), k.cruise_speed)
        x += 0.5 * (v + v_new) * dt
        v = v_new
        t += dt
        if v == 0.0 and x >= distance - 1e-6:
            return t, x, v


def simulate_turn_back(distance, proc_time, k):
    """Fly out for proc_time, brake to a stop, fly back to the start."""
    _, x, v = simulate_leg(distance, k, stop_after=proc_time)
    t_brake = 0.0
    while v > 0:
        v_new = max(v - k.accel * DT, 0.0)
        x += 0.5 * (v + v_new) * DT
        v = v_new
        t_brake += DT
    t_back, _, _ = simulate_leg(x, k)
    return t_brake + k.turnaround_overhead + t_back


def test_zero_distance():
    assert flight_time(0.0, K) == 0.0


def test_trapezoid_example():
    oracle, _, _ = simulate_leg(50.0, K)
    assert oracle == pytest.approx(14.5, abs=2e-3)
    assert flight_time(50.0, K) == pytest.approx(14.5, abs=1e-12)


def test_triangle_example():
    oracle, _, _ = simulate_leg(2.0, K)
    assert oracle == pytest.approx(2.0, abs=2e-3)
    assert flight_time(2.0, K) == pytest.approx(2.0, abs=1e-12)


def test_negative_distance_rejected():
    with pytest.raises(ValueError):
        flight_time(-1.0, K)


@pytest.mark.parametrize("d", [0.5, 3.0, 8.0, 20.0, 137.0])
def test_flight_time_matches_time_stepping(d):
    oracle, _, _ = simulate_leg(d, K)
    assert flight_time(d, K) == pytest.approx(oracle, abs=5e-3)


def test_continuous_at_profile_boundary():
    d = K.ramp_distance
    tri = 2 * math.sqrt(d / K.accel)
    trap = d / K.cruise_speed + K.cruise_speed / K.accel
    assert tri == pytest.approx(trap, abs=1e-12)
    assert flight_time(d - 1e-9, K) == pytest.approx(flight_time(d, K), abs=1e-6)


@given(st.floats(0, 500), st.floats(0, 500))
def test_flight_time_monotone(a, b):
    lo, hi = sorted((a, b))
    assert flight_time(lo, K) <= flight_time(hi, K) + 1e-12


def test_position_examples():
    assert position_after(0.0, 50.0, K) == (0.0, 0.0)
    x, v = position_after(10.0, 50.0, K)
    assert x == pytest.approx(36.0, abs=1e-12)
    assert v == pytest.approx(4.0, abs=1e-12)
    _, xo, vo = simulate_leg(50.0, K, stop_after=10.0)
    assert (x, v) == pytest.approx((xo, vo), abs=2e-3)


@given(st.floats(0.0, 300.0))
def test_position_at_arrival(d):
    x, v = position_after(flight_time(d, K), d, K)
    assert x == pytest.approx(d, abs=1e-9)
    assert v == pytest.approx(0.0, abs=1e-9)


@given(st.floats(0.1, 300.0), st.floats(0.0, 1.0))
def test_position_bounds(d, frac):
    x, v = position_after(frac * flight_time(d, K), d, K)
    assert -1e-12 <= x <= d + 1e-9
    assert 0 <= v <= K.cruise_speed + 1e-12


def test_position_out_of_range():
    with pytest.raises(ValueError):
        position_after(20.0, 50.0, K)
    with pytest.raises(ValueError):
        position_after(-0.1, 50.0, K)


def test_penalty_example():
    assert penalty_time(50.0, 10.0, K) == pytest.approx(14.0, abs=1e-12)
    assert simulate_turn_back(50.0, 10.0, K) == pytest.approx(14.0, abs=5e-3)


def test_penalty_with_turnaround():
    k = KinematicParams(cruise_speed=4.0, accel=2.0, turnaround_overhead=2.0)
    assert penalty_time(50.0, 10.0, k) == pytest.approx(16.0, abs=1e-12)


@pytest.mark.parametrize("d,proc", [(50.0, 1.0), (50.0, 13.0), (6.0, 2.0), (100.0, 12.0)])
def test_penalty_matches_time_stepping(d, proc):
    assert penalty_time(d, proc, K) == pytest.approx(simulate_turn_back(d, proc, K), abs=1e-2)


def test_penalty_vanishes_for_tiny_proc():
    assert penalty_time(50.0, 1e-9, K) < 1e-6


def test_penalty_precondition():
    with pytest.raises(ValueError):
        penalty_time(50.0, 14.5, K)


# braking towards the next waypoint starts at 14.5 - 2 = 12.5 s on a 50 m leg
@given(st.floats(0.01, 12.5), st.floats(0.01, 12.5))
def test_penalty_monotone_until_braking(a, b):
    lo, hi = sorted((a, b))
    assert 0 < penalty_time(50.0, lo, K) <= penalty_time(50.0, hi, K) + 1e-12


@given(st.floats(0.01, 14.49))
def test_penalty_positive(proc):
    assert penalty_time(50.0, proc, K) > 0


def test_penalty_drops_once_braking():
    # already slowing down to arrive, so stopping costs less
    assert penalty_time(50.0, 14.0, K) == pytest.approx(15.0, abs=1e-12)
    assert simulate_turn_back(50.0, 14.0, K) == pytest.approx(15.0, abs=1e-2)
    assert penalty_time(50.0, 14.0, K) < penalty_time(50.0, 12.0, K)


def test_params_validated():
    with pytest.raises(ValueError):
        KinematicParams(cruise_speed=0)
    with pytest.raises(ValueError):
        KinematicParams(accel=-1)
    with pytest.raises(ValueError):
        KinematicParams(land_time=-1)
