import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from occupant_dbn.errors import InvalidRatioError, NegativeDtError, NonPositiveVolumeError
from occupant_dbn.physics import (
    FlowPair,
    OpeningGeometry,
    co2_step,
    discretize_co2,
    generation_rate,
    stack_airflow,
    steady_state,
    total_flows,
)

DOOR = OpeningGeometry(2.0, 0.9, 0.6, 1.0, "corridor")


# -- oracles ------------------------------------------------------------------


def quadrature_flows(geom, t_in, t_out, ratio=1.0, g=9.81):
    """Integrate the orifice velocity over the opening height.

    The pressure difference at height z comes from hydrostatics on each
    side, anchored so that it vanishes at the neutral plane.
    """
    rho_in = 101325.0 / (287.05 * (t_in + 273.15))
    rho_out = 101325.0 / (287.05 * (t_out + 273.15))
    rho = 0.5 * (rho_in + rho_out)
    hn = geom.neutral_height

    def dp(z):  # inside minus outside
        return (rho_in - rho_out) * g * (hn - z)

    def speed(z):
        return math.sqrt(2.0 * abs(dp(z)) / rho)

    q_in = q_out = 0.0
    for a, b in ((0.0, hn), (hn, geom.height)):
        if b <= a:
            continue
        q = ratio * geom.cd * geom.width * quad(speed, a, b)[0]
        if dp(0.5 * (a + b)) > 0:
            q_out += q
        else:
            q_in += q
    return q_in, q_out


def euler_co2(c0, q_in, q_out, s, c_supply, volume, duration, h=0.1):
    c = np.asarray(c0, dtype=float)
    for _ in range(int(round(duration / h))):
        c = c + h * (q_in * c_supply + s * 1e6 - q_out * c) / volume
    return c


# -- stack_airflow -------------------------------------------------------------


def test_equal_temperatures_give_no_flow():
    assert stack_airflow(DOOR, 20.0, 20.0, 1.0) == FlowPair(0.0, 0.0)


def test_closed_opening_gives_no_flow():
    assert stack_airflow(DOOR, 25.0, 15.0, 0.0) == FlowPair(0.0, 0.0)


def test_reference_case_against_quadrature():
    q_in, q_out = quadrature_flows(DOOR, 25.0, 15.0)
    # frozen from the quadrature oracle
    assert q_in == pytest.approx(0.2945147519, rel=1e-9)
    f = stack_airflow(DOOR, 25.0, 15.0, 1.0)
    assert f.q_in == pytest.approx(q_in, rel=0.01)
    assert f.q_out == pytest.approx(q_out, rel=0.01)


@pytest.mark.parametrize("hn", [0.3, 1.0, 1.6])
@pytest.mark.parametrize("t_in,t_out", [(25, 15), (18, 24), (21, 20.5)])
def test_offcentre_neutral_plane_against_quadrature(hn, t_in, t_out):
    geom = OpeningGeometry(2.0, 0.9, 0.6, hn)
    q_in, q_out = quadrature_flows(geom, t_in, t_out, 0.4)
    f = stack_airflow(geom, t_in, t_out, 0.4)
    assert f.q_in == pytest.approx(q_in, rel=0.01)
    assert f.q_out == pytest.approx(q_out, rel=0.01)


def test_warm_zone_exhausts_above_neutral_plane():
    geom = OpeningGeometry(2.0, 0.9, 0.6, 0.5)  # small lower band
    f = stack_airflow(geom, 25.0, 15.0)
    assert f.q_out > f.q_in


def test_invalid_ratio():
    with pytest.raises(InvalidRatioError):
        stack_airflow(DOOR, 25, 15, 1.5)
    with pytest.raises(InvalidRatioError):
        stack_airflow(DOOR, 25, 15, -0.1)


temps = st.floats(-10, 40, allow_nan=False)


@given(temps, temps)
def test_antisymmetric_in_temperatures(a, b):
    f = stack_airflow(DOOR, a, b, 0.7)
    g = stack_airflow(DOOR, b, a, 0.7)
    assert f.q_in == pytest.approx(g.q_out, rel=1e-12, abs=1e-15)
    assert f.q_out == pytest.approx(g.q_in, rel=1e-12, abs=1e-15)


@given(temps, temps, st.floats(0, 1))
def test_linear_in_ratio(a, b, r):
    full = stack_airflow(DOOR, a, b, 1.0)
    part = stack_airflow(DOOR, a, b, r)
    assert part.q_in == pytest.approx(r * full.q_in, rel=1e-12, abs=1e-15)
    assert part.q_out == pytest.approx(r * full.q_out, rel=1e-12, abs=1e-15)


@given(temps, temps)
def test_balanced_at_mid_height(a, b):
    f = stack_airflow(DOOR, a, b)
    assert f.q_in == pytest.approx(f.q_out, rel=0.01)


# -- co2_step ------------------------------------------------------------------


def test_equilibrium_is_fixed_point():
    assert co2_step(400.0, FlowPair(0.02, 0.02), 0.0, 400.0, 3600, 50) == pytest.approx(400.0, abs=1e-9)


def test_zero_flow_limit():
    assert co2_step(400.0, FlowPair(0.0, 0.0), 5e-6, 400.0, 3600, 50) == pytest.approx(760.0, abs=1e-9)


def test_against_euler_reference():
    got = co2_step(400.0, FlowPair(0.02, 0.02), 1e-5, 400.0, 3600, 50)
    ref = float(euler_co2(400.0, 0.02, 0.02, 1e-5, 400.0, 50, 3600))
    assert got == pytest.approx(ref, rel=0.005)


def test_small_outflow_is_continuous_with_limit():
    below = co2_step(800.0, FlowPair(5e-10, 5e-10), 1e-5, 400.0, 3600, 50)
    above = co2_step(800.0, FlowPair(2e-9, 2e-9), 1e-5, 400.0, 3600, 50)
    assert below == pytest.approx(above, rel=1e-6)


def test_argument_checks():
    with pytest.raises(NonPositiveVolumeError):
        co2_step(400, FlowPair(), 0, 400, 10, 0)
    with pytest.raises(NegativeDtError):
        co2_step(400, FlowPair(), 0, 400, 0, 50)


positive_q = st.floats(1e-4, 0.2)


@settings(max_examples=200)
@given(
    c=st.floats(0, 5000),
    q_in=positive_q,
    q_out=positive_q,
    s=st.floats(0, 5e-5),
    cs=st.floats(300, 600),
    dt1=st.floats(1, 3600),
    dt2=st.floats(1, 3600),
)
def test_semigroup(c, q_in, q_out, s, cs, dt1, dt2):
    f = FlowPair(q_in, q_out)
    whole = co2_step(c, f, s, cs, dt1 + dt2, 50.0)
    split = co2_step(co2_step(c, f, s, cs, dt1, 50.0), f, s, cs, dt2, 50.0)
    assert split == pytest.approx(whole, rel=1e-9, abs=1e-9)


@given(c=st.floats(0, 5000), q=positive_q, s=st.floats(0, 5e-5), cs=st.floats(300, 600), dt=st.floats(0.1, 1e5))
def test_monotone_approach(c, q, s, cs, dt):
    f = FlowPair(q, q)
    c_inf = steady_state(f, s, cs)
    nxt = co2_step(c, f, s, cs, dt, 50.0)
    lo, hi = min(c, c_inf), max(c, c_inf)
    assert lo - 1e-9 * hi <= nxt <= hi + 1e-9 * hi


def test_steady_state_decreases_with_flow():
    qs = np.linspace(0.001, 0.5, 50)
    ss = [steady_state(FlowPair(q, q), 1e-5, 400.0) for q in qs]
    assert all(a > b for a, b in zip(ss, ss[1:]))


# -- total_flows ---------------------------------------------------------------


def test_single_opening_passthrough():
    door = FlowPair(0.03, 0.04)
    assert total_flows([(door, 500.0), (FlowPair(), 400.0)]) == (0.03, 0.04, 500.0)


def test_supply_is_inflow_weighted():
    q_in, q_out, c = total_flows([(FlowPair(0.01, 0.01), 500.0), (FlowPair(0.01, 0.01), 400.0)])
    assert c == pytest.approx(450.0)
    assert (q_in, q_out) == pytest.approx((0.02, 0.02))


def test_no_inflow_uses_first_boundary():
    assert total_flows([(FlowPair(0, 0.01), 500.0), (FlowPair(0, 0), 400.0)])[2] == 500.0


def test_superposed_steady_state_matches_merged_opening():
    a, b = FlowPair(0.012, 0.012), FlowPair(0.03, 0.03)
    q_in, q_out, cs = total_flows([(a, 520.0), (b, 410.0)])
    s = 2e-5
    merged = (0.012 * 520.0 + 0.03 * 410.0 + s * 1e6) / 0.042
    assert steady_state(FlowPair(q_in, q_out), s, cs) == pytest.approx(merged, rel=1e-12)
    # and the exact step converges there
    assert co2_step(900.0, FlowPair(q_in, q_out), s, cs, 1e6, 50.0) == pytest.approx(merged, rel=1e-9)


# -- generation and levels -----------------------------------------------------


def test_generation_rate():
    assert generation_rate(0) == 0
    assert generation_rate(4, 5e-6) == pytest.approx(2e-5)
    # about 0.3 L/min per sedentary adult
    assert 0.003 < generation_rate(1) * 1000 < 0.007


@pytest.mark.parametrize("c,level", [(800, "low"), (1200, "medium"), (2000, "high"), (999.9, "low"), (1000, "medium"), (1700, "high")])
def test_levels(c, level):
    assert discretize_co2(c) == level


@given(st.floats(0, 5000), st.floats(0, 5000))
def test_levels_monotone(a, b):
    order = {"low": 0, "medium": 1, "high": 2}
    lo, hi = sorted((a, b))
    assert order[discretize_co2(lo)] <= order[discretize_co2(hi)]
