import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from hipo_sim.errors import InvariantError
from hipo_sim.model import (ContactMode, ContactParams, ModelParams, Regime, SimState,
                            contact_force, cover_tip_position, derivatives, f_out, gap,
                            mass_to_inertia, rest_state, uncovered_equilibrium)


def test_cover_tip_position(simple_params):
    p = simple_params
    assert cover_tip_position(SimState(theta=0.0), p) == pytest.approx(0.1)
    assert cover_tip_position(SimState(theta=math.pi / 2), p) == pytest.approx(1.1)
    q = p.replace(l_cover=0.5)
    assert abs(cover_tip_position(SimState(theta=0.02), q) - 0.109999) < 1e-6


@pytest.mark.parametrize("x, expected", [(0.0, 0.05), (0.05, 0.0), (0.08, -0.03)])
def test_gap(simple_params, x, expected):
    assert gap(SimState(x_ball=x), simple_params) == pytest.approx(expected, abs=1e-15)


def test_f_out_examples(simple_params):
    p = simple_params
    # gap = 0.01 with x_ball = 0.2 needs the tip at 0.26
    q = p.replace(h=0.26)
    s = SimState(x_ball=0.2)
    assert gap(s, q) == pytest.approx(0.01)
    assert f_out(s, q) == pytest.approx(-10.0)
    assert f_out(SimState(x_ball=0.051), p) == 0.0
    assert f_out(SimState(), p.replace(s_d=1e6)) == 0.0


def test_contact_force_examples(simple_params):
    p = simple_params.replace(k_contact=1e4, c_contact=10.0)
    assert contact_force(SimState(x_ball=0.04), p) == (0.0, 0.0)
    fb, tq = contact_force(SimState(x_ball=0.051), p)
    assert fb == pytest.approx(-10.0)
    assert tq == pytest.approx(10.0)
    # gap rate +0.5 (opening): damping must not add adhesion
    s = SimState(x_ball=0.051, v_ball=-0.5)
    fb, _ = contact_force(s, p)
    assert abs(fb) == pytest.approx(10.0)


def test_contact_force_rejects_impulse_mode(simple_params):
    with pytest.raises(ValueError):
        contact_force(SimState(), simple_params.replace(mode=ContactMode.IMPULSE))


def test_derivatives_examples(simple_params):
    p = simple_params
    assert np.all(derivatives(rest_state(), p.replace(f_in=0.0)) == 0.0)
    assert derivatives(rest_state(), p)[1] == pytest.approx(10.0)
    x_star = uncovered_equilibrium(p.replace(h=10.0))
    assert derivatives(SimState(x_ball=x_star), p.replace(h=10.0))[1] == pytest.approx(0, abs=1e-12)


def test_uncovered_equilibrium_examples(simple_params):
    p = simple_params
    assert uncovered_equilibrium(p.replace(f_in=10, k_ball=100, s_d=100)) == pytest.approx(0.05)
    assert uncovered_equilibrium(p.replace(f_in=0.0)) == 0.0
    assert uncovered_equilibrium(p.replace(f_in=10, k_ball=100, s_d=0)) == pytest.approx(0.1)


def test_mass_to_inertia():
    assert mass_to_inertia(3.0, 1.0) == pytest.approx(1.0)
    assert mass_to_inertia(0.3, 0.5) == pytest.approx(0.025)
    with pytest.raises(InvariantError):
        mass_to_inertia(1.0, 0.0)


def test_m_cover_round_trip(simple_params):
    q = simple_params.replace(m_cover=0.42)
    assert q.m_cover == pytest.approx(0.42)


@pytest.mark.parametrize("field, value", [
    ("m_ball", 0.0), ("i_cover", -1.0), ("k_ball", 0.0), ("k_cover", 0.0), ("l_cover", 0.0),
    ("c_ball", -1.0), ("c_cover", -0.1), ("s_d", -1.0), ("f_in", -1.0), ("x_size", -0.1),
    ("h", 0.01), ("f_in", float("nan")),
])
def test_model_invariants_name_the_field(simple_params, field, value):
    with pytest.raises(InvariantError) as info:
        simple_params.replace(**{field: value})
    assert field in str(info.value)


@pytest.mark.parametrize("kwargs, field", [
    ({"k_contact": 0.0}, "k_contact"), ({"c_contact": -1.0}, "c_contact"),
    ({"restitution": 1.5}, "restitution"), ({"restitution": -0.1}, "restitution"),
])
def test_contact_invariants(kwargs, field):
    with pytest.raises(InvariantError, match=field):
        ContactParams(**kwargs)


states = st.builds(
    SimState,
    x_ball=st.floats(-0.5, 0.5), v_ball=st.floats(-5, 5),
    theta=st.floats(-1.4, 1.4), omega=st.floats(-5, 5))


@given(states)
def test_f_out_switch(simple_params, s):
    g = gap(s, simple_params)
    if g < 0:
        assert f_out(s, simple_params) == 0.0
    else:
        assert f_out(s, simple_params) == -simple_params.s_d * s.x_ball


@given(states)
def test_derivatives_deterministic(simple_params, s):
    a = derivatives(s, simple_params)
    b = derivatives(s, simple_params)
    assert a.tobytes() == b.tobytes()


@given(st.floats(0, 1e3))
def test_rest_is_fixed_point_without_input(t):
    p = ModelParams(m_ball=1, k_ball=50, c_ball=1, i_cover=0.2, k_cover=2, c_cover=0.1,
                    f_in=0.0, s_d=30, x_size=0.05, h=0.05, l_cover=1)
    assert np.all(derivatives(rest_state(t), p) == 0.0)


@given(states, st.floats(0.0, 50.0))
def test_contact_never_pulls(simple_params, s, c_contact):
    p = simple_params.replace(c_contact=c_contact)
    fb, tq = contact_force(s, p)
    assert fb <= 0.0
    assert tq >= 0.0


@settings(max_examples=50)
@given(st.floats(0.1, 100), st.floats(1, 1000), st.floats(0, 1000))
def test_uncovered_equilibrium_is_unique_root(f_in, k_ball, s_d):
    p = ModelParams(m_ball=1, k_ball=k_ball, c_ball=1, i_cover=0.1, k_cover=1, c_cover=0,
                    f_in=f_in, s_d=s_d, x_size=0.0, h=1e9, l_cover=1)

    def accel(x):
        return derivatives(SimState(x_ball=x), p)[1]

    # linear, decreasing position equation: a bracket around the root has one zero
    lo, hi = -10 * f_in / k_ball, 10 * f_in / k_ball
    assert accel(lo) > 0 > accel(hi)
    root = brentq(accel, lo, hi, xtol=1e-15)
    assert uncovered_equilibrium(p) == pytest.approx(root, rel=1e-9)


def test_regime_selects_branch(simple_params):
    # inside the cover the contact branch adds a restoring push on the ball
    s_sep = SimState(x_ball=0.051, regime=Regime.SEPARATED)
    s_con = SimState(x_ball=0.051, regime=Regime.IN_CONTACT)
    assert derivatives(s_con, simple_params)[1] < derivatives(s_sep, simple_params)[1]
