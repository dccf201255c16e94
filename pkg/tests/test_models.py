import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypstab.models import (DEFAULT_STEADY, ModelError, RiemannState, SteadyState, SystemSpec,
                            build_system, cell_centers, euler_system, from_riemann,
                            initial_profiles, saint_venant_system, to_riemann, wave_system)


def test_wave_speeds():
    s = wave_system(2.0)
    assert (s.a_plus, s.a_minus) == (2.0, -2.0)
    assert s.alpha == 2.0 and s.max_speed == 2.0


def test_euler_reference_speeds():
    s = build_system("euler")
    assert s.a_plus == pytest.approx(1.2)
    assert s.a_minus == pytest.approx(-0.8)
    assert s.alpha == pytest.approx(0.8)


def test_saint_venant_reference_speeds():
    s = build_system("saint-venant")
    c = math.sqrt(9.8 * 4.0)
    assert s.a_plus == pytest.approx(2.5 + c)
    assert s.a_minus == pytest.approx(2.5 - c)


def test_supersonic_states_rejected():
    with pytest.raises(ModelError):
        euler_system(SteadyState(1.0, 2.0, 1.0))
    with pytest.raises(ModelError):
        saint_venant_system(SteadyState(1.0, 10.0, 9.8))


def test_bad_speeds_rejected():
    with pytest.raises(ModelError):
        SystemSpec(1.0, 0.5)
    with pytest.raises(ModelError):
        build_system("burgers")


def test_euler_riemann_example():
    steady = DEFAULT_STEADY["euler"]
    s = build_system("euler")
    r = to_riemann((4.0, 0.6), steady, s)
    assert r.u_plus == pytest.approx(0.8)
    assert r.u_minus == pytest.approx(-1.2)


def test_wave_riemann_example():
    s = wave_system()
    steady = DEFAULT_STEADY["wave"]
    w, q = from_riemann(RiemannState(-0.5, 0.5), steady, s)
    assert (w, q) == pytest.approx((-0.5, 0.0))


@given(st.sampled_from(["wave", "euler", "saint-venant"]),
       st.floats(-10, 10), st.floats(-10, 10))
def test_riemann_round_trip(model, dw, dq):
    steady = DEFAULT_STEADY[model]
    s = build_system(model)
    w0, q0 = steady.primary_star + dw, steady.flux_star + dq
    w, q = from_riemann(to_riemann((w0, q0), steady, s), steady, s)
    assert w == pytest.approx(w0, abs=1e-9)
    assert q == pytest.approx(q0, abs=1e-9)


def test_cell_centers():
    assert np.allclose(cell_centers(4), [0.125, 0.375, 0.625, 0.875])
    x = cell_centers(4, include_ghosts=True)
    assert x[0] == -0.125 and x[-1] == 1.125 and x.size == 6


def test_euler_initial_data():
    s = build_system("euler")
    up, um = initial_profiles("euler", np.array([0.5]))
    assert up[0] == pytest.approx(-s.a_minus * math.exp(-0.5) - 3.0)
    assert um[0] == pytest.approx(-s.a_plus * math.exp(-0.5) + 3.0)


def test_saint_venant_initial_data():
    s = build_system("saint-venant")
    up, um = initial_profiles("saint-venant", np.array([0.5]))
    assert up[0] == pytest.approx(10.0 - s.a_minus * 4.5)
    assert um[0] == pytest.approx(10.0 - s.a_plus * 4.5)


def test_wave_initial_variants():
    x = cell_centers(8)
    up, um = initial_profiles("wave", x, "constant")
    assert np.all(up == -0.5) and np.all(um == 0.5)
    up, um = initial_profiles("wave", x, "perturbed")
    bump = np.sin(2 * np.pi * x) / (4 * np.pi)
    assert np.allclose(up, -0.5 + bump) and np.allclose(um, 0.5 + bump)
    with pytest.raises(ModelError):
        initial_profiles("euler", x, "perturbed")


def test_centered_initial_data_has_zero_mean():
    up, um = initial_profiles("euler", cell_centers(16), center=True)
    assert abs(up.mean()) < 1e-14 and abs(um.mean()) < 1e-14
