import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirposc import Constant, Exponential, Modulated, SimulationWindow, solve_modes
from chirposc.analytic import ExpChirpParams, exp_modes_exact
from chirposc.dopri import StepSizeError, dopri54
from chirposc.modes import (
    POINTS_PER_PERIOD,
    quintic_hermite,
    rotate_modes,
    solve_trajectory,
    wronskian_deviation,
)
from chirposc.profiles import ProfileError, Sampled

from .conftest import PROFILE_MATRIX


def test_initial_conditions(matrix_solutions):
    for sol in matrix_solutions.values():
        assert (sol.h[0], sol.hdot[0], sol.g[0], sol.gdot[0]) == (1.0, 0.0, 0.0, 1.0)
        assert sol.f[0] == 1.0
        assert sol.fdot[0] == -1j * sol.nu0


@pytest.mark.parametrize("name", list(PROFILE_MATRIX))
def test_wronskian_conserved(matrix_solutions, name):
    assert wronskian_deviation(matrix_solutions[name]) <= 1e-9


def test_constant_profile_is_cos_sin(constant_t50):
    sol = constant_t50
    t = sol.times
    np.testing.assert_allclose(sol.h, np.cos(t), atol=1e-10)
    np.testing.assert_allclose(sol.g, np.sin(t), atol=1e-10)
    np.testing.assert_allclose(sol.h**2 + sol.g**2, 1.0, atol=1e-10)


def test_constant_profile_other_frequency():
    nu0 = 3.7
    sol = solve_modes(Constant(nu0), SimulationWindow(20.0))
    np.testing.assert_allclose(sol.h, np.cos(nu0 * sol.times), atol=1e-10)
    np.testing.assert_allclose(sol.g, np.sin(nu0 * sol.times) / nu0, atol=1e-10)
    np.testing.assert_allclose(sol.h**2 + nu0**2 * sol.g**2, 1.0, atol=1e-10)


def test_exponential_matches_bessel_solution():
    p = ExpChirpParams(100.0, 1.0, 5.0)
    sol = solve_modes(p.profile(), SimulationWindow(p.T))
    h, hdot, g, gdot = exp_modes_exact(p, sol.times, derivatives=True)
    nu = p.nu(sol.times)
    # relative to the local oscillation amplitude, so zeros of h and g do not blow up the ratio
    amp_h = np.sqrt(h**2 + (hdot / nu) ** 2)
    amp_g = np.sqrt(g**2 + (gdot / nu) ** 2)
    assert np.max(np.abs(sol.h - h) / amp_h) <= 1e-6
    assert np.max(np.abs(sol.g - g) / amp_g) <= 1e-6


def test_grid_resolves_fastest_oscillation(exp100_t12):
    steps = np.diff(exp100_t12.times)
    assert steps.max() <= 2 * math.pi / (POINTS_PER_PERIOD * 100.0) * (1 + 1e-12)


def test_sampled_grid_hits_knots(matrix_solutions):
    sol = matrix_solutions["sampled"]
    for t in (5.0, 12.0):
        assert t in sol.times


def test_dense_output_between_nodes(constant_t50):
    sol = constant_t50
    mid = 0.5 * (sol.times[1:] + sol.times[:-1])
    h, hdot, g, gdot = sol.evaluate(mid)
    np.testing.assert_allclose(h, np.cos(mid), atol=1e-9)
    np.testing.assert_allclose(hdot, -np.sin(mid), atol=1e-9)
    np.testing.assert_allclose(g, np.sin(mid), atol=1e-9)
    np.testing.assert_allclose(gdot, np.cos(mid), atol=1e-9)
    np.testing.assert_allclose(sol(mid), np.exp(-1j * mid), atol=1e-9)


def test_dense_output_reproduces_nodes(exp100_t12):
    sol = exp100_t12
    h, _, g, _ = sol.evaluate(sol.times[::97])
    np.testing.assert_allclose(h, sol.h[::97], rtol=0, atol=1e-13)
    np.testing.assert_allclose(g, sol.g[::97], rtol=0, atol=1e-13)


def test_quintic_hermite_exact_for_quintics():
    times = np.array([0.0, 0.7, 1.5, 3.0])
    c = [0.3, -1.2, 0.5, 2.0, -0.4, 0.07]
    poly = np.polynomial.Polynomial(c)
    t = np.linspace(0, 3, 41)
    got = quintic_hermite(t, times, poly(times), poly.deriv()(times), poly.deriv(2)(times))
    np.testing.assert_allclose(got, poly(t), atol=1e-12)
    got_d = quintic_hermite(t, times, poly(times), poly.deriv()(times), poly.deriv(2)(times), derivative=True)
    np.testing.assert_allclose(got_d, poly.deriv()(t), atol=1e-11)


def test_out_of_window_evaluation(constant_t50):
    with pytest.raises(ValueError):
        constant_t50.evaluate(50.5)
    with pytest.raises(ValueError):
        constant_t50.f_at(-0.1)


def test_solution_arrays_read_only(constant_t50):
    with pytest.raises(ValueError):
        constant_t50.h[0] = 2.0


def test_wronskian_deviation_of_exact_constant_solution():
    sol = solve_modes(Constant(2.0), SimulationWindow(3.0))
    t = sol.times
    exact = type(sol)(profile=sol.profile, window=sol.window, times=t, h=np.cos(2 * t),
                      hdot=-2 * np.sin(2 * t), g=np.sin(2 * t) / 2, gdot=np.cos(2 * t), nu0=2.0)
    assert wronskian_deviation(exact) < 1e-15


def test_wronskian_deviation_detects_corruption(constant_t50):
    bad = replace(constant_t50, g=2 * constant_t50.g, gdot=2 * constant_t50.gdot)
    assert wronskian_deviation(bad) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("a, b", [(1.0, 0.0), (0.0, 1.0), (0.7, -2.3), (-1.5, 0.4)])
def test_linearity(a, b):
    profile = Modulated(1.0, 0.4, 0.8)
    window = SimulationWindow(25.0)
    sol = solve_modes(profile, window)
    t, q, qdot = solve_trajectory(profile, window, a, b * sol.nu0)
    h, hdot, g, gdot = sol.evaluate(t)
    np.testing.assert_allclose(q, a * h + b * sol.nu0 * g, atol=1e-9)
    np.testing.assert_allclose(qdot, a * hdot + b * sol.nu0 * gdot, atol=1e-9)


def test_rotation_identity(exp100_t12):
    rot = rotate_modes(exp100_t12, 0.0)
    np.testing.assert_array_equal(rot.h, exp100_t12.h)
    np.testing.assert_allclose(rot.g, exp100_t12.g, rtol=1e-15, atol=0)


@pytest.mark.parametrize("phi", [0.3, math.pi / 4, 2.0, -1.1])
def test_rotation_is_a_phase_on_f(exp100_t12, phi):
    rot = rotate_modes(exp100_t12, phi)
    np.testing.assert_allclose(np.abs(rot.f), np.abs(exp100_t12.f), rtol=1e-12)
    np.testing.assert_allclose(rot.f, np.exp(1j * phi) * exp100_t12.f, rtol=1e-12)
    assert wronskian_deviation(rot) <= 1e-9


def test_quarter_rotation(constant_t50):
    sol = constant_t50
    rot = rotate_modes(sol, math.pi / 2)
    np.testing.assert_allclose(rot.h, sol.nu0 * sol.g, atol=1e-15)
    np.testing.assert_allclose(sol.nu0 * rot.g, -sol.h, atol=1e-15)


def test_invalid_profile_window():
    with pytest.raises(ProfileError):
        solve_modes(Sampled(((0.0, 1.0), (1.0, 2.0))), SimulationWindow(2.0))


@pytest.mark.parametrize("kwargs", [{"t_end": 0.0}, {"t_end": 1.0, "rel_tol": 1e-3},
                                    {"t_end": 1.0, "abs_tol": 0.0}, {"t_end": 1.0, "max_step": -1.0}])
def test_window_validation(kwargs):
    with pytest.raises(ValueError):
        SimulationWindow(**kwargs)


def test_user_max_step_respected():
    sol = solve_modes(Constant(1.0), SimulationWindow(5.0, max_step=0.01))
    assert np.diff(sol.times).max() <= 0.01 * (1 + 1e-12)


def test_step_size_underflow_reports_time():
    # y' = y^2 from y(0) = 1 blows up at t = 1
    with pytest.raises(StepSizeError) as info:
        dopri54(lambda t, y: [y[0] * y[0]], 0.0, [1.0], 2.0, rtol=1e-10, atol=1e-12)
    assert info.value.t == pytest.approx(1.0, abs=1e-3)


def test_dopri_exponential_growth():
    times, ys = dopri54(lambda t, y: [y[0]], 0.0, [1.0], 3.0, rtol=1e-12, atol=1e-14)
    assert times[-1] == 3.0
    np.testing.assert_allclose(ys[:, 0], np.exp(times), rtol=1e-10)


@settings(max_examples=15, deadline=None)
@given(ratio=st.floats(min_value=2.0, max_value=60.0), t_end=st.floats(min_value=0.5, max_value=6.0))
def test_wronskian_random_exponential(ratio, t_end):
    sol = solve_modes(Exponential(ratio, 1.0), SimulationWindow(t_end))
    assert wronskian_deviation(sol) <= 1e-9


@settings(max_examples=15, deadline=None)
@given(depth=st.floats(min_value=-0.9, max_value=0.9), mod=st.floats(min_value=0.0, max_value=4.0),
       phi=st.floats(min_value=-math.pi, max_value=math.pi))
def test_rotation_preserves_wronskian_random(depth, mod, phi):
    sol = solve_modes(Modulated(1.0, depth, mod), SimulationWindow(10.0))
    assert wronskian_deviation(rotate_modes(sol, phi)) <= 1e-9
