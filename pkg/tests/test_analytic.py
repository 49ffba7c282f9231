import math
import sys
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirposc import SimulationWindow, solve_modes
from chirposc.analytic import (
    AdiabaticityWarning,
    ExpChirpParams,
    RegimeError,
    adiabatic_conditions,
    adiabatic_in_mode,
    closed_form_probability,
    exp_f_asymptotic,
    exp_modes_exact,
    gamma_ratio_modulus,
    gh_ratio,
    gibbons_hawking_probability,
    mellin_formula,
    mellin_hankel_check,
    sideband_ratio,
)
from chirposc.modes import wronskian_deviation
from chirposc.profiles import Constant

mpmath.mp.dps = 30


def _mellin_exact(s):
    """Analytic Mellin transform of H0^(1) = J0 + i Y0 (mpmath oracle)."""
    s = mpmath.mpc(s)
    mj = 2 ** (s - 1) * mpmath.gamma(s / 2) / mpmath.gamma(1 - s / 2)
    my = -(2 ** (s - 1) / mpmath.pi) * mpmath.gamma(s / 2) ** 2 * mpmath.cos(mpmath.pi * s / 2)
    return complex(mj + 1j * my)


def _mp_modes(p, t):
    z0, z = mpmath.mpf(p.ratio), mpmath.mpf(p.nu0) * mpmath.exp(-p.kappa * t) / p.kappa
    h = mpmath.pi * z0 / 2 * (mpmath.besselj(1, z0) * mpmath.bessely(0, z) - mpmath.bessely(1, z0) * mpmath.besselj(0, z))
    g = mpmath.pi / (2 * p.kappa) * (-mpmath.besselj(0, z0) * mpmath.bessely(0, z)
                                     + mpmath.bessely(0, z0) * mpmath.besselj(0, z))
    return float(h), float(g)


# --- exact modes ----------------------------------------------------------------

def test_exact_modes_initial_conditions():
    for ratio in (3.0, 100.0, 1000.0):
        p = ExpChirpParams(ratio, 1.0, 5.0)
        h, hdot, g, gdot = exp_modes_exact(p, 0.0, derivatives=True)
        assert h == pytest.approx(1.0, abs=1e-10)
        assert g == pytest.approx(0.0, abs=1e-10)
        assert hdot == pytest.approx(0.0, abs=1e-10 * ratio)
        assert gdot == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5, 4.0])
def test_exact_modes_against_mpmath(t):
    p = ExpChirpParams(100.0, 1.0, 5.0)
    h, g = exp_modes_exact(p, t)
    h_ref, g_ref = _mp_modes(p, t)
    assert h == pytest.approx(h_ref, abs=1e-11 * math.sqrt(100 / p.nu(t)))
    assert g == pytest.approx(g_ref, abs=1e-13 * math.sqrt(100 / p.nu(t)))


def test_exact_modes_wronskian():
    p = ExpChirpParams(100.0, 1.0, 8.0)
    t = np.linspace(0, 8, 57)
    h, hdot, g, gdot = exp_modes_exact(p, t, derivatives=True)
    np.testing.assert_allclose(h * gdot - hdot * g, 1.0, atol=1e-10)


def test_exact_modes_match_integrator_at_one_over_kappa():
    p = ExpChirpParams(100.0, 1.0, 1.0)
    sol = solve_modes(p.profile(), SimulationWindow(1.0))
    h, hdot, g, gdot = exp_modes_exact(p, 1.0, derivatives=True)
    nu = p.nu(1.0)
    assert sol.h[-1] == pytest.approx(h, abs=1e-6 * math.hypot(h, hdot / nu))
    assert sol.g[-1] == pytest.approx(g, abs=1e-6 * math.hypot(g, gdot / nu))


def test_exact_modes_domain():
    p = ExpChirpParams(10.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        exp_modes_exact(p, -1.0)
    with pytest.raises(ValueError):
        exp_modes_exact(p, 1e4)


# --- asymptotic Hankel form --------------------------------------------------------

def test_asymptotic_form_regime():
    with pytest.raises(RegimeError):
        exp_f_asymptotic(ExpChirpParams(5.0, 1.0, 1.0), 0.0)


def test_asymptotic_form_at_start():
    p = ExpChirpParams(1000.0, 1.0, 5.0)
    assert abs(exp_f_asymptotic(p, 0.0)) == pytest.approx(1.0, rel=1e-3)


@pytest.mark.parametrize("ratio", [100.0, 1000.0])
def test_asymptotic_modulus_tracks_exact(ratio):
    # only |f| is comparable: the two differ by a constant phase-plane rotation
    t_end = math.log(ratio / 10.0)
    p = ExpChirpParams(ratio, 1.0, t_end)
    t = np.linspace(0, t_end, 301)
    h, g = exp_modes_exact(p, t)
    exact = np.abs(h - 1j * ratio * g)
    approx = np.abs(exp_f_asymptotic(p, t))
    assert np.max(np.abs(approx / exact - 1)) <= 3 / ratio


def test_asymptotic_form_late_times_finite():
    p = ExpChirpParams(100.0, 1.0, 20.0)
    values = np.abs(exp_f_asymptotic(p, np.array([10.0, 15.0, 20.0])))
    assert np.all(np.isfinite(values)) and np.all(np.diff(values) > 0)


def test_in_mode_is_hankel_form():
    p = ExpChirpParams(200.0, 1.0, 6.0)
    sol = adiabatic_in_mode(solve_modes(p.profile(), SimulationWindow(p.T)))
    np.testing.assert_allclose(sol.f, exp_f_asymptotic(p, sol.times), rtol=1e-9)
    assert wronskian_deviation(sol) <= 1e-9
    with pytest.raises(TypeError):
        adiabatic_in_mode(solve_modes(Constant(1.0), SimulationWindow(1.0)))


# --- closed forms --------------------------------------------------------------------

def test_closed_form_reference_value():
    p = ExpChirpParams(1000.0, 1.0, 10.0)
    assert closed_form_probability(p, 1.0, -1000.0) == pytest.approx(6.283185307179586e-3, rel=1e-14)


def test_gh_reference_value():
    p = ExpChirpParams(1000.0, 1.0, 10.0)
    assert gibbons_hawking_probability(p, 1.0, -1000.0) == pytest.approx(6.283185307179586e-3, rel=1e-14)


def test_closed_form_decays_on_blue_side():
    p = ExpChirpParams(1000.0, 1.0, 10.0)
    deltas = np.array([1.0, 2.0, 5.0, 20.0, 100.0, 1e3, 1e5, 1e6])
    values = closed_form_probability(p, 1.0, deltas)
    pos = values > 0
    assert np.all(np.diff(values) <= 0) and np.all(values >= 0)
    assert np.all(np.diff(values[pos]) < 0)
    assert np.all(np.isfinite(closed_form_probability(p, 1.0, -deltas)))


@pytest.mark.parametrize("x", [0.1, 1.0, 2.0, 3.0, 10.0, 50.0])
def test_thermal_signature_identity(x):
    p = ExpChirpParams(200.0, 1.0, 12.0)
    ratio = closed_form_probability(p, 1.0, x, check=False) / closed_form_probability(p, 1.0, -x, check=False)
    assert ratio == pytest.approx(sideband_ratio(x, 1.0), rel=1e-12)
    gh = gibbons_hawking_probability(p, 1.0, x) / gibbons_hawking_probability(p, 1.0, -x)
    assert gh == pytest.approx(sideband_ratio(x, 1.0), rel=1e-12)


def test_gh_positive_both_signs():
    p = ExpChirpParams(100.0, 1.0, 10.0)
    d = np.array([-50.0, -1.0, -0.01, 0.01, 1.0, 50.0])
    assert np.all(gibbons_hawking_probability(p, 1.0, d) > 0)


def test_zero_detuning_rejected():
    p = ExpChirpParams(100.0, 1.0, 10.0)
    with pytest.raises(ValueError):
        closed_form_probability(p, 1.0, 0.0)
    with pytest.raises(ValueError):
        gibbons_hawking_probability(p, 1.0, 0.0)


def test_adiabaticity_warning():
    with pytest.warns(AdiabaticityWarning):
        closed_form_probability(ExpChirpParams(5.0, 1.0, 10.0), 1.0, -2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        closed_form_probability(ExpChirpParams(1000.0, 1.0, 10.0), 1.0, -2.0)


def test_closed_form_vs_mpmath():
    p = ExpChirpParams(200.0, 1.0, 12.0)
    for x in (-20.0, -2.0, 0.5, 3.0, 40.0):
        ref = 2 * mpmath.pi * 200 / (x * x) / (mpmath.exp(mpmath.pi * x) - 1) ** 2
        assert closed_form_probability(p, 0.3, x, check=False) == pytest.approx(0.09 * float(ref), rel=1e-13)


def test_gh_ratio_limits():
    p = ExpChirpParams(1000.0, 1.0, 10.0)
    r = gh_ratio(p, 1000.0)
    assert r.approx == pytest.approx(1.0, rel=1e-15)
    assert r.exact == pytest.approx(1.0, rel=1e-15)
    assert gh_ratio(p, -500.0).approx == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(ValueError):
        gh_ratio(p, 0.5)


@pytest.mark.parametrize("d", [2.0, 5.0, 10.0])
def test_gh_ratio_exact_equals_quotient(d):
    p = ExpChirpParams(1000.0, 1.0, 10.0)
    for delta in (d, -d):
        quotient = closed_form_probability(p, 1.0, delta) / gibbons_hawking_probability(p, 1.0, delta)
        assert gh_ratio(p, delta).exact == pytest.approx(quotient, rel=1e-12)
        r = gh_ratio(p, delta)
        assert abs(r.exact / r.approx - 1) <= 3 * math.exp(-2 * math.pi * d)


def test_sideband_ratio_values():
    assert sideband_ratio(1.0, 1.0) == pytest.approx(1.8674427317079893e-3, rel=1e-14)
    assert sideband_ratio(0.0, 1.0) == 1.0
    assert sideband_ratio(-1.0, 1.0) == pytest.approx(535.4916555247646, rel=1e-14)
    np.testing.assert_allclose(sideband_ratio(np.array([2.0, 4.0]), 2.0), [math.exp(-2 * math.pi),
                                                                           math.exp(-4 * math.pi)])
    with pytest.raises(ValueError):
        sideband_ratio(1.0, 0.0)


# --- gamma and Mellin --------------------------------------------------------------

@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 5.0])
def test_gamma_ratio_identity(x):
    assert gamma_ratio_modulus(x) ** 2 == pytest.approx(4 / x**2, rel=1e-10)
    ref = abs(mpmath.gamma(1j * x / 2) / mpmath.gamma(1 - 1j * x / 2))
    assert gamma_ratio_modulus(x) == pytest.approx(float(ref), rel=1e-12)


def test_mellin_formula_modulus():
    assert abs(mellin_formula(1.0)) == pytest.approx(2 / (math.exp(math.pi) - 1), rel=1e-12)
    assert abs(mellin_formula(1.0)) == pytest.approx(0.09033141072736835, rel=1e-13)


@pytest.mark.parametrize("x", [0.5, 1.0, 3.0])
def test_mellin_formula_is_analytic_limit(x):
    assert mellin_formula(x) == pytest.approx(_mellin_exact(1j * x), rel=1e-12)


def test_mellin_squared_gives_closed_form():
    x = 1.7
    p = ExpChirpParams(200.0, 1.0, 12.0)
    via_mellin = math.pi * p.nu0 / (2 * p.kappa**3) * abs(mellin_formula(x)) ** 2
    assert via_mellin == pytest.approx(closed_form_probability(p, 1.0, x * p.kappa, check=False), rel=1e-12)


@pytest.mark.parametrize("x, eps", [(1.0, 0.01), (1.0, 0.05), (2.0, 0.02), (0.5, 0.1), (4.0, 0.003)])
def test_mellin_numeric_against_analytic_transform(x, eps):
    res = mellin_hankel_check(x, eps)
    assert res.numeric == pytest.approx(_mellin_exact(complex(eps, x)), abs=1e-12)
    assert res.error_estimate < 1e-9


def test_mellin_gap_shrinks_with_epsilon():
    gaps = [mellin_hankel_check(1.0, e).gap for e in (0.05, 0.01, 0.002)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_mellin_domain():
    with pytest.raises(ValueError):
        mellin_hankel_check(0.0, 0.01)
    with pytest.raises(ValueError):
        mellin_hankel_check(1.0, 0.2)


# --- adiabatic conditions --------------------------------------------------------

def test_adiabatic_reference():
    rep = adiabatic_conditions(ExpChirpParams(1000.0, 1.0, 10.0))
    assert rep.ratio_end == pytest.approx(1000 * math.exp(-10), rel=1e-14)
    assert rep.passed


def test_adiabatic_physical_units():
    # 1 MHz trap, 1 kHz decay: a chirp of several ms passes
    assert adiabatic_conditions(ExpChirpParams(1e6, 1e3, 10e-3)).passed
    assert not adiabatic_conditions(ExpChirpParams(1e6, 1e3, 2e-3)).passed


def test_adiabatic_slow_decay_required():
    for t_end in (1.0, 10.0, 100.0):
        assert not adiabatic_conditions(ExpChirpParams(5.0, 1.0, t_end)).passed


def test_adiabatic_thresholds_configurable():
    p = ExpChirpParams(30.0, 1.0, 10.0)
    assert not adiabatic_conditions(p).passed
    assert adiabatic_conditions(p, start_min=20.0).passed


@settings(max_examples=50, deadline=None)
@given(x=st.floats(min_value=1e-3, max_value=300.0), ratio=st.floats(min_value=1.0, max_value=1e4))
def test_closed_form_ratio_property(x, ratio):
    p = ExpChirpParams(ratio, 1.0, 10.0)
    blue = closed_form_probability(p, 1.0, x, check=False)
    red = closed_form_probability(p, 1.0, -x, check=False)
    assert red > 0 and blue >= 0
    # subnormal results carry fewer significant bits
    if blue >= sys.float_info.min:
        assert math.log(blue / red) == pytest.approx(-2 * math.pi * x, rel=1e-10, abs=1e-10)
