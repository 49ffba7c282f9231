"""Closed forms for the exponentially decaying trap, nu(t) = nu0 exp(-kappa t).

Includes the exact Bessel mode functions, the Hankel-function form of f valid
for nu0 >> kappa, the idealised (T -> infinity) excitation spectrum, the
thermal-detector spectrum it is usually compared with, and the Mellin
integral of H0^(1) behind the closed form.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import integrate, special

from .modes import ModeSolution
from .profiles import Exponential
from .specfun import BesselKind, bessel, hankel1_0

__all__ = [
    "ExpChirpParams",
    "RegimeError",
    "AdiabaticityWarning",
    "exp_modes_exact",
    "exp_f_asymptotic",
    "adiabatic_in_mode",
    "closed_form_probability",
    "gibbons_hawking_probability",
    "GHRatio",
    "gh_ratio",
    "sideband_ratio",
    "gamma_ratio_modulus",
    "mellin_formula",
    "MellinCheck",
    "mellin_hankel_check",
    "AdiabaticReport",
    "adiabatic_conditions",
]


class RegimeError(ValueError):
    """Parameters fall outside the regime where an asymptotic form is trusted."""


class AdiabaticityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ExpChirpParams:
    nu0: float
    kappa: float
    T: float

    def __post_init__(self):
        for name in ("nu0", "kappa", "T"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def ratio(self) -> float:
        return self.nu0 / self.kappa

    def profile(self) -> Exponential:
        return Exponential(self.nu0, self.kappa)

    def nu(self, t):
        return self.nu0 * np.exp(-self.kappa * np.asarray(t, dtype=float))


def exp_modes_exact(p: ExpChirpParams, t, derivatives: bool = False):
    """Exact h(t), g(t) as Bessel combinations.

    With ``derivatives=True`` returns ``(h, hdot, g, gdot)``; uses
    d/dt Z0(nu/kappa) = nu Z1(nu/kappa) for Z = J, Y.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    z0 = p.ratio
    z = p.nu(t) / p.kappa
    if np.any(~(z > 0)):
        raise ValueError("nu(t)/kappa underflows to zero; shorten the window")
    j0_0, j1_0 = bessel(BesselKind.J0, z0), bessel(BesselKind.J1, z0)
    y0_0, y1_0 = bessel(BesselKind.Y0, z0), bessel(BesselKind.Y1, z0)
    j0z, y0z = bessel(BesselKind.J0, z), bessel(BesselKind.Y0, z)
    ch = math.pi * z0 / 2
    cg = math.pi / (2 * p.kappa)
    h = ch * (j1_0 * y0z - y1_0 * j0z)
    g = cg * (-j0_0 * y0z + y0_0 * j0z)
    if not derivatives:
        return h, g
    j1z, y1z = bessel(BesselKind.J1, z), bessel(BesselKind.Y1, z)
    nu = p.nu(t)
    hdot = ch * nu * (j1_0 * y1z - y1_0 * j1z)
    gdot = cg * nu * (-j0_0 * y1z + y0_0 * j1z)
    return h, hdot, g, gdot


def exp_f_asymptotic(p: ExpChirpParams, t, min_ratio: float = 10.0):
    """f(t) = -i sqrt(pi nu0 / 2 kappa) H0^(1)(nu(t)/kappa), up to a constant phase.

    The constant phase is the phase-plane rotation that removes the
    nu0/kappa - pi/4 offset of the large-argument Bessel coefficients, so only
    |f| is comparable with ``exp_modes_exact``.
    """
    if p.ratio < min_ratio:
        raise RegimeError(f"nu0/kappa = {p.ratio:g} is below {min_ratio:g}; asymptotic form untrusted")
    z = p.nu(t) / p.kappa
    return -1j * math.sqrt(math.pi * p.ratio / 2) * hankel1_0(z)


def adiabatic_in_mode(sol: ModeSolution) -> ModeSolution:
    """Re-express ``sol`` so that its f is the Hankel in-mode -i sqrt(pi nu0/2 kappa) H0(nu/kappa).

    The in-mode is the solution that has followed the chirp adiabatically
    since t -> -infinity, which the closed-form spectrum assumes.  It is the
    exact combination f(0) h + f'(0) g of the integrated h and g, with f(0) and
    f'(0) taken from the Hankel form; the bare-trap start f(0) = 1,
    f'(0) = -i nu0 differs from it by an O(kappa/nu0) admixture of the
    opposite-frequency solution.
    """
    profile = sol.profile
    if not isinstance(profile, Exponential):
        raise TypeError("the in-mode is defined for exponential chirps only")
    z0 = profile.nu0 / profile.kappa
    c = -1j * math.sqrt(math.pi * z0 / 2)
    f0 = c * hankel1_0(z0)
    # d/dt H0(nu/kappa) = nu H1(nu/kappa)
    fdot0 = c * profile.nu0 * complex(bessel(BesselKind.J1, z0), bessel(BesselKind.Y1, z0))
    f = f0 * sol.h + fdot0 * sol.g
    fdot = f0 * sol.hdot + fdot0 * sol.gdot
    w = sol.nu0
    return replace(sol, h=f.real.copy(), hdot=fdot.real.copy(), g=-f.imag / w, gdot=-fdot.imag / w)


def _inverse_planck_sq(x):
    """(exp(pi x) - 1)^-2 without overflow for large positive x."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x > 0
    e = np.exp(-np.pi * x[pos])
    out[pos] = e * e / (-np.expm1(-np.pi * x[pos])) ** 2
    out[~pos] = 1.0 / np.expm1(np.pi * x[~pos]) ** 2
    return out


def _inverse_planck(x):
    """(exp(2 pi x) - 1)^-1 without overflow for large positive x."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x > 0
    out[pos] = np.exp(-2 * np.pi * x[pos]) / (-np.expm1(-2 * np.pi * x[pos]))
    out[~pos] = 1.0 / np.expm1(2 * np.pi * x[~pos])
    return out


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def _check_delta(delta):
    d = np.asarray(delta, dtype=float)
    if np.any(d == 0):
        raise ValueError("detuning must be non-zero; the first-order result diverges at delta = 0")
    if np.any(~np.isfinite(d)):
        raise ValueError("detuning must be finite")
    return d


def closed_form_probability(p: ExpChirpParams, omega_eta: float, delta, check: bool = True):
    """(Omega0 eta0)^2 (2 pi nu0 / kappa delta^2) (exp(pi delta/kappa) - 1)^-2.

    The idealised result for an infinitely long chirp.  With ``check`` a
    warning is issued when the adiabatic conditions fail.
    """
    d = _check_delta(delta)
    if check and not adiabatic_conditions(p).passed:
        warnings.warn("adiabatic conditions not met; closed form is untrusted", AdiabaticityWarning,
                      stacklevel=2)
    x = d / p.kappa
    value = omega_eta**2 * 2 * np.pi * p.nu0 / (p.kappa * d**2) * _inverse_planck_sq(np.atleast_1d(x)).reshape(x.shape)
    return _scalar_or_array(value, delta)


def gibbons_hawking_probability(p: ExpChirpParams, omega_eta: float, delta):
    """Thermal-detector response (Omega0 eta0)^2 (2 pi / kappa delta) (exp(2 pi delta/kappa) - 1)^-1."""
    d = _check_delta(delta)
    x = d / p.kappa
    value = omega_eta**2 * 2 * np.pi / (p.kappa * d) * _inverse_planck(np.atleast_1d(x)).reshape(x.shape)
    return _scalar_or_array(value, delta)


class GHRatio(NamedTuple):
    exact: float
    approx: float


def gh_ratio(p: ExpChirpParams, delta: float) -> GHRatio:
    """Closed form over thermal response: exact value and (nu0/|delta|)(1 + 2 exp(-pi |delta|/kappa))."""
    d = abs(float(delta))
    if d / p.kappa < 1:
        raise ValueError("|delta|/kappa must be at least 1")
    y = math.pi * d / p.kappa
    # exact ratio simplifies to (nu0/|delta|) coth(pi |delta| / 2 kappa)
    exact = p.nu0 / d / math.tanh(y / 2)
    approx = p.nu0 / d * (1 + 2 * math.exp(-y))
    return GHRatio(exact, approx)


def sideband_ratio(delta, kappa: float):
    """Red/blue sideband ratio exp(-2 pi delta / kappa)."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return np.exp(-2 * np.pi * np.asarray(delta, dtype=float) / kappa) if np.ndim(delta) else (
        math.exp(-2 * math.pi * delta / kappa)
    )


def gamma_ratio_modulus(x: float) -> float:
    """|Gamma(ix/2) / Gamma(1 - ix/2)| from |Gamma(iy)|^2 = pi / (y sinh pi y)
    and |Gamma(1 + iy)|^2 = pi y / sinh(pi y)."""
    y = abs(x) / 2
    if y == 0:
        raise ValueError("x must be non-zero")
    num = math.pi / (y * math.sinh(math.pi * y))
    den = math.pi * y / math.sinh(math.pi * y)
    return math.sqrt(num / den)


def mellin_formula(x: float) -> complex:
    """-2^{ix} Gamma(ix/2) / ((exp(pi x) - 1) Gamma(1 - ix/2))."""
    return complex(-(2.0 ** (1j * x)) * special.gamma(1j * x / 2)
                   / (math.expm1(math.pi * x) * special.gamma(1 - 1j * x / 2)))


class MellinCheck(NamedTuple):
    numeric: complex
    formula: complex
    gap: float
    error_estimate: float


_TAIL_START = 200.0


def _small_u_part(s: complex, terms: int = 30) -> complex:
    # H0(u) = sum_k u^{2k} (A_k + B_k ln u) on [0, 1], integrated term by term
    total = 0j
    harmonic = 0.0
    jk = 1.0
    c = 2 / math.pi
    shift = np.euler_gamma - math.log(2.0)
    for k in range(terms):
        if k:
            jk *= -0.25 / (k * k)
            harmonic += 1.0 / k
        a = jk * (1 + 1j * c * (shift - harmonic))
        b = 1j * c * jk
        w = s + 2 * k
        total += a / w - b / (w * w)
    return total


def _large_u_tail(s: complex, start: float, terms: int = 12) -> complex:
    # H0(u) ~ sqrt(2/(pi u)) e^{i(u - pi/4)} sum_k i^k a_k / u^k,
    # and int_U^inf u^b e^{iu} du = i e^{iU} U^b sum_j prod_{m<j} (i (b - m) / U)
    total = 0j
    a = 1.0
    for k in range(terms):
        if k:
            a *= -((2 * k - 1) ** 2) / (8.0 * k)
        beta = s - 1.5 - k
        inner = 0j
        term = 1 + 0j
        for j in range(30):
            inner += term
            term *= 1j * (beta - j) / start
            if abs(term) < 1e-18:
                break
        piece = 1j * np.exp(1j * start) * start**beta * inner
        total += (1j**k) * a * piece
    return math.sqrt(2 / math.pi) * np.exp(-1j * math.pi / 4) * total


def mellin_hankel_check(x: float, epsilon: float) -> MellinCheck:
    """Compare the damped integral int_0^inf u^{ix + epsilon - 1} H0^(1)(u) du with
    its epsilon -> 0 closed form.

    The damping factor u^epsilon makes the logarithmic growth of Y0 at u -> 0
    integrable.  [0, 1] is integrated term by term from the power series,
    [1, 200] by adaptive quadrature, and the oscillatory tail from the
    large-argument expansion.
    """
    if not x > 0:
        raise ValueError("x must be positive")
    if not 0 < epsilon <= 0.1:
        raise ValueError("epsilon must lie in (0, 0.1]")
    s = complex(epsilon, x)

    def integrand(u):
        return u ** (s - 1) * hankel1_0(u)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            middle, err = integrate.quad(integrand, 1.0, _TAIL_START, complex_func=True,
                                         limit=2000, epsabs=1e-12, epsrel=1e-11)
        except integrate.IntegrationWarning as exc:
            raise RuntimeError(f"Mellin quadrature did not converge: {exc}") from None
    numeric = _small_u_part(s) + middle + _large_u_tail(s, _TAIL_START)
    formula = mellin_formula(x)
    return MellinCheck(numeric, formula, abs(numeric - formula), abs(err))


@dataclass(frozen=True)
class AdiabaticReport:
    ratio_start: float
    ratio_end: float
    passed: bool
    start_min: float
    end_max: float


def adiabatic_conditions(p: ExpChirpParams, start_min: float = 50.0, end_max: float = 0.1) -> AdiabaticReport:
    """nu0/kappa >= start_min (slow decay) and nu0 exp(-kappa T)/kappa <= end_max (long chirp)."""
    start = p.ratio
    end = p.ratio * math.exp(-p.kappa * p.T)
    return AdiabaticReport(start, end, start >= start_min and end <= end_max, start_min, end_max)
