"""First-order excitation spectra from mode functions.

For an ion starting in the vibrational ground state of the nu0 trap and the
electronic ground state, P1(delta) = (Omega0 eta0)^2 |F(delta)|^2 with
F(delta) = int_0^T exp(-i delta t) w(t) f(t) dt.  Here w(t) is the laser
amplitude envelope, which defaults to a rectangular pulse (w = 1 on [0, T]).
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from . import __version__
from .modes import _HERMITE5, ModeSolution, SimulationWindow, solve_modes
from .profiles import ChirpProfile, Exponential, Modulated

__all__ = [
    "PhysicalScales",
    "LaserDrive",
    "Spectrum",
    "SmoothSwitch",
    "LambDickeReport",
    "PerturbativeWarning",
    "lamb_dicke",
    "scales_for_eta",
    "lamb_dicke_validity",
    "two_time_correlation",
    "filon_moments",
    "fourier_amplitude",
    "excitation_probability",
    "spectrum_sweep",
    "PERTURBATIVE_LIMIT",
    "UNTRUSTED_DELTA",
]

PERTURBATIVE_LIMIT = 0.1
# |delta| below this many kappa (exponential chirps) is flagged as untrusted
UNTRUSTED_DELTA = 5.0


class PerturbativeWarning(UserWarning):
    """First-order probability large enough that higher orders matter."""


@dataclass(frozen=True)
class PhysicalScales:
    wave_number: float
    beam_angle: float = 0.0
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.wave_number > 0 and self.mass > 0 and self.hbar > 0):
            raise ValueError("wave number, mass and hbar must be positive")
        if abs(math.cos(self.beam_angle)) < 1e-12:
            raise ValueError("beam perpendicular to the trap axis does not couple to the motion")

    @property
    def k_axial(self) -> float:
        return self.wave_number * math.cos(self.beam_angle)


def lamb_dicke(scales: PhysicalScales, nu):
    """eta = sqrt(hbar k^2 cos^2(theta) / (2 M nu))."""
    nu_arr = np.asarray(nu, dtype=float)
    if np.any(~(nu_arr > 0)):
        raise ValueError("trap frequency must be positive")
    eta = np.sqrt(scales.hbar * scales.k_axial**2 / (2 * scales.mass * nu_arr))
    return float(eta) if np.ndim(nu) == 0 else eta


def scales_for_eta(eta0: float, nu0: float, mass: float = 1.0, hbar: float = 1.0) -> PhysicalScales:
    """Axial scales (theta = 0) giving Lamb-Dicke parameter ``eta0`` at ``nu0``."""
    return PhysicalScales(wave_number=eta0 * math.sqrt(2 * mass * nu0 / hbar), mass=mass, hbar=hbar)


@dataclass(frozen=True)
class LaserDrive:
    rabi: float
    detuning: float = 0.0
    eta0: float | None = None
    scales: PhysicalScales | None = None

    def __post_init__(self):
        if not self.rabi >= 0:
            raise ValueError("Rabi frequency must be non-negative")
        if self.eta0 is not None and not self.eta0 > 0:
            raise ValueError("eta0 must be positive")

    def resolve_eta(self, nu0: float) -> float:
        """eta0 from either source; both given must agree to 1e-9."""
        if self.scales is None:
            if self.eta0 is None:
                raise ValueError("drive needs eta0 or physical scales")
            return self.eta0
        from_scales = lamb_dicke(self.scales, nu0)
        if self.eta0 is not None and abs(from_scales - self.eta0) > 1e-9 * self.eta0:
            raise ValueError(f"eta0={self.eta0} disagrees with scales (eta0={from_scales})")
        return from_scales

    def with_detuning(self, delta: float) -> "LaserDrive":
        return LaserDrive(self.rabi, delta, self.eta0, self.scales)


@dataclass(frozen=True)
class LambDickeReport:
    max_eta: float
    first_violation_time: float | None
    threshold: float

    @property
    def passed(self) -> bool:
        return self.first_violation_time is None


def lamb_dicke_validity(profile: ChirpProfile, scales: PhysicalScales, window: SimulationWindow,
                        threshold: float = 0.3, samples: int = 20001) -> LambDickeReport:
    """Largest eta(t) over the window and the first time it exceeds ``threshold``."""
    t_end = window.t_end
    grid = np.union1d(np.linspace(0.0, t_end, samples), profile.breakpoints(t_end))
    eta = lamb_dicke(scales, profile.nu(grid))
    max_eta = float(eta.max())
    if not isinstance(profile, Modulated):
        # the minimum frequency is attained exactly at an endpoint or knot
        max_eta = max(max_eta, lamb_dicke(scales, profile.nu_min(t_end)))
    if max_eta <= threshold:
        return LambDickeReport(max_eta, None, threshold)
    if isinstance(profile, Exponential):
        eta0 = lamb_dicke(scales, profile.nu0)
        t_hit = max(0.0, 2 * math.log(threshold / eta0) / profile.kappa)
        return LambDickeReport(max_eta, t_hit, threshold)
    above = np.nonzero(eta > threshold)[0]
    i = int(above[0])
    if i == 0:
        return LambDickeReport(max_eta, 0.0, threshold)
    t_hit = optimize.brentq(lambda t: lamb_dicke(scales, profile.nu(t)) - threshold,
                            grid[i - 1], grid[i], xtol=1e-14)
    return LambDickeReport(max_eta, float(t_hit), threshold)


def two_time_correlation(sol: ModeSolution, scales: PhysicalScales | None, t1: float, t2: float) -> complex:
    """Ground-state <q(t1) q(t2)> = (hbar / 2 M nu0) f(t1) f*(t2)."""
    hbar, mass = (1.0, 1.0) if scales is None else (scales.hbar, scales.mass)
    f1, f2 = sol.f_at(np.array([t1, t2]))
    return complex(hbar / (2 * mass * sol.nu0) * f1 * np.conj(f2))


@dataclass(frozen=True)
class SmoothSwitch:
    """Laser envelope with error-function turn-on and (optional) turn-off.

    w(t) = Phi((t - on_center)/on_width) * (1 - Phi((t - off_center)/off_width)),
    with Phi the standard normal CDF.  A smooth envelope suppresses the
    switching transients that a rectangular pulse adds to F.
    """

    on_center: float
    on_width: float
    off_center: float | None = None
    off_width: float | None = None

    def __post_init__(self):
        if not self.on_width > 0:
            raise ValueError("on_width must be positive")
        if (self.off_center is None) != (self.off_width is None):
            raise ValueError("give both off_center and off_width, or neither")
        if self.off_width is not None and not self.off_width > 0:
            raise ValueError("off_width must be positive")

    @staticmethod
    def _edge(t, center, width, sign):
        # sign=+1 rising edge, -1 falling edge; returns value and two derivatives
        z = sign * (t - center) / width
        phi = 0.5 * special.erfc(-z / math.sqrt(2))
        pdf = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
        d1 = sign * pdf / width
        d2 = -z * pdf / width**2
        return phi, d1, d2

    def derivatives(self, t):
        """(w, w', w'') at ``t``."""
        t = np.asarray(t, dtype=float)
        a, a1, a2 = self._edge(t, self.on_center, self.on_width, 1)
        if self.off_center is None:
            return a, a1, a2
        b, b1, b2 = self._edge(t, self.off_center, self.off_width, -1)
        return a * b, a1 * b + a * b1, a2 * b + 2 * a1 * b1 + a * b2

    def __call__(self, t):
        return self.derivatives(t)[0]

    def describe(self) -> dict:
        return {"on_center": self.on_center, "on_width": self.on_width,
                "off_center": self.off_center, "off_width": self.off_width}


_SERIES_THETA = 2.0
_SERIES_TERMS = 40


def filon_moments(theta) -> np.ndarray:
    """m_k(theta) = int_0^1 s^k exp(-i theta s) ds for k = 0..5; shape (6, n).

    Power series below |theta| = 2, where the recurrence
    m_k = (exp(-i theta) - k m_{k-1}) / (-i theta) loses digits; recurrence above.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.empty((6, theta.size), dtype=complex)
    small = np.abs(theta) < _SERIES_THETA
    if np.any(small):
        th = theta[small]
        z = -1j * th
        power = np.ones_like(z)
        acc = np.zeros((6, th.size), dtype=complex)
        for j in range(_SERIES_TERMS):
            if j:
                power = power * z / j
            for k in range(6):
                acc[k] += power / (k + j + 1)
        out[:, small] = acc
    big = ~small
    if np.any(big):
        th = theta[big]
        e = np.exp(-1j * th)
        inv = 1.0 / (-1j * th)
        m = (e - 1.0) * inv
        out[0, big] = m
        for k in range(1, 6):
            m = (e - k * m) * inv
            out[k, big] = m
    return out


def _filon(times, y, dy, d2y, delta: float) -> complex:
    width = np.diff(times)
    data = np.stack([y[:-1], y[1:], width * dy[:-1], width * dy[1:],
                     width**2 * d2y[:-1], width**2 * d2y[1:]])
    coef = _HERMITE5.T @ data
    moments = filon_moments(delta * width)
    panels = width * np.exp(-1j * delta * times[:-1]) * np.sum(coef * moments, axis=0)
    return complex(np.sum(panels))


def _integrand_nodes(sol: ModeSolution, envelope):
    f, fd, fdd = sol.f, sol.fdot, sol.fddot
    if envelope is None:
        return f, fd, fdd
    w, w1, w2 = envelope.derivatives(sol.times)
    return w * f, w1 * f + w * fd, w2 * f + 2 * w1 * fd + w * fdd


def fourier_amplitude(sol: ModeSolution, delta: float, *, envelope=None, full_output: bool = False):
    """F = int_0^T exp(-i delta t) w(t) f(t) dt.

    Filon-type: on each solver panel f is replaced by its quintic Hermite
    interpolant (f, f' and f'' = -nu^2 f are all known at the nodes) and the
    product with the exponential is integrated exactly, so accuracy does not
    depend on delta.  With ``full_output`` also returns an error estimate,
    the change when every other node is dropped.
    """
    y, dy, d2y = _integrand_nodes(sol, envelope)
    value = _filon(sol.times, y, dy, d2y, float(delta))
    if not full_output:
        return value
    n = len(sol.times)
    idx = np.arange(0, n, 2)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    coarse = _filon(sol.times[idx], y[idx], dy[idx], d2y[idx], float(delta))
    return value, abs(value - coarse)


def excitation_probability(sol: ModeSolution, drive: LaserDrive, *, envelope=None) -> float:
    """(Omega0 eta0)^2 |F|^2; warns with ``PerturbativeWarning`` above 0.1."""
    eta0 = drive.resolve_eta(sol.nu0)
    amp = fourier_amplitude(sol, drive.detuning, envelope=envelope)
    p1 = (drive.rabi * eta0) ** 2 * abs(amp) ** 2
    if p1 > PERTURBATIVE_LIMIT:
        warnings.warn(f"P1 = {p1:.3g} at delta = {drive.detuning:g}; first-order theory is unreliable",
                      PerturbativeWarning, stacklevel=2)
    return p1


@dataclass
class Spectrum:
    deltas: np.ndarray
    p1: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.deltas = np.asarray(self.deltas, dtype=float)
        self.p1 = np.asarray(self.p1, dtype=float)
        if self.deltas.shape != self.p1.shape:
            raise ValueError("deltas and p1 must have the same length")

    def __len__(self):
        return len(self.deltas)

    def entries(self) -> list[tuple[float, float]]:
        return list(zip(self.deltas.tolist(), self.p1.tolist()))


def _thread_count(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("CHIRPOSC_THREADS", "0") or 0)
    return threads if threads > 0 else (os.cpu_count() or 1)


def units_note(profile: ChirpProfile) -> str:
    if isinstance(profile, Exponential) and profile.kappa == 1.0:
        return "frequencies and rates in units of kappa; times in units of 1/kappa"
    return "angular frequencies, rates and detunings share one unit; times are in its inverse"


def spectrum_sweep(profile: ChirpProfile, drive: LaserDrive, deltas, window: SimulationWindow, *,
                   envelope=None, threads: int | None = None, solution: ModeSolution | None = None) -> Spectrum:
    """P1 over a list of detunings, sharing one mode solution."""
    deltas = np.sort(np.asarray(deltas, dtype=float))
    if deltas.size == 0:
        raise ValueError("need at least one detuning")
    sol = solve_modes(profile, window) if solution is None else solution
    eta0 = drive.resolve_eta(sol.nu0)
    omega_eta = drive.rabi * eta0

    def one(delta):
        return omega_eta**2 * abs(fourier_amplitude(sol, delta, envelope=envelope)) ** 2

    workers = min(_thread_count(threads), len(deltas))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            p1 = np.array(list(pool.map(one, deltas)))
    else:
        p1 = np.array([one(d) for d in deltas])

    flagged = [float(d) for d, p in zip(deltas, p1) if p > PERTURBATIVE_LIMIT]
    if flagged:
        warnings.warn(f"P1 exceeds {PERTURBATIVE_LIMIT} at {len(flagged)} detunings", PerturbativeWarning,
                      stacklevel=2)
    if isinstance(profile, Exponential):
        untrusted = [float(d) for d in deltas if abs(d) < UNTRUSTED_DELTA * profile.kappa]
    else:
        untrusted = [float(d) for d in deltas if d == 0]
    metadata = {
        "profile": profile.describe(),
        "omega_eta": omega_eta,
        "t_end": window.t_end,
        "rel_tol": window.rel_tol,
        "abs_tol": window.abs_tol,
        "envelope": None if envelope is None else envelope.describe(),
        "units": units_note(profile),
        "version": __version__,
        "perturbative_flags": flagged,
        "untrusted_deltas": untrusted,
    }
    return Spectrum(deltas, p1, metadata)
