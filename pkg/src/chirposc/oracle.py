"""Exact evolution of the two-level ion plus truncated oscillator.

Propagates |psi> from |0 (ground of the nu0 trap)> (x) |g> over [0, T] and
reads off the excited-state population, with no perturbative expansion in
the laser coupling.  Two frames are available:

``"schrodinger"``
    Number basis of the static nu0 trap, rotating frame of the laser:
    H = p^2/2M + M nu(t)^2 q^2/2 + hbar delta sigma+ sigma- + hbar Omega0 k q (sigma+ + sigma-).
    Chirp-induced squeezing spreads the state over ~nu0 <q^2> levels, so this
    frame only suits mild chirps; the leakage monitor reports when it fails.

``"interaction"``
    Interaction picture of the bare oscillator.  Its position operator is
    q(t) = sqrt(hbar/2 M nu0) (f(t) a + f*(t) a^dagger) with f the classical
    solution of q'' + nu^2 q = 0, f(0) = 1, f'(0) = -i nu0.  Only the weak laser
    coupling acts on the state, so a few levels suffice for any chirp.  f is
    integrated here with scipy's DOP853, independently of ``chirposc.modes``.

Steps use the fourth-order commutator-free Magnus scheme (two exponentials
per step, Gauss-Legendre nodes), which is unitary by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .modes import SimulationWindow
from .profiles import ChirpProfile
from .spectrum import LaserDrive, PhysicalScales, scales_for_eta

__all__ = [
    "FockSystem",
    "OracleRun",
    "OracleComparison",
    "TruncationError",
    "build_fock_system",
    "evolve_exact",
    "compare_oracle_pt",
    "LEAKAGE_LIMIT",
]

LEAKAGE_LIMIT = 1e-6

_SQ3 = math.sqrt(3.0)
_GAUSS = (0.5 - _SQ3 / 6, 0.5 + _SQ3 / 6)
_CF_A1 = (3 - 2 * _SQ3) / 12
_CF_A2 = (3 + 2 * _SQ3) / 12


class TruncationError(RuntimeError):
    """Population reached the top of the Fock space; ``run`` holds the results."""

    def __init__(self, message: str, run: "OracleRun"):
        super().__init__(message)
        self.run = run


def _ladder(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


@dataclass(frozen=True)
class FockSystem:
    n: int
    hbar: float
    mass: float
    nu0: float
    lower_osc: np.ndarray
    position: np.ndarray
    momentum: np.ndarray
    position_sq: np.ndarray
    momentum_sq: np.ndarray
    raise_: np.ndarray
    lower: np.ndarray

    @property
    def dim(self) -> int:
        return 2 * self.n

    def osc(self, op: np.ndarray) -> np.ndarray:
        """Oscillator operator on the product space (oscillator index major)."""
        return np.kron(op, np.eye(2))

    def atom(self, op: np.ndarray) -> np.ndarray:
        return np.kron(np.eye(self.n), op)

    def commutator_deviation(self) -> float:
        """max |[q, p] - i hbar| on the levels below the top two."""
        comm = self.position @ self.momentum - self.momentum @ self.position
        m = self.n - 2
        return float(np.max(np.abs(comm[:m, :m] - 1j * self.hbar * np.eye(m))))


def build_fock_system(n: int, scales: PhysicalScales | None, nu0: float) -> FockSystem:
    """Number-basis operators of the nu0 oscillator truncated to ``n`` levels."""
    if n < 4:
        raise ValueError(f"truncation must be at least 4, got {n}")
    if not nu0 > 0:
        raise ValueError("nu0 must be positive")
    hbar, mass = (1.0, 1.0) if scales is None else (scales.hbar, scales.mass)
    xq = math.sqrt(hbar / (2 * mass * nu0))
    xp = math.sqrt(hbar * mass * nu0 / 2)

    def quadratures(size):
        a = _ladder(size).astype(complex)
        return a, xq * (a + a.T), 1j * xp * (a.T - a)

    a, q, p = quadratures(n)
    # squares from a basis one level larger, so the top diagonal entry is exact
    _, q1, p1 = quadratures(n + 1)
    sigma_plus = np.array([[0, 0], [1, 0]], dtype=complex)  # |e><g| in the (g, e) basis
    return FockSystem(n=n, hbar=hbar, mass=mass, nu0=nu0, lower_osc=a, position=q, momentum=p,
                      position_sq=(q1 @ q1)[:n, :n], momentum_sq=(p1 @ p1)[:n, :n],
                      raise_=sigma_plus, lower=sigma_plus.conj().T)


@dataclass(frozen=True)
class OracleRun:
    profile: ChirpProfile
    drive: LaserDrive
    window: SimulationWindow
    truncation: int = 30
    frame: str = "interaction"
    coupling: str = "linear"
    envelope: object = None
    steps_per_period: int = 40
    excited_population: float | None = None
    leakage: float | None = None
    norm_drift: float | None = None
    steps: int | None = None
    final_state: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.frame not in ("interaction", "schrodinger"):
            raise ValueError(f"unknown frame {self.frame!r}")
        if self.coupling not in ("linear", "exponential"):
            raise ValueError(f"unknown coupling {self.coupling!r}")


def _expm_hermitian_apply(gen: np.ndarray, dt: float, psi: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(gen)
    return v @ (np.exp(-1j * dt * w) * (v.conj().T @ psi))


def _classical_f(profile: ChirpProfile, window: SimulationWindow, nu0: float):
    def rhs(t, y):
        w2 = profile.nu_sq(t)
        return [y[1], -w2 * y[0], y[3], -w2 * y[2]]

    res = integrate.solve_ivp(rhs, (0.0, window.t_end), [1.0, 0.0, 0.0, -nu0], method="DOP853",
                              rtol=1e-12, atol=1e-14, dense_output=True,
                              max_step=2 * math.pi / (20 * profile.nu_max(window.t_end)))
    if not res.success:
        raise RuntimeError(f"classical integration failed: {res.message}")

    def f(t):
        y = res.sol(t)
        return y[0] + 1j * y[2]

    return f


def _generator(run: OracleRun, fock: FockSystem, k_axial: float):
    """Returns gen(t) = H(t)/hbar on the product space."""
    drive = run.drive
    delta = drive.detuning
    rabi = drive.rabi
    sp = fock.atom(fock.raise_)
    sm = fock.atom(fock.lower)
    envelope = run.envelope
    hbar, mass = fock.hbar, fock.mass

    def amplitude(t):
        return rabi if envelope is None else rabi * float(envelope(t))

    if run.frame == "schrodinger":
        kinetic = fock.osc(fock.momentum_sq) / (2 * mass * hbar)
        potential = fock.osc(fock.position_sq) * (mass / (2 * hbar))
        detuning = delta * (sp @ sm)
        if run.coupling == "linear":
            couple = k_axial * fock.osc(fock.position) @ (sp + sm)
        else:
            w, v = np.linalg.eigh(k_axial * fock.position)
            e_minus_1 = fock.osc((v * (np.exp(1j * w) - 1)) @ v.conj().T)
            lift = sp @ e_minus_1
            couple = -1j * (lift - lift.conj().T)

        def gen(t):
            return kinetic + run.profile.nu_sq(t) * potential + detuning + amplitude(t) * couple

        return gen

    f = _classical_f(run.profile, run.window, fock.nu0)
    a = fock.lower_osc
    x0 = math.sqrt(hbar / (2 * mass * fock.nu0))

    def gen(t):
        ft = complex(f(t))
        q_t = x0 * (ft * a + np.conj(ft) * a.conj().T)
        phase = complex(math.cos(delta * t), math.sin(delta * t))
        if run.coupling == "linear":
            atom_part = phase * fock.raise_ + np.conj(phase) * fock.lower
            return amplitude(t) * k_axial * np.kron(q_t, atom_part)
        w, v = np.linalg.eigh(k_axial * q_t)
        e_minus_1 = (v * (np.exp(1j * w) - 1)) @ v.conj().T
        lift = phase * np.kron(e_minus_1, fock.raise_)
        return -1j * amplitude(t) * (lift - lift.conj().T)

    return gen


def evolve_exact(run: OracleRun, *, check: bool = True) -> OracleRun:
    """Propagate the run and return a copy with results filled in.

    With ``check``, raises ``TruncationError`` when the occupation of the top
    two Fock levels exceeds 1e-6 at any step.
    """
    profile, drive, window = run.profile, run.drive, run.window
    profile.check_window(window.t_end)
    nu0 = float(profile.nu(0.0))
    scales = drive.scales or scales_for_eta(drive.resolve_eta(nu0), nu0)
    eta0 = drive.resolve_eta(nu0)
    # k cos(theta) consistent with eta0 in the system's own units
    k_axial = eta0 * math.sqrt(2 * scales.mass * nu0 / scales.hbar)
    fock = build_fock_system(run.truncation, scales, nu0)
    gen = _generator(run, fock, k_axial)

    fastest = max(profile.nu_max(window.t_end), abs(drive.detuning), 1e-300)
    steps = max(1, math.ceil(window.t_end * fastest * run.steps_per_period / (2 * math.pi)))
    dt = window.t_end / steps

    psi = np.zeros(fock.dim, dtype=complex)
    psi[0] = 1.0  # |n=0> (x) |g>, product index 2 n + atom
    top = slice(2 * (fock.n - 2), fock.dim)
    leakage = 0.0
    for i in range(steps):
        t = i * dt
        g1 = gen(t + _GAUSS[0] * dt)
        g2 = gen(t + _GAUSS[1] * dt)
        psi = _expm_hermitian_apply(_CF_A2 * g1 + _CF_A1 * g2, dt, psi)
        psi = _expm_hermitian_apply(_CF_A1 * g1 + _CF_A2 * g2, dt, psi)
        leakage = max(leakage, float(np.sum(np.abs(psi[top]) ** 2)))

    excited = float(np.sum(np.abs(psi[1::2]) ** 2))
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    done = replace(run, excited_population=excited, leakage=leakage, norm_drift=drift, steps=steps,
                   final_state=psi)
    if check and leakage > LEAKAGE_LIMIT:
        raise TruncationError(
            f"top-level occupation {leakage:.3g} exceeds {LEAKAGE_LIMIT:g} with N={run.truncation}; "
            "rerun with a larger truncation or the interaction frame", done)
    return done


class OracleComparison(NamedTuple):
    rel_error: float
    passed: bool


def compare_oracle_pt(run: OracleRun, p1: float, tolerance: float = 0.05) -> OracleComparison:
    """Relative gap between the exact population and the first-order value."""
    if run.excited_population is None:
        raise ValueError("run has not been evolved")
    rel = abs(run.excited_population - p1) / max(p1, 1e-300)
    return OracleComparison(rel, rel <= tolerance and p1 <= 1e-3)
