"""Classical mode functions of q'' + nu(t)^2 q = 0.

``h`` and ``g`` are the solutions with h(0) = g'(0) = 1, h'(0) = g(0) = 0,
and f = h - i nu0 g is the complex combination that governs the response of
an ion starting in the ground state of the nu0 trap.  Units are natural
(hbar = M = 1) with a user-chosen time unit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dopri import StepSizeError, dopri54
from .profiles import ChirpProfile

__all__ = [
    "SimulationWindow",
    "ModeSolution",
    "solve_modes",
    "solve_trajectory",
    "wronskian_deviation",
    "rotate_modes",
    "quintic_hermite",
    "StepSizeError",
    "POINTS_PER_PERIOD",
]

# maximum step is this fraction of the shortest trap period in the window
POINTS_PER_PERIOD = 40


@dataclass(frozen=True)
class SimulationWindow:
    t_end: float
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_step: float | None = None

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not (0 < self.rel_tol <= 1e-6 and 0 < self.abs_tol <= 1e-6):
            raise ValueError("tolerances must lie in (0, 1e-6]")
        if self.max_step is not None and not self.max_step > 0:
            raise ValueError("max_step must be positive")

    def step_limit(self, profile: ChirpProfile) -> float:
        auto = 2 * math.pi / (POINTS_PER_PERIOD * profile.nu_max(self.t_end))
        return auto if self.max_step is None else min(auto, self.max_step)


# monomial coefficients of the quintic Hermite basis on [0, 1], ordered
# (y0, y1, H y0', H y1', H^2 y0'', H^2 y1'')
_HERMITE5 = np.array([
    [1, 0, 0, -10, 15, -6],
    [0, 0, 0, 10, -15, 6],
    [0, 1, 0, -6, 8, -3],
    [0, 0, 0, -4, 7, -3],
    [0, 0, 0.5, -1.5, 1.5, -0.5],
    [0, 0, 0, 0.5, -1, 0.5],
], dtype=float)


def quintic_hermite(t, times, y, dy, d2y, derivative: bool = False):
    """Piecewise quintic Hermite interpolant through values and two derivatives."""
    t = np.asarray(t, dtype=float)
    i = np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(times) - 2)
    width = times[i + 1] - times[i]
    s = (t - times[i]) / width
    data = np.stack([y[i], y[i + 1], width * dy[i], width * dy[i + 1],
                     width**2 * d2y[i], width**2 * d2y[i + 1]])
    coef = np.tensordot(_HERMITE5.T, data, axes=1)  # shape (6, ...)
    if derivative:
        powers = np.stack([np.zeros_like(s), np.ones_like(s), 2 * s, 3 * s**2, 4 * s**3, 5 * s**4])
        return (coef * powers).sum(axis=0) / width
    powers = np.stack([s**k for k in range(6)])
    return (coef * powers).sum(axis=0)


@dataclass(frozen=True)
class ModeSolution:
    profile: ChirpProfile
    window: SimulationWindow
    times: np.ndarray
    h: np.ndarray
    hdot: np.ndarray
    g: np.ndarray
    gdot: np.ndarray
    nu0: float
    nu_sq: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.nu_sq is None:
            object.__setattr__(self, "nu_sq", np.asarray(self.profile.nu(self.times)) ** 2)
        for name in ("times", "h", "hdot", "g", "gdot", "nu_sq"):
            getattr(self, name).setflags(write=False)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def f(self) -> np.ndarray:
        return self.h - 1j * self.nu0 * self.g

    @property
    def fdot(self) -> np.ndarray:
        return self.hdot - 1j * self.nu0 * self.gdot

    @property
    def fddot(self) -> np.ndarray:
        return -self.nu_sq * self.f

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.times[0], self.times[-1]
        tol = 1e-12 * max(abs(hi), 1.0)
        if np.any(t < lo - tol) or np.any(t > hi + tol):
            raise ValueError(f"time outside the solution window [{lo}, {hi}]")
        return np.clip(t, lo, hi)

    def evaluate(self, t):
        """Dense output ``(h, hdot, g, gdot)`` at arbitrary times in the window."""
        t = self._check(t)
        args = (self.times,)
        out = []
        for y in (self.h, self.g):
            d2y = -self.nu_sq * y
            dy = self.hdot if y is self.h else self.gdot
            out.append(quintic_hermite(t, *args, y, dy, d2y))
            out.append(quintic_hermite(t, *args, y, dy, d2y, derivative=True))
        h, hdot, g, gdot = out
        return h, hdot, g, gdot

    def f_at(self, t):
        h, _, g, _ = self.evaluate(t)
        return h - 1j * self.nu0 * g

    def __call__(self, t):
        return self.f_at(t)


def _oscillator_rhs(profile: ChirpProfile):
    nu_sq = profile.nu_sq

    # state layout: (q_1, q_1', q_2, q_2', ...)
    def rhs(t, y):
        w2 = nu_sq(t)
        out = []
        for i in range(0, len(y), 2):
            out.append(y[i + 1])
            out.append(-w2 * y[i])
        return out

    return rhs


def _integrate(profile, window, y0):
    profile.check_window(window.t_end)
    rhs = _oscillator_rhs(profile)
    return dopri54(rhs, 0.0, y0, window.t_end, rtol=window.rel_tol, atol=window.abs_tol,
                   max_step=window.step_limit(profile),
                   breakpoints=profile.breakpoints(window.t_end))


def solve_modes(profile: ChirpProfile, window: SimulationWindow) -> ModeSolution:
    """Integrate h and g over ``[0, window.t_end]``.

    Raises ``StepSizeError`` if the step size underflows and
    ``ProfileError`` if the profile is invalid over the window.
    """
    times, ys = _integrate(profile, window, [1.0, 0.0, 0.0, 1.0])
    return ModeSolution(profile=profile, window=window, times=times,
                        h=ys[:, 0], hdot=ys[:, 1], g=ys[:, 2], gdot=ys[:, 3],
                        nu0=float(profile.nu(0.0)))


def solve_trajectory(profile: ChirpProfile, window: SimulationWindow, q0: float, v0: float):
    """Single classical trajectory with q(0) = q0, q'(0) = v0; returns (t, q, qdot)."""
    times, ys = _integrate(profile, window, [q0, v0])
    return times, ys[:, 0], ys[:, 1]


def wronskian_deviation(sol: ModeSolution) -> float:
    return float(np.max(np.abs(sol.h * sol.gdot - sol.hdot * sol.g - 1.0)))


def rotate_modes(sol: ModeSolution, phi: float) -> ModeSolution:
    """Rotate (h, nu0 g) by ``phi`` in the phase plane; f picks up exp(i phi)."""
    c, s = math.cos(phi), math.sin(phi)
    w = sol.nu0
    return replace(
        sol,
        h=c * sol.h + s * w * sol.g,
        hdot=c * sol.hdot + s * w * sol.gdot,
        g=(-s * sol.h + c * w * sol.g) / w,
        gdot=(-s * sol.hdot + c * w * sol.gdot) / w,
    )
