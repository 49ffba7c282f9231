"""Adaptive Dormand-Prince 5(4) integrator for small non-stiff systems.

The state is a short list of floats; the right-hand side is ``rhs(t, y) -> list``.
Every accepted step is recorded, and integration lands exactly on the
supplied breakpoints (kinks in the coefficients).
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["dopri54", "StepSizeError"]


class StepSizeError(RuntimeError):
    """Step size underflow; ``t`` holds the time of failure."""

    def __init__(self, t: float, h: float):
        super().__init__(f"step size underflow (h={h:.3e}) at t={t:.17g}")
        self.t = t
        self.h = h


# Butcher tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# fifth minus fourth order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _rms(v) -> float:
    return math.sqrt(sum(x * x for x in v) / len(v))


def _initial_step(rhs, t0, y0, f0, rtol, atol, max_step):
    scale = [atol + rtol * abs(x) for x in y0]
    d0 = _rms([x / s for x, s in zip(y0, scale)])
    d1 = _rms([x / s for x, s in zip(f0, scale)])
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    f1 = rhs(t0 + h0, [y + h0 * f for y, f in zip(y0, f0)])
    d2 = _rms([(a - b) / s for a, b, s in zip(f1, f0, scale)]) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, max_step)


def dopri54(rhs, t0: float, y0, t_end: float, *, rtol: float, atol: float,
            max_step: float = math.inf, breakpoints=()) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t_end``.

    ``rhs`` takes and returns plain lists of floats; the systems integrated
    here have a handful of components, where list arithmetic beats numpy.
    Returns ``(times, states)`` at every accepted step, starting with ``t0``.
    """
    y = [float(v) for v in y0]
    n = len(y)
    stops = sorted(b for b in breakpoints if t0 < b < t_end) + [t_end]
    times = [t0]
    states = [list(y)]
    t = t0
    f = rhs(t, y)
    h = _initial_step(rhs, t, y, f, rtol, atol, max_step)
    a21 = _A[1][0]
    a31, a32 = _A[2]
    a41, a42, a43 = _A[3]
    a51, a52, a53, a54 = _A[4]
    a61, a62, a63, a64, a65 = _A[5]
    b1, _, b3, b4, b5, b6 = _A[6]
    e1, _, e3, e4, e5, e6, e7 = _E
    c2, c3, c4, c5 = _C[1:5]
    rng = range(n)

    for stop in stops:
        while t < stop:
            h = min(h, max_step)
            last = t + h >= stop
            if last:
                h = stop - t
            if h <= 16 * math.ulp(max(abs(t), 1.0)):
                raise StepSizeError(t, h)

            k1 = f
            k2 = rhs(t + c2 * h, [y[m] + h * a21 * k1[m] for m in rng])
            k3 = rhs(t + c3 * h, [y[m] + h * (a31 * k1[m] + a32 * k2[m]) for m in rng])
            k4 = rhs(t + c4 * h, [y[m] + h * (a41 * k1[m] + a42 * k2[m] + a43 * k3[m]) for m in rng])
            k5 = rhs(t + c5 * h, [y[m] + h * (a51 * k1[m] + a52 * k2[m] + a53 * k3[m]
                                             + a54 * k4[m]) for m in rng])
            k6 = rhs(t + h, [y[m] + h * (a61 * k1[m] + a62 * k2[m] + a63 * k3[m] + a64 * k4[m]
                                         + a65 * k5[m]) for m in rng])
            y_new = [y[m] + h * (b1 * k1[m] + b3 * k3[m] + b4 * k4[m] + b5 * k5[m] + b6 * k6[m])
                     for m in rng]
            # FSAL: the seventh stage is the derivative at the new point
            k7 = rhs(t + h, y_new)
            acc = 0.0
            for m in rng:
                e = h * (e1 * k1[m] + e3 * k3[m] + e4 * k4[m] + e5 * k5[m] + e6 * k6[m] + e7 * k7[m])
                s = atol + rtol * max(abs(y[m]), abs(y_new[m]))
                acc += (e / s) ** 2
            err = math.sqrt(acc / n)

            if err <= 1.0:
                t = stop if last else t + h
                y = y_new
                f = k7
                times.append(t)
                states.append(y)
                factor = _MAX_FACTOR if err == 0 else min(_MAX_FACTOR, _SAFETY * err ** -0.2)
                h *= factor
            else:
                h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)
        if stop != t_end:
            f = rhs(t, y)

    return np.asarray(times), np.asarray(states)
