"""Real-argument Bessel functions J0, J1, Y0, Y1 and the Hankel function H0^(1).

Small arguments use the ascending power series, summed in 50-digit decimal
arithmetic so that the alternating terms (which reach ~1e7 near the seam)
cancel without loss.  Large arguments use the Hankel asymptotic expansion in
amplitude/phase form, truncated at the smallest term.  At the seam x = 20 the
smallest asymptotic term is ~e^-40, far below double precision.
"""
from __future__ import annotations

import math
from decimal import Decimal, localcontext
from enum import Enum

import numpy as np

__all__ = ["BesselKind", "bessel", "hankel1_0", "j0", "j1", "y0", "y1", "SERIES_CUTOFF"]

SERIES_CUTOFF = 20.0

_PREC = 50
_PI = Decimal("3.14159265358979323846264338327950288419716939937511")
_EULER_GAMMA = Decimal("0.57721566490153286060651209008240243104215933593992")
_SQRT_HALF = math.sqrt(0.5)


class BesselKind(str, Enum):
    J0 = "J0"
    J1 = "J1"
    Y0 = "Y0"
    Y1 = "Y1"

    @property
    def order(self) -> int:
        return int(self.value[1])

    @property
    def is_y(self) -> bool:
        return self.value[0] == "Y"


def _series(kind: BesselKind, x: float) -> float:
    with localcontext() as ctx:
        ctx.prec = _PREC
        xd = Decimal(x)
        half = xd / 2
        z = half * half
        tiny = Decimal(10) ** (-_PREC + 5)

        if kind.order == 0:
            # J0 = sum (-z)^k / (k!)^2 ; Y0 needs the harmonic-weighted companion
            term = Decimal(1)
            jsum = term
            ysum = Decimal(0)
            harmonic = Decimal(0)
            k = 0
            while True:
                k += 1
                term = -term * z / (k * k)
                harmonic += Decimal(1) / k
                jsum += term
                ysum -= harmonic * term
                if abs(term) * (1 + harmonic) < tiny * (1 + abs(jsum)) and k > 2:
                    break
            if kind is BesselKind.J0:
                return float(jsum)
            log_term = (half.ln() + _EULER_GAMMA) * jsum
            return float(2 * (log_term + ysum) / _PI)

        # order one: J1 = (x/2) sum (-z)^k / (k! (k+1)!)
        term = Decimal(1)
        jsum = term
        # psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
        h_k = Decimal(0)
        h_k1 = Decimal(1)
        ysum = (-2 * _EULER_GAMMA + h_k + h_k1) * term
        k = 0
        while True:
            k += 1
            term = -term * z / (k * (k + 1))
            h_k += Decimal(1) / k
            h_k1 += Decimal(1) / (k + 1)
            jsum += term
            ysum += (-2 * _EULER_GAMMA + h_k + h_k1) * term
            if abs(term) * (2 + h_k1) < tiny * (1 + abs(jsum)) and k > 2:
                break
        j1v = half * jsum
        if kind is BesselKind.J1:
            return float(j1v)
        y1v = -2 / (_PI * xd) + 2 * half.ln() * j1v / _PI - half * ysum / _PI
        return float(y1v)


def _asymptotic(kind: BesselKind, x: float) -> float:
    mu = 4.0 * kind.order**2
    # P = sum (-1)^k a_{2k} / x^{2k},  Q = sum (-1)^k a_{2k+1} / x^{2k+1}
    p = 1.0
    q = 0.0
    a = 1.0
    k = 0
    last = math.inf
    while True:
        k += 1
        a = a * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(a) >= last or abs(a) < 1e-17:
            break
        last = abs(a)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * a
        else:
            p += sign * a
    # chi = x - pi/4 (order 0) or x - 3 pi/4 (order 1), via libm-reduced cos/sin of x
    c, s = math.cos(x), math.sin(x)
    if kind.order == 0:
        cos_chi, sin_chi = _SQRT_HALF * (c + s), _SQRT_HALF * (s - c)
    else:
        cos_chi, sin_chi = _SQRT_HALF * (s - c), -_SQRT_HALF * (s + c)
    amp = math.sqrt(2.0 / (math.pi * x))
    if kind.is_y:
        return amp * (p * sin_chi + q * cos_chi)
    return amp * (p * cos_chi - q * sin_chi)


def _bessel_scalar(kind: BesselKind, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{kind.value}: argument must be finite, got {x}")
    if kind.is_y and x <= 0.0:
        raise ValueError(f"{kind.value}: argument must be positive, got {x}")
    if x < 0.0:
        # J0 even, J1 odd
        v = _bessel_scalar(kind, -x)
        return v if kind.order == 0 else -v
    if x == 0.0:
        return 1.0 if kind is BesselKind.J0 else 0.0
    if x <= SERIES_CUTOFF:
        return _series(kind, x)
    return _asymptotic(kind, x)


def bessel(kind: BesselKind | str, x):
    """Evaluate J0, J1, Y0 or Y1 at real ``x`` (scalar or array).

    Raises ``ValueError`` for non-finite input or ``x <= 0`` with a Y kind.
    """
    kind = BesselKind(kind)
    if np.ndim(x) == 0:
        return _bessel_scalar(kind, x)
    arr = np.asarray(x, dtype=float)
    out = np.empty(arr.shape)
    flat = out.reshape(-1)
    for i, xi in enumerate(arr.reshape(-1)):
        flat[i] = _bessel_scalar(kind, xi)
    return out


def hankel1_0(x):
    """H0^(1)(x) = J0(x) + i Y0(x) for x > 0."""
    if np.ndim(x) == 0:
        if not x > 0:
            raise ValueError(f"H0^(1): argument must be positive, got {x}")
    elif np.any(~(np.asarray(x) > 0)):
        raise ValueError("H0^(1): arguments must be positive")
    return bessel(BesselKind.J0, x) + 1j * bessel(BesselKind.Y0, x)


def j0(x):
    return bessel(BesselKind.J0, x)


def j1(x):
    return bessel(BesselKind.J1, x)


def y0(x):
    return bessel(BesselKind.Y0, x)


def y1(x):
    return bessel(BesselKind.Y1, x)
