"""Trap-frequency trajectories nu(t)."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

__all__ = [
    "Constant",
    "Exponential",
    "Modulated",
    "Sampled",
    "ChirpProfile",
    "ProfileError",
    "profile_from_dict",
]


class ProfileError(ValueError):
    """Raised for a profile that is invalid over the requested window."""


@dataclass(frozen=True)
class Constant:
    nu0: float
    kind: ClassVar[str] = "constant"

    def __post_init__(self):
        if not self.nu0 > 0:
            raise ProfileError(f"nu0 must be positive, got {self.nu0}")

    def nu(self, t):
        return np.full(np.shape(t), float(self.nu0)) if np.ndim(t) else float(self.nu0)

    def nu_sq(self, t: float) -> float:
        return self.nu0 * self.nu0

    def nu_max(self, t_end: float) -> float:
        return self.nu0

    def nu_min(self, t_end: float) -> float:
        return self.nu0

    def breakpoints(self, t_end: float) -> tuple[float, ...]:
        return ()

    def check_window(self, t_end: float) -> None:
        pass

    def describe(self) -> dict:
        return {"kind": self.kind, "nu0": self.nu0}


@dataclass(frozen=True)
class Exponential:
    """nu(t) = nu0 exp(-kappa t); decaying chirps only."""

    nu0: float
    kappa: float
    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        if not self.nu0 > 0:
            raise ProfileError(f"nu0 must be positive, got {self.nu0}")
        if not self.kappa > 0:
            raise ProfileError(f"kappa must be positive, got {self.kappa}")

    def nu(self, t):
        return self.nu0 * np.exp(-self.kappa * np.asarray(t, dtype=float)) if np.ndim(t) else (
            self.nu0 * math.exp(-self.kappa * t)
        )

    def nu_sq(self, t: float) -> float:
        return self.nu0 * self.nu0 * math.exp(-2.0 * self.kappa * t)

    def nu_max(self, t_end: float) -> float:
        return self.nu0

    def nu_min(self, t_end: float) -> float:
        return self.nu(t_end)

    def breakpoints(self, t_end: float) -> tuple[float, ...]:
        return ()

    def check_window(self, t_end: float) -> None:
        if not self.nu(t_end) > 0:
            raise ProfileError(f"nu(t) underflows to zero before t_end={t_end}")

    def describe(self) -> dict:
        return {"kind": self.kind, "nu0": self.nu0, "kappa": self.kappa}


@dataclass(frozen=True)
class Modulated:
    """nu(t) = nu0 (1 + depth sin(mod_freq t)), so that nu(0) = nu0."""

    nu0: float
    depth: float
    mod_freq: float
    kind: ClassVar[str] = "modulated"

    def __post_init__(self):
        if not self.nu0 > 0:
            raise ProfileError(f"nu0 must be positive, got {self.nu0}")
        if not abs(self.depth) < 1:
            raise ProfileError(f"|depth| must be below 1 to keep nu > 0, got {self.depth}")

    def nu(self, t):
        if np.ndim(t):
            return self.nu0 * (1.0 + self.depth * np.sin(self.mod_freq * np.asarray(t, dtype=float)))
        return self.nu0 * (1.0 + self.depth * math.sin(self.mod_freq * t))

    def nu_sq(self, t: float) -> float:
        v = self.nu0 * (1.0 + self.depth * math.sin(self.mod_freq * t))
        return v * v

    def nu_max(self, t_end: float) -> float:
        return self.nu0 * (1.0 + abs(self.depth))

    def nu_min(self, t_end: float) -> float:
        return self.nu0 * (1.0 - abs(self.depth))

    def breakpoints(self, t_end: float) -> tuple[float, ...]:
        return ()

    def check_window(self, t_end: float) -> None:
        pass

    def describe(self) -> dict:
        return {"kind": self.kind, "nu0": self.nu0, "depth": self.depth, "mod_freq": self.mod_freq}


@dataclass(frozen=True)
class Sampled:
    """Piecewise-linear nu(t) through ``knots`` = ((t0, nu0), (t1, nu1), ...)."""

    knots: tuple[tuple[float, float], ...]
    kind: ClassVar[str] = "sampled"

    def __post_init__(self):
        knots = tuple((float(t), float(v)) for t, v in self.knots)
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise ProfileError("sampled profile needs at least 2 knots")
        times = [t for t, _ in knots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ProfileError("knot times must be strictly increasing")
        if any(not v > 0 for _, v in knots):
            raise ProfileError("knot frequencies must be positive")
        if times[0] > 0:
            raise ProfileError("first knot must be at or before t = 0")
        object.__setattr__(self, "_t", times)
        object.__setattr__(self, "_v", [v for _, v in knots])

    @property
    def nu0(self) -> float:
        return float(np.interp(0.0, self._t, self._v))

    def nu(self, t):
        if np.ndim(t):
            return np.interp(np.asarray(t, dtype=float), self._t, self._v)
        return float(np.interp(t, self._t, self._v))

    def nu_sq(self, t: float) -> float:
        ts, vs = self._t, self._v
        i = bisect.bisect_right(ts, t) - 1
        i = min(max(i, 0), len(ts) - 2)
        w = (t - ts[i]) / (ts[i + 1] - ts[i])
        v = vs[i] + w * (vs[i + 1] - vs[i])
        return v * v

    def _inside(self, t_end: float) -> list[float]:
        return [v for t, v in self.knots if 0.0 <= t <= t_end] + [self.nu(0.0), self.nu(t_end)]

    def nu_max(self, t_end: float) -> float:
        return max(self._inside(t_end))

    def nu_min(self, t_end: float) -> float:
        return min(self._inside(t_end))

    def breakpoints(self, t_end: float) -> tuple[float, ...]:
        return tuple(t for t in self._t if 0.0 < t < t_end)

    def check_window(self, t_end: float) -> None:
        if t_end > self._t[-1]:
            raise ProfileError(f"window end {t_end} lies beyond the last knot {self._t[-1]}")

    def describe(self) -> dict:
        return {"kind": self.kind, "knots": [list(k) for k in self.knots]}


ChirpProfile = Union[Constant, Exponential, Modulated, Sampled]

_KINDS = {cls.kind: cls for cls in (Constant, Exponential, Modulated, Sampled)}


def profile_from_dict(d: dict) -> ChirpProfile:
    """Build a profile from ``{"kind": ..., **fields}`` (the ``describe()`` form)."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _KINDS:
        raise ProfileError(f"unknown profile kind {kind!r}; expected one of {sorted(_KINDS)}")
    cls = _KINDS[kind]
    if cls is Sampled and "knots" in d:
        d["knots"] = tuple(tuple(k) for k in d["knots"])
    try:
        return cls(**d)
    except TypeError as exc:
        raise ProfileError(f"bad fields for {kind} profile: {exc}") from None
