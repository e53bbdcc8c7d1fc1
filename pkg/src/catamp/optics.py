"""Squeezing and beam-splitter unitaries on the truncated Fock basis.

The beam-splitter phase convention is pinned to the coherent-state rule

    B(r, t) |a>|b>  ->  |t*a + r*b> |-r*a + t*b>

which the covariance tests enforce; the squeeze convention is pinned to
exp(-(r/2)(a^2 - adag^2)), which for r > 0 stretches a single photon
into positive odd-photon-number coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .fock import DEFAULT_CUTOFF, MultiModeState, apply_two_mode

# Beyond |r| = 2 at cutoff 30 truncation leakage exceeds the warning level.
MAX_SQUEEZE = 2.0


@dataclass(frozen=True)
class SqueezeSpec:
    """Squeezing strength r of the quadratic unitary exp(-(r/2)(a^2 - adag^2))."""

    r: float

    def __post_init__(self):
        if not math.isfinite(self.r) or abs(self.r) > MAX_SQUEEZE:
            raise ValueError(f"squeezing parameter must satisfy |r| <= {MAX_SQUEEZE}, got {self.r}")


@dataclass(frozen=True)
class BeamSplitterParams:
    """Reflectivity / transmittivity pair with r^2 + t^2 = 1."""

    reflectivity: float
    transmittivity: float

    def __post_init__(self):
        r, t = self.reflectivity, self.transmittivity
        if not (0.0 <= r <= 1.0 and 0.0 <= t <= 1.0):
            raise ValueError(f"reflectivity and transmittivity must lie in [0, 1], got ({r}, {t})")
        if abs(r * r + t * t - 1.0) > 1e-12:
            raise ValueError(f"r^2 + t^2 = {r * r + t * t} violates unitarity")

    @classmethod
    def fifty_fifty(cls) -> "BeamSplitterParams":
        s = 1.0 / math.sqrt(2.0)
        return cls(s, s)

    @property
    def mixing_angle(self) -> float:
        return math.atan2(self.reflectivity, self.transmittivity)


def _squeeze_r(spec) -> float:
    r = spec.r if isinstance(spec, SqueezeSpec) else float(spec)
    SqueezeSpec(r)  # validate range
    return r


def _ladder(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, cutoff)), 1)


@lru_cache(maxsize=128)
def _squeeze_unitary_cached(r: float, cutoff: int) -> np.ndarray:
    a = _ladder(cutoff)
    a2 = a @ a
    gen = 0.5 * r * (a2.T - a2)
    u = expm(gen).astype(np.complex128)
    u.flags.writeable = False
    return u


def squeeze_unitary(spec, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """exp(-(r/2)(a^2 - adag^2)) on the truncated basis.

    Columns near the cutoff are inaccurate (the generator is truncated);
    the validated regime keeps |r| <= 0.5 at cutoff 30. The returned
    matrix is cached and read-only.
    """
    return _squeeze_unitary_cached(_squeeze_r(spec), int(cutoff))


@lru_cache(maxsize=64)
def _beam_splitter_cached(reflectivity: float, transmittivity: float, cutoff: int) -> np.ndarray:
    theta = math.atan2(reflectivity, transmittivity)
    c = cutoff
    u = np.zeros((c * c, c * c), dtype=np.complex128)
    for total in range(2 * c - 1):
        ks = np.arange(max(0, total - c + 1), min(total, c - 1) + 1)
        d = len(ks)
        flat = ks * c + (total - ks)
        if d == 1:
            u[flat[0], flat[0]] = 1.0
            continue
        # generator of adag_1 a_2 - a_1 adag_2 restricted to this block
        g = np.zeros((d, d))
        k = ks[:-1]
        amp = np.sqrt((k + 1.0) * (total - k))
        g[np.arange(1, d), np.arange(d - 1)] = amp
        g[np.arange(d - 1), np.arange(1, d)] = -amp
        u[np.ix_(flat, flat)] = expm(theta * g)
    u.flags.writeable = False
    return u


def beam_splitter_unitary(params: BeamSplitterParams, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Two-mode beam-splitter unitary, block-diagonal by total photon number.

    Each block is the exponential of the truncated mixing generator, so
    the matrix is exactly unitary and exactly number-conserving; blocks
    with total photon number above cutoff-1 are partial and only there
    does the matrix deviate from the untruncated physics. Cached and
    read-only.
    """
    return _beam_splitter_cached(params.reflectivity, params.transmittivity, int(cutoff))


def apply_beam_splitter(psi: MultiModeState, m1: int, m2: int,
                        params: BeamSplitterParams) -> MultiModeState:
    """Mix modes m1 (first input arm) and m2 through a beam splitter.

    Mode m1's amplitude appears with coefficient +t in output arm m1, so
    m1 keeps the transmitted field.
    """
    if m1 == m2:
        raise ValueError("beam splitter needs two distinct modes")
    u = beam_splitter_unitary(params, psi.cutoff)
    return apply_two_mode(u, psi, m1, m2)
