"""Constructors for the states the amplification protocol consumes.

Fock states, coherent states, cat states (superpositions of two opposite
coherent amplitudes), squeezed vacuum and the squeezed single photon.
All constructors renormalize within the truncated basis and record the
squared-norm deficit they absorbed as ``state.leakage``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import DEFAULT_CUTOFF, MultiModeState
from .optics import SqueezeSpec, _squeeze_r, squeeze_unitary

__all__ = [
    "CatSpec", "SqueezeSpec", "fock_state", "coherent_state", "cat_state",
    "squeezed_photon", "squeezed_vacuum",
]


@dataclass(frozen=True)
class CatSpec:
    """Names the ideal target state |alpha> + e^{i phi}|-alpha>.

    phi = pi is the odd cat (odd photon numbers only), phi = 0 the even
    cat. The amplitude is real and non-negative; opposite signs are
    absorbed into phi.
    """

    alpha: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ValueError(f"cat amplitude must be finite and >= 0, got {self.alpha}")
        if not math.isfinite(self.phi):
            raise ValueError("cat phase must be finite")

    @property
    def phi_mod(self) -> float:
        """Relative phase reduced to [0, 2*pi) for comparisons."""
        return self.phi % (2.0 * math.pi)


def _phase_factor(phi: float) -> complex:
    """e^{i phi}, snapped to exactly +-1 at the parity points so even and
    odd cats carry exact zeros on the opposite-parity amplitudes."""
    s, c = math.sin(phi), math.cos(phi)
    if abs(s) < 1e-12:
        return 1.0 if c > 0.0 else -1.0
    return complex(c, s)


def fock_state(n: int, cutoff: int = DEFAULT_CUTOFF) -> MultiModeState:
    """Number state |n>."""
    if not 0 <= n < cutoff:
        raise ValueError(f"photon number {n} outside truncated basis [0, {cutoff})")
    amp = np.zeros(cutoff, dtype=np.complex128)
    amp[n] = 1.0
    return MultiModeState(amp)


def _coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    # c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), by stable recurrence
    amp = np.zeros(cutoff, dtype=np.complex128)
    amp[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff):
        amp[n] = amp[n - 1] * alpha / math.sqrt(n)
    return amp


def coherent_state(alpha: complex, cutoff: int = DEFAULT_CUTOFF) -> MultiModeState:
    """Coherent state |alpha>, renormalized within the cutoff."""
    amp = _coherent_amplitudes(alpha, cutoff)
    nsq = float(np.vdot(amp, amp).real)
    deficit = max(0.0, 1.0 - nsq)
    return MultiModeState(amp / math.sqrt(nsq), leakage=deficit)


def cat_state(spec: "CatSpec | float", phi: float = math.pi,
              cutoff: int = DEFAULT_CUTOFF) -> MultiModeState:
    """Normalized |alpha> + e^{i phi}|-alpha>.

    Accepts either a CatSpec or (alpha, phi) floats. The normalization
    is numerical, so the state has unit norm within the truncated basis
    even where the closed-form factor would not.
    """
    if isinstance(spec, CatSpec):
        alpha, phi = spec.alpha, spec.phi
    else:
        alpha = float(spec)
        CatSpec(alpha, phi)  # validate
    ph = _phase_factor(phi)
    if alpha == 0.0 and ph == -1.0:
        raise ValueError("alpha = 0 with phi = pi names the null vector")
    plus = _coherent_amplitudes(alpha, cutoff)
    minus = _coherent_amplitudes(-alpha, cutoff)
    amp = plus + ph * minus
    nsq = float(np.vdot(amp, amp).real)
    if nsq <= 0.0:
        raise ValueError("cat parameters produce a null vector")
    # leakage relative to the untruncated norm 2(1 + cos(phi) e^{-2 alpha^2})
    full = 2.0 * (1.0 + ph.real * math.exp(-2.0 * alpha * alpha))
    deficit = max(0.0, 1.0 - nsq / full)
    return MultiModeState(amp / math.sqrt(nsq), leakage=deficit)


def squeezed_photon(spec: "SqueezeSpec | float", cutoff: int = DEFAULT_CUTOFF) -> MultiModeState:
    """Squeezed single photon, expanded over odd number states.

    Coefficients follow tanh(r)^n sqrt((2n+1)!) / (cosh(r)^{3/2} 2^n n!)
    on |2n+1>, evaluated in log space to survive the factorials. Even
    amplitudes are exactly zero.
    """
    r = _squeeze_r(spec)
    t = math.tanh(r)
    amp = np.zeros(cutoff, dtype=np.complex128)
    if t == 0.0:
        amp[1] = 1.0
        return MultiModeState(amp)
    ln_ch = math.log(math.cosh(r))
    total = 0.0
    for n in range((cutoff - 2) // 2 + 1):
        ln_c = (n * math.log(abs(t)) + 0.5 * math.lgamma(2 * n + 2)
                - 1.5 * ln_ch - n * math.log(2.0) - math.lgamma(n + 1))
        sign = -1.0 if (t < 0.0 and n % 2 == 1) else 1.0
        amp[2 * n + 1] = sign * math.exp(ln_c)
        total += math.exp(2.0 * ln_c)
    deficit = max(0.0, 1.0 - total)
    return MultiModeState(amp / math.sqrt(total), leakage=deficit)


def squeezed_vacuum(spec: "SqueezeSpec | float", cutoff: int = DEFAULT_CUTOFF) -> MultiModeState:
    """Squeezed vacuum, built by applying the squeeze unitary to |0>.

    Deriving the vector from the same unitary that squeezes photons keeps
    the sign convention in one place. Odd amplitudes are exactly zero.
    """
    r = _squeeze_r(spec)
    amp = squeeze_unitary(r, cutoff)[:, 0].copy()
    amp[1::2] = 0.0
    nsq = float(np.vdot(amp, amp).real)
    # true truncation deficit from the closed-form series on |2n>
    t = math.tanh(r)
    kept = 0.0
    if t == 0.0:
        kept = 1.0
    else:
        ln_ch = math.log(math.cosh(r))
        for n in range((cutoff - 1) // 2 + 1):
            ln_c2 = (2.0 * (n * math.log(abs(t)) + 0.5 * math.lgamma(2 * n + 1)
                            - n * math.log(2.0) - math.lgamma(n + 1)) - ln_ch)
            kept += math.exp(ln_c2)
    deficit = max(0.0, 1.0 - kept)
    return MultiModeState(amp / math.sqrt(nsq), leakage=deficit)
