"""Point-oscillator and two-level-system response.

Frequencies (linewidth, detuning, Rabi frequency) share one arbitrary
unit; only their ratios enter.  Lengths follow the package convention
lambda = 1, so the resonant cross section is sigma0 = 3 / (2 pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .illumination import K, SIGMA0

FAR_FIELD_MIN_KR = 100.0


@dataclass(frozen=True)
class OscillatorParams:
    """Radiative linewidth ``gamma`` and laser detuning omega_L - omega_0."""

    gamma: float = 1.0
    detuning: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"linewidth must be positive, got {self.gamma!r}")
        if math.isnan(self.detuning):
            raise DomainError("detuning must not be NaN")


@dataclass(frozen=True)
class TlsParams:
    """Two-level system: oscillator parameters plus the Rabi frequency magnitude."""

    oscillator: OscillatorParams
    rabi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.rabi) and self.rabi >= 0):
            raise DomainError(f"Rabi frequency must be a non-negative magnitude, got {self.rabi!r}")

    @property
    def gamma(self):
        return self.oscillator.gamma

    @property
    def detuning(self):
        return self.oscillator.detuning


@dataclass(frozen=True)
class ScatteredField:
    amplitude: complex
    polarization_axis: str = "x"


def rabi_frequency(dipole_moment, field_amplitude, angle=0.0, hbar=1.0):
    """|d12 . E_inc(O)| / hbar for a dipole at ``angle`` to the field."""
    return abs(dipole_moment * field_amplitude * math.cos(angle)) / hbar


def cross_section(p):
    """sigma0 * Gamma^2 / (4 Delta^2 + Gamma^2)."""
    return SIGMA0 * lorentzian_weight(p)


def cross_section_tls(p):
    """Saturated cross section sigma0 * Gamma^2 / (4 Delta^2 + Gamma^2 + 2 V^2)."""
    g, d = p.gamma, p.detuning
    if math.isinf(d):
        return 0.0
    return SIGMA0 * (g * g / (4.0 * d * d + g * g + 2.0 * p.rabi**2))


def lorentzian_weight(p):
    """L = Gamma^2 / (4 Delta^2 + Gamma^2), in (0, 1] with L(0) = 1.

    With l = Gamma / (Gamma - 2 i Delta) one has Re l = |l|^2 = L, which is
    why the interference term and the scattered power scale together.
    """
    g, d = p.gamma, p.detuning
    if math.isinf(d):
        return 0.0
    return g * g / (4.0 * d * d + g * g)


def scattering_amplitude(p):
    """Complex factor multiplying E_inc(O) exp(ikr)/(kr) in the scattered field.

    Classical oscillator: -3 Gamma / (2 (2 Delta + i Gamma)).
    Two-level system (coherent part): -3 Gamma (Delta - i Gamma/2) / (4 Delta^2 + Gamma^2 + 2 V^2).
    """
    if isinstance(p, TlsParams):
        g, d = p.gamma, p.detuning
        if math.isinf(d):
            return 0j
        return -3.0 * g * (d - 0.5j * g) / (4.0 * d * d + g * g + 2.0 * p.rabi**2)
    if math.isinf(p.detuning):
        return 0j
    return -3.0 * p.gamma / (2.0 * (2.0 * p.detuning + 1j * p.gamma))


def _far_field(amplitude, e_inc_at_o, r_hat, kr, axis):
    if not kr >= FAR_FIELD_MIN_KR:
        raise DomainError(f"far-field expression needs kr >= {FAR_FIELD_MIN_KR}, got {kr!r}")
    r_hat = np.asarray(r_hat, dtype=float)
    norm = np.linalg.norm(r_hat, axis=-1, keepdims=True)
    if np.any(np.abs(norm - 1.0) > 1e-12):
        raise DomainError("r_hat must be a unit vector")
    d = np.zeros(3)
    d["xyz".index(axis)] = 1.0
    pattern = d - (r_hat @ d)[..., None] * r_hat
    return amplitude * e_inc_at_o * np.exp(1j * kr) / kr * pattern


def scattered_far_field(p, e_inc_at_o, r_hat, kr, axis="x"):
    """Dipole-wave field scattered by a classical oscillator at the focus.

    ``e_inc_at_o`` is the complex field component along the dipole
    ``axis``; ``r_hat`` may be a stack of unit vectors (..., 3).
    """
    return _far_field(scattering_amplitude(p), e_inc_at_o, r_hat, kr, axis)


def coherent_scattered_field_tls(p, e_inc_at_o, r_hat, kr, axis="x"):
    """Coherently scattered far field of a driven two-level system."""
    if not isinstance(p, TlsParams):
        raise DomainError("coherent_scattered_field_tls needs TlsParams")
    return _far_field(scattering_amplitude(p), e_inc_at_o, r_hat, kr, axis)


def scattered_power(p, e_inc_at_o):
    """Total power of the scattered dipole wave, (1/2) int r^2 |E_sca|^2 dOmega.

    The angular integral of a transverse dipole pattern is 8 pi / 3.
    """
    a = scattering_amplitude(p)
    return 0.5 * abs(a * e_inc_at_o) ** 2 * (8.0 * math.pi / 3.0) / K**2
