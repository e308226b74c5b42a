"""Scattering ratios and transmittance/reflectance of a dipole at the focus.

Closed forms live next to a far-field oracle that never uses them: the
oracle superposes the outgoing incident field and the scattered dipole
wave on the forward reference sphere and integrates the Poynting flux.

Normalisation: T is the power collected in the forward cone theta <= beta
divided by what the same cone collects without the dipole.  R is the
power scattered into the mirror cone about -z with the same half angle,
divided by the same reference.  For beta >= alpha the reference is the
full incident power.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .illumination import (MIN_ANGLE, PLANE_WAVE, SIGMA0, GeometryConfig, K,
                           IlluminationMode, ModeKind, dipole_pattern,
                           focal_energy_density, focal_fields, i0_closed_form,
                           incident_power, strength_cartesian)
from .numerics import DEFAULT_RTOL, integrate_cap
from .scattering import OscillatorParams, lorentzian_weight, scattering_amplitude

K0_MAX = 2.0


@dataclass(frozen=True)
class ScatteringRatio:
    K0: float
    mode: IlluminationMode
    alpha: float


@dataclass(frozen=True)
class TransmittanceResult:
    T: float
    R: float
    alpha: float
    beta: float
    detuning_over_gamma: float


def _check_angle(name, value):
    if not (math.isfinite(value) and MIN_ANGLE <= value <= 0.5 * math.pi + 1e-15):
        raise DomainError(f"{name} must lie in [{MIN_ANGLE}, pi/2], got {value!r}")


def _one_minus_cos(a):
    return 2.0 * math.sin(0.5 * a) ** 2


def k0_closed_form(mode, alpha):
    """Resonant scattering ratio sigma0 / A from the closed expressions.

    plane wave   (128/75) [1 - (5 + 3c) c^{3/2} / 8]^2 / sin^2(alpha)
    p + m        (7 - 3c - 3c^2 - c^3) / 4
    p_x          (4 - 3c - c^3) / 2
    p_z          2 - 3c + c^3
    with c = cos(alpha); the polynomials are evaluated in factored form.
    """
    _check_angle("alpha", alpha)
    kind = mode.kind if isinstance(mode, IlluminationMode) else mode
    c = math.cos(alpha)
    omc = _one_minus_cos(alpha)
    if kind is ModeKind.PLANE_WAVE:
        bracket = float(i0_closed_form(alpha)) * 15.0 / 16.0
        k0 = 128.0 / 75.0 * bracket**2 / math.sin(alpha) ** 2
    elif kind is ModeKind.DIPOLE_PLUS_MAGNETIC:
        opc = 1.0 + c
        k0 = omc * (4.0 + 2.0 * opc + opc * opc) / 4.0
    elif kind is ModeKind.DIPOLE_X:
        k0 = omc * (4.0 + c + c * c) / 2.0
    elif kind is ModeKind.DIPOLE_Z:
        k0 = omc * omc * (2.0 + c)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    if not isinstance(mode, IlluminationMode):
        mode = IlluminationMode(kind)
    return ScatteringRatio(K0=k0, mode=mode, alpha=alpha)


def k0_oracle(mode, geom, rtol=DEFAULT_RTOL):
    """K0 = 2 c W_el(O) sigma0 / P_inc with both factors from quadrature."""
    k0 = 2.0 * focal_energy_density(mode, geom, rtol) * SIGMA0 / incident_power(mode, geom, rtol)
    return ScatteringRatio(K0=k0, mode=mode, alpha=geom.alpha)


def transmission_factor_x(beta):
    """X(beta) = (4 - 3 cos beta - cos^3 beta) / 8."""
    c = math.cos(beta)
    return _one_minus_cos(beta) * (4.0 + c + c * c) / 8.0


def transmittance_closed_form(alpha, beta, detuning_over_gamma=0.0):
    """Plane-wave transmittance and reflectance.

    T = 1 + L (3 I0(a) / (2 sin^2 g)) [X(b) I0(a) - I0(g)],  g = min(a, b),
    R = L (3 I0(a)^2 / (2 sin^2 g)) X(b),
    with L = Gamma^2 / (4 Delta^2 + Gamma^2).  The detuning enters only
    through L because the scattered amplitude is l = Gamma/(Gamma - 2i Delta)
    times its resonant value and Re l = |l|^2.
    """
    _check_angle("alpha", alpha)
    _check_angle("beta", beta)
    gamma = min(alpha, beta)
    weight = lorentzian_weight(OscillatorParams(1.0, detuning_over_gamma))
    i0a = float(i0_closed_form(alpha))
    i0g = float(i0_closed_form(gamma))
    x = transmission_factor_x(beta)
    scale = 3.0 * i0a / (2.0 * math.sin(gamma) ** 2)
    t = 1.0 + weight * scale * (x * i0a - i0g)
    r = weight * scale * i0a * x
    return TransmittanceResult(T=t, R=r, alpha=alpha, beta=beta,
                               detuning_over_gamma=detuning_over_gamma)


def dipole_wave_transmittance_closed_form(alpha, beta, detuning_over_gamma=0.0):
    """Transmittance for x-dipole-wave illumination.

    With P(t) = (4 - 3 cos t - cos^3 t) / 3 (the dipole pattern's power
    inside a cone, in units of pi) and c = P(alpha) / P(pi/2):
    T = 1 - L [2 c P(g) - c^2 P(b)] / P(g).  At alpha = beta = pi/2 this is
    1 - L.
    """
    _check_angle("alpha", alpha)
    _check_angle("beta", beta)
    gamma = min(alpha, beta)
    weight = lorentzian_weight(OscillatorParams(1.0, detuning_over_gamma))

    def cone(t):
        return 8.0 * transmission_factor_x(t) / 3.0

    c = cone(alpha) / cone(0.5 * math.pi)
    t = 1.0 - weight * (2.0 * c * cone(gamma) - c * c * cone(beta)) / cone(gamma)
    r = weight * c * c * cone(beta) / cone(gamma)
    return TransmittanceResult(T=t, R=r, alpha=alpha, beta=beta,
                               detuning_over_gamma=detuning_over_gamma)


def transmittance_oracle(mode, geom, p, rtol=DEFAULT_RTOL):
    """Transmittance and reflectance from far-field flux quadrature.

    On a sphere of radius r >> lambda the incident field leaves the focus
    as -(f/r) E0 g exp(ikr), and the dipole (along the mode's focal
    polarisation) radiates a(p) E_inc(O) exp(ikr)/(kr) times its
    transverse pattern, where a(p) is the oscillator or two-level-system
    amplitude.  Both are multiplied by r and the common exp(ikr) dropped.
    """
    axis = mode.axis
    e_o, _ = focal_fields(mode, geom, rtol)
    drive = e_o["xyz".index(axis)]
    sca = scattering_amplitude(p) * drive / K
    inc = -geom.focal_length * mode.amplitude

    def forward(theta, phi):
        field_ = inc * strength_cartesian(mode, theta, phi, geom.alpha)
        field_ = field_ + sca * dipole_pattern(axis, theta, phi)
        return 0.5 * np.sum(np.abs(field_) ** 2, axis=-1)

    def unperturbed(theta, phi):
        g = strength_cartesian(mode, theta, phi, geom.alpha)
        return 0.5 * inc**2 * np.sum(g * g, axis=-1)

    def backward(theta, phi):
        return 0.5 * abs(sca) ** 2 * np.sum(dipole_pattern(axis, theta, phi) ** 2, axis=-1)

    gamma = geom.gamma
    ref = float(integrate_cap(unperturbed, gamma, rtol=rtol))
    fwd = float(integrate_cap(forward, gamma, rtol=rtol))
    if geom.beta > gamma:
        fwd += float(integrate_cap(forward, geom.beta, gamma, rtol=rtol))
    back = float(integrate_cap(backward, math.pi, math.pi - geom.beta, rtol=rtol))
    return TransmittanceResult(T=fwd / ref, R=back / ref, alpha=geom.alpha, beta=geom.beta,
                               detuning_over_gamma=p.detuning / p.gamma)


@dataclass
class ReflectanceReport:
    alphas: list
    reflectance: list
    expected: list
    max_reflectance: float = field(init=False)
    argmax_alpha: float = field(init=False)

    def __post_init__(self):
        i = int(np.argmax(self.reflectance))
        self.max_reflectance = float(self.reflectance[i])
        self.argmax_alpha = float(self.alphas[i])

    @property
    def max_abs_deviation(self):
        return float(np.max(np.abs(np.subtract(self.reflectance, self.expected))))


def reflectance_bound_check(alpha_grid, rtol=DEFAULT_RTOL):
    """Resonant back-hemisphere reflectance of a focused plane wave along ``alpha_grid``.

    Each value comes from the oracle with a full backward hemisphere
    (beta = pi/2); the expected value is half the scattering ratio.
    """
    p = OscillatorParams()
    refl, expected = [], []
    for a in alpha_grid:
        res = transmittance_oracle(PLANE_WAVE, GeometryConfig(a, 0.5 * math.pi), p, rtol)
        refl.append(res.R)
        expected.append(0.5 * k0_closed_form(PLANE_WAVE, a).K0)
    return ReflectanceReport(list(alpha_grid), refl, expected)


def golden_section_minimize(f, a, b, tol=1e-6):
    """Minimiser of a unimodal ``f`` on [a, b], located to within ``tol``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def shadow_boundary_minimum(tol=1e-6):
    """(alpha, T) at the minimum of the resonant plane-wave T along beta = alpha."""
    return golden_section_minimize(
        lambda a: transmittance_closed_form(a, a, 0.0).T, 0.05, 0.5 * math.pi, tol)


def k0_unity_crossing(mode, tol=1e-12):
    """Entrance half angle at which the closed-form K0 reaches 1 (bisection)."""
    lo, hi = MIN_ANGLE, 0.5 * math.pi
    if k0_closed_form(mode, hi).K0 < 1.0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if k0_closed_form(mode, mid).K0 < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
