"""Electric-dipole-wave content of focused fields and the perfect-reflection identity.

The lowest electric multipole N_e11 is the only vector multipole that
does not vanish at the origin, where it equals (2/3) e_x.  Far from the
origin its outgoing part is the x-dipole pattern times
exp(i(kr - pi/2)) / kr; the -pi/2 is the Gouy shift relative to a free
spherical wave.  Only the two limits are modelled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .illumination import (DIPOLE_X, dipole_pattern, focal_fields,
                           spherical_basis, strength_cartesian)
from .numerics import DEFAULT_RTOL, integrate_cap
from .scattering import (FAR_FIELD_MIN_KR, OscillatorParams, scattered_far_field,
                         scattering_amplitude)

GOUY_PHASE = -0.5 * math.pi
N_E11_ORIGIN = 2.0 / 3.0


@dataclass(frozen=True)
class DipoleModeAmplitude:
    coefficient: complex
    content_fraction: float
    axis: str = "x"


def n_e11(theta, phi, kr, gouy=GOUY_PHASE):
    """Electric dipole mode N_e11 as a Cartesian complex vector (..., 3).

    ``kr == 0`` gives the origin value (2/3) e_x; ``kr >= 100`` the outgoing
    far field.  ``gouy`` exists so tests can corrupt the phase on purpose.
    """
    if kr == 0:
        theta, _ = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        out = np.zeros(theta.shape + (3,), dtype=complex)
        out[..., 0] = N_E11_ORIGIN
        return out
    if not kr >= FAR_FIELD_MIN_KR:
        raise DomainError(
            f"N_e11 is modelled only at the origin and for kr >= {FAR_FIELD_MIN_KR}; got kr={kr!r}")
    pattern = dipole_pattern("x", theta, phi)
    return pattern * (np.exp(1j * (kr + gouy)) / kr)


def _overlap(f, g, alpha, rtol):
    def integrand(theta, phi):
        return np.sum(f(theta, phi) * g(theta, phi), axis=-1)
    return float(integrate_cap(integrand, alpha, rtol=rtol, atol=1e-14))


def dipole_wave_component(mode, geom, axis=None, rtol=DEFAULT_RTOL):
    """Dipole-wave coefficient and the fraction of incident power it carries.

    The coefficient multiplying N_e11 is E_inc(O) / |N_e11(O)| = (3/2) E_inc(O).
    The content fraction is the normalised overlap
    |<g, p>|^2 / (<g, g> <p, p>) over the entrance cap, where g is the
    strength vector and p the dipole pattern along ``axis`` (default: the
    mode's own focal polarisation).
    """
    axis = mode.axis if axis is None else axis
    if axis not in ("x", "y", "z"):
        raise DomainError(f"axis must be x, y or z, got {axis!r}")

    def g(theta, phi):
        return strength_cartesian(mode, theta, phi, geom.alpha)

    def p(theta, phi):
        return dipole_pattern(axis, theta, phi)

    gp = _overlap(g, p, geom.alpha, rtol)
    gg = _overlap(g, g, geom.alpha, rtol)
    pp = _overlap(p, p, geom.alpha, rtol)
    fraction = gp * gp / (gg * pp)
    e_o, _ = focal_fields(mode, geom, rtol)
    coeff = e_o["xyz".index(axis)] / N_E11_ORIGIN
    return DipoleModeAmplitude(coefficient=complex(coeff), content_fraction=fraction, axis=axis)


def relative_phase(p, gouy=GOUY_PHASE):
    """Phase of E_sca relative to the outgoing dipole-wave component, in (-pi, pi]."""
    phase = np.angle(scattering_amplitude(p)) - gouy
    return float(math.pi - (math.pi - phase) % (2.0 * math.pi))


def verify_perfect_reflection(geom, p=None, kr=1e4, gouy=GOUY_PHASE, n_theta=46, n_phi=72):
    """Max relative residual |E_sca + Psi| / |Psi| over the forward hemisphere.

    Uses x-dipole-wave illumination.  Directions where the dipole pattern
    vanishes (|Psi| below 1e-9 of its maximum) are skipped.
    """
    p = OscillatorParams() if p is None else p
    e_o, _ = focal_fields(DIPOLE_X, geom)
    e_x = e_o[0]
    theta = np.linspace(0.0, 0.5 * math.pi, n_theta)[:, None]
    phi = (2.0 * math.pi * np.arange(n_phi) / n_phi)[None, :]
    r_hat, _, _ = spherical_basis(theta, phi)
    psi = e_x / N_E11_ORIGIN * n_e11(theta, phi, kr, gouy)
    e_sca = scattered_far_field(p, e_x, r_hat, kr)
    mag = np.linalg.norm(psi, axis=-1)
    keep = mag > 1e-9 * mag.max()
    resid = np.linalg.norm(e_sca + psi, axis=-1)[keep] / mag[keep]
    return float(resid.max())
