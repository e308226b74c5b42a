"""Focused illumination: reference-sphere fields, focal fields, powers, areas.

Unit system: wavelength, c, epsilon_0 and mu_0 are all 1, so k = 2*pi and
the vacuum impedance is 1.  The field on the Gaussian reference sphere
(radius f) in direction s = (theta, phi) is ``amplitude * g(theta, phi)``
where ``g`` is the strength vector, transverse to s.  Light travels
along +z; every angular spectrum component travels along s.

The focal field follows from the Debye integral

    E(r) = -i (k f / 2 pi) * amplitude * int g(s) exp(i k s.r) dOmega,

with the global phase exp(i k f) dropped.  H is the same superposition
of s x g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AccuracyError, DomainError
from .numerics import DEFAULT_RTOL, bessel_j, integrate_1d, integrate_cap

K = 2.0 * math.pi
SIGMA0 = 3.0 / (2.0 * math.pi)  # resonant cross section 3 lambda^2 / (2 pi)
BASSETT_LIMIT = K**2 / (3.0 * math.pi)  # k^2 / (3 pi c)
MIN_ANGLE = 1e-3
FOCAL_PLANE_RHO_MAX = 200.0


class ModeKind(Enum):
    PLANE_WAVE = "pw"
    DIPOLE_X = "px"
    DIPOLE_Z = "pz"
    DIPOLE_PLUS_MAGNETIC = "pm"


@dataclass(frozen=True)
class IlluminationMode:
    """An illumination family and its overall field amplitude."""

    kind: ModeKind
    amplitude: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise DomainError(f"amplitude must be positive, got {self.amplitude}")

    @property
    def axis(self):
        """Cartesian direction of the field at the focus."""
        return "z" if self.kind is ModeKind.DIPOLE_Z else "x"

    @classmethod
    def parse(cls, text, amplitude=1.0):
        aliases = {
            "pw": ModeKind.PLANE_WAVE, "plane": ModeKind.PLANE_WAVE,
            "planewave": ModeKind.PLANE_WAVE, "plane_wave": ModeKind.PLANE_WAVE,
            "px": ModeKind.DIPOLE_X, "dipolex": ModeKind.DIPOLE_X, "dipole_x": ModeKind.DIPOLE_X,
            "pz": ModeKind.DIPOLE_Z, "dipolez": ModeKind.DIPOLE_Z, "dipole_z": ModeKind.DIPOLE_Z,
            "pm": ModeKind.DIPOLE_PLUS_MAGNETIC, "p+m": ModeKind.DIPOLE_PLUS_MAGNETIC,
            "dipoleplusmagnetic": ModeKind.DIPOLE_PLUS_MAGNETIC,
            "dipole_plus_magnetic": ModeKind.DIPOLE_PLUS_MAGNETIC,
        }
        try:
            return cls(aliases[text.strip().lower()], amplitude)
        except KeyError:
            raise DomainError(f"unknown illumination mode {text!r}") from None


PLANE_WAVE = IlluminationMode(ModeKind.PLANE_WAVE)
DIPOLE_X = IlluminationMode(ModeKind.DIPOLE_X)
DIPOLE_Z = IlluminationMode(ModeKind.DIPOLE_Z)
DIPOLE_PLUS_MAGNETIC = IlluminationMode(ModeKind.DIPOLE_PLUS_MAGNETIC)
ALL_MODES = (PLANE_WAVE, DIPOLE_PLUS_MAGNETIC, DIPOLE_X, DIPOLE_Z)


@dataclass(frozen=True)
class GeometryConfig:
    """Entrance half angle, collection half angle and focal length.

    ``beta`` defaults to ``alpha`` (collection on the shadow boundary).
    """

    alpha: float
    beta: float | None = None
    focal_length: float = 1.0

    def __post_init__(self):
        if self.beta is None:
            object.__setattr__(self, "beta", self.alpha)
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and MIN_ANGLE <= value <= 0.5 * math.pi + 1e-15):
                raise DomainError(
                    f"{name} must lie in [{MIN_ANGLE}, pi/2], got {value!r}")
        if not (math.isfinite(self.focal_length) and self.focal_length > 0):
            raise DomainError(f"focal length must be positive, got {self.focal_length!r}")

    @property
    def aperture_radius(self):
        return self.focal_length * math.sin(self.alpha)

    @property
    def gamma(self):
        return min(self.alpha, self.beta)


@dataclass(frozen=True)
class DiffractionIntegrals:
    rho: np.ndarray | float
    I0: np.ndarray | float
    I1: np.ndarray | float
    I2: np.ndarray | float


@dataclass(frozen=True)
class FocalFieldSample:
    position: np.ndarray
    E: np.ndarray
    S_z: np.ndarray | float
    W_el: np.ndarray | float


# ---------------------------------------------------------------------------
# Angular spectrum on the reference sphere
# ---------------------------------------------------------------------------

def spherical_basis(theta, phi):
    """Unit vectors (e_r, e_theta, e_phi) as arrays with a trailing axis of 3."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    e_r = np.stack([st * cp, st * sp, ct], axis=-1)
    e_t = np.stack([ct * cp, ct * sp, -st], axis=-1)
    e_p = np.stack([-sp, cp, np.zeros_like(theta)], axis=-1)
    return e_r, e_t, e_p


def strength_vector(mode, theta, phi, alpha=0.5 * math.pi):
    """Angular amplitude of ``mode`` as (theta, phi) components.

    Directions with theta > alpha (outside the entrance cone) or in the
    backward hemisphere get zero amplitude.  The overall amplitude of the
    mode is *not* applied here.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any((theta < 0) | (theta > math.pi)):
        raise DomainError("theta must lie in [0, pi]")
    theta, phi = np.broadcast_arrays(theta, phi)
    ct = np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    kind = mode.kind if isinstance(mode, IlluminationMode) else mode
    if kind is ModeKind.PLANE_WAVE:
        root = np.sqrt(np.clip(ct, 0.0, None))
        a_t, a_p = root * cp, -root * sp
    elif kind is ModeKind.DIPOLE_X:
        a_t, a_p = ct * cp, -sp
    elif kind is ModeKind.DIPOLE_Z:
        a_t, a_p = np.sin(theta), np.zeros_like(theta)
    elif kind is ModeKind.DIPOLE_PLUS_MAGNETIC:
        w = 0.5 * (1.0 + ct)
        a_t, a_p = w * cp, -w * sp
    else:
        raise DomainError(f"unknown mode {mode!r}")
    inside = (theta <= alpha) & (theta <= 0.5 * math.pi)
    return np.where(inside, a_t, 0.0), np.where(inside, a_p, 0.0)


def strength_cartesian(mode, theta, phi, alpha=0.5 * math.pi):
    """Strength vector in Cartesian components, shape (..., 3)."""
    a_t, a_p = strength_vector(mode, theta, phi, alpha)
    _, e_t, e_p = spherical_basis(theta, phi)
    return a_t[..., None] * e_t + a_p[..., None] * e_p


def dipole_pattern(axis, theta, phi):
    """Transverse far-field pattern d - (d.r)r of a unit dipole along ``axis``."""
    e_r, _, _ = spherical_basis(theta, phi)
    d = np.zeros(3)
    d["xyz".index(axis)] = 1.0
    return d - (e_r @ d)[..., None] * e_r


# ---------------------------------------------------------------------------
# Powers and focal fields
# ---------------------------------------------------------------------------

def incident_power(mode, geom, rtol=DEFAULT_RTOL):
    """Poynting flux through the reference-sphere cap theta <= alpha."""
    def density(theta, phi):
        a_t, a_p = strength_vector(mode, theta, phi, geom.alpha)
        return a_t**2 + a_p**2
    flux = integrate_cap(density, geom.alpha, rtol=rtol)
    return 0.5 * (mode.amplitude * geom.focal_length) ** 2 * float(flux)


def aperture_power(geom, amplitude=1.0):
    """Plane-wave power crossing the entrance aperture, c eps0 E0^2 pi a^2 / 2."""
    return 0.5 * amplitude**2 * math.pi * geom.aperture_radius**2


def focal_fields(mode, geom, rtol=DEFAULT_RTOL):
    """Complex (E, H) Cartesian vectors at the focus from the Debye integral."""
    def integrand(theta, phi):
        g = strength_cartesian(mode, theta, phi, geom.alpha)
        e_r, _, _ = spherical_basis(theta, phi)
        return np.concatenate([g, np.cross(e_r, g)], axis=-1)
    total = integrate_cap(integrand, geom.alpha, rtol=rtol, atol=1e-14)
    pref = -1j * K * geom.focal_length / (2.0 * math.pi) * mode.amplitude
    return pref * total[:3], pref * total[3:]


def focal_energy_density(mode, geom, rtol=DEFAULT_RTOL):
    """Time-averaged electric energy density eps0 |E(O)|^2 / 4 at the focus."""
    e, _ = focal_fields(mode, geom, rtol)
    return 0.25 * float(np.vdot(e, e).real)


def focal_magnetic_energy_density(mode, geom, rtol=DEFAULT_RTOL):
    _, h = focal_fields(mode, geom, rtol)
    return 0.25 * float(np.vdot(h, h).real)


def i0_closed_form(xi):
    """On-axis diffraction integral (16/15)[1 - (5 + 3 cos xi) cos^{3/2} xi / 8].

    Evaluated as (2/3)(1 - c^{3/2}) + (2/5)(1 - c^{5/2}) with expm1 so
    that small angles keep full relative precision.
    """
    xi = np.asarray(xi, dtype=float)
    with np.errstate(divide="ignore"):
        log_c = np.log1p(-2.0 * np.sin(0.5 * xi) ** 2)
    out = -(2.0 / 3.0) * np.expm1(1.5 * log_c) - 0.4 * np.expm1(2.5 * log_c)
    return out[()] if out.ndim == 0 else out


def plane_wave_energy_density_closed(geom, amplitude=1.0):
    """eps0 (pi f E0 |I0(O)| / 2 lambda)^2 for the aplanatic plane wave."""
    return (math.pi * geom.focal_length * amplitude * i0_closed_form(geom.alpha) / 2.0) ** 2


def effective_area(mode, geom, rtol=DEFAULT_RTOL, check_focal_plane=False):
    """Effective focal area P_inc / (2 c W_el(O)).

    With ``check_focal_plane`` (plane wave only) the focal-plane flux route
    is evaluated as well and an AccuracyError is raised if the two routes
    differ by more than 1e-4 relative.
    """
    area = incident_power(mode, geom, rtol) / (2.0 * focal_energy_density(mode, geom, rtol))
    if check_focal_plane:
        if mode.kind is not ModeKind.PLANE_WAVE:
            raise DomainError("the focal-plane route exists for the plane wave only")
        other = effective_area_focal_plane(geom)
        if abs(other - area) > 1e-4 * area:
            raise AccuracyError(
                f"effective-area routes disagree: {area!r} vs {other!r}",
                estimate=area, gap=abs(other - area))
    return area


# ---------------------------------------------------------------------------
# Diffraction integrals and the focal plane (plane-wave illumination)
# ---------------------------------------------------------------------------

def _bessel_012(x):
    j0 = bessel_j(0, x)
    j1 = bessel_j(1, x)
    small = x < 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        j2 = np.where(small, 0.0, 2.0 * j1 / x - j0)
    if np.any(small):
        j2[small] = bessel_j(2, x[small])
    return j0, j1, j2


def _diffraction_kernel(alpha, rho, orders):
    rho = np.atleast_1d(np.asarray(rho, dtype=float))

    def f(v):
        c = np.sin(v * v)  # cos(theta), accurate near the rim
        s = np.cos(v * v)
        base = 2.0 * v * np.sqrt(c) * s  # sqrt(cos t) sin t |dt/dv|
        x = K * np.outer(s, rho)
        j0, j1, j2 = _bessel_012(x)
        cols = []
        if 0 in orders:
            cols.append((base * (1.0 + c))[:, None] * j0)
        if 1 in orders:
            cols.append((base * s)[:, None] * j1)
        if 2 in orders:
            cols.append((base * (1.0 - c))[:, None] * j2)
        return np.stack(cols, axis=-1)

    return f, rho


def diffraction_integrals(geom, rho, rtol=DEFAULT_RTOL):
    """Focal-plane diffraction integrals I0, I1, I2 at radial distance ``rho``.

    I_n = int_0^alpha sqrt(cos t) sin t g_n(t) J_n(k rho sin t) dt with
    g0 = 1 + cos t, g1 = sin t, g2 = 1 - cos t.  ``rho`` may be an array.
    """
    rho_arr = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(rho_arr)):
        raise DomainError("rho must be finite")
    f, flat = _diffraction_kernel(geom.alpha, np.abs(rho_arr), (0, 1, 2))
    panels = max(1, int(2 ** math.ceil(math.log2(1.0 + float(np.max(flat, initial=0.0))))))
    v_hi = math.sqrt(0.5 * math.pi)
    v_lo = math.sqrt(0.5 * math.pi - geom.alpha)
    vals = integrate_1d(f, v_lo, v_hi, rtol=rtol, atol=1e-14, panels=panels)
    vals = np.asarray(vals).reshape(flat.shape + (3,))
    if rho_arr.ndim == 0:
        return DiffractionIntegrals(float(rho_arr), float(vals[0, 0]),
                                    float(vals[0, 1]), float(vals[0, 2]))
    shape = rho_arr.shape
    return DiffractionIntegrals(rho_arr, vals[:, 0].reshape(shape),
                                vals[:, 1].reshape(shape), vals[:, 2].reshape(shape))


def focal_plane_profile(geom, x, mode=PLANE_WAVE, rtol=DEFAULT_RTOL):
    """Field, S_z and W_el along the focal-plane x axis, normalised at x = 0.

    With A = k f E0 / 2 the focal-plane field on the phi = 0 ray is
    E = (-i A (I0 + I2), 0, -2 A I1) and S_z = |A|^2 (I0^2 - I2^2) / 2.
    """
    if mode.kind is not ModeKind.PLANE_WAVE:
        raise DomainError("focal-plane profiles are available for the plane wave only")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("x must be finite")
    flat = np.atleast_1d(x)
    di = diffraction_integrals(geom, np.concatenate([[0.0], np.abs(flat)]), rtol)
    sign = np.sign(np.concatenate([[1.0], flat]))
    sign[sign == 0] = 1.0
    amp = K * geom.focal_length * mode.amplitude / 2.0
    i0, i1, i2 = di.I0, sign * di.I1, di.I2
    e = np.stack([-1j * amp * (i0 + i2), np.zeros_like(i0, dtype=complex),
                  -2.0 * amp * i1 + 0j], axis=-1)
    s_z = 0.5 * amp**2 * (i0**2 - i2**2)
    w_el = 0.25 * np.sum(np.abs(e) ** 2, axis=-1)
    s_z, w_el = s_z[1:] / s_z[0], w_el[1:] / w_el[0]
    pos = np.stack([flat, np.zeros_like(flat), np.zeros_like(flat)], axis=-1)
    if x.ndim == 0:
        return FocalFieldSample(pos[0], e[1], float(s_z[0]), float(w_el[0]))
    return FocalFieldSample(pos, e[1:], s_z, w_el)


def focal_plane_tail(geom, rho_max):
    """Mean of int_{rho > rho_max} 2 pi rho (I0^2 - I2^2) drho.

    For large rho the diffraction integrals are dominated by the pupil
    edge.  A sharp edge at sin(alpha) = s0 gives a mean integrand of
    4 s0 / (pi k^3 rho^3) and a tail of 8 s0 / (k^3 rho_max); the full
    hemisphere has an integrable sqrt(cos) rim singularity, giving a mean
    of 1 / (k^3 rho^3) and a tail of 2 pi / (k^3 rho_max).  The edge
    formula assumes k rho_max (1 - sin alpha) >> 1.
    """
    if abs(geom.alpha - 0.5 * math.pi) < 1e-12:
        return 2.0 * math.pi / (K**3 * rho_max)
    return 8.0 * math.sin(geom.alpha) / (K**3 * rho_max)


def focal_plane_flux(geom, rho_max=FOCAL_PLANE_RHO_MAX, block=10.0, rtol=1e-9):
    """Focal-plane integral int 2 pi rho (I0^2 - I2^2) drho.

    Returns ``(truncated, tail)``: the quadrature over [0, rho_max] and the
    analytic estimate of the remainder (see :func:`focal_plane_tail`).
    The radial rule is 16-point Gauss-Legendre on panels of one lambda;
    the diffraction integrals at the radial nodes are evaluated in blocks
    so that the polar resolution follows the local oscillation rate.
    """
    from .numerics import gauss_legendre

    rule = gauss_legendre(16)
    total = 0.0
    start = 0.0
    while start < rho_max - 1e-12:
        stop = min(start + block, rho_max)
        n_pan = max(1, int(round(stop - start)))
        edges = np.linspace(start, stop, n_pan + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        rho = (mid[:, None] + half[:, None] * rule.nodes).ravel()
        w = (half[:, None] * rule.weights).ravel()
        f, _ = _diffraction_kernel(geom.alpha, rho, (0, 2))
        panels = max(1, int(2 ** math.ceil(math.log2(1.0 + stop))))
        vals = integrate_1d(f, math.sqrt(0.5 * math.pi - geom.alpha),
                            math.sqrt(0.5 * math.pi), rtol=rtol, atol=1e-13,
                            panels=panels)
        total += float(np.sum(w * 2.0 * math.pi * rho * (vals[:, 0] ** 2 - vals[:, 1] ** 2)))
        start = stop
    return total, focal_plane_tail(geom, rho_max)


def focal_plane_flux_exact(geom):
    """Closed value of the focal-plane integral from Bessel orthogonality.

    The Hankel closure relation turns int rho I_n^2 drho into
    k^-2 int g_n^2 sin t dt, so the whole integral is 4 pi sin^2(alpha) / k^2.
    """
    return 4.0 * math.pi * math.sin(geom.alpha) ** 2 / K**2


def effective_area_focal_plane(geom, rho_max=FOCAL_PLANE_RHO_MAX):
    """Plane-wave effective area from the focal-plane flux route."""
    truncated, tail = focal_plane_flux(geom, rho_max)
    return (truncated + tail) / diffraction_integrals(geom, 0.0).I0 ** 2


def bassett_ratio(mode, geom, rtol=DEFAULT_RTOL):
    """(W_el + W_mag)(O) / P_inc in the normalised unit system."""
    e, h = focal_fields(mode, geom, rtol)
    w = 0.25 * float(np.vdot(e, e).real + np.vdot(h, h).real)
    return w / incident_power(mode, geom, rtol)
