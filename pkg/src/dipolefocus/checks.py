"""Invariant checks bundled behind the ``verify`` command.

Each check returns a :class:`CheckResult` with the measured residual and
the tolerance it was held to.  Tolerances of oracle-equivalence checks are
loosened to ``10 * quad_tol`` when a coarse quadrature tolerance is
requested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import illumination as il
from . import multipole as mp
from . import numerics as nm
from . import scattering as sc
from . import transmittance as tr


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    tolerance: float
    passed: bool


def _le(name, measured, tol):
    return CheckResult(name, float(measured), float(tol), bool(measured <= tol))


def check_bessel_recurrence(quad_tol):
    x = np.logspace(-1, 2, 200)
    resid = np.abs(nm.bessel_j(0, x) + nm.bessel_j(2, x) - 2.0 / x * nm.bessel_j(1, x))
    return [_le("numerics.bessel_recurrence", resid.max(), 1e-10)]


def check_gauss_legendre(quad_tol):
    worst = 0.0
    for n in (2, 5, 16, 33, 64):
        rule = nm.gauss_legendre(n)
        for d in range(2 * n):
            exact = 0.0 if d % 2 else 2.0 / (d + 1)
            approx = float(np.dot(rule.weights, rule.nodes**d))
            worst = max(worst, abs(approx - exact) / (2.0 / (d + 1)))
        worst = max(worst, abs(rule.weights.sum() - 2.0))
    return [_le("numerics.gauss_legendre_exactness", worst, 1e-12)]


def check_transversality(quad_tol):
    theta = np.linspace(0.0, 0.5 * math.pi, 31)[:, None]
    phi = np.linspace(0.0, 2.0 * math.pi, 40, endpoint=False)[None, :]
    e_r, _, _ = il.spherical_basis(theta, phi)
    worst = 0.0
    for mode in il.ALL_MODES:
        g = il.strength_cartesian(mode, theta, phi)
        worst = max(worst, float(np.max(np.abs(np.sum(g * e_r, axis=-1)))))
    return [_le("illumination.transversality", worst, 1e-15)]


def check_power_routes(quad_tol):
    out = []
    g = il.GeometryConfig(0.5 * math.pi)
    cap = il.incident_power(il.PLANE_WAVE, g, rtol=min(quad_tol, 1e-10))
    ap = il.aperture_power(g)
    out.append(_le("illumination.power_aperture_vs_cap", abs(cap - ap) / ap, max(1e-10, 10 * quad_tol)))
    truncated, tail = il.focal_plane_flux(g)
    fp = (truncated + tail) * (il.K * g.focal_length / 2.0) ** 2 / 2.0
    out.append(_le("illumination.power_focal_plane_vs_aperture", abs(fp - ap) / ap, 1e-4))
    return out


def check_on_axis_integral(quad_tol):
    worst = 0.0
    for a in np.linspace(0.05, 0.5 * math.pi, 20):
        g = il.GeometryConfig(a)
        num = il.diffraction_integrals(g, 0.0, rtol=min(quad_tol, 1e-11)).I0
        c = math.cos(a)
        closed = 16.0 / 15.0 * (1.0 - (5.0 + 3.0 * c) * c**1.5 / 8.0)
        worst = max(worst, abs(num - closed))
    return [_le("illumination.on_axis_I0_closed_form", worst, max(1e-10, 10 * quad_tol))]


def check_bassett(quad_tol):
    """Bassett bound for the sum of energy densities, and K0 <= 2 saturation.

    The sum (W_el + W_mag)/P_inc stays below k^2/(3 pi c) everywhere.  The
    bound is met with equality by 2 W_el(O)/P_inc, i.e. by K0 = 2, for the
    p_x and p_z dipole waves at alpha = pi/2; the magnetic density of
    those waves at the focus is 9/16 and 0 of the electric one, so the
    plain sum reaches only 25/32 and 1/2 of the bound.
    """
    limit = il.BASSETT_LIMIT
    worst_excess = -math.inf
    for mode in il.ALL_MODES:
        for a in np.linspace(0.02, 0.5 * math.pi, 50):
            ratio = il.bassett_ratio(mode, il.GeometryConfig(a), rtol=quad_tol)
            worst_excess = max(worst_excess, ratio / limit - 1.0)
    out = [CheckResult("illumination.bassett_sum_bound", worst_excess, 0.0, worst_excess <= 1e-12)]
    g = il.GeometryConfig(0.5 * math.pi)
    worst = 0.0
    for mode in (il.DIPOLE_X, il.DIPOLE_Z):
        w = 2.0 * il.focal_energy_density(mode, g, quad_tol) / il.incident_power(mode, g, quad_tol)
        worst = max(worst, abs(w / limit - 1.0))
    out.append(_le("illumination.bassett_saturation_2Wel_px_pz", worst, max(1e-6, 10 * quad_tol)))
    return out


def check_optical_theorem(quad_tol):
    g = il.GeometryConfig(0.5 * math.pi)
    e_o, _ = il.focal_fields(il.PLANE_WAVE, g, quad_tol)
    e_x = e_o[0]
    w_el = 0.25 * abs(e_x) ** 2
    kr = 1e3
    worst = 0.0
    for d in (0.0, 0.3, -1.7):
        p = sc.OscillatorParams(1.0, d)

        def flux(theta, phi, p=p):
            r_hat, _, _ = il.spherical_basis(theta, phi)
            e = sc.scattered_far_field(p, e_x, r_hat, kr)
            return 0.5 * (kr / il.K) ** 2 * np.sum(np.abs(e) ** 2, axis=-1)

        p_sca = float(nm.integrate_cap(flux, math.pi, rtol=min(quad_tol, 1e-11)))
        expected = 2.0 * w_el * sc.cross_section(p)
        worst = max(worst, abs(p_sca - expected) / expected)
    return [_le("scattering.optical_theorem", worst, max(1e-9, 10 * quad_tol))]


def check_scattering_misc(quad_tol):
    rng = np.random.default_rng(7)
    v = rng.normal(size=(200, 3))
    r_hat = v / np.linalg.norm(v, axis=-1, keepdims=True)
    e = sc.scattered_far_field(sc.OscillatorParams(1.0, 0.4), 1.0 + 0.5j, r_hat, 200.0)
    trans = float(np.max(np.abs(np.sum(e * r_hat, axis=-1))))
    phase = abs(np.angle(sc.scattering_amplitude(sc.OscillatorParams())) - 0.5 * math.pi)
    net = abs(mp.relative_phase(sc.OscillatorParams()) - math.pi)
    worst_tls = -math.inf
    for d in np.linspace(-3, 3, 13):
        osc = sc.OscillatorParams(1.0, d)
        for rabi in (0.1, 1.0, 5.0):
            worst_tls = max(worst_tls, sc.cross_section_tls(sc.TlsParams(osc, rabi)) - sc.cross_section(osc))
    return [
        _le("scattering.transversality", trans, 1e-15),
        _le("scattering.resonant_phase_plus_half_pi", phase, 1e-15),
        _le("multipole.net_forward_phase_pi", net, 1e-15),
        CheckResult("scattering.tls_below_classical", worst_tls, 0.0, worst_tls < 0.0),
    ]


def check_mode_matching(quad_tol):
    worst = 0.0
    for a in np.linspace(0.05, 0.5 * math.pi, 20):
        g = il.GeometryConfig(a)
        k0_px = tr.k0_oracle(il.DIPOLE_X, g, quad_tol).K0
        for mode in (il.PLANE_WAVE, il.DIPOLE_PLUS_MAGNETIC, il.DIPOLE_X):
            frac = mp.dipole_wave_component(mode, g, rtol=quad_tol).content_fraction
            k0 = tr.k0_oracle(mode, g, quad_tol).K0
            worst = max(worst, abs(k0 - k0_px * frac) / k0)
    g = il.GeometryConfig(0.5 * math.pi)
    ortho = mp.dipole_wave_component(il.DIPOLE_Z, g, axis="x", rtol=quad_tol).content_fraction
    scaled = mp.dipole_wave_component(il.IlluminationMode(il.ModeKind.PLANE_WAVE, 7.3), g,
                                      rtol=quad_tol).content_fraction
    base = mp.dipole_wave_component(il.PLANE_WAVE, g, rtol=quad_tol).content_fraction
    return [
        _le("multipole.k0_equals_k0px_times_content", worst, max(1e-8, 10 * quad_tol)),
        _le("multipole.pz_orthogonal_to_x_pattern", abs(ortho), 1e-12),
        _le("multipole.content_amplitude_invariance", abs(scaled - base), 1e-12),
    ]


def check_perfect_reflection(quad_tol, gouy=mp.GOUY_PHASE):
    g = il.GeometryConfig(0.5 * math.pi)
    resid = mp.verify_perfect_reflection(g, sc.OscillatorParams(), gouy=gouy)
    t = tr.transmittance_oracle(il.DIPOLE_X, g, sc.OscillatorParams(), quad_tol).T
    worst_curve = 0.0
    for d in np.linspace(-5, 5, 21):
        p = sc.OscillatorParams(1.0, d)
        t_d = tr.transmittance_oracle(il.DIPOLE_X, g, p, quad_tol).T
        worst_curve = max(worst_curve, abs(t_d - (1.0 - sc.lorentzian_weight(p))))
    return [
        _le("multipole.perfect_reflection_residual", resid, 1e-10),
        _le("transmittance.px_oracle_T_resonance", t, 1e-10),
        _le("transmittance.px_curve_one_minus_L", worst_curve, max(1e-8, 10 * quad_tol)),
    ]


def check_transmittance(quad_tol):
    out = []
    worst = 0.0
    grid = np.linspace(0.05, 0.5 * math.pi, 10)
    p0 = sc.OscillatorParams()
    for a in grid:
        for b in grid:
            c = tr.transmittance_closed_form(a, b, 0.0)
            o = tr.transmittance_oracle(il.PLANE_WAVE, il.GeometryConfig(a, b), p0, quad_tol)
            worst = max(worst, abs(c.T - o.T), abs(c.R - o.R))
    out.append(_le("transmittance.closed_vs_oracle_grid", worst, max(1e-6, 10 * quad_tol)))

    g = il.GeometryConfig(math.pi / 3)
    worst = 0.0
    for d in np.linspace(-3, 3, 13):
        c = tr.transmittance_closed_form(g.alpha, g.beta, d)
        o = tr.transmittance_oracle(il.PLANE_WAVE, g, sc.OscillatorParams(1.0, d), quad_tol)
        worst = max(worst, abs(c.T - o.T))
    out.append(_le("transmittance.detuned_closed_vs_oracle", worst, max(1e-6, 10 * quad_tol)))

    h = 0.5 * math.pi
    o = tr.transmittance_oracle(il.PLANE_WAVE, il.GeometryConfig(h, h), p0, quad_tol)
    out.append(_le("transmittance.energy_closure_T_plus_R", abs(o.T + o.R - 1.0), max(1e-8, 10 * quad_tol)))

    excess = -math.inf
    for a in grid:
        for b in grid[:-1]:
            c = tr.transmittance_closed_form(a, b, 0.0)
            excess = max(excess, c.T + c.R - 1.0)
    out.append(CheckResult("transmittance.partial_cone_T_plus_R_below_one", excess, 0.0, excess < 0.0))

    a_min, t_min = tr.shadow_boundary_minimum()
    inside = 0.40 * math.pi < a_min < 0.46 * math.pi and 0.095 < t_min < 0.105
    out.append(CheckResult("transmittance.shadow_boundary_minimum", t_min, 0.105, inside))

    sym = 0.0
    for d in (0.3, 1.0, 2.5):
        for a, b in ((0.4, 0.9), (1.2, 1.2), (h, 0.3)):
            sym = max(sym, abs(tr.transmittance_closed_form(a, b, d).T
                               - tr.transmittance_closed_form(a, b, -d).T))
    out.append(_le("transmittance.detuning_symmetry", sym, 1e-15))
    return out


def check_k0(quad_tol):
    worst = 0.0
    for mode in il.ALL_MODES:
        for a in np.linspace(0.05, 0.5 * math.pi, 30):
            c = tr.k0_closed_form(mode, a).K0
            o = tr.k0_oracle(mode, il.GeometryConfig(a), quad_tol).K0
            worst = max(worst, abs(c - o) / c)
    return [_le("transmittance.k0_closed_vs_oracle", worst, max(1e-8, 10 * quad_tol))]


ALL_CHECKS = (
    check_bessel_recurrence,
    check_gauss_legendre,
    check_transversality,
    check_power_routes,
    check_on_axis_integral,
    check_bassett,
    check_optical_theorem,
    check_scattering_misc,
    check_mode_matching,
    check_perfect_reflection,
    check_transmittance,
    check_k0,
)


def run_all(quad_tol=nm.DEFAULT_RTOL, gouy=mp.GOUY_PHASE):
    results = []
    for check in ALL_CHECKS:
        if check is check_perfect_reflection:
            results.extend(check(quad_tol, gouy=gouy))
        else:
            results.extend(check(quad_tol))
    return results
