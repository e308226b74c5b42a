"""Light scattering by a point dipole at the focus of a strongly focused beam.

Submodules: ``numerics`` (Bessel functions, Gauss-Legendre quadrature),
``illumination`` (focused fields, powers, effective areas), ``scattering``
(oscillator and two-level-system response), ``multipole`` (dipole-wave
content), ``transmittance`` (scattering ratio, transmittance,
reflectance) and ``cli``.
"""
from .errors import AccuracyError, ConfigurationError, DomainError
from .illumination import (ALL_MODES, BASSETT_LIMIT, DIPOLE_PLUS_MAGNETIC, DIPOLE_X,
                           DIPOLE_Z, PLANE_WAVE, SIGMA0, GeometryConfig, IlluminationMode,
                           ModeKind, effective_area, focal_energy_density, incident_power)
from .multipole import dipole_wave_component, verify_perfect_reflection
from .scattering import OscillatorParams, TlsParams, cross_section, cross_section_tls
from .transmittance import (k0_closed_form, k0_oracle, transmittance_closed_form,
                            transmittance_oracle)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "ConfigurationError", "DomainError",
    "ALL_MODES", "BASSETT_LIMIT", "DIPOLE_PLUS_MAGNETIC", "DIPOLE_X", "DIPOLE_Z",
    "PLANE_WAVE", "SIGMA0", "GeometryConfig", "IlluminationMode", "ModeKind",
    "effective_area", "focal_energy_density", "incident_power",
    "dipole_wave_component", "verify_perfect_reflection",
    "OscillatorParams", "TlsParams", "cross_section", "cross_section_tls",
    "k0_closed_form", "k0_oracle", "transmittance_closed_form", "transmittance_oracle",
]
