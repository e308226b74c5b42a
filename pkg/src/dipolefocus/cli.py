"""Command-line entry point: tables for the K0 curve, transmittance map,
spectrum, focal-plane profile and mode content, plus the ``verify`` suite.

Exit codes: 0 success, 1 failed check, 2 configuration or I/O error,
3 numerical-accuracy failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import checks
from . import illumination as il
from . import multipole as mp
from . import transmittance as tr
from .errors import AccuracyError, ConfigurationError, DomainError
from .numerics import DEFAULT_RTOL
from .scattering import OscillatorParams
from .tables import Table, to_csv, to_json

log = logging.getLogger(__name__)

COMMANDS = ("k0-curve", "t-map", "spectrum", "focal-profile", "mode-content", "verify")
FORMATS = ("csv", "json")
TOL_RANGE = (1e-14, 1e-4)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_ACCURACY = 0, 1, 2, 3

_PI_RE = re.compile(
    r"^(?P<sign>[+-])?(?P<coef>(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?)?\s*\*?\s*pi"
    r"(?:\s*/\s*(?P<den>\d+\.?\d*))?$")
_SWEEP_RE = re.compile(r"^sweep\((?P<args>[^)]*)\)$")


def parse_angle(text):
    """Radians from plain numbers or multiples of pi ("0.43pi", "pi/3", "2*pi/3")."""
    s = str(text).strip().lower().replace(" ", "")
    m = _PI_RE.match(s)
    if m:
        coef = m.group("coef")
        value = (float(coef) if coef else 1.0) * math.pi
        if m.group("sign") == "-":
            value = -value
        if m.group("den"):
            den = float(m.group("den"))
            if den == 0:
                raise ConfigurationError(f"zero denominator in angle {text!r}")
            value /= den
        return value
    try:
        return float(s)
    except ValueError:
        raise ConfigurationError(f"cannot parse angle {text!r}") from None


def parse_number(text):
    try:
        return float(str(text).strip())
    except ValueError:
        raise ConfigurationError(f"cannot parse number {text!r}") from None


def parse_values(text, parse=parse_angle):
    """A single value or ``sweep(start, stop, n)`` as a list of floats."""
    s = str(text).strip().lower().replace(" ", "")
    m = _SWEEP_RE.match(s)
    if not m:
        return [parse(s)]
    parts = m.group("args").split(",")
    if len(parts) != 3:
        raise ConfigurationError(f"sweep needs (start, stop, n), got {text!r}")
    start, stop = parse(parts[0]), parse(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise ConfigurationError(f"sweep count must be an integer, got {parts[2]!r}") from None
    if n < 2:
        raise ConfigurationError(f"sweep count must be at least 2, got {n}")
    return [float(v) for v in np.linspace(start, stop, n)]


@dataclass
class RunConfig:
    command: str
    mode: str = "pw"
    alpha: str | None = None
    beta: str | None = None
    detuning: str | None = None
    grid: int | None = None
    x: str | None = None
    tol: float = DEFAULT_RTOL
    format: str = "csv"
    out: str | None = None
    with_oracle: bool = False
    extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if self.format not in FORMATS:
            raise ConfigurationError(f"unknown format {self.format!r}")
        self.tol = float(self.tol)
        if not (TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]):
            raise ConfigurationError(f"tolerance must lie in [1e-14, 1e-4], got {self.tol!r}")
        if self.grid is not None:
            self.grid = int(self.grid)
            if self.grid < 2:
                raise ConfigurationError(f"grid size must be at least 2, got {self.grid}")
        il.IlluminationMode.parse(self.mode)

    def as_dict(self):
        """Configuration echoed into JSON output; the output path is left out
        so that identical runs produce identical bytes wherever they land."""
        d = asdict(self)
        d.pop("extra")
        d.pop("out")
        return d


def _sweep(text, default, parse=parse_angle):
    return parse_values(default if text is None else text, parse)


def _require_grid(values, name):
    if len(values) < 2:
        raise ConfigurationError(f"{name} grid needs at least 2 points, got {len(values)}")


def run_k0_curve(cfg):
    alphas = _sweep(cfg.alpha, f"sweep(0.01, 0.5pi, {cfg.grid or 90})")
    names = ("pw", "pm", "px", "pz")
    modes = [il.IlluminationMode.parse(n) for n in names]
    columns = ["alpha"] + [f"K0_{n}" for n in names]
    if cfg.with_oracle:
        columns += [f"K0_oracle_{n}" for n in names]
    rows = []
    for a in alphas:
        row = [a] + [tr.k0_closed_form(m, a).K0 for m in modes]
        if cfg.with_oracle:
            g = il.GeometryConfig(a)
            row += [tr.k0_oracle(m, g, cfg.tol).K0 for m in modes]
        rows.append(row)
    footer = {}
    for n, m in zip(names, modes):
        cross = tr.k0_unity_crossing(m)
        footer[f"K0_unity_alpha_{n}"] = "none" if cross is None else cross
    return Table(columns, rows, footer)


def run_t_map(cfg):
    n = cfg.grid or 50
    default = f"sweep(0.01, 0.5pi, {n})"
    alphas = _sweep(cfg.alpha, default)
    betas = _sweep(cfg.beta, default)
    _require_grid(alphas, "alpha")
    _require_grid(betas, "beta")
    d = parse_number(cfg.detuning) if cfg.detuning is not None else 0.0
    columns = ["alpha", "beta", "T", "R"] + (["T_oracle", "R_oracle"] if cfg.with_oracle else [])
    mode = il.IlluminationMode.parse(cfg.mode)
    if mode.kind not in (il.ModeKind.PLANE_WAVE, il.ModeKind.DIPOLE_X):
        raise ConfigurationError("t-map supports the pw and px modes")
    closed = (tr.transmittance_closed_form if mode.kind is il.ModeKind.PLANE_WAVE
              else tr.dipole_wave_transmittance_closed_form)
    rows = []
    p = OscillatorParams(1.0, d)
    for a in alphas:
        for b in betas:
            res = closed(a, b, d)
            row = [a, b, res.T, res.R]
            if cfg.with_oracle:
                o = tr.transmittance_oracle(mode, il.GeometryConfig(a, b), p, cfg.tol)
                row += [o.T, o.R]
            rows.append(row)
    a_min, t_min = tr.shadow_boundary_minimum()
    footer = {"shadow_min_alpha": a_min, "shadow_min_alpha_over_pi": a_min / math.pi,
              "shadow_min_T": t_min}
    return Table(columns, rows, footer)


def run_spectrum(cfg):
    detunings = _sweep(cfg.detuning, "sweep(-5, 5, 201)", parse_number)
    a = parse_angle(cfg.alpha) if cfg.alpha is not None else math.pi / 3
    b = parse_angle(cfg.beta) if cfg.beta is not None else a
    geom = il.GeometryConfig(a, b)
    h = 0.5 * math.pi
    columns = ["detuning", "T_pw", "T_px"] + (["T_pw_oracle"] if cfg.with_oracle else [])
    rows = []
    for d in detunings:
        row = [d, tr.transmittance_closed_form(a, b, d).T,
               tr.dipole_wave_transmittance_closed_form(h, h, d).T]
        if cfg.with_oracle:
            row.append(tr.transmittance_oracle(il.PLANE_WAVE, geom, OscillatorParams(1.0, d),
                                               cfg.tol).T)
        rows.append(row)
    footer = {"alpha_pw": a, "beta_pw": b, "alpha_px": h, "beta_px": h,
              "T_pw_resonance": tr.transmittance_closed_form(a, b, 0.0).T}
    return Table(columns, rows, footer)


def run_focal_profile(cfg):
    xs = _sweep(cfg.x, f"sweep(0, 2, {cfg.grid or 81})", parse_number)
    a = parse_angle(cfg.alpha) if cfg.alpha is not None else 0.5 * math.pi
    geom = il.GeometryConfig(a)
    prof = il.focal_plane_profile(geom, np.array(xs), rtol=min(cfg.tol, 1e-9))
    e = prof.E
    rows = [[x, s, w, e[i, 0].real, e[i, 0].imag, e[i, 2].real, e[i, 2].imag]
            for i, (x, s, w) in enumerate(zip(xs, prof.S_z, prof.W_el))]
    columns = ["x", "S_z", "W_el", "Ex_re", "Ex_im", "Ez_re", "Ez_im"]
    i_min = int(np.argmin(prof.S_z))
    footer = {"alpha": a, "S_z_min": float(prof.S_z[i_min]), "S_z_min_x": xs[i_min],
              "W_el_min": float(np.min(prof.W_el))}
    return Table(columns, rows, footer)


def run_mode_content(cfg):
    alphas = _sweep(cfg.alpha, f"sweep(0.05, 0.5pi, {cfg.grid or 10})")
    names = ("pw", "pm", "px", "pz")
    columns = ["alpha"] + [f"content_{n}" for n in names] + [f"K0_{n}" for n in names]
    rows = []
    for a in alphas:
        g = il.GeometryConfig(a)
        modes = [il.IlluminationMode.parse(n) for n in names]
        frac = [mp.dipole_wave_component(m, g, rtol=cfg.tol).content_fraction for m in modes]
        k0 = [tr.k0_closed_form(m, a).K0 for m in modes]
        rows.append([a] + frac + k0)
    return Table(columns, rows, {"projection_axis": "own focal polarisation"})


def run_verify(cfg, gouy=mp.GOUY_PHASE):
    """Run every bundled check; returns (table, all_passed)."""
    results = checks.run_all(cfg.tol, gouy=gouy)
    rows = [[r.name, r.measured, r.tolerance, r.passed] for r in results]
    passed = all(r.passed for r in results)
    footer = {"checks": len(results), "failed": sum(not r.passed for r in results),
              "passed": passed}
    return Table(["check", "measured", "tolerance", "passed"], rows, footer), passed


RUNNERS = {
    "k0-curve": run_k0_curve,
    "t-map": run_t_map,
    "spectrum": run_spectrum,
    "focal-profile": run_focal_profile,
    "mode-content": run_mode_content,
}


def read_config_file(path):
    """Plain ``key = value`` lines; '#' starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _bool(text):
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {text!r}")


_FIELDS = ("command", "mode", "alpha", "beta", "detuning", "grid", "x", "tol", "format",
           "out", "with_oracle")


def build_parser():
    p = argparse.ArgumentParser(prog="dipolefocus", description=__doc__.splitlines()[0])
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--mode", help="pw, pm, px or pz")
    p.add_argument("--alpha", help="radians, '0.43pi', 'pi/3' or 'sweep(a, b, n)'")
    p.add_argument("--beta", help="collection half angle, same syntax as --alpha")
    p.add_argument("--detuning", help="detuning in units of the linewidth, or a sweep")
    p.add_argument("--grid", type=int, help="points per axis for default sweeps")
    p.add_argument("--x", help="focal-plane positions in wavelengths, or a sweep")
    p.add_argument("--tol", type=float, help="quadrature tolerance in [1e-14, 1e-4]")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--with-oracle", action="store_true", default=None,
                   help="add columns computed by direct quadrature")
    p.add_argument("--config", help="key=value file; flags take precedence")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    values = read_config_file(args.config) if args.config else {}
    unknown = set(values) - set(_FIELDS)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for name in _FIELDS:
        flag = getattr(args, name)
        if flag is not None:
            values[name] = flag
    if "command" not in values:
        raise ConfigurationError("no command given (use --command)")
    if "with_oracle" in values:
        values["with_oracle"] = _bool(values["with_oracle"])
    if "grid" in values:
        try:
            values["grid"] = int(values["grid"])
        except ValueError:
            raise ConfigurationError(f"grid must be an integer, got {values['grid']!r}") from None
    if "tol" in values:
        values["tol"] = parse_number(values["tol"])
    return RunConfig(**values)


def execute(cfg, gouy=mp.GOUY_PHASE):
    """Run ``cfg`` and return (rendered output, exit code)."""
    if cfg.command == "verify":
        table, passed = run_verify(cfg, gouy)
        code = EXIT_OK if passed else EXIT_FAILED
    else:
        table, code = RUNNERS[cfg.command](cfg), EXIT_OK
    text = to_json(table, cfg.as_dict()) if cfg.format == "json" else to_csv(table)
    return table, text, code


def write_output(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigurationError(f"cannot write output file {path}: {exc.strerror}") from None


def main(argv=None, gouy=mp.GOUY_PHASE):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        table, text, code = execute(cfg, gouy)
        write_output(text, cfg.out)
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AccuracyError as exc:
        print(f"accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    if cfg.command == "verify":
        for row in table.rows:
            status = "PASS" if row[3] else "FAIL"
            print(f"{status} {row[0]}: {row[1]:.3e} (tol {row[2]:.3g})", file=sys.stderr)
        print(f"{table.footer['checks'] - table.footer['failed']}/{table.footer['checks']} "
              "checks passed", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
