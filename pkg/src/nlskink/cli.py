"""Command line front end.

Subcommands wire the pipeline scatter -> asym -> evolve -> compare; all of
them accept ``--config PATH`` (JSON, keys documented below) and
``--output DIR``.  Exit codes: 0 success, 2 configuration or input error,
3 numerical failure.

Config keys (JSON object):

    profile             {"kind": "pure_kink"|"perturbed_kink",
                         "amplitude": re or [re, im], "center": c,
                         "width": w}  or  {"csv": "profile.csv"}
    L, dx, dt_factor    PDE domain half-width, grid step, dt = dt_factor*dx^2
    sponge_width        absorbing band width (default 10.0)
    scattering_half_width, scattering_dx
                        truncation and step for the Jost integration
    z_grid              {"min": -5.0, "max": 5.0, "n": 480,
                         "exclusion_radius": 1e-3}
    xi_values           ray parameters, all |xi| > 1
    t_values            strictly increasing positive times
    fit_window          "upper_half" (default) or "all"
    figures             render report figures (default true)
    output_dir          default output directory
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import asymptotic_profile
from .errors import ConfigError, KeyMismatchError, NlskinkError
from .evolve import (
    InitialProfileSpec,
    evolve_to,
    make_initial,
    sample_along_ray,
    save_ray_csv,
    load_ray_csv,
)
from .phase import export_signature_grid
from .reporting import (
    build_comparison,
    render_comparison_figure,
    write_comparison_csv,
    write_summary_json,
)
from .scattering import (
    PotentialField,
    build_z_grid,
    find_discrete_spectrum,
    load_profile_csv,
    load_scattering_json,
    reflection_table,
    save_scattering_json,
)

BUILD_ID = f"nlskink {__version__}"


@dataclass
class RunConfig:
    profile: dict = field(default_factory=lambda: {
        "kind": "perturbed_kink", "amplitude": [0.05, 0.0],
        "center": 0.0, "width": 2.0})
    L: float = 180.0
    dx: float = 0.05
    dt_factor: float = 0.2
    sponge_width: float = 10.0
    sponge_rate: float = 0.5
    scattering_half_width: float = 25.0
    scattering_dx: float = 0.01
    z_grid: dict = field(default_factory=lambda: {
        "min": -5.0, "max": 5.0, "n": 480, "exclusion_radius": 1e-3})
    xi_values: list = field(default_factory=lambda: [1.5])
    t_values: list = field(default_factory=lambda: [10.0, 15.0, 22.0, 33.0, 50.0])
    fit_window: str = "upper_half"
    figures: bool = True
    output_dir: str = "out"

    def validate(self) -> "RunConfig":
        for name in ("L", "dx", "dt_factor", "sponge_width",
                     "scattering_half_width", "scattering_dx"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"config field {name!r} must be positive")
        for key in ("min", "max", "n", "exclusion_radius"):
            if key not in self.z_grid:
                raise ConfigError(f"z_grid missing key {key!r}")
        for xi in self.xi_values:
            if abs(xi) <= 1.0 + 1e-9:
                raise ConfigError(
                    f"xi={xi} lies in the solitonic region |xi| <= 1; only "
                    "solitonless rays |xi| > 1 are supported")
        ts = list(self.t_values)
        if any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ConfigError("t_values must be positive and strictly increasing")
        if self.fit_window not in ("upper_half", "all"):
            raise ConfigError("fit_window must be 'upper_half' or 'all'")
        if "csv" not in self.profile:
            need = max(abs(x) for x in self.xi_values) * 2.0 * max(ts) \
                + 3.0 * self.sponge_width
            if self.L < need - 1e-9:
                raise ConfigError(
                    f"domain sizing rule violated: L={self.L} < "
                    f"2*max|xi|*max(t) + 3*sponge_width = {need}")
        return self


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}") from exc
    known = set(RunConfig().__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    return RunConfig(**raw).validate()


def save_config(path, config: RunConfig) -> None:
    with open(path, "w") as fh:
        json.dump(asdict(config), fh, indent=1, sort_keys=True)


def _profile_amplitude(profile: dict) -> complex:
    amp = profile.get("amplitude", 0.0)
    if isinstance(amp, (list, tuple)):
        return complex(amp[0], amp[1])
    return complex(amp)


def _scattering_field(config: RunConfig) -> PotentialField:
    if "csv" in config.profile:
        path = Path(config.profile["csv"])
        if not path.exists():
            raise ConfigError(f"profile not found: {path}")
        return load_profile_csv(path)
    spec = InitialProfileSpec(
        kind=config.profile.get("kind", "perturbed_kink"),
        amplitude=_profile_amplitude(config.profile),
        center=float(config.profile.get("center", 0.0)),
        width=float(config.profile.get("width", 2.0)))
    return PotentialField.from_callable(
        spec, config.scattering_half_width, config.scattering_dx)


def _outdir(config: RunConfig, override) -> Path:
    out = Path(override) if override else Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_scatter(config: RunConfig, outdir: Path) -> Path:
    """Scattering data of the configured profile -> scattering.json."""
    fieldp = _scattering_field(config)
    zg = config.z_grid
    grid = build_z_grid(zg["min"], zg["max"], int(zg["n"]),
                        zg["exclusion_radius"])
    table = reflection_table(fieldp, grid, zg["exclusion_radius"])
    spectrum = find_discrete_spectrum(fieldp,
                                      exclusion_radius=zg["exclusion_radius"])
    path = outdir / "scattering.json"
    save_scattering_json(path, table, spectrum)
    print(f"scatter: {len(grid)} grid points, "
          f"{len(spectrum.eigenvalues)} eigenvalue(s), "
          f"max unitarity violation {table.max_unitarity_defect():.3e}")
    print(f"scatter: wrote {path}")
    return path


def cmd_asym(config: RunConfig, outdir: Path, scattering_path=None) -> Path:
    """Asymptotic profile for every (xi, t) -> asymptotics.csv."""
    spath = Path(scattering_path) if scattering_path else outdir / "scattering.json"
    if not spath.exists():
        raise ConfigError(f"scattering file not found: {spath}")
    table, _ = load_scattering_json(spath)
    path = outdir / "asymptotics.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "xi", "re_q_asy", "im_q_asy", "abs_q_asy",
                         "re_corr", "im_corr", "re_q_leading", "im_q_leading",
                         "re_h_cross", "im_h_cross"])
        for xi in config.xi_values:
            rows = asymptotic_profile(table, xi, config.t_values)
            ratios = []
            for s in rows:
                writer.writerow([
                    f"{s.t:.12g}", f"{s.x:.12g}", f"{s.xi:.12g}",
                    f"{s.q_asy.real:.16g}", f"{s.q_asy.imag:.16g}",
                    f"{abs(s.q_asy):.16g}",
                    f"{s.correction.real:.16g}", f"{s.correction.imag:.16g}",
                    f"{s.q_leading.real:.16g}", f"{s.q_leading.imag:.16g}",
                    f"{s.h_cross.real:.16g}", f"{s.h_cross.imag:.16g}"])
                if s.h_cross != 0:
                    ratios.append(abs(s.correction / s.h_cross))
            if ratios:
                print(f"asym: xi={xi:g} cross-check |corr/h| ratio "
                      f"min={min(ratios):.4g} max={max(ratios):.4g} "
                      "(constant in t up to the documented normalisation)")
    print(f"asym: wrote {path}")
    return path


def cmd_evolve(config: RunConfig, outdir: Path) -> list:
    """PDE reference run; one ray CSV per xi value."""
    if "csv" in config.profile:
        raise ConfigError("cmd_evolve needs a built-in profile kind; "
                          "CSV profiles are supported by cmd_scatter only")
    spec = InitialProfileSpec(
        kind=config.profile.get("kind", "perturbed_kink"),
        amplitude=_profile_amplitude(config.profile),
        center=float(config.profile.get("center", 0.0)),
        width=float(config.profile.get("width", 2.0)))
    state = make_initial(spec, config.L, config.dx, config.sponge_width)
    dt = config.dt_factor * config.dx**2

    def progress(st):
        print(f"evolve: t = {st.t:.2f}", flush=True)

    snapshots = []
    for t in config.t_values:
        state = evolve_to(state, float(t), dt, config.dt_factor,
                          config.sponge_rate, callback=progress)
        snapshots.append(state)
    paths = []
    for xi in config.xi_values:
        qray = sample_along_ray(snapshots, xi, config.t_values)
        path = outdir / f"ray_xi{xi:g}.csv"
        save_ray_csv(path, config.t_values, xi, qray)
        paths.append(path)
        print(f"evolve: wrote {path}")
    return paths


def cmd_compare(config: RunConfig, outdir: Path, asym_path=None,
                ray_dir=None) -> Path:
    """Join ray and asymptotics tables, fit decay exponents, render report."""
    apath = Path(asym_path) if asym_path else outdir / "asymptotics.csv"
    rdir = Path(ray_dir) if ray_dir else outdir
    if not apath.exists():
        raise ConfigError(f"asymptotics file not found: {apath}")
    asym_rows = {}
    with open(apath, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            xi = round(float(row["xi"]), 9)
            asym_rows.setdefault(xi, []).append(row)
    comparisons = []
    for xi in config.xi_values:
        key = round(float(xi), 9)
        if key not in asym_rows:
            raise KeyMismatchError(f"asymptotics table has no rows for xi={xi}")
        rpath = rdir / f"ray_xi{xi:g}.csv"
        if not rpath.exists():
            raise ConfigError(f"ray file not found: {rpath}")
        t_ray, _, q_ray = load_ray_csv(rpath)
        rows = asym_rows[key]
        t_asy = np.array([float(r["t"]) for r in rows])
        q_lead = np.array([complex(float(r["re_q_leading"]),
                                   float(r["im_q_leading"])) for r in rows])
        q_corr = np.array([complex(float(r["re_q_asy"]),
                                   float(r["im_q_asy"])) for r in rows])
        comp = build_comparison(xi, t_ray, q_ray, t_asy, q_lead, q_corr,
                                config.fit_window)
        write_comparison_csv(outdir / f"compare_xi{xi:g}.csv", comp)
        if config.figures:
            render_comparison_figure(outdir / f"compare_xi{xi:g}.png", comp)
        comparisons.append(comp)
        print(f"compare: xi={xi:g} p_leading={comp.p_leading:.3f} "
              f"p_corrected={comp.p_corrected:.3f} "
              f"max_err_corrected={comp.max_err_corrected:.3e} "
              f"pass={comp.passed}"
              + (" [exact match]" if comp.exact_match else ""))
    spath = outdir / "summary.json"
    write_summary_json(spath, comparisons)
    print(f"compare: wrote {spath}")
    return spath


def cmd_signature(config: RunConfig, outdir: Path) -> list:
    """Signature-table CSV export for each configured xi."""
    paths = []
    for xi in config.xi_values:
        path = outdir / f"signature_xi{xi:g}.csv"
        export_signature_grid(path, xi)
        paths.append(path)
        print(f"signature: wrote {path}")
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nlskink",
        description="Kink-background NLS: scattering, ray asymptotics and "
                    "PDE validation",
        epilog=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=BUILD_ID)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (("scatter", "compute scattering data"),
                       ("asym", "evaluate ray asymptotics"),
                       ("evolve", "run the PDE reference solver"),
                       ("compare", "compare PDE and asymptotics"),
                       ("signature", "export signature-table grids")):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--output", default=None, help="output directory")
        if name == "asym":
            p.add_argument("--scattering", default=None,
                           help="scattering JSON (default: OUTPUT/scattering.json)")
        if name == "compare":
            p.add_argument("--asym", default=None,
                           help="asymptotics CSV (default: OUTPUT/asymptotics.csv)")
            p.add_argument("--ray-dir", default=None,
                           help="directory with ray_xi*.csv files")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        outdir = _outdir(config, args.output)
        if args.command == "scatter":
            cmd_scatter(config, outdir)
        elif args.command == "asym":
            cmd_asym(config, outdir, args.scattering)
        elif args.command == "evolve":
            cmd_evolve(config, outdir)
        elif args.command == "compare":
            cmd_compare(config, outdir, args.asym, args.ray_dir)
        elif args.command == "signature":
            cmd_signature(config, outdir)
    except (ConfigError, KeyMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NlskinkError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
