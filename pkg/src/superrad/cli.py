"""Command-line interface: config loading, subcommands, CSV and SVG output.

Config files are flat `key = value` lines with `#` comments.  Frequencies
are angular (rad/us internally); values accept unit suffixes (MHz, kHz,
GHz, rad/us, us, ms, s, /us, /ms, deg, rad), a leading `2pi*` multiplier,
and simple arithmetic with `pi` (e.g. `theta = pi/4`).

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 validation
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, analysis, collective, full_engine, model
from .model import (
    ConfigError,
    DirectRates,
    Geometry,
    SystemConfig,
    ThermalBath,
)
from .trajectory import NoDecayError, NumericalFailure

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION = 3

_FREQ_SUFFIX = {"GHz": 1e3, "MHz": 1.0, "kHz": 1e-3, "rad/us": 1.0}
_TIME_SUFFIX = {"us": 1.0, "ms": 1e3, "s": 1e6}
_RATE_SUFFIX = {"/us": 1.0, "/ms": 1e-3}
_ANGLE_SUFFIX = {"rad": 1.0, "deg": math.pi / 180.0}

# key -> (kind, required)
_SCHEMA = {
    "n_spins": ("int", True),
    "omega0": ("freq", True),
    "omega_d": ("freq", True),
    "theta": ("angle", True),
    "phi": ("angle", False),
    "tau_c": ("time", True),
    "geometry": ("geometry", False),
    "alpha_c": ("float", False),
    "p_plus": ("rate", False),
    "p_minus": ("rate", False),
    "omega_sl": ("freq", False),
    "detuning": ("freq", False),
    "nbar": ("float", False),
}

_EXPR_RE = re.compile(r"^[0-9.eE+\-*/() ]*$")


def _eval_number(expr: str, key: str) -> float:
    expr = expr.strip().replace("pi", repr(math.pi))
    if not expr or not _EXPR_RE.match(expr):
        raise ConfigError(f"cannot parse numeric value for {key!r}: {expr!r}")
    try:
        return float(eval(expr, {"__builtins__": {}}, {}))
    except Exception:
        raise ConfigError(f"cannot evaluate value for {key!r}: {expr!r}") from None


def parse_value(key: str, raw: str):
    """Parse one config value into internal units (rad/us, us, 1/us, rad)."""
    if key not in _SCHEMA:
        raise ConfigError(f"unknown config key {key!r}")
    kind, _ = _SCHEMA[key]
    raw = raw.strip()
    if kind == "geometry":
        try:
            return Geometry(raw)
        except ValueError:
            allowed = ", ".join(g.value for g in Geometry)
            raise ConfigError(
                f"geometry must be one of {allowed}, got {raw!r}"
            ) from None
    if kind == "int":
        value = _eval_number(raw, key)
        if value != int(value):
            raise ConfigError(f"{key} must be an integer, got {raw!r}")
        return int(value)
    factor = 1.0
    if raw.startswith("2pi*"):
        factor = 2.0 * math.pi
        raw = raw[4:]
    suffixes = {
        "freq": _FREQ_SUFFIX,
        "time": _TIME_SUFFIX,
        "rate": _RATE_SUFFIX,
        "angle": _ANGLE_SUFFIX,
        "float": {},
    }[kind]
    for suffix in sorted(suffixes, key=len, reverse=True):
        if raw.endswith(suffix):
            return factor * suffixes[suffix] * _eval_number(raw[: -len(suffix)], key)
    return factor * _eval_number(raw, key)


def load_config(path: str | Path, overrides: list[str] | None = None) -> SystemConfig:
    """Load a flat key=value config file, apply overrides, build SystemConfig."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    entries: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in entries:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = raw
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, raw = (part.strip() for part in item.split("=", 1))
        entries[key] = raw
    values = {key: parse_value(key, raw) for key, raw in entries.items()}
    for key, (_, required) in _SCHEMA.items():
        if required and key not in values:
            raise ConfigError(f"missing required config key {key!r}")
    direct = {k for k in ("p_plus", "p_minus") if k in values}
    thermal = {k for k in ("omega_sl", "detuning", "nbar") if k in values}
    if direct and thermal:
        raise ConfigError(
            "give either p_plus/p_minus or omega_sl/detuning/nbar, not both"
        )
    if direct:
        bath = DirectRates(
            p_plus=values.get("p_plus", 0.0), p_minus=values.get("p_minus", 0.0)
        )
    elif thermal:
        if "omega_sl" not in values:
            raise ConfigError("thermal bath requires omega_sl")
        bath = ThermalBath(
            omega_sl=values["omega_sl"],
            detuning=values.get("detuning", 0.0),
            nbar=values.get("nbar", 0.0),
        )
    else:
        raise ConfigError(
            "missing bath: give p_plus/p_minus or omega_sl/detuning/nbar"
        )
    return SystemConfig(
        n_spins=values["n_spins"],
        omega0=values["omega0"],
        omega_d=values["omega_d"],
        theta=values["theta"],
        phi=values.get("phi", 0.0),
        tau_c=values["tau_c"],
        bath=bath,
        geometry=values.get("geometry", Geometry.ALL_TO_ALL),
        alpha_c=values.get("alpha_c", 0.0),
    )


def config_hash(cfg: SystemConfig) -> str:
    """Stable hex digest of the resolved configuration."""
    parts = [
        f"n_spins={cfg.n_spins!r}",
        f"omega0={cfg.omega0!r}",
        f"omega_d={cfg.omega_d!r}",
        f"theta={cfg.theta!r}",
        f"phi={cfg.phi!r}",
        f"tau_c={cfg.tau_c!r}",
        f"geometry={cfg.geometry.value}",
        f"alpha_c={cfg.alpha_c!r}",
    ]
    if isinstance(cfg.bath, DirectRates):
        parts += [f"p_plus={cfg.bath.p_plus!r}", f"p_minus={cfg.bath.p_minus!r}"]
    else:
        parts += [
            f"omega_sl={cfg.bath.omega_sl!r}",
            f"detuning={cfg.bath.detuning!r}",
            f"nbar={cfg.bath.nbar!r}",
        ]
    blob = "\n".join(sorted(parts)).encode()
    return hashlib.sha256(blob).hexdigest()


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(records: list[dict], path: str | Path, columns: list[str]) -> None:
    """Deterministic CSV: fixed column order, 17 significant digits, LF."""
    lines = [",".join(columns)]
    for rec in records:
        lines.append(",".join(_fmt(rec[col]) for col in columns))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_svg_lines(
    path: str | Path,
    x: np.ndarray,
    series: dict[str, np.ndarray],
    xlabel: str,
    ylabel: str,
    logx: bool = False,
    logy: bool = False,
) -> None:
    """Minimal static SVG line chart; a convenience, not a validation surface."""
    width, height, margin = 720, 480, 60
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

    def scale(v, lo, hi, log):
        v = np.asarray(v, dtype=float)
        if log:
            v, lo, hi = np.log10(v), math.log10(lo), math.log10(hi)
        if hi == lo:
            return np.full_like(v, 0.5)
        return (v - lo) / (hi - lo)

    xs = np.asarray(x, dtype=float)
    if logx:
        keep = xs > 0
    else:
        keep = np.ones(len(xs), dtype=bool)
    all_y = np.concatenate([np.asarray(v, float)[keep] for v in series.values()])
    if logy:
        all_y = all_y[all_y > 0]
    if all_y.size == 0:
        all_y = np.array([1.0])
    x_lo, x_hi = float(xs[keep].min()), float(xs[keep].max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 15}" text-anchor="middle" '
        f'font-size="14">{xlabel}</text>',
        f'<text x="18" y="{height // 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {height // 2})">{ylabel}</text>',
        f'<text x="{margin}" y="{height - margin + 20}" font-size="11">'
        f"{x_lo:.4g}</text>",
        f'<text x="{width - margin}" y="{height - margin + 20}" '
        f'text-anchor="end" font-size="11">{x_hi:.4g}</text>',
        f'<text x="{margin - 6}" y="{height - margin}" text-anchor="end" '
        f'font-size="11">{y_lo:.4g}</text>',
        f'<text x="{margin - 6}" y="{margin + 4}" text-anchor="end" '
        f'font-size="11">{y_hi:.4g}</text>',
    ]
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    for idx, (name, ys) in enumerate(series.items()):
        ys = np.asarray(ys, dtype=float)
        mask = keep.copy()
        if logy:
            mask &= ys > 0
        px = margin + plot_w * scale(xs[mask], x_lo, x_hi, logx)
        py = height - margin - plot_h * scale(ys[mask], y_lo, y_hi, logy)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        color = colors[idx % len(colors)]
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{width - margin - 4}" y="{margin + 16 + 16 * idx}" '
            f'text-anchor="end" font-size="12" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def _write_manifest(out_dir: Path, cfg: SystemConfig, command: str, started: str):
    manifest = {
        "config_hash": config_hash(cfg),
        "command": command,
        "tool_version": __version__,
    }
    with open(out_dir / "manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    timing = {
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
    }
    with open(out_dir / "timing.json", "w", newline="\n") as fh:
        json.dump(timing, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _all_up_rho(n_spins: int) -> np.ndarray:
    dim = 2**n_spins
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def _sample_times(t_end: float, samples: int) -> np.ndarray:
    return np.linspace(0.0, t_end, samples)


def _default_t_end(cfg: SystemConfig) -> float:
    rates = model.rate_set(cfg)
    rm = collective.build_rate_matrix(cfg.n_spins, rates.gamma1, rates.gamma2)
    try:
        tau_2 = 1.0 / collective.adr(rm)
    except NoDecayError:
        tau_2 = math.inf
    tot = rates.p_plus + rates.p_minus
    tau_1 = math.inf if tot == 0.0 else 1.0 / tot
    t_end = 3.0 * min(tau_2, tau_1)
    if not math.isfinite(t_end):
        raise ConfigError("all rates vanish; give --t-end explicitly")
    return t_end


TRAJECTORY_COLUMNS = [
    "t_us",
    "intensity",
    "jz",
    "dc",
    "j_squared",
    "trace_error",
    "min_eig",
]


def cmd_full_run(args, cfg: SystemConfig) -> int:
    t_end = args.t_end if args.t_end is not None else _default_t_end(cfg)
    times = _sample_times(t_end, args.samples)
    traj = full_engine.evolve(
        _all_up_rho(cfg.n_spins), cfg, t_end, sample_times=times
    )
    out = Path(args.out)
    records = [
        {
            "t_us": traj.times[k],
            "intensity": traj.observables["intensity"][k],
            "jz": traj.observables["jz"][k],
            "dc": traj.observables["dc"][k],
            "j_squared": traj.observables["j_squared"][k],
            "trace_error": traj.observables["trace_error"][k],
            "min_eig": traj.observables["min_eigenvalue"][k],
        }
        for k in range(len(traj.times))
    ]
    write_csv(records, out / "trajectory.csv", TRAJECTORY_COLUMNS)
    write_svg_lines(
        out / "trajectory.svg",
        traj.times,
        {
            "intensity": traj.observables["intensity"],
            "jz": traj.observables["jz"],
            "dc": traj.observables["dc"],
        },
        xlabel="t (us)",
        ylabel="observable",
    )
    for warning in traj.warnings:
        print(warning, file=sys.stderr)
    print(f"wrote {out / 'trajectory.csv'} ({len(records)} samples)")
    return EXIT_OK


def cmd_collective_run(args, cfg: SystemConfig) -> int:
    rates = model.rate_set(cfg)
    rm = collective.build_rate_matrix(cfg.n_spins, rates.gamma1, rates.gamma2)
    if args.t_end is not None:
        t_end = args.t_end
    else:
        t_end = 3.0 / collective.adr(rm)
    times = _sample_times(t_end, args.samples)
    traj = collective.evolve_populations(
        collective.all_up_populations(cfg.n_spins), rm, times
    )
    out = Path(args.out)
    m_values = rm.m_values
    pop_records = [
        {"t_us": traj.times[k], "M": m_values[i], "P_M": traj.populations[k, i]}
        for k in range(len(traj.times))
        for i in range(cfg.n_spins + 1)
    ]
    write_csv(pop_records, out / "populations.csv", ["t_us", "M", "P_M"])
    int_records = [
        {"t_us": traj.times[k], "intensity": traj.intensity[k]}
        for k in range(len(traj.times))
    ]
    write_csv(int_records, out / "intensity.csv", ["t_us", "intensity"])
    write_svg_lines(
        out / "intensity.svg",
        traj.times,
        {"intensity": traj.intensity},
        xlabel="t (us)",
        ylabel="intensity",
    )
    print(f"wrote {out / 'populations.csv'} and {out / 'intensity.csv'}")
    return EXIT_OK


def cmd_sweep_n(args, cfg: SystemConfig) -> int:
    grid = analysis.default_n_grid(args.n_min, args.n_max, args.points)
    rows = analysis.sweep_n(cfg, grid)
    out = Path(args.out)
    records = [
        {
            "N": r["N"],
            "i_max": r["i_max"],
            "t_peak_us": r["t_peak"],
            "tau_2_us": r["tau_2"],
        }
        for r in rows
    ]
    write_csv(records, out / "sweep_n.csv", ["N", "i_max", "t_peak_us", "tau_2_us"])
    fit_i = analysis.loglog_fit([(r["N"], r["i_max"]) for r in rows])
    fit_t = analysis.loglog_fit([(r["N"], r["tau_2"]) for r in rows])
    write_svg_lines(
        out / "sweep_n.svg",
        np.array([r["N"] for r in rows], dtype=float),
        {
            "i_max": np.array([r["i_max"] for r in rows]),
            "tau_2_us": np.array([r["tau_2"] for r in rows]),
        },
        xlabel="N",
        ylabel="value",
        logx=True,
        logy=True,
    )
    print(
        f"i_max vs N: slope = {fit_i.slope:.4f}, intercept = {fit_i.intercept:.4f}, "
        f"r^2 = {fit_i.r_squared:.6f}"
    )
    print(
        f"tau_2 vs N: slope = {fit_t.slope:.4f}, intercept = {fit_t.intercept:.4f}, "
        f"r^2 = {fit_t.r_squared:.6f}"
    )
    return EXIT_OK


def cmd_sweep_ratio(args, cfg: SystemConfig) -> int:
    ratios = [float(r) for r in args.ratios.split(",")]
    rows = analysis.sweep_ratio(cfg, ratios)
    out = Path(args.out)
    write_csv(rows, out / "sweep_ratio.csv", ["ratio", "i_max_over_i0"])
    write_svg_lines(
        out / "sweep_ratio.svg",
        np.array([r["ratio"] for r in rows]),
        {"i_max_over_i0": np.array([r["i_max_over_i0"] for r in rows])},
        xlabel="omega_d / omega_sl",
        ylabel="I_max / I(0)",
        logx=True,
    )
    print(f"wrote {out / 'sweep_ratio.csv'}")
    return EXIT_OK


def cmd_sweep_tauc(args, cfg: SystemConfig) -> int:
    grid = np.geomspace(args.x_min, args.x_max, args.points) / cfg.omega0
    rows = analysis.sweep_tauc(cfg, grid)
    out = Path(args.out)
    records = [
        {
            "omega0_tau_c": r["omega0_tau_c"],
            "tau_2_us": r["tau_2"],
            "i_max": r["i_max"],
        }
        for r in rows
    ]
    write_csv(records, out / "sweep_tauc.csv", ["omega0_tau_c", "tau_2_us", "i_max"])
    write_svg_lines(
        out / "sweep_tauc.svg",
        np.array([r["omega0_tau_c"] for r in rows]),
        {"tau_2_us": np.array([r["tau_2"] for r in rows])},
        xlabel="omega0 * tau_c",
        ylabel="tau_2 (us)",
        logx=True,
        logy=True,
    )
    print(f"wrote {out / 'sweep_tauc.csv'}")
    return EXIT_OK


def cmd_sweep_geometry(args, cfg: SystemConfig) -> int:
    rows = analysis.sweep_geometry(cfg)
    out = Path(args.out)
    write_csv(rows, out / "sweep_geometry.csv", ["geometry", "i_max"])
    for row in rows:
        print(f"{row['geometry']}: i_max = {row['i_max']:.6f}")
    return EXIT_OK


def cmd_adr(args, cfg: SystemConfig) -> int:
    rates = model.rate_set(cfg)
    rm = collective.build_rate_matrix(cfg.n_spins, rates.gamma1, rates.gamma2)
    value = collective.adr(rm)
    print(f"tau_2 = {1.0 / value:.17g} us (ADR = {value:.17g} 1/us)")
    return EXIT_OK


def cmd_validate(args, cfg: SystemConfig) -> int:
    if cfg.geometry is not Geometry.ALL_TO_ALL:
        raise ConfigError("validate requires all_to_all geometry")
    if cfg.n_spins > 6:
        raise ConfigError("validate is limited to N <= 6")
    from dataclasses import replace

    cfg0 = replace(cfg, bath=DirectRates(0.0, 0.0), alpha_c=0.0)
    rates = model.rate_set(cfg0)
    rm = collective.build_rate_matrix(cfg0.n_spins, rates.gamma1, rates.gamma2)
    tau_2 = 1.0 / collective.adr(rm)
    t_end = 3.0 * tau_2
    times = np.concatenate(([0.0], np.geomspace(t_end / 1e3, t_end, 49)))
    coll = collective.evolve_populations(
        collective.all_up_populations(cfg0.n_spins), rm, times
    )
    full = full_engine.evolve(
        _all_up_rho(cfg0.n_spins),
        cfg0,
        t_end,
        sample_times=times,
        rel_tol=1e-10,
        abs_tol=1e-12,
    )
    rel_dev = np.abs(full.intensity - coll.intensity) / np.abs(coll.intensity)
    max_dev = float(rel_dev.max())
    if max_dev < 1e-6:
        print(f"PASS max_rel_dev = {max_dev:.3e} < 1e-06")
        return EXIT_OK
    print(f"FAIL max_rel_dev = {max_dev:.3e} >= 1e-06")
    return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superrad",
        description="Collective dissipation in dipolar-coupled spin networks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--config", required=True, help="config file path")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry (repeatable)",
        )
        p.add_argument("--out", default=".", help="output directory")
        p.set_defaults(func=fn)
        return p

    p = add("full-run", cmd_full_run, help="full-engine trajectory -> CSV + SVG")
    p.add_argument("--t-end", type=float, default=None, help="end time, us")
    p.add_argument("--samples", type=int, default=201)

    p = add(
        "collective-run",
        cmd_collective_run,
        help="collective-basis populations and intensity -> CSV + SVG",
    )
    p.add_argument("--t-end", type=float, default=None, help="end time, us")
    p.add_argument("--samples", type=int, default=201)

    p = add("sweep-n", cmd_sweep_n, help="N scaling sweep (collective engine)")
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--points", type=int, default=12)

    p = add(
        "sweep-ratio",
        cmd_sweep_ratio,
        help="omega_d/omega_sl burst-threshold sweep (full engine)",
    )
    p.add_argument(
        "--ratios",
        default="0.1,0.3,1,3,10,30,100",
        help="comma-separated ratio values",
    )

    p = add("sweep-tauc", cmd_sweep_tauc, help="tau_c sweep (collective engine)")
    p.add_argument("--x-min", type=float, default=0.05, help="min omega0*tau_c")
    p.add_argument("--x-max", type=float, default=20.0, help="max omega0*tau_c")
    p.add_argument("--points", type=int, default=15)

    add("sweep-geometry", cmd_sweep_geometry, help="geometry comparison (full engine)")
    add("adr", cmd_adr, help="report tau_2 = 1/ADR of the collective generator")
    add("validate", cmd_validate, help="cross-engine equivalence check")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    started = datetime.now(timezone.utc).isoformat()
    try:
        cfg = load_config(args.config, args.set)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        code = args.func(args, cfg)
        _write_manifest(out, cfg, args.command, started)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, NoDecayError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
