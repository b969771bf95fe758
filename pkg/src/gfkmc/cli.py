"""Command-line front end: ``gfkmc --config run.ini``.

The config is an INI file with a versioned schema.  ``[run] mode`` selects
the pipeline:

* ``atom``   weighted-path energies and electron properties for a Hylleraas
             (or hydrogenic) trial; writes properties.csv, properties_table.txt
             and summary.csv
* ``thermo`` oscillator thermodynamics at one temperature; writes thermo.csv
* ``sweep``  internal energy over a temperature list; writes sweep.csv
* ``trace``  single-path fluctuation traces, one CSV per temperature

``--emit-plots`` adds plot-data files (endpoint density, traces).
See README.md for every key.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import thermo
from .errors import ConfigInvalid, GFKError, OutputUnwritable, TrialFileMissing
from .estimators import energy_from_ensemble, expectation_from_ensemble, observable_by_name
from .paths import PathParams, run_ensemble
from .stats import extrapolate_inverse_time, format_parenthetical
from .trial import CoulombPotential, HylleraasTrial, demo_spec, hydrogenic_trial, load_hylleraas

SCHEMA_VERSION = 1
MODES = ("atom", "thermo", "sweep", "trace")
SECTIONS = {
    "run": {"schema", "mode", "seed", "workers"},
    "system": {"trial", "z", "derivatives"},
    "paths": {"stepsize", "total_time", "n_paths", "record_every", "times", "burn_in",
              "kernel", "drift_cap", "batch_size", "n_blocks"},
    "observables": {"list"},
    "thermo": {"temperature", "temperatures", "n_oscillators", "frequencies", "stepsize",
               "n_paths", "kernel", "importance", "n_blocks", "batch_size", "bins",
               "path_index", "transfer_matrix"},
    "output": {"reference"},
}


# --------------------------------------------------------------------------
# config parsing


class _Config:
    """Typed accessors over a parsed INI file; unknown keys are errors."""

    def __init__(self, path: Path):
        self.path = path
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except FileNotFoundError:
            raise ConfigInvalid(f"config file not found: {path}") from None
        except configparser.Error as exc:
            raise ConfigInvalid(f"cannot parse {path}: {exc}") from None
        for sec in cp.sections():
            if sec not in SECTIONS:
                raise ConfigInvalid(f"unknown section [{sec}]; known: {', '.join(SECTIONS)}")
            extra = set(cp[sec]) - SECTIONS[sec]
            if extra:
                raise ConfigInvalid(f"unknown key(s) in [{sec}]: {', '.join(sorted(extra))}")
        self.cp = cp

    def get(self, sec, key, conv=str, default=None):
        if not self.cp.has_option(sec, key):
            if default is None:
                raise ConfigInvalid(f"missing [{sec}] {key}")
            return default
        raw = self.cp.get(sec, key).strip()
        try:
            return conv(raw)
        except (ValueError, TypeError, ZeroDivisionError):
            raise ConfigInvalid(f"[{sec}] {key} = {raw!r} is not a valid value") from None

    def has(self, sec, key):
        return self.cp.has_option(sec, key)

    def resolve(self, name: str) -> Path:
        p = Path(name)
        return p if p.is_absolute() else self.path.parent / p


def _number(s: str) -> float:
    """Float that also accepts simple fractions such as ``1/30``."""
    if "/" in s:
        a, b = s.split("/", 1)
        return float(a) / float(b)
    return float(s)


def _int(s: str) -> int:
    return int(s)


def _bool(s: str) -> bool:
    low = s.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(s)


def _number_list(s: str):
    return [_number(v) for v in s.replace(",", " ").split()]


def _name_list(s: str):
    return [v.strip() for v in s.split(",") if v.strip()]


def _check_header(cfg: _Config):
    schema = cfg.get("run", "schema", _int)
    if schema != SCHEMA_VERSION:
        raise ConfigInvalid(f"unsupported schema {schema}; this version reads schema {SCHEMA_VERSION}")
    mode = cfg.get("run", "mode").lower()
    if mode not in MODES:
        raise ConfigInvalid(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
    return mode


# --------------------------------------------------------------------------
# output helpers


def _cell(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return v


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(v) for v in row])
    except OSError as exc:
        raise OutputUnwritable(f"cannot write {path}: {exc.strerror or exc}") from None


def _write_text(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputUnwritable(f"cannot write {path}: {exc.strerror or exc}") from None


def _read_reference(path: Path):
    """Two or three columns: key, value[, stderr]; header row required."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise ConfigInvalid(f"reference file not found: {path}") from None
    out = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or row[0].startswith("#"):
            continue
        try:
            val = float(row[1])
            err = float(row[2]) if len(row) > 2 and row[2] else float("nan")
        except (IndexError, ValueError):
            raise ConfigInvalid(f"{path}:{lineno}: expected key,value[,stderr]") from None
        out[row[0].strip()] = (val, err)
    return out


# --------------------------------------------------------------------------
# pipelines


def _atom_trial(cfg: _Config):
    name = cfg.get("system", "trial")
    deriv = cfg.get("system", "derivatives", default="analytic")
    if name.lower() == "hydrogenic":
        z = cfg.get("system", "z", _number, 1.0)
        return hydrogenic_trial(z), CoulombPotential(z, 1)
    if name.lower() in ("li_demo", "be_demo"):
        spec = demo_spec(name[:2])
    else:
        path = cfg.resolve(name)
        if not path.exists():
            raise TrialFileMissing(f"trial parameter file not found: {path}")
        spec = load_hylleraas(path)
    return HylleraasTrial(spec, derivatives=deriv), CoulombPotential(spec.z, spec.n_electrons)


def _atom_params(cfg: _Config, seed):
    h = cfg.get("paths", "stepsize", _number, 1.0 / 30.0)
    times = cfg.get("paths", "times", _number_list) if cfg.has("paths", "times") else None
    total = cfg.get("paths", "total_time", _number, max(times) if times else None)
    params = PathParams(
        stepsize=h, total_time=total,
        n_paths=cfg.get("paths", "n_paths", _int, 1000),
        seed=seed if seed is not None else cfg.get("run", "seed", _int, 0),
        kernel=cfg.get("paths", "kernel", default="gaussian"),
        record_every=cfg.get("paths", "record_every", _int, 30),
        burn_in=cfg.get("paths", "burn_in", _number, 0.0),
        drift_cap=cfg.get("paths", "drift_cap", _number, 1.0),
        batch_size=cfg.get("paths", "batch_size", _int, 512),
    )
    steps = params.steps_for_times(sorted(times)) if times else None
    if steps is not None and steps[-1] != params.n_steps:
        raise ConfigInvalid("the last recording time must equal total_time")
    return params, steps


def run_atom(cfg: _Config, out: Path, seed, workers):
    trial, pot = _atom_trial(cfg)
    params, steps = _atom_params(cfg, seed)
    names = _name_list(cfg.get("observables", "list", default=" "))
    obs = [observable_by_name(n) for n in names]
    n_blocks = cfg.get("paths", "n_blocks", _int, 50)
    ens = run_ensemble(trial, pot, params, obs, record_steps=steps, workers=workers)
    energy = energy_from_ensemble(ens, trial.e0, n_blocks)
    props = [expectation_from_ensemble(ens, i, n_blocks, o.name) for i, o in enumerate(obs)]

    header = ["time", "source", "energy", "energy_err"]
    for o in obs:
        header += [o.name, o.name + "_err"]
    rows, table = [], []
    for k, t in enumerate(ens.times):
        row = [float(t), "mc", energy.values[k], energy.stderrs[k]]
        cells = [f"{float(t):g}", format_parenthetical(energy.values[k], energy.stderrs[k])]
        for p in props:
            row += [p.values[k], p.stderrs[k]]
            cells.append(format_parenthetical(p.values[k], p.stderrs[k]))
        rows.append(row)
        table.append(cells)
    _write_csv(out / "properties.csv", header, rows)

    titles = ["t", "E"] + [o.name for o in obs]
    widths = [max(len(titles[j]), *(len(r[j]) for r in table)) for j in range(len(titles))]
    lines = ["  ".join(s.rjust(w) for s, w in zip(titles, widths))]
    lines += ["  ".join(s.rjust(w) for s, w in zip(r, widths)) for r in table]
    _write_text(out / "properties_table.txt", "\n".join(lines) + "\n")

    summary = []
    if len(ens.times) >= 3 and np.all(energy.stderrs > 0):
        fit = extrapolate_inverse_time(np.column_stack([ens.times, energy.values, energy.stderrs]))
        summary.append(["E_inf", fit.e_infinity, fit.e_infinity_err, "mc"])
        summary.append(["a", fit.a_coeff, fit.a_err, "mc"])
    summary.append(["E(t_max)", energy.values[-1], energy.stderrs[-1], "mc"])
    for p in props:
        summary.append([p.name, p.values[-1], p.stderrs[-1], "mc"])
    summary.append(["e0", trial.e0, 0.0, "trial"])
    if cfg.has("output", "reference"):
        for key, (val, err) in _read_reference(cfg.resolve(cfg.get("output", "reference"))).items():
            summary.append([key, val, err, "reference"])
    _write_csv(out / "summary.csv", ["quantity", "value", "stderr", "source"], summary)
    return ["properties.csv", "properties_table.txt", "summary.csv"]


def _thermo_params(cfg: _Config, seed, temperature=None, n_osc=None):
    return thermo.ThermoParams(
        temperature=temperature if temperature is not None else cfg.get("thermo", "temperature", _number),
        n_oscillators=n_osc if n_osc is not None else cfg.get("thermo", "n_oscillators", _int, 1),
        frequencies=tuple(cfg.get("thermo", "frequencies", _number_list, [])),
        stepsize=cfg.get("thermo", "stepsize", _number, 1.0 / 30.0),
        n_paths=cfg.get("thermo", "n_paths", _int, 10000),
        seed=seed if seed is not None else cfg.get("run", "seed", _int, 0),
        kernel=cfg.get("thermo", "kernel", default="gaussian"),
        importance=cfg.get("thermo", "importance", _bool, False),
        n_blocks=cfg.get("thermo", "n_blocks", _int, 50),
        batch_size=cfg.get("thermo", "batch_size", _int, 1024),
    )


def _density_file(out: Path, params, bins):
    x, mc, oracle = thermo.endpoint_density(params, bins)
    _write_csv(out / "density.csv", ["x", "density", "source"],
               [r for xi, m, o in zip(x, mc, oracle)
                for r in ([xi, m, "mc"], [xi, o, "gaussian_endpoint"])])
    return "density.csv"


def _trace_file(out: Path, T, params, path_index):
    times, x, _ = thermo.trace_fluctuations(T, params.stepsize, params.seed, params.kernel,
                                             params.frequencies[0], path_index)
    name = f"trace_T{T:g}.csv"
    _write_csv(out / name, ["time", "x"], zip(times.tolist(), x.tolist()))
    return name


def run_thermo(cfg: _Config, out: Path, seed, workers, emit_plots):
    params = _thermo_params(cfg, seed)
    report = thermo.thermo_report(params, workers,
                                  transfer_matrix=cfg.get("thermo", "transfer_matrix", _bool, True))
    _write_csv(out / "thermo.csv", thermo.SWEEP_HEADER, report.rows())
    files = ["thermo.csv"]
    if emit_plots:
        files.append(_density_file(out, params, cfg.get("thermo", "bins", _int, 60)))
        files.append(_trace_file(out, params.temperature, params, cfg.get("thermo", "path_index", _int, 0)))
    return files


def run_sweep(cfg: _Config, out: Path, seed, workers, emit_plots):
    temps = cfg.get("thermo", "temperatures", _number_list)
    if not temps:
        raise ConfigInvalid("[thermo] temperatures must list at least one value")
    n_osc = cfg.get("thermo", "n_oscillators", _int, 1)
    base = _thermo_params(cfg, seed, temperature=temps[0], n_osc=n_osc)
    rows = thermo.temperature_sweep(temps, n_osc, base, workers)
    refs = None
    if cfg.has("output", "reference"):
        raw = _read_reference(cfg.resolve(cfg.get("output", "reference")))
        try:
            refs = {float(k): v[0] for k, v in raw.items()}
        except ValueError:
            raise ConfigInvalid("sweep reference keys must be temperatures") from None
    _write_csv(out / "sweep.csv", thermo.SWEEP_HEADER, thermo.sweep_rows(rows, refs))
    files = ["sweep.csv"]
    if emit_plots:
        for T in temps:
            p = _thermo_params(cfg, seed, temperature=T, n_osc=1)
            files.append(_trace_file(out, T, p, cfg.get("thermo", "path_index", _int, 0)))
    return files


def run_trace(cfg: _Config, out: Path, seed, workers, emit_plots):
    if cfg.has("thermo", "temperatures"):
        temps = cfg.get("thermo", "temperatures", _number_list)
    else:
        temps = [cfg.get("thermo", "temperature", _number)]
    files = []
    for T in temps:
        p = _thermo_params(cfg, seed, temperature=T, n_osc=1)
        files.append(_trace_file(out, T, p, cfg.get("thermo", "path_index", _int, 0)))
        if emit_plots:
            name = _density_file(out, p, cfg.get("thermo", "bins", _int, 60))
            renamed = f"density_T{T:g}.csv"
            (out / name).replace(out / renamed)
            files.append(renamed)
    return files


def run(config_file, seed=None, workers=1, out_dir=None, emit_plots=False):
    """Execute one config; returns the list of files written."""
    cfg = _Config(Path(config_file))
    mode = _check_header(cfg)
    if workers is None:
        workers = cfg.get("run", "workers", _int, 1)
    if workers < 1:
        raise ConfigInvalid("workers must be at least 1")
    out = Path(out_dir) if out_dir is not None else Path.cwd()
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputUnwritable(f"cannot create output directory {out}: {exc.strerror or exc}") from None
    if not out.is_dir():
        raise OutputUnwritable(f"output path {out} is not a directory")
    if mode == "atom":
        return run_atom(cfg, out, seed, workers)
    return {"thermo": run_thermo, "sweep": run_sweep, "trace": run_trace}[mode](
        cfg, out, seed, workers, emit_plots)


def _u64(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gfkmc", description="Generalized Feynman-Kac path Monte Carlo")
    ap.add_argument("--config", required=True, help="INI run configuration")
    ap.add_argument("--seed", type=_u64, help="override [run] seed")
    ap.add_argument("--workers", type=int, help="worker processes (results do not depend on this)")
    ap.add_argument("--out-dir", default=".", help="directory for output files")
    ap.add_argument("--emit-plots", action="store_true", help="also write plot-data files")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        files = run(args.config, args.seed, args.workers, args.out_dir, args.emit_plots)
    except GFKError as exc:
        print(f"gfkmc: error: {exc}", file=sys.stderr)
        return exc.exit_code
    for f in files:
        print(Path(args.out_dir) / f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
