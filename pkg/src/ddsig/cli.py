"""Command-line campaign runner, config loading and CSV emission.

Usage examples::

    ddsig --scenario moderate --trials 2 --snr 20 --seed 7 --out run.csv
    ddsig --scenario extreme --csi diag --schemes ostf,otfs,ofdm,eig
    ddsig --scenario moderate --dump H --trial 0 --out chan

Campaign runs write one CSV row per (scheme, csi_mode, snr_db), ordered
scheme-alphabetical then SNR-ascending, with 9 significant digits, plus a
``<out>.meta.json`` sidecar holding the fully resolved configuration.
Dump modes write matrix/vector diagnostics as CSV instead of running a
campaign.

Exit codes: 0 success, 2 bad command line (argparse), 3 invalid
configuration (unknown scenario/scheme, schema violations), 4 unreadable
config file, 5 unwritable output path, 6 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys

import numpy as np

from . import __version__
from .channel import draw_channel, sample_channel, spreading_function
from .modulation import ofdm_matrix, ostf_matrix, ostf_u_matrix, otfs_matrix
from .montecarlo import (
    SCENARIOS,
    SCHEMES,
    AggregateResult,
    ScenarioConfig,
    TrialError,
    _seed,
    _STREAM_BASIS,
    _STREAM_CHANNEL,
    run_campaign,
)
from .receiver import (
    CsiMode,
    effective_channel,
    mmse_filter,
    sinr_per_dimension,
)

__all__ = ["load_config", "main", "entry_point", "ConfigError",
           "CSV_HEADER", "write_campaign_csv"]

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_CONFIG_IO = 4
EXIT_OUTPUT = 5
EXIT_NUMERIC = 6

CSV_HEADER = ("scenario,scheme,csi_mode,snr_db,trials,mean_capacity_bps_hz,"
              "mean_gamma_H_db,mean_gamma_Hc_db,ser,ser_ci_lo,ser_ci_hi,"
              "ber,seed")

THREADS_ENV = "DDSIG_THREADS"

# Keys accepted in the [scenario] section of a config file.
_CONFIG_KEYS = {
    "name": str,
    "f_c_hz": float,
    "bandwidth_hz": float,
    "tau_max_s": float,
    "nu_max_hz": float,
    "paths": int,
    "n_t": int,
    "snr_db": "snr_list",
    "trials": int,
    "schemes": "scheme_list",
    "csi": "csi",
    "seed": int,
}


class ConfigError(ValueError):
    """Invalid configuration; ``problems`` lists every violation found."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _parse_schemes(text: str, problems: list[str]) -> tuple[str, ...] | None:
    names = [t.strip().lower().replace("-", "_")
             for t in text.split(",") if t.strip()]
    bad = sorted(set(names) - set(SCHEMES))
    if bad:
        problems.append(f"unknown scheme(s) {', '.join(bad)}; "
                        f"valid: {', '.join(SCHEMES)}")
        return None
    if not names:
        problems.append("schemes list is empty")
        return None
    return tuple(sorted(set(names)))


def _parse_snrs(text: str, problems: list[str]) -> tuple[float, ...] | None:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        problems.append(f"snr list {text!r} is not comma-separated numbers")
        return None
    if not vals:
        problems.append("snr list is empty")
        return None
    return vals


def _parse_csi(text: str, problems: list[str]) -> CsiMode | None:
    try:
        return CsiMode(text.strip().lower())
    except ValueError:
        problems.append(f"csi must be 'full' or 'diag', got {text!r}")
        return None


def load_config(path: str) -> ScenarioConfig:
    """Load a config file and merge it over its named built-in scenario.

    The file is flat ``key = value`` text under a ``[scenario]`` section;
    the ``name`` key selects the built-in defaults, every other key
    overrides one field.  All schema violations are reported together.

    Raises
    ------
    OSError
        If the file cannot be read.
    ConfigError
        Listing every schema violation.
    """
    parser = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as fh:
        try:
            parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError([f"config syntax: {exc}"]) from exc

    problems: list[str] = []
    if not parser.has_section("scenario"):
        raise ConfigError(["missing [scenario] section"])
    section = parser["scenario"]

    for key in section:
        if key not in _CONFIG_KEYS:
            problems.append(f"unknown key {key!r}; valid keys: "
                            f"{', '.join(sorted(_CONFIG_KEYS))}")

    name = section.get("name", "").strip()
    base = SCENARIOS.get(name)
    if base is None:
        problems.append(f"unknown scenario name {name!r}; "
                        f"valid: {', '.join(sorted(SCENARIOS))}")

    overrides = {}
    field_of = {"f_c_hz": "f_c", "bandwidth_hz": "bandwidth",
                "tau_max_s": "tau_max", "nu_max_hz": "nu_max",
                "paths": "n_paths", "n_t": "n_t", "trials": "trials",
                "seed": "base_seed"}
    for key, kind in _CONFIG_KEYS.items():
        if key == "name" or key not in section:
            continue
        raw = section[key]
        if kind == "scheme_list":
            val = _parse_schemes(raw, problems)
            if val is not None:
                overrides["schemes"] = val
        elif kind == "snr_list":
            val = _parse_snrs(raw, problems)
            if val is not None:
                overrides["snr_points_db"] = val
        elif kind == "csi":
            val = _parse_csi(raw, problems)
            if val is not None:
                overrides["csi_mode"] = val
        else:
            try:
                overrides[field_of[key]] = kind(raw)
            except ValueError:
                problems.append(f"{key} = {raw!r} is not a valid "
                                f"{kind.__name__}")
    if "trials" in overrides and overrides["trials"] < 1:
        problems.append(f"trials must be >= 1, got {overrides['trials']}")
    if problems:
        raise ConfigError(problems)
    try:
        return base.replace(**overrides)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _db(linear: float) -> float:
    return 10.0 * np.log10(linear)


def write_campaign_csv(path: str, agg: AggregateResult) -> None:
    """Write one row per (scheme, snr): schemes alphabetical, SNR ascending."""
    cfg = agg.config
    lines = [CSV_HEADER]
    for scheme in sorted(cfg.schemes):
        for snr_db in sorted(cfg.snr_points_db):
            c = agg.cells[(scheme, snr_db)]
            lines.append(",".join([
                cfg.name, scheme, cfg.csi_mode.value, _fmt(snr_db),
                str(c.trials), _fmt(c.mean_capacity),
                _fmt(_db(c.mean_gamma_h)), _fmt(_db(c.mean_gamma_hc)),
                _fmt(c.ser), _fmt(c.ser_ci[0]), _fmt(c.ser_ci[1]),
                _fmt(c.ber), str(cfg.base_seed),
            ]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_metadata(path: str, cfg: ScenarioConfig, threads: int) -> None:
    grid = cfg.grid()
    meta = {
        "version": __version__,
        "scenario": cfg.name,
        "f_c_hz": cfg.f_c,
        "bandwidth_hz": cfg.bandwidth,
        "tau_max_s": cfg.tau_max,
        "nu_max_hz": cfg.nu_max,
        "paths": cfg.n_paths,
        "grid": {"N_t": grid.N_t, "N_f": grid.N_f, "N": grid.N,
                 "T_o_s": grid.T_o, "F_o_hz": grid.F_o},
        "snr_db": list(cfg.snr_points_db),
        "trials": cfg.trials,
        "schemes": list(cfg.schemes),
        "csi": cfg.csi_mode.value,
        "seed": cfg.base_seed,
        "threads": threads,
        "seed_streams": {"channel": _STREAM_CHANNEL, "symbols": 1,
                         "noise": 2, "basis": _STREAM_BASIS},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_matrix_csv(path: str, m: np.ndarray) -> None:
    """Row-major magnitude dump with an `n/m` corner header."""
    n_rows, n_cols = m.shape
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("n/m," + ",".join(str(c) for c in range(n_cols)) + "\n")
        for r in range(n_rows):
            fh.write(str(r) + "," + ",".join(_fmt(v) for v in m[r]) + "\n")


def _write_columns_csv(path: str, header: list[str],
                       cols: list[np.ndarray]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _scheme_basis(scheme: str, grid, cfg: ScenarioConfig, trial: int):
    if scheme == "ostf":
        return ostf_matrix(grid)
    if scheme == "otfs":
        return otfs_matrix(grid)
    if scheme == "ofdm":
        return ofdm_matrix(grid)
    if scheme == "ostf_u":
        return ostf_u_matrix(grid, _seed(cfg, trial, _STREAM_BASIS))
    raise ConfigError([f"scheme {scheme!r} has no modulation matrix to dump"])


def _run_dump(cfg: ScenarioConfig, what: str, trial: int, stem: str,
              log) -> list[str]:
    grid = cfg.grid()
    written: list[str] = []

    def emit(path, writer, *a):
        writer(path, *a)
        written.append(path)

    if what == "U":
        for scheme in sorted(cfg.schemes):
            if scheme == "eig":
                continue
            basis = _scheme_basis(scheme, grid, cfg, trial)
            emit(f"{stem}_U_{scheme}_abs.csv", _write_matrix_csv,
                 np.abs(basis.U))
        return written

    ch = draw_channel(cfg.tau_max, cfg.nu_max, cfg.n_paths,
                      _seed(cfg, trial, _STREAM_CHANNEL))
    sc = sample_channel(ch, grid)
    if what == "H":
        emit(f"{stem}_H_abs.csv", _write_matrix_csv, np.abs(sc.H))
        emit(f"{stem}_spreading_abs.csv", _write_matrix_csv,
             np.abs(spreading_function(sc)))
        return written

    # Hc / sinr need a receiver state at the first SNR point.
    snr = 10.0 ** (cfg.snr_points_db[0] / 10.0)
    idx = np.arange(grid.N)
    for scheme in sorted(cfg.schemes):
        if scheme == "eig":
            continue
        basis = _scheme_basis(scheme, grid, cfg, trial)
        h_eff = effective_channel(basis, sc)
        rs = mmse_filter(h_eff, snr, cfg.csi_mode)
        if what == "Hc":
            emit(f"{stem}_Hc_{scheme}.csv", _write_columns_csv,
                 ["n", "abs_diag_H_eff", "abs_diag_H_c"],
                 [idx, np.abs(np.diagonal(h_eff)),
                  np.abs(np.diagonal(rs.H_c))])
        else:
            emit(f"{stem}_sinr_{scheme}.csv", _write_columns_csv,
                 ["n", "sinr"], [idx, sinr_per_dimension(rs)])
    return written


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ddsig",
        description="Monte Carlo link simulation of OSTF/OTFS/OFDM "
                    "signaling over doubly dispersive channels.")
    p.add_argument("--scenario", help="built-in scenario name "
                   f"({', '.join(sorted(SCENARIOS))})")
    p.add_argument("--config", help="config file (overrides a built-in "
                   "scenario; mutually exclusive with --scenario)")
    p.add_argument("--schemes", help="comma list of schemes "
                   f"({', '.join(SCHEMES)}; 'ostf-u' also accepted)")
    p.add_argument("--csi", choices=["full", "diag"],
                   help="receiver channel knowledge")
    p.add_argument("--snr", help="comma list of SNR points in dB")
    p.add_argument("--trials", type=int, help="number of Monte Carlo trials")
    p.add_argument("--seed", type=int, help="campaign base seed")
    p.add_argument("--threads", type=int, default=None,
                   help=f"trial-level worker processes (default "
                        f"${THREADS_ENV} or 1)")
    p.add_argument("--out", default=None,
                   help="output CSV path (campaigns, default results.csv) "
                        "or file stem (dumps, default dump)")
    p.add_argument("--dump", choices=["H", "U", "Hc", "sinr"],
                   help="write diagnostic matrices instead of a campaign")
    p.add_argument("--trial", type=int, default=0,
                   help="trial index used for --dump seeds")
    p.add_argument("--version", action="version", version=__version__)
    return p


def _resolve_config(args) -> ScenarioConfig:
    problems: list[str] = []
    if args.config and args.scenario:
        raise ConfigError(["--scenario and --config are mutually exclusive; "
                           "put `name = ...` in the config file"])
    if args.config:
        cfg = load_config(args.config)
    else:
        name = args.scenario or "moderate"
        cfg = SCENARIOS.get(name)
        if cfg is None:
            raise ConfigError([f"unknown scenario {name!r}; valid: "
                               f"{', '.join(sorted(SCENARIOS))}"])
    overrides = {}
    if args.schemes:
        val = _parse_schemes(args.schemes, problems)
        if val is not None:
            overrides["schemes"] = val
    if args.snr:
        val = _parse_snrs(args.snr, problems)
        if val is not None:
            overrides["snr_points_db"] = val
    if args.csi:
        overrides["csi_mode"] = CsiMode(args.csi)
    if args.trials is not None:
        if args.trials < 1:
            problems.append(f"trials must be >= 1, got {args.trials}")
        else:
            overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if problems:
        raise ConfigError(problems)
    try:
        return cfg.replace(**overrides)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc


def main(argv: list[str] | None = None) -> int:
    """Entry point; returns a process exit code."""
    args = _build_parser().parse_args(argv)

    def log(msg: str) -> None:
        print(msg, file=sys.stderr)

    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        for prob in exc.problems:
            log(f"ddsig: config error: {prob}")
        return EXIT_CONFIG
    except OSError as exc:
        log(f"ddsig: cannot read config: {exc}")
        return EXIT_CONFIG_IO

    threads = args.threads
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    if threads < 1:
        log(f"ddsig: config error: threads must be >= 1, got {threads}")
        return EXIT_CONFIG

    try:
        if args.dump:
            stem = args.out or "dump"
            written = _run_dump(cfg, args.dump, args.trial, stem, log)
            for path in written:
                log(f"wrote {path}")
        else:
            out = args.out or "results.csv"
            agg = run_campaign(cfg, threads=threads, log=log)
            write_campaign_csv(out, agg)
            _write_metadata(out + ".meta.json", cfg, threads)
            log(f"wrote {out} and {out}.meta.json")
    except ConfigError as exc:
        for prob in exc.problems:
            log(f"ddsig: config error: {prob}")
        return EXIT_CONFIG
    except OSError as exc:
        log(f"ddsig: cannot write output: {exc}")
        return EXIT_OUTPUT
    except (TrialError, np.linalg.LinAlgError, FloatingPointError,
            ValueError) as exc:
        log(f"ddsig: numerical failure: {exc}")
        return EXIT_NUMERIC
    return EXIT_OK


def entry_point() -> None:
    raise SystemExit(main())
