"""Command-line front end.

    chirposc {modes,spectrum,analytic,compare,oracle,validate} [--config run.json] [flags]

The configuration is one flat JSON object whose keys are the fields of
``RunConfig``; unknown keys are rejected.  Command-line flags override the
file.  Exit status: 0 success, 2 a check failed, 1 bad configuration.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .analytic import (
    ExpChirpParams,
    adiabatic_conditions,
    closed_form_probability,
    gh_ratio,
    gibbons_hawking_probability,
    sideband_ratio,
)
from .io import Table, write_table
from .modes import SimulationWindow, solve_modes
from .oracle import OracleRun, TruncationError, compare_oracle_pt, evolve_exact
from .profiles import ChirpProfile, Exponential, ProfileError, profile_from_dict
from .spectrum import (
    LaserDrive,
    fourier_amplitude,
    lamb_dicke_validity,
    scales_for_eta,
    spectrum_sweep,
    units_note,
)

__all__ = ["RunConfig", "ConfigError", "load_config", "build_parser", "run", "main"]

SUBCOMMANDS = ("modes", "spectrum", "analytic", "compare", "oracle", "validate")
FORMATS = ("csv", "json")
EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    profile: dict = field(default_factory=lambda: {"kind": "exponential", "nu0": 200.0, "kappa": 1.0})
    t_end: float = 12.0
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    omega_eta: float = 0.01
    eta0: float | None = None
    delta_min: float = -20.0
    delta_max: float = -2.0
    delta_count: int = 19
    log_sweep: bool = False
    out: str | None = None
    format: str = "csv"
    fock_n: int = 30
    frame: str = "interaction"
    coupling: str = "linear"
    target_p1: float | None = None
    start_min: float = 50.0
    end_max: float = 0.1
    ld_threshold: float = 0.3
    max_gap: float | None = None

    def validate(self) -> None:
        if self.delta_count < 1:
            raise ConfigError("delta_count must be at least 1")
        if self.delta_count > 1 and not self.delta_min < self.delta_max:
            raise ConfigError("delta_min must be below delta_max")
        if self.log_sweep and (self.delta_min * self.delta_max <= 0):
            raise ConfigError("a log sweep needs delta_min and delta_max non-zero and of the same sign")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.fock_n < 4:
            raise ConfigError("fock_n must be at least 4")
        if self.omega_eta < 0:
            raise ConfigError("omega_eta must be non-negative")
        if self.eta0 is not None and not self.eta0 > 0:
            raise ConfigError("eta0 must be positive")
        if self.target_p1 is not None and not 0 < self.target_p1 < 1:
            raise ConfigError("target_p1 must lie in (0, 1)")

    def build_profile(self) -> ChirpProfile:
        try:
            return profile_from_dict(self.profile)
        except ProfileError as exc:
            raise ConfigError(str(exc)) from None

    def build_window(self) -> SimulationWindow:
        try:
            return SimulationWindow(self.t_end, self.rel_tol, self.abs_tol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def deltas(self) -> np.ndarray:
        if self.delta_count == 1:
            return np.array([float(self.delta_min)])
        space = np.geomspace if self.log_sweep else np.linspace
        return space(self.delta_min, self.delta_max, self.delta_count)


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return RunConfig(**doc)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


_PROFILE_FLAGS = {"nu0": "nu0", "kappa": "kappa", "depth": "depth", "mod_freq": "mod_freq"}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--profile", choices=["constant", "exponential", "modulated"],
                        help="chirp kind (sampled profiles need a config file)")
    common.add_argument("--nu0", type=float)
    common.add_argument("--kappa", type=float)
    common.add_argument("--depth", type=float, help="modulation depth")
    common.add_argument("--mod-freq", dest="mod_freq", type=float, help="modulation frequency")
    common.add_argument("--tend", dest="t_end", type=float, help="duration T")
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--omega-eta", dest="omega_eta", type=float, help="product Omega0 * eta0")
    common.add_argument("--eta0", type=float, help="Lamb-Dicke parameter at nu0")
    common.add_argument("--delta-min", dest="delta_min", type=float)
    common.add_argument("--delta-max", dest="delta_max", type=float)
    common.add_argument("--delta-count", dest="delta_count", type=int)
    common.add_argument("--log-sweep", dest="log_sweep", action="store_true", default=None)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--fock-n", dest="fock_n", type=int, help="oracle Fock truncation")
    common.add_argument("--frame", choices=["interaction", "schrodinger"])
    common.add_argument("--coupling", choices=["linear", "exponential"])
    common.add_argument("--target-p1", dest="target_p1", type=float,
                        help="oracle: choose Omega0 per detuning so that P1 equals this")
    common.add_argument("--start-min", dest="start_min", type=float)
    common.add_argument("--end-max", dest="end_max", type=float)
    common.add_argument("--ld-threshold", dest="ld_threshold", type=float)
    common.add_argument("--max-gap", dest="max_gap", type=float,
                        help="compare: exit 2 if the largest relative gap exceeds this")

    parser = _Parser(prog="chirposc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"chirposc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "modes": "mode functions h, g and f on the solver grid",
        "spectrum": "first-order excitation spectrum",
        "analytic": "closed forms for the exponential chirp",
        "compare": "numeric spectrum against the closed form",
        "oracle": "exact Fock-space evolution against first-order theory",
        "validate": "adiabaticity and Lamb-Dicke checks",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    values = vars(args)
    profile = dict(cfg.profile)
    if args.profile is not None and args.profile != profile.get("kind"):
        profile = {"kind": args.profile}
    for flag, key in _PROFILE_FLAGS.items():
        if values.get(flag) is not None:
            profile[key] = values[flag]
    cfg.profile = profile
    for f in fields(RunConfig):
        if f.name != "profile" and values.get(f.name) is not None:
            setattr(cfg, f.name, values[f.name])
    cfg.validate()
    return cfg


def _base_metadata(cfg: RunConfig, profile: ChirpProfile, command: str) -> dict:
    return {"command": command, "profile": profile.describe(), "t_end": cfg.t_end,
            "units": units_note(profile), "version": __version__}


def _require_exponential(profile: ChirpProfile, command: str) -> Exponential:
    if not isinstance(profile, Exponential):
        raise ConfigError(f"{command} needs an exponential profile")
    return profile


def _exp_params(cfg: RunConfig, profile: Exponential) -> ExpChirpParams:
    return ExpChirpParams(profile.nu0, profile.kappa, cfg.t_end)


def _cmd_modes(cfg, profile, window):
    sol = solve_modes(profile, window)
    wdev = np.abs(sol.h * sol.gdot - sol.hdot * sol.g - 1.0)
    f = sol.f
    rows = [list(r) for r in zip(sol.times, sol.h, sol.hdot, sol.g, sol.gdot, f.real, f.imag, wdev)]
    meta = _base_metadata(cfg, profile, "modes")
    meta.update(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_wronskian_deviation=float(wdev.max()))
    cols = ["t", "h", "hdot", "g", "gdot", "re_f", "im_f", "wronskian_deviation"]
    return Table(cols, rows, meta), EXIT_OK


def _cmd_spectrum(cfg, profile, window):
    # the drive only carries the product Omega0 * eta0
    drive = LaserDrive(rabi=cfg.omega_eta, eta0=1.0)
    sweep = spectrum_sweep(profile, drive, cfg.deltas(), window)
    meta = dict(sweep.metadata)
    meta["command"] = "spectrum"
    return Table(["delta", "p1"], [list(e) for e in sweep.entries()], meta), EXIT_OK


def _analytic_row(p: ExpChirpParams, omega_eta: float, delta: float) -> list:
    if delta == 0:
        return [delta, None, None, 1.0, None, None]
    ratio = gh_ratio(p, delta) if abs(delta) >= p.kappa else (None, None)
    return [delta, closed_form_probability(p, omega_eta, delta, check=False),
            gibbons_hawking_probability(p, omega_eta, delta), sideband_ratio(delta, p.kappa), *ratio]


def _adiabatic_meta(cfg, p: ExpChirpParams) -> dict:
    rep = adiabatic_conditions(p, cfg.start_min, cfg.end_max)
    return {"ratio_start": rep.ratio_start, "ratio_end": rep.ratio_end, "adiabatic_pass": rep.passed}


def _cmd_analytic(cfg, profile, window):
    p = _exp_params(cfg, _require_exponential(profile, "analytic"))
    rows = [_analytic_row(p, cfg.omega_eta, float(d)) for d in cfg.deltas()]
    meta = _base_metadata(cfg, profile, "analytic")
    meta.update(omega_eta=cfg.omega_eta, **_adiabatic_meta(cfg, p))
    cols = ["delta", "p1_closed_form", "p1_gh", "sideband_ratio", "gh_ratio_exact", "gh_ratio_approx"]
    return Table(cols, rows, meta), EXIT_OK


def _cmd_compare(cfg, profile, window):
    p = _exp_params(cfg, _require_exponential(profile, "compare"))
    drive = LaserDrive(rabi=cfg.omega_eta, eta0=1.0)
    sweep = spectrum_sweep(profile, drive, cfg.deltas(), window)
    rows = []
    gaps = []
    for delta, p1 in sweep.entries():
        if delta == 0:
            rows.append([delta, p1, None, None])
            continue
        closed = closed_form_probability(p, cfg.omega_eta, delta, check=False)
        gap = abs(p1 - closed) / closed if closed > 0 else math.inf
        gaps.append(gap)
        rows.append([delta, p1, closed, gap])
    meta = dict(sweep.metadata)
    meta.update(command="compare", max_rel_gap=max(gaps) if gaps else None, **_adiabatic_meta(cfg, p))
    status = EXIT_OK
    if cfg.max_gap is not None:
        meta["max_gap_limit"] = cfg.max_gap
        if not gaps or max(gaps) > cfg.max_gap:
            status = EXIT_FAILED
    return Table(["delta", "p1_numeric", "p1_closed_form", "rel_gap"], rows, meta), status


def _cmd_oracle(cfg, profile, window):
    eta0 = cfg.eta0 if cfg.eta0 is not None else 0.05
    sol = solve_modes(profile, window)
    rows = []
    status = EXIT_OK
    for delta in cfg.deltas():
        delta = float(delta)
        amp = abs(fourier_amplitude(sol, delta))
        omega_eta = cfg.omega_eta if cfg.target_p1 is None else math.sqrt(cfg.target_p1) / amp
        drive = LaserDrive(rabi=omega_eta / eta0, detuning=delta, eta0=eta0)
        p1 = omega_eta**2 * amp**2
        run_ = OracleRun(profile, drive, window, truncation=cfg.fock_n, frame=cfg.frame, coupling=cfg.coupling)
        try:
            done = evolve_exact(run_)
            cmp_ = compare_oracle_pt(done, p1)
            passed = cmp_.passed
        except TruncationError as exc:
            print(f"chirposc: {exc}", file=sys.stderr)
            done, passed = exc.run, False
            cmp_ = compare_oracle_pt(done, p1)
        if not passed:
            status = EXIT_FAILED
        rows.append([delta, omega_eta, p1, done.excited_population, cmp_.rel_error, done.leakage,
                     done.norm_drift, passed])
    meta = _base_metadata(cfg, profile, "oracle")
    meta.update(eta0=eta0, fock_n=cfg.fock_n, frame=cfg.frame, coupling=cfg.coupling,
                rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol)
    cols = ["delta", "omega_eta", "p1_pt", "p1_oracle", "rel_error", "leakage", "norm_drift", "pass"]
    return Table(cols, rows, meta), status


def _cmd_validate(cfg, profile, window):
    rows = []
    if isinstance(profile, Exponential):
        rep = adiabatic_conditions(_exp_params(cfg, profile), cfg.start_min, cfg.end_max)
        rows.append(["adiabatic_start", "ratio_start", rep.ratio_start, "min", cfg.start_min,
                     rep.ratio_start >= cfg.start_min])
        rows.append(["adiabatic_end", "ratio_end", rep.ratio_end, "max", cfg.end_max,
                     rep.ratio_end <= cfg.end_max])
    if cfg.eta0 is not None:
        nu0 = float(profile.nu(0.0))
        ld = lamb_dicke_validity(profile, scales_for_eta(cfg.eta0, nu0), window, cfg.ld_threshold)
        rows.append(["lamb_dicke", "max_eta", ld.max_eta, "max", cfg.ld_threshold, ld.passed])
        rows.append(["lamb_dicke", "first_violation_time", ld.first_violation_time, "", None, ld.passed])
    if not rows:
        raise ConfigError("nothing to validate: use an exponential profile or give --eta0")
    meta = _base_metadata(cfg, profile, "validate")
    passed = all(r[-1] for r in rows)
    meta["pass"] = passed
    return Table(["check", "quantity", "value", "bound", "limit", "pass"], rows, meta), (
        EXIT_OK if passed else EXIT_FAILED)


_COMMANDS = {
    "modes": _cmd_modes,
    "spectrum": _cmd_spectrum,
    "analytic": _cmd_analytic,
    "compare": _cmd_compare,
    "oracle": _cmd_oracle,
    "validate": _cmd_validate,
}


def run(cfg: RunConfig, command: str) -> int:
    """Execute ``command`` and write its table; returns the exit status."""
    if command not in _COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    cfg.validate()
    profile = cfg.build_profile()
    window = cfg.build_window()
    try:
        profile.check_window(window.t_end)
    except ProfileError as exc:
        raise ConfigError(str(exc)) from None
    table, status = _COMMANDS[command](cfg, profile, window)
    config = asdict(cfg)
    config.pop("out")
    table.metadata.setdefault("config", config)
    write_table(table, cfg.out, cfg.format)
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        return run(cfg, args.command)
    except (ValueError, TypeError) as exc:
        print(f"chirposc: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
