"""Config-driven command-line front end.

Usage::

    pseudomode run config.toml [-o OUTPUT] [-v]

The config names one ``command`` (sector, poles, reduce, dynamics, fit,
displace), a ``[network]`` table in the layout of
:meth:`ModeNetwork.to_dict`, an optional ``[drive]`` table and a table named
after the command holding its parameters. Exit status is 0 on success, 2 for
invalid input and 3 when a numerical diagnostic fails.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as pio
from ._validation import check_complex, check_int, check_real
from .drive import DriveSpec, collapse_diagnostic, ohmic_background
from .exceptions import NumericalError, PseudomodeError, ValidationError
from .memory import (
    PoleResidueSet,
    RationalFitter,
    TrajectoryPair,
    equivalence_report,
    fit_error_bound,
    fit_error_eta,
)
from .model import ModeNetwork, enumerate_sector
from .reduction import ReducedChannel, channel_green, reduce_channel
from .resolvent import chain_eigenvalues

logger = logging.getLogger("pseudomode")

COMMANDS = ("sector", "poles", "reduce", "dynamics", "fit", "displace")
FORMATS = ("delimited", "structured")
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
FREQ = "[freq]"


@dataclass
class RunConfig:
    network: ModeNetwork
    command: str
    params: dict
    drive: DriveSpec | None = None
    output_path: str | None = None
    output_format: str = "delimited"
    threads: int = 1
    source_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, data, source_dir=None):
        command = data.get("command")
        if command is None:
            raise ValidationError("missing field: command")
        if command not in COMMANDS:
            raise ValidationError(f"unknown command {command!r}; expected one of {COMMANDS}")
        if "network" not in data:
            raise ValidationError("missing field: network")
        try:
            network = ModeNetwork.from_dict(data["network"])
        except ValidationError as exc:
            raise ValidationError(f"network: {exc}") from exc
        drive = None
        if "drive" in data:
            try:
                drive = DriveSpec.from_dict(data["drive"])
            except (ValidationError, TypeError) as exc:
                raise ValidationError(f"drive: {exc}") from exc
        fmt = data.get("output_format", "delimited")
        if fmt not in FORMATS:
            raise ValidationError(f"output_format must be one of {FORMATS}, got {fmt!r}")
        threads = check_int(data.get("threads", 1), "threads")
        if threads < 1:
            raise ValidationError("threads must be >= 1")
        params = data.get(command, {})
        if not isinstance(params, dict):
            raise ValidationError(f"[{command}] must be a table")
        return cls(network, command, params, drive, data.get("output_path"), fmt, threads,
                   Path(source_dir) if source_dir else Path.cwd())


def _require(params, key, command):
    if key not in params:
        raise ValidationError(f"missing field: {command}.{key}")
    return params[key]


def _source(params, command):
    raw = _require(params, "source", command)
    if not isinstance(raw, list):
        raise ValidationError(f"{command}.source must be an array of occupations")
    return tuple(check_int(x, f"{command}.source", nonnegative=True) for x in raw)


def _window(params, command, key="window"):
    raw = _require(params, key, command)
    if not isinstance(raw, list) or len(raw) != 2:
        raise ValidationError(f"{command}.{key} must be [low, high]")
    lo, hi = (check_real(x, f"{command}.{key}") for x in raw)
    if not hi > lo:
        raise ValidationError(f"{command}.{key} is empty: {raw}")
    return lo, hi


def _prs(params, command):
    rec = _require(params, "kernel", command)
    try:
        return PoleResidueSet.from_record(rec)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"{command}.kernel: poles and residues must be [re, im] pairs") from exc


# each command returns (structured report dict, delimited columns, delimited rows)

def _cmd_sector(cfg):
    p = cfg.params
    charges = _require(p, "charges", "sector")
    if not isinstance(charges, dict):
        raise ValidationError("sector.charges must be a table")
    basis = enumerate_sector(cfg.network, charges)
    eig = chain_eigenvalues(basis)
    report = {
        "sector_basis": {
            "kind": basis.kind.value,
            "charges": basis.charges,
            "states": [list(s) for s in basis.states],
            "diagonal_energies": basis.diagonal_energies,
            "jumps": basis.jumps,
        },
        "chain_eigenvalues": eig,
    }
    n_modes = len(basis.states[0])
    cols = ["index"] + [f"n{i}" for i in range(n_modes)] + [
        f"diagonal_energy {FREQ}", f"jump_to_next {FREQ}", f"chain_eigenvalue {FREQ}"]
    rows = []
    for r, s in enumerate(basis.states):
        jump = float(basis.jumps[r]) if r < basis.dim - 1 else 0.0
        rows.append([r, *s, float(basis.diagonal_energies[r]), jump, float(eig[r])])
    return report, cols, rows


def _cmd_poles(cfg):
    ch = reduce_channel(cfg.network, _source(cfg.params, "poles"))
    cols = ["pole", f"re_z {FREQ}", f"im_z {FREQ}", f"omega_alpha {FREQ}",
            f"omega_beta {FREQ}", "m2 [freq^2]", "case", "validity"]
    rows = [[label, z.real, z.imag, ch.omega_alpha, ch.omega_beta, ch.m2,
             ch.case.value, ch.validity.value]
            for label, z in zip(("plus", "minus"), ch.poles)]
    return {"reduced_channel": ch.to_record()}, cols, rows


def _cmd_reduce(cfg):
    p = cfg.params
    ch = reduce_channel(cfg.network, _source(p, "reduce"))
    lo, hi = _window(p, "reduce")
    points = check_int(p.get("points", 401), "reduce.points")
    if points < 2:
        raise ValidationError("reduce.points must be >= 2")
    eta = check_real(p.get("eta", fit_error_eta((lo, hi))), "reduce.eta", positive=True)
    omega = np.linspace(lo, hi, points)
    chunks = np.array_split(omega + 1j * eta, cfg.threads)
    if cfg.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(lambda z: channel_green(ch, z), chunks))
    else:
        parts = [channel_green(ch, z) for z in chunks]
    g = np.concatenate(parts)
    report = {"reduced_channel": ch.to_record(), "eta": eta, "omega": omega,
              "green": pio.pairs(g)}
    cols = [f"omega {FREQ}", "re_green [1/freq]", "im_green [1/freq]"]
    rows = [[w, z.real, z.imag] for w, z in zip(omega, g)]
    return report, cols, rows


def _cmd_dynamics(cfg):
    p = cfg.params
    if "kernel" in p:
        prs = _prs(p, "dynamics")
        omega_alpha = check_real(p.get("omega_alpha", 0.0), "dynamics.omega_alpha")
    else:
        ch = reduce_channel(cfg.network, _source(p, "dynamics"))
        prs, omega_alpha = ch.pole_residue_set(), ch.omega_alpha
    c0 = p.get("c0", 1.0)
    c0 = check_complex(complex(*c0) if isinstance(c0, list) else c0, "dynamics.c0")
    T = check_real(_require(p, "T", "dynamics"), "dynamics.T", positive=True)
    dt = p.get("dt")
    dt = None if dt is None else check_real(dt, "dynamics.dt", positive=True)
    tol = check_real(p.get("tol", 1e-6), "dynamics.tol", positive=True)
    rep = equivalence_report(omega_alpha, prs, c0, T, dt, tol)
    tr = rep.trajectories
    report = {
        "trajectory_pair": {
            "grid": tr.grid,
            "volterra_amplitude": pio.pairs(tr.volterra_amplitude),
            "pseudomode_amplitude": pio.pairs(tr.pseudomode_amplitude),
        },
        "max_deviation": rep.max_deviation,
        "dt": rep.dt,
        "flagged": list(rep.flagged),
    }
    cols = ["t [1/freq]", "re_c_volterra", "im_c_volterra", "re_c_pseudomode",
            "im_c_pseudomode", "deviation"]
    rows = [[t, a.real, a.imag, b.real, b.imag, d] for t, a, b, d in
            zip(tr.grid, tr.volterra_amplitude, tr.pseudomode_amplitude, tr.deviation)]
    logger.info("max deviation %.3e at dt=%.3e", rep.max_deviation, rep.dt)
    return report, cols, rows


def _fit_source(cfg, p, window):
    kind = _require(p, "source", "fit")
    grid_points = check_int(p.get("samples", 400), "fit.samples")
    omega = np.linspace(window[0], window[1], grid_points)
    if kind == "samples_file":
        path = cfg.source_dir / _require(p, "samples_file", "fit")
        w, f = pio.load_samples(path)
        order = np.argsort(w)
        w, f = w[order], f[order]

        def exact(z):
            # off-axis value approximated by the nearest real-axis samples
            x = np.real(z)
            return np.interp(x, w, f.real) + 1j * np.interp(x, w, f.imag)

        return w, f, exact, True
    if kind == "poles":
        truth = _prs(p, "fit")
        return omega, truth(omega.astype(complex)), truth, True
    if kind == "spectral_density":
        if cfg.drive is None:
            raise ValidationError("fit.source = 'spectral_density' needs a [drive] table")
        spec = cfg.drive
        c2 = spec.cutoff ** 2

        def exact(z):
            return 2.0 * spec.mass * spec.g_sb / np.pi * z * c2 / (c2 + z * z)

        # a real density has conjugate pole pairs, so causal reflection is off
        return omega, ohmic_background(spec, omega).astype(complex), exact, False
    raise ValidationError(
        f"fit.source must be samples_file, poles or spectral_density, got {kind!r}")


def _cmd_fit(cfg):
    p = cfg.params
    window = _window(p, "fit")
    n_poles = check_int(_require(p, "n_poles", "fit"), "fit.n_poles")
    omega, values, exact, causal = _fit_source(cfg, p, window)
    causal = bool(p.get("causal", causal))
    est = RationalFitter(n_poles=n_poles, window=window, causal=causal).fit(omega, values)
    omega_alpha = check_real(p.get("omega_alpha", 0.5 * (window[0] + window[1])),
                             "fit.omega_alpha")

    def fitted(z):
        return est.predict(z)

    def g_fit(z):
        return 1.0 / (z - omega_alpha - fitted(z))

    bound = fit_error_bound(g_fit, lambda z: exact(z) - fitted(z), window,
                            grid_points=check_int(p.get("grid_points", 400), "fit.grid_points"))
    report = {
        "pole_residue_set": {"poles": pio.pairs(est.poles_), "residues": pio.pairs(est.residues_)},
        "residual": est.residual_,
        "fit_error_bound": bound,
        "eta": fit_error_eta(window),
        "omega_alpha": omega_alpha,
        "n_iter": est.n_iter_,
        "converged": est.converged_,
        "reflected": est.reflected_,
        "causal": causal,
    }
    cols = ["re_pole [freq]", "im_pole [freq]", "re_residue", "im_residue", "residual",
            "fit_error_bound"]
    rows = [[z.real, z.imag, r.real, r.imag, est.residual_, bound]
            for z, r in zip(est.poles_, est.residues_)]
    return report, cols, rows


def _cmd_displace(cfg):
    p = cfg.params
    betas = p.get("beta")
    if betas is None:
        if cfg.drive is None:
            raise ValidationError("missing field: displace.beta (or a [drive] table)")
        from .drive import displacement_amplitude

        betas = [abs(displacement_amplitude(cfg.drive))]
    if not isinstance(betas, list):
        betas = [betas]
    hold = p.get("hold_g3")
    hold = None if hold is None else check_real(hold, "displace.hold_g3", nonnegative=True)
    rows_ = collapse_diagnostic(cfg.network, betas, _source(p, "displace"), hold, cfg.threads)
    fields = ("beta_abs", "k", "parent_plus", "parent_minus", "reduced_plus",
              "reduced_minus", "mismatch")
    report = {
        "k_rule": "round(beta_abs**2)",
        "rows": [{f: getattr(r, f) for f in fields} for r in rows_],
    }
    cols = ["beta_abs", "k"] + [f"{pre}_{name} {FREQ}" for name in fields[2:6]
                                for pre in ("re", "im")] + [f"mismatch {FREQ}"]
    rows = [[r.beta_abs, r.k,
             *(x for z in (r.parent_plus, r.parent_minus, r.reduced_plus, r.reduced_minus)
               for x in (z.real, z.imag)),
             r.mismatch] for r in rows_]
    return report, cols, rows


DISPATCH = {
    "sector": _cmd_sector,
    "poles": _cmd_poles,
    "reduce": _cmd_reduce,
    "dynamics": _cmd_dynamics,
    "fit": _cmd_fit,
    "displace": _cmd_displace,
}


def render(cfg: RunConfig):
    """Run the configured command and return the output text."""
    report, cols, rows = DISPATCH[cfg.command](cfg)
    if cfg.output_format == "structured":
        return pio.dumps_structured({"command": cfg.command, **report})
    return pio.dumps_delimited(cols, rows)


def read_report(text):
    """Re-parse a structured report into library objects where one exists."""
    data = pio.loads_toml(text)
    command = data.get("command")
    out = dict(data)
    if "reduced_channel" in data:
        out["reduced_channel"] = ReducedChannel.from_record(data["reduced_channel"])
    if "trajectory_pair" in data:
        tp = data["trajectory_pair"]
        out["trajectory_pair"] = TrajectoryPair(
            np.asarray(tp["grid"], float), pio.unpair(tp["volterra_amplitude"]),
            pio.unpair(tp["pseudomode_amplitude"]))
    if "pole_residue_set" in data and data.get("causal", True):
        out["pole_residue_set"] = PoleResidueSet.from_record(data["pole_residue_set"])
    if command == "displace":
        for row in out["rows"]:
            for key in ("parent_plus", "parent_minus", "reduced_plus", "reduced_minus"):
                row[key] = complex(*row[key])
    return out


def run(cfg: RunConfig, output_path=None):
    """Execute ``cfg``; returns the exit status and writes the output file."""
    try:
        text = render(cfg)
    except ValidationError as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_INVALID
    except NumericalError as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    target = output_path or cfg.output_path
    if target is None:
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)
        logger.info("wrote %s", target)
    return EXIT_OK


def run_file(path, output_path=None):
    try:
        data = pio.load_toml(path)
        cfg = RunConfig.from_dict(data, source_dir=Path(path).resolve().parent)
    except ValidationError as exc:
        logger.error("invalid config: %s", exc)
        return EXIT_INVALID
    except PseudomodeError as exc:  # pragma: no cover
        logger.error("%s", exc)
        return EXIT_NUMERICAL
    return run(cfg, output_path)


def build_parser():
    parser = argparse.ArgumentParser(prog="pseudomode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="action", required=True)
    run_p = sub.add_parser("run", help="execute one config file")
    run_p.add_argument("config", help="TOML run configuration")
    run_p.add_argument("-o", "--output", help="override output_path")
    run_p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr)
    return run_file(args.config, args.output)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
