"""Command-line experiment runner.

    polariton-ttm run CONFIG
    polariton-ttm scenario NAME [--out DIR] [--seed S]
    polariton-ttm list
    polariton-ttm validate CONFIG

Exit codes: 0 ok, 2 configuration error, 3 numerical failure.  Errors are a
single line on stderr.  Outputs are assembled in a scratch directory and
only moved into place when the whole run succeeds.
"""

import argparse
import functools
import logging
import math
import os
import platform
import shutil
import sys
import tempfile

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, PRESETS, catalog, load_config
from .disorder import DisorderError, DisorderSpec, disorder_rate_sweep, run_ensemble, sweep_csv
from .kinetics import KineticsError, analyse, kappa_sweep, learning_plan, resonance_scan
from .maps import (MapError, check_cptp, converge_fock, dynamical_maps, observable_trajectory,
                   propagate_exact)
from .models import ModelError, default_coupling, initial_state, tls_observable, tls_state
from .numerics import NumericsError
from .ttm import TTMError, transfer_tensors, ttm_propagate

log = logging.getLogger("polariton_ttm")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


class NumericalFailure(RuntimeError):
    pass


NUMERICAL_ERRORS = (NumericalFailure, KineticsError, TTMError, MapError, NumericsError,
                    np.linalg.LinAlgError)


def fmt(x):
    """Shortest round-trip decimal form of a float (at most 17 significant digits)."""
    return repr(float(x))


def write_csv(path, header, rows, meta=()):
    with open(path, "w") as fh:
        for line in meta:
            fh.write(f"# {line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


class CPTPMonitor:
    """Checks every map series and keeps the worst diagnostics seen."""

    def __init__(self):
        self.count = 0
        self.worst = {"trace_err": 0.0, "hermiticity_err": 0.0, "min_choi_eig": math.inf}

    def __call__(self, series):
        diag = check_cptp(series)
        self.count += 1
        w = self.worst
        w["trace_err"] = max(w["trace_err"], diag["trace_err"])
        w["hermiticity_err"] = max(w["hermiticity_err"], diag["hermiticity_err"])
        w["min_choi_eig"] = min(w["min_choi_eig"], diag["min_choi_eig"])
        if not diag["ok"]:
            raise NumericalFailure(
                f"map series violates CPTP: trace {diag['trace_err']:.3g}, "
                f"hermiticity {diag['hermiticity_err']:.3g}, min Choi eigenvalue {diag['min_choi_eig']:.3g}")

    def summary(self):
        w = self.worst
        return (f"cptp series_checked = {self.count}  worst trace = {w['trace_err']:.3g}  "
                f"hermiticity = {w['hermiticity_err']:.3g}  min_choi = {w['min_choi_eig']:.3g}")


def _steps(t, dt):
    return max(1, int(math.ceil(t / dt - 1e-9)))


# -- pieces of an experiment ---------------------------------------------------------

def _plain_trajectory(cfg, spec, rho0, ops, maps, tensors, K_total, notes):
    stride = cfg.trajectory_stride
    exact = propagate_exact(spec, initial_state(cfg.pattern, spec), cfg.dt / stride,
                            K_total * stride, reduced=True)
    ttm = ttm_propagate(tensors, rho0, K_total)
    cols = {}
    for name, op in ops.items():
        e = observable_trajectory(exact, None, op)[::stride]
        t = observable_trajectory(ttm, None, op)
        cols[f"{name}_ttm"] = t
        cols[f"{name}_exact"] = e
        notes.append(f"max_abs_error {name} window {cfg.window_time!r} = {fmt(np.max(np.abs(t - e)))}")
        for w in cfg.compare_windows:
            Tw = transfer_tensors(maps.truncate(_steps(w, cfg.dt)))
            tw = observable_trajectory(ttm_propagate(Tw, rho0, K_total, max_drift=math.inf), None, op)
            cols[f"{name}_ttm_w{w:g}"] = tw
            notes.append(f"max_abs_error {name} window {w!r} = {fmt(np.max(np.abs(tw - e)))}")
    return cols


def _ensemble(cfg, spec, rho0, ops, K, K_total, check, notes):
    dis = cfg.disorder
    param = dis["parameter"]
    dspec = DisorderSpec(spec, {param: (dis["lo"], dis["hi"])}, dis["n_realizations"], cfg.seed,
                         frozenset([param]) if dis["shared"] else frozenset())
    ens = run_ensemble(dspec, rho0, cfg.dt, K, K_total, cfg.trajectory_stride, cfg.backend, check)
    da = ttm_propagate(ens.da_tensors, rho0, K_total)
    # the averaged-tensor baseline is not trace preserving in general
    avg = ttm_propagate(ens.averaged_tensors, rho0, K_total, max_drift=math.inf)
    cols = {}
    for name, op in ops.items():
        e = observable_trajectory(ens.averaged_trajectory, None, op)[::cfg.trajectory_stride]
        cols[f"{name}_da_ttm"] = observable_trajectory(da, None, op)
        cols[f"{name}_avg_tensors"] = observable_trajectory(avg, None, op)
        cols[f"{name}_exact_mean"] = e
        for label in ("da_ttm", "avg_tensors"):
            err = np.max(np.abs(cols[f"{name}_{label}"] - e))
            notes.append(f"max_abs_error {name} {label} = {fmt(err)}")
    notes.append(f"realizations = {dis['n_realizations']}  master_seed = {cfg.seed}")
    return ens.da_tensors, cols


def _sweep_base(cfg, kind, n, omega):
    spec = cfg.model
    changes = {"kind": kind}
    if n != spec.n_tls:
        changes.update(n_tls=n, n_cavity=n + (spec.n_cavity - spec.n_tls),
                       omega_tls=(spec.omega_tls[0],) * n, g=default_coupling(n))
    if omega is not None:
        changes.update(omega_c=omega, omega_tls=(omega,) * n)
    base = spec.with_(**changes)
    if kind != "TC" and cfg.sweep.get("fock_cutoff"):
        base = base.with_(n_cavity=cfg.sweep["fock_cutoff"])
    elif cfg.converge_fock and kind != "TC":
        base, _ = converge_fock(base, cfg.window_time, cfg.dt)
    return base


def _kappa_sweep(cfg, check, notes):
    sw = cfg.sweep
    op_text = cfg.observables[sw["observable"]]
    mf = sw.get("memory_factor", 2.0)
    plan = functools.partial(learning_plan, memory_factor=mf)
    rows = []
    for kind in sw["models"]:
        for n in sw["n_tls"]:
            for omega in (sw["omega"] or [None]):
                base = _sweep_base(cfg, kind, n, omega)
                log.info("kappa sweep %s N=%d omega=%s", kind, n, omega)
                res = kappa_sweep(base, sw["values"], tls_state(cfg.pattern, n).matrix,
                                  tls_observable(op_text, n), plan=plan, backend=cfg.backend,
                                  check=check, errors="record")
                for r in res:
                    rows.append((kind, str(n), base.omega_c, base.omega_tls[0], r["kappa"], r["dt"],
                                 r["window"], r["tau"], r["rate"]))
                    if "error" in r:
                        notes.append(f"sweep {kind} N={n} omega_c={base.omega_c!r} kappa = {fmt(r['kappa'])} "
                                     f"failed: {r['error']}")
                rates = np.array([r["rate"] for r in res])
                if np.all(np.isnan(rates)):
                    raise NumericalFailure(f"every point of the {kind} N={n} sweep failed")
                notes.append(f"sweep {kind} N={n} omega_c={base.omega_c!r} n_cavity={base.n_cavity} "
                             f"peak_kappa = {fmt(sw['values'][int(np.nanargmax(rates))])} "
                             f"peak_rate = {fmt(np.nanmax(rates))}")
    header = ("model", "n_tls", "omega_c", "omega_tls", "kappa", "dt", "window", "tau", "rate")
    return header, rows


def _peak_sweep(cfg, rho0, obs, check, notes):
    rows = []
    kin = cfg.kinetics
    for kappa in cfg.sweep["values"]:
        scan = resonance_scan(cfg.model.with_(kappa=kappa), rho0, obs, kin["dt_grid"], kin["scan_window"],
                              null_correction=kin["null_correction"], check=check)
        i = int(np.argmax(scan.tau_corrected))
        rate = 1.0 / scan.tau_corrected[i]
        rows.append((kappa, scan.dt_grid[i], scan.tau_corrected[i], rate, kappa / 4))
        notes.append(f"peak kappa = {fmt(kappa)} dt = {fmt(scan.dt_grid[i])} rate = {fmt(rate)}")
    return ("kappa", "peak_dt", "tau_corrected", "rate", "kappa_over_4"), rows


def _keep_row(name, kin):
    if name.startswith("steady_"):
        return kin["steady_state"]
    if name.startswith(("M1_", "M2_", "poisson_")):
        return kin["moments"]
    return kin["relaxation"]


def run_experiment(cfg, out_dir):
    """Run a resolved config and write every output into ``out_dir``.

    Returns the list of file names written.
    """
    spec = cfg.model
    notes = []
    if cfg.converge_fock and spec.kind != "TC":
        spec, gap = converge_fock(spec, cfg.window_time, cfg.dt)
        notes.append(f"fock n_cavity = {spec.n_cavity} gap = {fmt(gap)}")
    check = CPTPMonitor()
    n = spec.n_tls
    rho0 = tls_state(cfg.pattern, n).matrix
    ops = {name: tls_observable(text, n) for name, text in cfg.observables.items()}
    K = _steps(cfg.window_time, cfg.dt)
    K_total = _steps(cfg.horizon_time, cfg.dt)
    files = []

    log.info("learning window: %d maps at dt=%g", K, cfg.dt)
    if cfg.disorder.get("ensemble") and cfg.disorder.get("lo") is not None:
        tensors, cols = _ensemble(cfg, spec, rho0, ops, K, K_total, check, notes)
    else:
        maps = dynamical_maps(spec, cfg.dt, max(K, *(_steps(w, cfg.dt) for w in cfg.compare_windows or [0])),
                              backend=cfg.backend)
        check(maps)
        tensors = transfer_tensors(maps.truncate(K))
        cols = _plain_trajectory(cfg, spec, rho0, ops, maps, tensors, K_total, notes)
    times = cfg.dt * np.arange(K_total + 1)
    write_csv(os.path.join(out_dir, "trajectory.csv"), ("time", *cols),
              zip(times, *cols.values()), meta=[f"scenario = {cfg.scenario}"])
    files.append("trajectory.csv")

    log.info("kinetics")
    kin = cfg.kinetics
    report = analyse(tensors, rho0, ops, with_moments=kin["moments"],
                     null_correction=kin["null_correction"])
    rows = [(k, v) for k, v in report.rows() if _keep_row(k, kin)]
    write_csv(os.path.join(out_dir, "kinetics.csv"), ("quantity", "value"), rows)
    files.append("kinetics.csv")

    if kin["resonance_scan"]:
        log.info("resonance scan over %d steps", len(kin["dt_grid"]))
        scan = resonance_scan(spec, rho0, ops[kin["scan_observable"]], kin["dt_grid"], kin["scan_window"],
                              null_correction=kin["null_correction"], check=check)
        report.resonances = scan
        write_csv(os.path.join(out_dir, "resonance.csv"), ("dt", "tau_raw", "tau_corrected"),
                  zip(scan.dt_grid, scan.tau_values, scan.tau_corrected))
        files.append("resonance.csv")

    kind = cfg.sweep["kind"]
    if kind != "none":
        log.info("%s sweep", kind)
        if kind == "kappa":
            header, srows = _kappa_sweep(cfg, check, notes)
            write_csv(os.path.join(out_dir, "sweep.csv"), header, srows)
        elif kind == "peak":
            header, srows = _peak_sweep(cfg, rho0, ops[cfg.sweep["observable"]], check, notes)
            write_csv(os.path.join(out_dir, "sweep.csv"), header, srows)
        else:
            dis = cfg.disorder
            srows = disorder_rate_sweep(spec, cfg.sweep["values"], dis["n_realizations"], cfg.seed,
                                        rho0=rho0, dt=cfg.dt, window_time=cfg.window_time,
                                        center=dis["center"], check=check)
            with open(os.path.join(out_dir, "sweep.csv"), "w") as fh:
                fh.write(sweep_csv(srows))
            r = {row["delta"]: row["rate"] for row in srows}
            notes.append(f"rate ratio first/last delta = {fmt(r[srows[0]['delta']] / r[srows[-1]['delta']])}")
        files.append("sweep.csv")

    notes.append(check.summary())
    with open(os.path.join(out_dir, "report.txt"), "w") as fh:
        fh.write(f"scenario = {cfg.scenario}\n")
        fh.write(f"model = {spec.kind} N={spec.n_tls} n_cavity={spec.n_cavity} g={spec.g!r} "
                 f"kappa={spec.kappa!r}\n")
        fh.write(f"initial_state = {cfg.pattern}\n\n[run]\n")
        fh.write("\n".join(notes) + "\n\n")
        fh.write(report.to_text())
    files.append("report.txt")

    with open(os.path.join(out_dir, "manifest.txt"), "w") as fh:
        fh.write(f"# polariton_ttm {__version__}  python {platform.python_version()}  "
                 f"numpy {np.__version__}  scipy {scipy.__version__}\n")
        fh.write(f"# files: {' '.join(files + ['manifest.txt'])}\n")
        fh.write(cfg.to_text())
    files.append("manifest.txt")
    return files


def execute(cfg, out_dir=None):
    """Run into a scratch directory and publish the files on success."""
    out_dir = out_dir or cfg.output_dir
    parent = os.path.dirname(os.path.abspath(out_dir))
    os.makedirs(parent, exist_ok=True)
    scratch = tempfile.mkdtemp(prefix=".partial-", dir=parent)
    try:
        files = run_experiment(cfg, scratch)
        os.makedirs(out_dir, exist_ok=True)
        for name in files:
            os.replace(os.path.join(scratch, name), os.path.join(out_dir, name))
        return files
    finally:
        shutil.rmtree(scratch, ignore_errors=True)


# -- entry point -------------------------------------------------------------------

def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def _parser():
    p = argparse.ArgumentParser(prog="polariton-ttm", description="Transfer-tensor kinetics of cavity polaritons.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    s = sub.add_parser("scenario", help="run a named preset")
    s.add_argument("name")
    s.add_argument("--out", help="output directory")
    s.add_argument("--seed", type=int)
    sub.add_parser("list", help="list presets")
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s", stream=sys.stderr)
    try:
        if args.command == "list":
            for name, desc, anchor in catalog():
                print(f"{name:8s} {desc}  [{anchor}]")
            return EXIT_OK
        if args.command == "scenario":
            if args.name not in PRESETS:
                raise ConfigError(f"unknown scenario '{args.name}'")
            over = {}
            if args.seed is not None:
                over["seed"] = args.seed
            if args.out:
                over["output_dir"] = args.out
            cfg = load_config(f"scenario = {args.name}\n", over)
        else:
            cfg = load_config(_read(args.config))
        if args.command == "validate":
            print(f"ok {cfg.scenario}")
            return EXIT_OK
        files = execute(cfg)
        print(f"wrote {', '.join(files)} to {cfg.output_dir}")
        return EXIT_OK
    except (ConfigError, ModelError, DisorderError) as exc:
        msg = str(exc)
        print(msg if msg.startswith("config:") else f"config: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"numerical: {' '.join(str(exc).split())}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
