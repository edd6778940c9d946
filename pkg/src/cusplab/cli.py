"""Command line entry point: ``cusplab {figure1,verify,propagate,series,borel}``.

Exit codes: 0 success, 1 a check failed, 2 configuration or input error,
3 numeric-range error (also used for accuracy warnings under ``--strict``).
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
import json
import math
import os
import platform
import sys
import time
import warnings

import numpy as np
import scipy

from . import __version__, analysis, checks, models
from .config import RunConfig, default_config, load_config
from .errors import (AccuracyWarning, ConfigError, CuspLabError, OptimalTruncationError, RangeError,
                     RayObstructionError, UnsupportedError)
from .propagate import (delta_well_ground_state, delta_well_potential, propagate_line,
                        propagate_radial_coupled, write_csv, write_snapshots)
from .series import AsymptoticSeries, borel_resum, c1_branch, c2_branch, te_reduced_terms
from .series import xi4_asymptotic_series

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_RANGE = 0, 1, 2, 3
_RANGE_ERRORS = (RangeError, OptimalTruncationError, RayObstructionError)


class StrictWarning(Exception):
    """An accuracy warning escalated by --strict."""


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default, allow_nan=True)
        fh.write("\n")


def _worker_count():
    raw = os.environ.get("CUSPLAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"CUSPLAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("CUSPLAB_THREADS must be >= 1")
    return n


def _config(args, scenario):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = default_config(scenario)
    if args.out:
        cfg = replace(cfg, outputs=args.out)
    return cfg


def _prepare_out(path):
    """Create the output directory and prove it is writable before computing."""
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".cusplab-write-test")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise ConfigError(f"output directory {path!r} is not writable: {exc.strerror}") from exc
    return path


def _manifest(command, cfg, started, outputs, extra=None):
    m = {
        "command": command,
        "config": cfg.to_dict() if isinstance(cfg, RunConfig) else cfg,
        "versions": {"cusplab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "wall_time_s": time.perf_counter() - started,
        "outputs": sorted(outputs),
    }
    m.update(extra or {})
    return m


# ---------------------------------------------------------------- commands

def cmd_figure1(args):
    started = time.perf_counter()
    cfg = _config(args, "free_vaporized")
    if cfg.scenario != "free_vaporized":
        raise ConfigError("figure1 needs scenario 'free_vaporized'")
    out = _prepare_out(cfg.outputs)
    data = analysis.figure1_data(cfg.times, cfg.radii, cfg.params)
    path = os.path.join(out, "figure1.csv")
    analysis.write_table_csv(path, data, {"t": "au", "r": "bohr", "rho_exact": "bohr^-3",
                                          "rho_te": "bohr^-3"})
    _dump_json(_manifest("figure1", cfg, started, ["figure1.csv"]), os.path.join(out, "manifest.json"))
    print(f"wrote {path} ({data['t'].size} rows)")
    return EXIT_OK


def cmd_verify(args):
    started = time.perf_counter()
    names = args.check or list(checks.REGISTRY)
    unknown = [n for n in names if n not in checks.REGISTRY]
    if unknown:
        raise ConfigError(f"unknown check(s) {', '.join(unknown)}; registry: "
                          f"{', '.join(checks.REGISTRY)}")
    opts = {}
    if args.c2_scale is not None:
        opts["c2_scale"] = args.c2_scale
    workers = min(_worker_count(), len(names))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda n: checks.run_check(n, opts), names))
    report = {"passed": all(r.passed for r in results), "checks": [r.to_dict() for r in results]}
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default)
    print(text)
    if args.out:
        out = _prepare_out(args.out)
        with open(os.path.join(out, "verify.json"), "w") as fh:
            fh.write(text + "\n")
        _dump_json(_manifest("verify", {"checks": names, "options": opts}, started, ["verify.json"]),
                   os.path.join(out, "manifest.json"))
    return EXIT_OK if report["passed"] else EXIT_CHECK


def _synthetic(cfg, out):
    s = cfg.synthetic
    t = np.arange(0.0, s.t_max + 0.5 * s.dt, s.dt)
    mu = s.amplitude * t ** s.nu * np.exp(-s.eta * t)
    if s.noise:
        rng = np.random.default_rng(cfg.seed)
        mu = mu * (1.0 + s.noise * rng.standard_normal(t.size))
    analysis.write_table_csv(os.path.join(out, "mu.csv"), {"t": t, "mu": mu}, {"t": "au", "mu": "au"})
    spec = analysis.cross_section(t, mu, np.asarray(s.omegas), 0.0, cfg.params)
    with open(os.path.join(out, "spectrum.json"), "w") as fh:
        fh.write(spec.to_json() + "\n")
    coeff = analysis.t_power_to_omega_tail(s.amplitude, s.nu, cfg.params)
    plateau = spec.sigma * spec.omegas ** (s.nu - 1) / coeff
    print("omega, sigma*omega^(nu-1)/tail: " +
          ", ".join(f"{w:g}:{v:.6f}" for w, v in zip(spec.omegas, plateau)))
    return ["mu.csv", "spectrum.json"], {}


def _propagation(cfg, out):
    g, p = cfg.grid, cfg.params
    x = g.points()
    extra = {}
    if cfg.scenario == "delta_well_field":
        psi0, extra["ground_energy"] = delta_well_ground_state(g, replace(p, field=0.0))
        traj = propagate_line(psi0, delta_well_potential(x, g.spacing, p), g)
    else:
        psi0 = {0: models.psi0_hydrogen(x, p)}
        traj = propagate_radial_coupled(psi0, p, g, coulomb=cfg.scenario == "hydrogen_field")
    write_csv(traj, os.path.join(out, "trajectory.csv"))
    write_snapshots(traj, os.path.join(out, "snapshots.bin"))
    drift = float(np.max(np.abs(traj.norm_series - traj.norm_series[0])))
    extra["norm_drift"] = drift
    print(f"norm drift: {drift:.3e}")
    if cfg.scenario == "free_vaporized" and traj.times[-1] > 0:
        u = traj.snapshots[-1][0]
        exact = 4 * math.pi * x * x * np.abs(models.psi_exact_free(x, traj.times[-1], p)) ** 2
        err = math.sqrt(g.spacing * float(np.sum((np.abs(u) ** 2 - exact) ** 2)))
        extra["l2_density_error"] = err
        print(f"L2 density error vs exact at t = {traj.times[-1]:.6g}: {err:.3e}")
    return ["trajectory.csv", "snapshots.bin"], extra


def cmd_propagate(args):
    started = time.perf_counter()
    cfg = _config(args, "free_vaporized")
    out = _prepare_out(cfg.outputs)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AccuracyWarning)
        if cfg.scenario == "synthetic":
            files, extra = _synthetic(cfg, out)
        else:
            files, extra = _propagation(cfg, out)
    msgs = [str(w.message) for w in caught if issubclass(w.category, AccuracyWarning)]
    for msg in msgs:
        print(f"warning: {msg}", file=sys.stderr)
    extra["warnings"] = msgs
    _dump_json(_manifest("propagate", cfg, started, files, extra), os.path.join(out, "manifest.json"))
    if msgs and args.strict:
        raise StrictWarning(msgs[0])
    return EXIT_OK


def _terms_to_json(terms):
    return [{str(ell): {str(k): [c.real, c.imag] for k, c in sorted(poly.items())}
             for ell, poly in sorted(chans.items())} for chans in terms]


def cmd_series(args):
    started = time.perf_counter()
    cfg = _config(args, "hydrogen_field")
    p = cfg.params
    out = _prepare_out(cfg.outputs)
    if args.kind == "te":
        doc = {"schema": "cusplab.reduced_terms/1", "params": cfg.to_dict()["params"],
               "orders": _terms_to_json(te_reduced_terms(p, args.order))}
        name = "te_terms.json"
        with open(os.path.join(out, name), "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        if args.kind == "xi4":
            ser = xi4_asymptotic_series(p, args.terms)
        elif args.kind == "c2":
            ser = c2_branch(1.0, args.terms)
        else:
            ser = c1_branch(1.0)
        name = f"{args.kind}_series.json"
        with open(os.path.join(out, name), "w") as fh:
            fh.write(ser.dumps() + "\n")
    _dump_json(_manifest("series", cfg, started, [name]), os.path.join(out, "manifest.json"))
    print(f"wrote {os.path.join(out, name)}")
    return EXIT_OK


def cmd_borel(args):
    try:
        with open(args.file) as fh:
            ser = AsymptoticSeries.loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {args.file}: {exc.strerror}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{args.file} is not an asymptotic series file: {exc}") from exc
    rows = [(rb, borel_resum(ser, rb, args.ray, args.pade_order)) for rb in args.rbar]
    lines = ["rbar,re,im"] + [f"{rb:.17g},{v.real:.17g},{v.imag:.17g}" for rb, v in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        out = _prepare_out(args.out)
        with open(os.path.join(out, "borel.csv"), "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser():
    ap = argparse.ArgumentParser(prog="cusplab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"cusplab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", metavar="PATH", help="JSON run configuration")
        sp.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
        sp.add_argument("--strict", action="store_true",
                        help="treat accuracy warnings as errors (exit 3)")

    sp = sub.add_parser("figure1", help="exact vs Taylor densities of the nucleus-free evolution")
    common(sp)
    sp.set_defaults(func=cmd_figure1)

    sp = sub.add_parser("verify", help="run registered verification checks")
    common(sp)
    sp.add_argument("--check", action="append", metavar="NAME",
                    help="check to run (repeatable; default: all). Known: " + ", ".join(checks.REGISTRY))
    sp.add_argument("--c2-scale", type=float, default=None,
                    help="multiply c2 by this factor in te_residual_m4 (0: negative control)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("propagate", help="Crank-Nicolson run (or synthetic dipole) from a config")
    common(sp)
    sp.set_defaults(func=cmd_propagate)

    sp = sub.add_parser("series", help="dump reduced Taylor or asymptotic coefficients")
    common(sp)
    sp.add_argument("--kind", choices=("te", "xi4", "c1", "c2"), default="te")
    sp.add_argument("--order", type=int, default=4, help="highest reduced order (te)")
    sp.add_argument("--terms", type=int, default=120, help="number of coefficients (c2, xi4)")
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("borel", help="Borel-Pade resummation of a coefficient file")
    sp.add_argument("file", help="asymptotic series JSON (from 'cusplab series')")
    sp.add_argument("--rbar", type=float, nargs="+", required=True)
    sp.add_argument("--ray", type=float, default=-math.pi / 4, help="Laplace ray angle (rad)")
    sp.add_argument("--pade-order", type=int, default=12)
    sp.add_argument("--out", metavar="DIR")
    sp.set_defaults(func=cmd_borel)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StrictWarning as exc:
        print(f"error (--strict): {exc}", file=sys.stderr)
        return EXIT_RANGE
    except _RANGE_ERRORS as exc:
        print(f"numeric range error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (ConfigError, UnsupportedError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CuspLabError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
