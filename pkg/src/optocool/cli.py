"""``optocool`` command line: analyze, optimize, budget, sweep, msi, compare, selftest.

Exit status: 0 success, 1 selftest failure, 2 configuration error,
3 physics-domain error, 4 quadrature non-convergence.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, config, design, msi, records, selftest
from .cooling import cooling_limit, n_analytic, n_quadrature
from .errors import ConfigError, PhysicsDomainError, QuadratureError
from .protocols import compare
from .spectra import SpectrumKind, s_ff

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_PHYSICS, EXIT_QUADRATURE = 0, 1, 2, 3, 4
COMMANDS = ("analyze", "optimize", "budget", "sweep", "msi", "compare", "selftest")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optocool", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"optocool {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--out", help="write the record here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--strict-loss", action="store_true",
                        help="use gamma + gamma_int as the linewidth of every cavity Lorentzian")
    parser.add_argument("--exact-min", action="store_true",
                        help="use the exact drive minimiser instead of U0 = n_diss/2")
    return parser


def analyze_system(cfg: config.RunConfig, strict_loss: bool = False, exact_min: bool = False) -> dict:
    p = cfg.system
    kind = cfg.spectrum_kind()
    out = {
        "kind": kind.value,
        "analytic": n_analytic(p, kind, strict_loss).as_dict(),
        "quadrature": n_quadrature(p, kind, cfg.quadrature, strict_loss).as_dict(),
        "validity": design.validity(p).as_dict(),
    }
    if cfg.deviations is not None:
        out["cooling_limit"] = cooling_limit(p, cfg.deviations, exact_min).as_dict()
    return out


def _optimize(cfg, args) -> dict:
    point = design.optimize(cfg.system, ratio_fixed=cfg.ratio_fixed, exact_minimization=args.exact_min)
    at = design.apply(cfg.system, point)
    return {
        "operating_point": point.as_dict(),
        "budget": design.tolerance_budget(at, cfg.target_excess).as_dict(),
        "validity": design.validity(at).as_dict(),
    }


def _msi(cfg, args) -> dict:
    if cfg.msi is None:
        raise ConfigError("msi needs an interferometer description (msi.* keys)")
    setup = cfg.msi
    geom, drive = setup.geometry, setup.drive
    k = drive.omega_L / msi.C_LIGHT
    mirror = msi.effective_mirror(geom, k)
    cav = msi.cavity_from_msi(geom, k)
    p = cfg.system
    w = np.linspace(-cav.gamma, cav.gamma, setup.samples) if setup.samples > 1 else np.zeros(1)
    exact = msi.s_ff_exact_msi(w, geom, drive)
    reduced = s_ff(w, p, SpectrumKind.MULTIMODE)
    samples = [
        {"omega": float(wi), "exact": float(e), "reduced": float(r),
         "rel_diff": float(abs(e - r) / abs(r)) if r != 0 else math.inf}
        for wi, e, r in zip(w, exact, reduced)
    ]
    return {
        "geometry": {"bs_T": geom.bs_T, "bs_R": geom.bs_R, "mem_t": geom.mem_t, "mem_r": geom.mem_r,
                     "L_a": geom.L_a, "l": geom.l, "l_s": geom.l_s, "x": geom.x, "length": geom.length},
        "mirror": {"rho": complex(mirror.rho), "tau": float(mirror.tau), "mu": float(mirror.mu)},
        "cavity": {"gamma": cav.gamma, "omega_c": cav.omega_c, "fsr": cav.fsr, "mode_index": cav.mode_index,
                   "detuning": p.cavity.detuning},
        "coupling": {"g_omega": p.coupling.g_omega, "g_gamma": p.coupling.g_gamma,
                     "ratio": p.coupling_ratio if p.coupling.g_gamma != 0 else math.nan},
        "expansion": {"tau_squared": float(mirror.tau) ** 2, "gamma_L_over_c": cav.gamma * geom.length / msi.C_LIGHT},
        "omega_L": drive.omega_L,
        "samples": samples,
    }


def _compare(cfg, args) -> dict:
    if cfg.feedback is None:
        raise ConfigError("compare needs feedback.eta_det (and optionally feedback.n_imp)")
    return compare(cfg.system, cfg.feedback).as_dict()


def _threads() -> int:
    raw = os.environ.get("OPTOCOOL_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"OPTOCOOL_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("OPTOCOOL_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _sweep_point(values, key, value, args):
    try:
        cfg = config.build(config.with_value(values, key, value), args.exact_min)
        return {key: value, **analyze_system(cfg, args.strict_loss, args.exact_min)}, EXIT_OK
    except PhysicsDomainError as exc:
        return {key: value, "error": {"type": type(exc).__name__, "message": str(exc)}}, EXIT_PHYSICS
    except QuadratureError as exc:
        return {key: value, "error": {"type": type(exc).__name__, "message": str(exc)}}, EXIT_QUADRATURE


def run_sweep(cfg: config.RunConfig, args):
    """All grid points in grid order; evaluation may be concurrent."""
    if cfg.sweep is None:
        raise ConfigError("sweep needs sweep.path, sweep.start, sweep.stop and sweep.count")
    spec = cfg.sweep
    grid = [float(v) for v in spec.grid()]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda v: _sweep_point(cfg.values, spec.path, v, args), grid))
    points = [r for r, _ in results]
    codes = [c for _, c in results if c != EXIT_OK]
    return points, (max(codes) if codes else EXIT_OK)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"optocool: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsDomainError as exc:
        print(f"optocool: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except QuadratureError as exc:
        print(f"optocool: quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE


def _dispatch(args) -> int:
    if args.command == "selftest":
        result = selftest.run()
        record = records.make_record("selftest", {}, result)
        if args.format == "csv":
            rows = [{"id": c["id"], "name": c["name"], "passed": c["passed"]} for c in result["criteria"]]
            _emit(records.to_csv(rows), args.out)
        else:
            _emit(records.dumps(record), args.out)
        return EXIT_OK if result["all_passed"] else EXIT_FAILED

    if not args.config:
        raise ConfigError(f"{args.command} requires --config")
    values = config.load(args.config)
    cfg = config.build(values, args.exact_min)
    inputs = dict(sorted(values.items()))
    flags = {"strict_loss": args.strict_loss, "exact_min": args.exact_min}

    if args.command == "sweep":
        points, status = run_sweep(cfg, args)
        if args.format == "csv":
            _emit(records.to_csv(points, first=cfg.sweep.path), args.out)
        else:
            _emit(records.dumps(records.make_record("sweep", {**inputs, **flags}, points)), args.out)
        return status

    handlers = {
        "analyze": lambda: analyze_system(cfg, args.strict_loss, args.exact_min),
        "optimize": lambda: _optimize(cfg, args),
        "budget": lambda: design.tolerance_budget(cfg.system, cfg.target_excess).as_dict(),
        "msi": lambda: _msi(cfg, args),
        "compare": lambda: _compare(cfg, args),
    }
    result = handlers[args.command]()
    if args.format == "csv":
        _emit(records.to_csv([result]), args.out)
    else:
        _emit(records.dumps(records.make_record(args.command, {**inputs, **flags}, result)), args.out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
