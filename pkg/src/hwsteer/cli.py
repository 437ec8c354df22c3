"""Command-line interface.

Subcommands
-----------
verify        run the certification suite for a phase table
bound         classical (LHS) bound with its maximizing strategy
quantum       quantum-value data for the reference realization
scan          qutrit classical-bound landscape over a parameter grid
solve-phases  numeric search for an admissible phase table

Data (reports, values, CSV, phase tables) goes to stdout or the file named
by ``--out``; diagnostics go to stderr.  Exit status: 0 on success, 1 when
checks fail or no solution exists, 2 for bad arguments.  A config file
(``--config``) supplies defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .classical import brute_force_bound, scan, scan_to_csv, separable_bound
from .config import THREADS_ENV, Config, ConfigError, load_config, parse_resolution
from .phases import PhaseSet, gamma, qutrit_family, solve_phases_numeric
from .selftest import run_verify_suite
from .steering import (behavior_to_text, born_behavior, build_steering_operator,
                       max_eigenvalue, quantum_value, realization_to_text,
                       reference_realization, sos_gap)

DEG = np.pi / 180.0


class CheckFailure(Exception):
    """A command ran but its checks did not pass (exit status 1)."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _warn_composite(d: int):
    if not _is_prime(d):
        print(f"warning: d = {d} is not prime: MUB interpretation unavailable",
              file=sys.stderr)


def _angle(value: float, deg: bool) -> float:
    return value * DEG if deg else value


def _load_cfg(args) -> Config:
    if getattr(args, "config", None):
        return load_config(args.config)
    return Config()


def _parse_seed_row(text: str, d: int, deg: bool) -> np.ndarray:
    try:
        vals = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"bad --seed-row {text!r}: expected {d - 1} angles") from None
    if len(vals) != d - 1:
        raise ConfigError(f"--seed-row needs {d - 1} angles for d = {d}, got {len(vals)}")
    return np.array([_angle(v, deg) for v in vals])


def _run_solver(args, cfg: Config):
    d = args.d if args.d is not None else cfg.d
    if d < 2:
        raise ConfigError(f"d must be >= 2, got {d}")
    _warn_composite(d)
    if args.seed_row is not None:
        seed = _parse_seed_row(args.seed_row, d, args.deg)
    else:
        seed = np.zeros(d - 1)
    rng_seed = args.rng_seed if args.rng_seed is not None else cfg.rng_seed
    kwargs = {}
    if args.restarts is not None:
        kwargs["restarts"] = args.restarts
    return solve_phases_numeric(d, seed, rng_seed=rng_seed,
                                tols=cfg.tolerances, **kwargs)


def _resolve_phases(args, cfg: Config) -> PhaseSet:
    """Pick the phase table a subcommand operates on.

    Priority: an explicit --phases file, then --solve, then the analytic
    qutrit family (the default, family A at the config angles).
    """
    if args.phases:
        try:
            return PhaseSet.from_text(Path(args.phases).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load phase table {args.phases!r}: {exc}") from None
    if args.solve:
        outcome = _run_solver(args, cfg)
        if not outcome.converged:
            raise CheckFailure(
                f"phase search did not converge: residual {outcome.residual:.3e} "
                f"after {outcome.restarts_used} restarts")
        return outcome.phases
    family = args.family or cfg.family or "A"
    phi00 = args.phi00 if args.phi00 is not None else (cfg.phi00 or 0.0)
    phi10 = args.phi10 if args.phi10 is not None else (cfg.phi10 or 0.0)
    return qutrit_family(_angle(phi00, args.deg), _angle(phi10, args.deg), family)


def _write_out(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    cfg = _load_cfg(args)
    phases = _resolve_phases(args, cfg)
    _warn_composite(phases.d)
    report = run_verify_suite(phases, tols=cfg.tolerances)
    print(report.to_text())
    if args.dump:
        ref = reference_realization(gamma(phases))
        Path(args.dump).write_text(realization_to_text(ref))
    if args.dump_behavior:
        if phases.d % 2 == 1:
            ref = reference_realization(gamma(phases))
            Path(args.dump_behavior).write_text(
                behavior_to_text(born_behavior(ref, tols=cfg.tolerances)))
        else:
            print("warning: behavior dump skipped: Alice's observables are not "
                  "d-th roots of unity for even d", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_bound(args) -> int:
    cfg = _load_cfg(args)
    phases = _resolve_phases(args, cfg)
    g = gamma(phases)
    search = brute_force_bound if args.oracle else separable_bound
    value, assignment = search(g, tie_eps=cfg.tolerances.tie)
    print(f"classical_bound {value:.17g}")
    print("argmax_a " + ";".join(str(v) for v in assignment.a))
    print("argmax_b " + ";".join(str(v) for v in assignment.b))
    return 0


def cmd_quantum(args) -> int:
    cfg = _load_cfg(args)
    phases = _resolve_phases(args, cfg)
    _warn_composite(phases.d)
    g = gamma(phases)
    ref = reference_realization(g)
    s = build_steering_operator(g, ref.bob_ops, tols=cfg.tolerances)
    print(f"max_eigenvalue {max_eigenvalue(s, tols=cfg.tolerances):.17g}")
    print(f"sos_gap {sos_gap(s, phases.d, tols=cfg.tolerances):.17g}")
    print(f"state_expectation {quantum_value(s, ref.state, tols=cfg.tolerances):.17g}")
    return 0


def _thread_count(args, cfg: Config) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"bad {THREADS_ENV} value {env!r}") from None
    if cfg.threads is not None:
        return cfg.threads
    return 1


def cmd_scan(args) -> int:
    cfg = _load_cfg(args)
    family = args.family or cfg.family or "A"
    resolution = parse_resolution(args.resolution) if args.resolution else cfg.resolution
    ranges = {}
    for name in ("phi00_start", "phi00_stop", "phi10_start", "phi10_stop"):
        val = getattr(args, name)
        if val is None:
            val = getattr(cfg, name)
        else:
            val = _angle(val, args.deg)
        ranges[name] = val
    threads = _thread_count(args, cfg)
    if threads < 1:
        raise ConfigError(f"thread count must be >= 1, got {threads}")
    phi00_range = (ranges["phi00_start"], ranges["phi00_stop"])
    phi10_range = (ranges["phi10_start"], ranges["phi10_stop"])
    if threads == 1:
        result = scan(phi00_range, phi10_range, resolution, family,
                      tie_eps=cfg.tolerances.tie)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            result = scan(phi00_range, phi10_range, resolution, family,
                          tie_eps=cfg.tolerances.tie, map_fn=pool.map)
    _write_out(scan_to_csv(result), args.out or cfg.out)
    print(f"scan {resolution[0]}x{resolution[1]} family {result.family.value}: "
          f"min {result.min_value:.15g}, max {result.max_value:.15g}",
          file=sys.stderr)
    return 0


def cmd_solve_phases(args) -> int:
    cfg = _load_cfg(args)
    outcome = _run_solver(args, cfg)
    if not outcome.converged:
        print(f"no solution found: best residual {outcome.residual:.3e} "
              f"after {outcome.restarts_used} restarts", file=sys.stderr)
        print("no-solution")
        return 1
    print(f"residual {outcome.residual:.3e} after {outcome.restarts_used} restarts",
          file=sys.stderr)
    _write_out(outcome.phases.to_text(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hwsteer",
        description="Steering inequalities for d-outcome measurements: "
                    "construction, quantum and classical bounds, landscape scans.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key = value defaults file")
    common.add_argument("--deg", action="store_true",
                        help="interpret command-line angles in degrees")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--d", type=int, help="local dimension")
    solver.add_argument("--seed-row", metavar="ANGLES",
                        help="comma-separated first d-1 angles of the pinned column")
    solver.add_argument("--rng-seed", type=int, help="restart RNG seed")
    solver.add_argument("--restarts", type=int, help="number of solver restarts")

    source = argparse.ArgumentParser(add_help=False, parents=[solver])
    source.add_argument("--family", choices=["A", "B", "a", "b"],
                        help="analytic qutrit solution family")
    source.add_argument("--phi00", type=float, help="free angle phi_{0,0}")
    source.add_argument("--phi10", type=float, help="free angle phi_{1,0}")
    source.add_argument("--phases", metavar="FILE", help="phase table file")
    source.add_argument("--solve", action="store_true",
                        help="search for a phase table numerically")

    p = sub.add_parser("verify", parents=[common, source],
                       help="run the certification suite for a phase table")
    p.add_argument("--dump", metavar="FILE", help="write the reference realization")
    p.add_argument("--dump-behavior", metavar="FILE",
                   help="write the reference Born-rule behavior")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bound", parents=[common, source],
                       help="classical (LHS) bound and maximizing strategy")
    p.add_argument("--oracle", action="store_true",
                   help="use full enumeration instead of the factorized search")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("quantum", parents=[common, source],
                       help="largest eigenvalue, SOS gap, and state expectation")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("scan", parents=[common],
                       help="classical bound over a grid of qutrit family angles")
    p.add_argument("--family", choices=["A", "B", "a", "b"])
    p.add_argument("--resolution", metavar="NxM", help="grid points per axis")
    p.add_argument("--phi00-start", type=float)
    p.add_argument("--phi00-stop", type=float)
    p.add_argument("--phi10-start", type=float)
    p.add_argument("--phi10-stop", type=float)
    p.add_argument("--threads", type=int,
                   help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--out", metavar="FILE", help="CSV destination (default stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("solve-phases", parents=[common, solver],
                       help="numeric search for an admissible phase table")
    p.add_argument("--out", metavar="FILE", help="phase table destination")
    p.set_defaults(func=cmd_solve_phases)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
