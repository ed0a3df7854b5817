"""Command-line surface: ensemble generation, measurement, recovery,
verification suites, mask demos, and bench sweeps.

Exit codes: 0 success, 1 validation error, 2 numerical failure
(non-convergence, all-degenerate recovery, failed verification).
Errors go to stderr with an "error:" prefix.  Every run prints the
resolved seed so invocations are replayable.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench as bench_mod
from . import verify as verify_mod
from .measurements import (
    DETERMINISTIC_KINDS,
    KIND_RANDOM,
    add_noise,
    build_ensemble,
    build_masks,
    build_random_ensemble,
    mask_measure,
    measure,
    read_ensemble,
    read_intensity,
    write_ensemble,
    write_intensity,
)
from .numerics import (
    EigenConvergenceError,
    Rng,
    dft,
    format_complex_vector,
    read_complex_vector,
    write_complex_vector,
)
from .recovery_algebraic import RecoveryError, aligned_error, recover
from .recovery_sdp import SdpConfig, solve_phaselift

FORMATS_EPILOG = """\
file formats:
  complex vector   one entry per line as "re im"; '#' lines are comments
  ensemble         header "kind N L", then L vectors in the complex vector
                   format separated by blank lines
  intensity        one real value per line
  bench CSV        header snr_db,mse_mean,mse_std,bound_high,bound_low,trials,degenerate
"""


class _CliValidation(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliValidation(message)


def _print_seed(seed: int) -> None:
    print(f"seed: {seed}")


def _cmd_gen_ensemble(args) -> int:
    _print_seed(args.seed)
    if args.kind in DETERMINISTIC_KINDS:
        if args.l is not None:
            raise _CliValidation("--l applies to --kind random only")
        ensemble = build_ensemble(args.kind, args.n)
    else:
        l = args.l if args.l is not None else 4 * args.n
        ensemble = build_random_ensemble(Rng(args.seed, 1), args.n, l)
    write_ensemble(args.out, ensemble)
    print(f"wrote {ensemble.kind} ensemble n={ensemble.n} l={ensemble.L} to {args.out}")
    return 0


def _cmd_measure(args) -> int:
    _print_seed(args.seed)
    ensemble = read_ensemble(args.ensemble)
    x = read_complex_vector(args.signal)
    b = measure(ensemble, x)
    if args.noise_var > 0:
        b = add_noise(b, args.noise_var, Rng(args.seed, 2))
    write_intensity(args.out, b)
    print(f"wrote {len(b)} intensities to {args.out}")
    return 0


def _cmd_recover(args) -> int:
    _print_seed(args.seed)
    b = read_intensity(args.measurements)
    if args.method == "algebraic":
        if args.kind not in DETERMINISTIC_KINDS:
            raise _CliValidation("algebraic recovery needs --kind phi or psi")
        report = recover(args.kind, b, args.n)
        x_hat = report.x_hat
        print(
            f"recovered n={args.n} degenerate_blocks={report.degenerate_count} "
            f"chain_breaks={len(report.chain_breaks)}"
        )
        failed = False
    else:
        if args.ensemble is not None:
            ensemble = read_ensemble(args.ensemble)
        elif args.kind in DETERMINISTIC_KINDS:
            ensemble = build_ensemble(args.kind, args.n)
        else:
            raise _CliValidation("sdp recovery with --kind random needs --ensemble")
        epsilon = args.epsilon
        if epsilon is None:
            epsilon = ensemble.L * args.noise_var if args.noise_var > 0 else 0.0
        cfg = SdpConfig(max_iter=args.max_iter, tol=args.tol, epsilon=epsilon)
        result = solve_phaselift(ensemble, b, cfg)
        x_hat = result.x_hat
        print(
            f"sdp iterations={result.iterations} converged={result.converged} "
            f"residual={result.residual:.3e} rank1_gap={result.rank1_gap:.3e}"
        )
        failed = not result.converged
    write_complex_vector(args.out, x_hat)
    if args.truth is not None:
        x = read_complex_vector(args.truth)
        err = aligned_error(x, x_hat)
        rel = err / max(float(np.sum(np.abs(x) ** 2)), 1e-300)
        print(f"aligned_error: {err:.9e} (relative {rel:.9e})")
    if failed:
        print("error: sdp did not converge within --max-iter", file=sys.stderr)
        return 2
    return 0


def _cmd_bench(args) -> int:
    _print_seed(args.seed)
    cfg = bench_mod.BenchConfig(
        kind=args.kind,
        method=args.method,
        n=args.n,
        snr_grid_db=bench_mod.parse_snr_grid(args.snr),
        trials=args.trials,
        sigma_x2=args.sigma_x2,
        fix_first=args.fix_first,
        mu=args.mu,
        gamma=args.gamma,
        seed=args.seed,
        random_l=args.l,
        sdp_max_iter=args.max_iter,
        sdp_tol=args.tol,
        epsilon_override=args.epsilon,
    )
    result = bench_mod.run_bench(cfg, jobs=args.jobs)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(result.to_csv())
    for line in bench_mod.summary_lines(result):
        print(line)
    print(f"wrote CSV to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    _print_seed(args.seed)
    records = verify_mod.run_suite(
        args.suite, kind=args.kind, n=args.n, trials=args.trials, seed=args.seed
    )
    for rec in records:
        print(rec.line())
    return 0 if all(r.passed for r in records) else 2


def _cmd_masks(args) -> int:
    _print_seed(args.seed)
    masks = build_masks(args.kind, args.n)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(f"# masks kind={masks.kind} n={masks.n}\n")
        for m in range(4):
            fh.write(format_complex_vector(masks.masks[m]))
            if m < 3:
                fh.write("\n")
    print(f"wrote 4 masks to {args.out}")
    if args.signal is not None:
        x = read_complex_vector(args.signal)
        piped = mask_measure(x, masks)
        if masks.kind == "phi":
            reference = measure(build_ensemble("phi", masks.n), dft(x))
        else:
            aug = np.concatenate([[x[0]], dft(x)])
            reference = measure(build_ensemble("psi", masks.n + 1), aug)
        dev = float(np.max(np.abs(piped.values - reference.values)))
        print(f"pipeline-vs-abstract max deviation: {dev:.3e}")
        if args.measure_out is not None:
            write_intensity(args.measure_out, piped)
            print(f"wrote {len(piped)} mask-pipeline intensities to {args.measure_out}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="phasekit",
        description="Phase retrieval from deterministic 4N-4 intensity measurements.",
        epilog=FORMATS_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p):
        p.add_argument("--seed", type=int, default=0, help="RNG seed (printed on every run)")

    p = sub.add_parser("gen-ensemble", help="write a measurement ensemble file",
                       epilog=FORMATS_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--kind", required=True, choices=["phi", "psi", "random"])
    p.add_argument("--n", required=True, type=int, help="signal dimension N")
    p.add_argument("--l", type=int, help="ensemble size (random kind only, default 4N)")
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_gen_ensemble)

    p = sub.add_parser("measure", help="apply |<x, v_l>|^2 and optional noise",
                       epilog=FORMATS_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--ensemble", required=True, help="ensemble file")
    p.add_argument("--signal", required=True, help="complex vector file")
    p.add_argument("--noise-var", type=float, default=0.0, help="additive intensity noise variance")
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("recover", help="recover a signal from intensities",
                       epilog=FORMATS_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--method", required=True, choices=["algebraic", "sdp"])
    p.add_argument("--kind", choices=["phi", "psi", "random"], default="phi")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--measurements", required=True, help="intensity file")
    p.add_argument("--ensemble", help="ensemble file (sdp with random vectors)")
    p.add_argument("--truth", help="complex vector file; prints the aligned error")
    p.add_argument("--noise-var", type=float, default=0.0,
                   help="noise variance; sdp derives epsilon = L * var from it")
    p.add_argument("--epsilon", type=float, help="explicit sdp noise-ball radius")
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("bench", help="Monte Carlo SNR sweep, CSV output",
                       epilog=FORMATS_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--kind", required=True, choices=["phi", "psi", "random"])
    p.add_argument("--method", required=True, choices=["algebraic", "sdp"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--snr", required=True, help='dB grid: "10,20,30" or start:step:stop')
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--sigma-x2", type=float, default=1.0, help="signal entry variance")
    p.add_argument("--fix-first", action="store_true", help="pin x[1] = 1 (hub experiments)")
    p.add_argument("--mu", type=float, help="bound parameter (default sigma_x)")
    p.add_argument("--gamma", type=float, default=0.5, help="bound parameter")
    p.add_argument("--l", type=int, help="ensemble size for --kind random (default 4N)")
    p.add_argument("--epsilon", type=float, help="override sdp radius (default L * sigma_nu^2)")
    p.add_argument("--max-iter", type=int, default=5000, help="sdp iteration cap")
    p.add_argument("--tol", type=float, default=1e-7, help="sdp relative-change tolerance")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (same CSV for any value)")
    p.add_argument("--out", required=True, help="CSV path")
    add_common(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("verify", help="run a structural verification suite",
                       epilog=FORMATS_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--suite", required=True, choices=list(verify_mod.SUITES))
    p.add_argument("--kind", choices=["phi", "psi"], default="phi")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--trials", type=int, help="draw count (suite-specific default)")
    add_common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("masks", help="emit the 4 modulation masks; optional pipeline demo",
                       epilog=FORMATS_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--kind", required=True, choices=["phi", "psi"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True, help="mask file")
    p.add_argument("--signal", help="complex vector file to push through the pipeline")
    p.add_argument("--measure-out", help="intensity file for the pipeline measurements")
    add_common(p)
    p.set_defaults(func=_cmd_masks)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliValidation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _CliValidation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RecoveryError, EigenConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
