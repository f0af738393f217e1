"""Command-line experiment runner.

Exit codes: 0 success, 1 a requested tolerance check failed, 2 bad
configuration or unwritable output.
"""

import argparse
import datetime
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import oracles
from .equalizer import EqualizerKind
from .errors import InsufficientData, ScfdeError
from .infotheory import analytic_diversity, rate_intervals
from .montecarlo import MIN_SUCCESSES, SweepConfig, Target, default_window, fit_slope, run_sweep
from .records import fmt_float, write_curve_csv, write_json

log = logging.getLogger("scfde")

WORKERS_ENV = "SCFDE_WORKERS"

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


# -- argument parsing helpers ---------------------------------------------------

def parse_grid(text):
    """``start:stop:step`` in dB, stop inclusive; a bare number is one point."""
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR grid {text!r}") from None
    if len(values) == 1:
        return (values[0],)
    if len(values) != 3 or values[2] <= 0 or values[1] < values[0]:
        raise argparse.ArgumentTypeError("SNR grid must be start:stop:step with step > 0")
    start, stop, step = values
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(np.round(start + i * step, 10)) for i in range(n))


def parse_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_ints(text):
    vals = parse_floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def parse_count(text):
    """Accept ``1e6`` style trial counts."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad count {text!r}") from None
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError("count must be a positive integer")
    return int(v)


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# -- output -----------------------------------------------------------------------

def _meta(args, started, **extra):
    meta = dict(extra)
    if not args.deterministic:
        meta["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        meta["elapsed_s"] = round(time.monotonic() - started, 3)
    return meta


def _out_dir(args):
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")
    return out


def _curve_name(cfg):
    return (f"{cfg.target.value}_{cfg.kind.value}_nu{cfg.memory}_L{cfg.block_length}"
            f"_R{cfg.rate:g}")


def _fit(points, args):
    window = default_window(points, args.min_successes, args.window_points)
    try:
        return fit_slope(points, window)
    except InsufficientData:
        return None


def _run_curve(cfg, args, out, started):
    sweep = run_sweep(cfg, workers=args.workers)
    fit = _fit(sweep.points, args)
    report = analytic_diversity(cfg.rate, cfg.memory, cfg.block_length, cfg.kind)
    name = _curve_name(cfg)
    payload = {
        "config": cfg,
        "points": sweep.points,
        "slope_fit": fit,
        "analytic_d": report.d,
        "regime": report.regime,
        "meta": _meta(args, started, redraws=sweep.redraws),
    }
    if args.format == "csv":
        write_curve_csv(out / f"{name}.csv", sweep.points)
    write_json(out / f"{name}.json", payload)
    slope = None if fit is None else fit.slope
    log.info("%s: slope=%s analytic d=%d", name, slope, report.d)
    return {
        "name": name, "nu": cfg.memory, "block_length": cfg.block_length, "rate": cfg.rate,
        "kind": cfg.kind, "target": cfg.target, "slope": slope, "analytic_d": report.d,
        "regime": report.regime, "redraws": sweep.redraws,
    }


def _check(rows, args):
    if args.check_tol is None:
        return EXIT_OK
    bad = [r for r in rows if r["slope"] is None or abs(r["slope"] - r["analytic_d"]) > args.check_tol]
    for r in bad:
        print(f"FAIL {r['name']}: slope {r['slope']} vs analytic {r['analytic_d']}", file=sys.stderr)
    return EXIT_TOLERANCE if bad else EXIT_OK


def _print_rows(rows):
    print(f"{'curve':<40} {'slope':>8} {'d':>3}")
    for r in rows:
        s = "n/a" if r["slope"] is None else f"{r['slope']:.3f}"
        print(f"{r['name']:<40} {s:>8} {r['analytic_d']:>3}")


def _sweep_family(args, kind, target, nus, blocks, rates):
    started = time.monotonic()
    out = _out_dir(args)
    configs = [SweepConfig(nu, L, rate, kind, args.snr, args.trials, args.seed, target)
               for nu in nus for L in blocks for rate in rates]
    rows = [_run_curve(cfg, args, out, started) for cfg in configs]
    summary = {
        "config": {"command": args.command, "snr_grid_db": list(args.snr), "trials": args.trials,
                   "seed": args.seed, "kind": kind, "target": target,
                   "window_points": args.window_points, "min_successes": args.min_successes},
        "curves": rows,
        "meta": _meta(args, started),
    }
    write_json(out / f"{args.command}_summary.json", summary)
    _print_rows(rows)
    return rows


# -- subcommands --------------------------------------------------------------------

def cmd_outage(args):
    rows = _sweep_family(args, EqualizerKind(args.kind), Target.OUTAGE, args.nu, [args.block], args.rates)
    return _check(rows, args)


def cmd_ser(args):
    rows = _sweep_family(args, EqualizerKind(args.kind), Target.SYMBOL_ERROR, args.nu, [args.block],
                         args.rates)
    return _check(rows, args)


def cmd_zf(args):
    rows = _sweep_family(args, EqualizerKind.ZF, Target(args.target), args.nu, [args.block], args.rates)
    return _check(rows, args)


def cmd_blocklength(args):
    rows = _sweep_family(args, EqualizerKind(args.kind), Target.OUTAGE, [args.nu[0]], args.blocks,
                         [args.rates[0]])
    out = Path(args.out)
    with open(out / "blocklength_slopes.csv", "w", encoding="utf-8") as fh:
        fh.write("block_length,slope,analytic_d\n")
        for r in rows:
            s = "" if r["slope"] is None else fmt_float(r["slope"])
            fh.write(f"{r['block_length']},{s},{r['analytic_d']}\n")
    return _check(rows, args)


def cmd_table(args):
    lines = ["nu,block_length,rate,d,regime"]
    print(f"{'nu':>3} {'L':>4} {'R':>6} {'d':>3}  regime")
    for nu in args.nu:
        for L in args.blocks:
            if L < nu + 1:
                continue
            for R in args.rates:
                rep = analytic_diversity(R, nu, L)
                lines.append(f"{nu},{L},{fmt_float(R)},{rep.d},{rep.regime.value}")
                print(f"{nu:>3} {L:>4} {R:>6g} {rep.d:>3}  {rep.regime.value}")
            parts = ", ".join(f"d={d}: ({lo:.4g}, {hi:.4g}" + (")" if math.isinf(hi) else "]")
                              for d, (lo, hi) in rate_intervals(nu, L))
            print(f"    intervals nu={nu} L={L}: {parts}")
    if args.out:
        out = _out_dir(args)
        (out / "diversity_table.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        interval_rows = ["nu,block_length,d,lo,hi"]
        for nu in args.nu:
            for L in args.blocks:
                if L < nu + 1:
                    continue
                for d, (lo, hi) in rate_intervals(nu, L):
                    interval_rows.append(f"{nu},{L},{d},{fmt_float(lo)},{fmt_float(hi)}")
        (out / "rate_intervals.csv").write_text("\n".join(interval_rows) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_oracle(args):
    started = time.monotonic()
    check = args.check
    if check == "lemma1":
        res = oracles.lemma1_tail_probability(args.n, args.m, args.snr, args.trials, args.seed,
                                              workers=args.workers, max_points=args.window_points)
        expected = math.floor(args.m) + 1
        slope = None if res.fit is None else res.fit.slope
        ok = slope is not None and abs(slope - expected) <= args.tol
        result = {"points": res.points, "slope_fit": res.fit, "expected_slope": expected}
        print(f"lemma1 n={args.n} m={args.m}: slope={slope} expected={expected} -> {'PASS' if ok else 'FAIL'}")
    elif check == "lemma2":
        res = oracles.lemma2_slope_pair(args.nu, args.L, args.L2, args.m, args.snr, args.trials,
                                        args.seed, workers=args.workers, max_points=args.window_points,
                                        min_successes=args.min_successes)
        diff = res.difference if res.fit is not None and res.fit_other is not None else None
        ok = diff is not None and diff <= args.tol
        result = {"points": res.points, "points_other": res.points_other,
                  "slope_fit": res.fit, "slope_fit_other": res.fit_other, "difference": diff}
        print(f"lemma2 nu={args.nu} L={args.L} L'={args.L2}: difference={diff} -> {'PASS' if ok else 'FAIL'}")
    elif check == "interp":
        rng = np.random.default_rng(args.seed)
        worst = 0.0
        for _ in range(args.configs):
            nu = int(rng.integers(0, 5))
            L = int(rng.integers(nu + 1, 17))
            T = int(rng.integers(1, 5))
            taps = (rng.standard_normal(nu + 1) + 1j * rng.standard_normal(nu + 1)) / np.sqrt(2)
            worst = max(worst, oracles.zero_pad_subsample_check(taps, L, T)[1])
        ok = worst <= args.tol
        result = {"configs": args.configs, "max_error": worst}
        print(f"interp {args.configs} configs: max error {worst:.3e} -> {'PASS' if ok else 'FAIL'}")
    else:
        corr = oracles.remark1_independence_check(args.nu, args.trials, args.seed)
        ok = corr < args.tol
        result = {"max_abs_corr": corr}
        print(f"remark1 nu={args.nu}: max |corr| {corr:.4g} -> {'PASS' if ok else 'FAIL'}")
    if args.out:
        out = _out_dir(args)
        write_json(out / f"oracle_{check}.json",
                   {"check": check, "passed": ok, "result": result, "meta": _meta(args, started)})
    return EXIT_OK if ok else EXIT_TOLERANCE


# -- parser -------------------------------------------------------------------------

def _common(p, snr="15:35:5", trials="1e6"):
    p.add_argument("--snr", type=parse_grid, default=parse_grid(snr), help="dB grid start:stop:step")
    p.add_argument("--trials", type=parse_count, default=parse_count(trials))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=default_workers(),
                   help=f"worker processes (default ${WORKERS_ENV} or 1)")
    p.add_argument("--window-points", type=int, default=3,
                   help="fit over at most this many top usable SNR points")
    p.add_argument("--min-successes", type=int, default=None,
                   help="successes a point needs to enter the fit window (default 30, lemma2 100)")
    p.add_argument("--deterministic", action="store_true", help="omit timestamps from outputs")


def _sweep_args(p, rates_type=parse_floats, kind=True):
    p.add_argument("--nu", type=parse_ints, required=True, help="channel memory, comma list")
    p.add_argument("--block", type=int, default=10)
    p.add_argument("--rates", type=rates_type, required=True)
    if kind:
        p.add_argument("--kind", choices=[k.value for k in EqualizerKind], default="mmse")
    p.add_argument("--out", default="results")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--check-tol", type=float, default=None,
                   help="exit 1 unless every fitted slope is this close to the analytic order")
    _common(p)


def build_parser():
    parser = argparse.ArgumentParser(prog="scfde", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("outage", help="outage probability curves")
    _sweep_args(p)
    p.set_defaults(func=cmd_outage)

    p = sub.add_parser("ser", help="symbol error rate curves with PSK")
    _sweep_args(p, rates_type=parse_ints)
    p.set_defaults(func=cmd_ser)

    p = sub.add_parser("zf", help="zero-forcing curves")
    _sweep_args(p, kind=False)
    p.add_argument("--target", choices=[t.value for t in Target], default="outage")
    p.set_defaults(func=cmd_zf)

    p = sub.add_parser("blocklength", help="outage slope against block length")
    p.add_argument("--nu", type=parse_ints, required=True)
    p.add_argument("--rates", type=parse_floats, required=True, help="a single rate")
    p.add_argument("--blocks", type=parse_ints, required=True)
    p.add_argument("--kind", choices=[k.value for k in EqualizerKind], default="mmse")
    p.add_argument("--out", default="results")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--check-tol", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_blocklength)

    p = sub.add_parser("table", help="analytic diversity table and rate intervals")
    p.add_argument("--nu", type=parse_ints, default=[1, 2, 3])
    p.add_argument("--blocks", type=parse_ints, default=[4, 10, 20])
    p.add_argument("--rates", type=parse_floats, default=[1, 2, 3, 4])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("oracle", help="numerical checks of the outage lemmas")
    p.add_argument("check", choices=["lemma1", "lemma2", "interp", "remark1"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=float, default=1.5)
    p.add_argument("--nu", type=int, default=2)
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--L2", type=int, default=12)
    p.add_argument("--configs", type=int, default=100)
    p.add_argument("--tol", type=float, default=None,
                   help="pass threshold (defaults: slope 0.3, interp 1e-10, corr 0.01)")
    p.add_argument("--out", default=None)
    _common(p, snr="0:25:2.5", trials="1e6")
    p.set_defaults(func=cmd_oracle)
    return parser


# a slope difference needs tighter per-point counts than a single slope
LEMMA2_MIN_SUCCESSES = 100
_DEFAULT_TOL = {"lemma1": 0.3, "lemma2": 0.3, "interp": 1e-10, "remark1": 0.01}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "oracle" and args.tol is None:
        args.tol = _DEFAULT_TOL[args.check]
    if getattr(args, "min_successes", 0) is None:
        lemma2 = args.command == "oracle" and args.check == "lemma2"
        args.min_successes = LEMMA2_MIN_SUCCESSES if lemma2 else MIN_SUCCESSES
    try:
        return args.func(args)
    except (ScfdeError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
