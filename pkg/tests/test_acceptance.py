"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL`` line that is printed in the
terminal summary, then asserts. Nothing here is marked xfail.
"""
import math
import time

import numpy as np
import pytest
from conftest import dense_circulant, dense_mmse, dft_matrix, random_taps
from scipy import stats

from scfde import streams
from scfde.equalizer import (EqualizerKind, decision_sinr, equalize, fde_coefficients,
                             sinr_from_gains)
from scfde.infotheory import (analytic_diversity, mutual_info, outage_from_gains,
                              outage_indicator, rate_shift)
from scfde.montecarlo import SweepConfig, Target, default_window, fit_slope, run_sweep
from scfde.oracles import (lemma1_tail_probability, lemma2_slope_pair,
                           remark1_independence_check, zero_pad_subsample_check)
from scfde.spectrum import (ChannelTaps, circulant_matrix, cp_transmit, exponential_orders,
                            frequency_response)

MMSE, ZF = EqualizerKind.MMSE, EqualizerKind.ZF
SEED = 2025
RESULTS = {}

pytestmark = pytest.mark.slow


def record(n, checks, started):
    """Store the summary line for criterion ``n`` and fail on any bad check."""
    ok = all(passed for _, passed in checks)
    detail = "; ".join(f"{name} {'ok' if passed else 'FAILED'}" for name, passed in checks)
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({time.monotonic() - started:.1f}s) {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def slope_of(cfg, max_points=3):
    sweep = run_sweep(cfg)
    window = default_window(sweep.points, max_points=max_points)
    if len(window) < 2:
        return None
    return fit_slope(sweep.points, window).slope


def within(value, target, tol):
    return value is not None and abs(value - target) <= tol


def test_criterion_1_exact_algebra():
    started = time.monotonic()
    rng = np.random.default_rng(SEED)
    worst = dict(diag=0.0, cp=0.0, mmse=0.0, subsample=0.0)
    for _ in range(120):
        nu = int(rng.integers(0, 5))
        L = int(rng.integers(nu + 1, 17))
        taps = random_taps(rng, nu)
        fr = frequency_response(ChannelTaps(taps), L)
        F = dft_matrix(L)
        H = circulant_matrix(ChannelTaps(taps), L)
        recon = np.linalg.inv(F) @ np.diag(fr.lam) @ F
        worst["diag"] = max(worst["diag"], np.max(np.abs(recon - dense_circulant(taps, L))),
                            np.max(np.abs(H - dense_circulant(taps, L))))

        x = random_taps(rng, L - 1)
        snr = 10 ** rng.uniform(-1, 3)
        y = cp_transmit(ChannelTaps(taps), x, snr)
        worst["cp"] = max(worst["cp"], np.max(np.abs(y - math.sqrt(snr) * H @ x)) / math.sqrt(snr))

        filt = np.linalg.inv(F) @ np.diag(fde_coefficients(fr, snr, MMSE)) @ F
        ref = dense_mmse(dense_circulant(taps, L), snr)
        worst["mmse"] = max(worst["mmse"], np.max(np.abs(filt - ref)))
        z = random_taps(rng, L - 1)
        worst["mmse"] = max(worst["mmse"],
                            np.max(np.abs(equalize(z, fde_coefficients(fr, snr, MMSE)) - ref @ z)))

        T = int(rng.integers(1, 5))
        worst["subsample"] = max(worst["subsample"],
                                 zero_pad_subsample_check(ChannelTaps(taps), L, T)[1])
    record(1, [("diagonalization", worst["diag"] <= 1e-10),
               ("cp-vs-circulant", worst["cp"] <= 1e-10),
               ("mmse-vs-dense", worst["mmse"] <= 1e-8),
               ("dft-subsampling", worst["subsample"] <= 1e-10)], started)


def test_criterion_2_single_tap_calibration():
    started = time.monotonic()
    checks = []
    for rate, db in ((1, 10), (2, 20)):
        cfg = SweepConfig(0, 1, rate, MMSE, (db,), 10**6, SEED)
        pt = run_sweep(cfg).points[0]
        snr = 10 ** (db / 10)
        exact = -math.expm1(-(2**rate - 1) / snr)
        se = math.sqrt(exact * (1 - exact) / pt.trials)
        checks.append((f"R={rate}@{db}dB", abs(pt.p_hat - exact) <= 3 * se))
    record(2, checks, started)


def test_criterion_3_mmse_slopes_nu2():
    started = time.monotonic()
    grid = (15, 20, 25, 30, 35)
    s = {R: slope_of(SweepConfig(2, 10, R, MMSE, grid, 10**7, SEED)) for R in (2, 3, 4)}
    record(3, [(f"R=4 slope {s[4]:.3f}", within(s[4], 1, 0.25)),
               (f"R=3 slope {s[3]:.3f}", within(s[3], 2, 0.35)),
               (f"R=2 slope {s[2]:.3f}", s[2] is not None and s[2] >= 2.4)], started)


def test_criterion_4_mmse_slopes_nu3():
    started = time.monotonic()
    grid = tuple(range(0, 40, 5))
    s = {R: slope_of(SweepConfig(3, 10, R, MMSE, grid, 10**7, SEED)) for R in (1, 2, 3, 4)}
    d = {R: analytic_diversity(R, 3, 10).d for R in s}
    checks = [(f"R=3 slope {s[3]:.3f}", within(s[3], 2, 0.35)),
              (f"R=4 slope {s[4]:.3f}", within(s[4], 1, 0.25))]
    checks += [(f"R={R} slope {s[R]:.3f} >= {d[R] - 0.8:g}", s[R] >= d[R] - 0.8) for R in (1, 2)]
    checks.append(("ordering", s[1] > s[2] > s[3] > s[4]))
    record(4, checks, started)


def test_criterion_5_zf_flat():
    started = time.monotonic()
    grid = (15, 20, 25, 30, 35)
    checks = []
    for nu in (2, 3):
        for R in (2, 4):
            s = slope_of(SweepConfig(nu, 10, R, ZF, grid, 10**6, SEED))
            checks.append((f"nu={nu} R={R} slope {s:.3f}", within(s, 1, 0.25)))
    record(5, checks, started)


def test_criterion_6_ser_matches_outage():
    started = time.monotonic()
    grid = (10, 15, 20, 25, 30)
    # 1.25e6 blocks of 8 symbols is 1e7 symbol decisions per SNR point
    ser = slope_of(SweepConfig(1, 8, 2, MMSE, grid, 1_250_000, SEED, Target.SYMBOL_ERROR))
    out = slope_of(SweepConfig(1, 8, 2, MMSE, grid, 10**7, SEED))
    d = analytic_diversity(2, 1, 8).d
    record(6, [(f"ser slope {ser:.3f}", within(ser, d, 0.5)),
               (f"outage slope {out:.3f}", within(out, d, 0.5)),
               ("agreement", within(ser, out, 0.5))], started)


def test_criterion_7_lemma1_tail():
    started = time.monotonic()
    grid = tuple(np.arange(20, 47.5, 2.5))
    low = lemma1_tail_probability(4, 1.5, grid, 10**7, SEED)
    high = lemma1_tail_probability(4, 2.5, grid, 10**7, SEED)
    sl = None if low.fit is None else low.fit.slope
    sh = None if high.fit is None else high.fit.slope
    record(7, [(f"m=1.5 slope {sl}", within(sl, 2, 0.3)),
               (f"m=2.5 slope {sh} (successes {sum(p.successes for p in high.points)})",
                within(sh, 3, 0.4))], started)


def test_criterion_8_block_length_invariance():
    started = time.monotonic()
    grid = tuple(np.arange(0, 27.5, 2.5))
    pair = lemma2_slope_pair(2, 3, 12, 1.5, grid, 10**7, SEED, min_successes=100)
    diff = pair.difference if pair.fit and pair.fit_other else None
    rng = np.random.default_rng(SEED)
    tuples = 0
    mismatches = 0
    while tuples < 1000:
        nu = int(rng.integers(1, 6))
        L = nu + 1 + int(rng.integers(0, 30))
        L2 = nu + 1 + int(rng.integers(0, 30))
        R = rng.uniform(0.01, 7)
        R2 = rate_shift(R, L, L2)
        if R2 <= 0 or abs(2.0**-R * L - round(2.0**-R * L)) < 1e-9:
            continue
        tuples += 1
        mismatches += analytic_diversity(R, nu, L).d != analytic_diversity(R2, nu, L2).d
    record(8, [(f"slope difference {diff}", diff is not None and diff <= 0.3),
               (f"rate-shift mismatches {mismatches}/1000", mismatches == 0)], started)


def test_criterion_9_property_suites():
    started = time.monotonic()
    n = 10**5
    taps = streams.complex_normal(streams.stream(SEED, streams.TAPS, 0), (n, 3))
    g = np.abs(np.fft.fft(taps, n=8, axis=-1)) ** 2
    snrs = 10 ** np.random.default_rng(SEED).uniform(-1, 4, size=(n, 1))
    violations = int(np.count_nonzero(sinr_from_gains(g, snrs, MMSE) < sinr_from_gains(g, snrs, ZF)))

    rng = np.random.default_rng(SEED)
    monotone = True
    equivalent = True
    for _ in range(200):
        fr = frequency_response(ChannelTaps(random_taps(rng, 2)), 8)
        for kind in (MMSE, ZF):
            mi = [mutual_info(fr, s, kind) for s in np.logspace(-2, 4, 25)]
            monotone &= all(a <= b for a, b in zip(mi, mi[1:]))
            for s in (0.5, 10.0, 1e3):
                R = rng.uniform(0.1, 5)
                forms = {outage_indicator(fr, s, R, kind),
                         bool(outage_from_gains(fr.gains, s, R, kind)),
                         decision_sinr(fr, s, kind) < 2**R - 1}
                equivalent &= len(forms) == 1

    corr = remark1_independence_check(1, n, SEED)

    snr = 100.0
    h = streams.complex_normal(streams.stream(SEED, streams.TAPS, 1), n)
    alpha = np.sort(-np.log(np.abs(h) ** 2) / np.log(snr))
    cdf = np.exp(-snr ** -alpha)
    dev = max(np.max(np.abs(np.arange(1, n + 1) / n - cdf)), np.max(np.abs(np.arange(n) / n - cdf)))
    dkw = math.sqrt(math.log(2 / 0.05) / (2 * n))

    nu, snr = 3, 2.0
    taps = streams.complex_normal(streams.stream(SEED, streams.TAPS, 2), (n, nu + 1))
    lam = np.fft.fft(taps, axis=-1)
    counts = np.count_nonzero(-np.log(np.abs(lam) ** 2) / np.log(snr) > 1, axis=-1)
    spot = [exponential_orders(frequency_response(ChannelTaps(t), nu + 1), snr).m_count
            for t in taps[:500]]
    p = -math.expm1(-1 / ((nu + 1) * snr))
    observed = np.bincount(counts, minlength=nu + 2)
    expected = stats.binom.pmf(np.arange(nu + 2), nu + 1, p) * n
    pvalue = stats.chisquare(observed, expected).pvalue

    record(9, [(f"mmse>=zf violations {violations}", violations == 0),
               ("mi monotone", monotone),
               ("outage forms", equivalent),
               (f"remark1 corr {corr:.4f}", corr < 0.01),
               (f"alpha dkw {dev:.4f}<{dkw:.4f}", dev < dkw),
               (f"binomial p={pvalue:.3f}", pvalue > 0.001 and list(counts[:500]) == spot)],
           started)
