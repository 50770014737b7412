"""Acceptance gate: one test per criterion, at the stated tolerances.

Each test records a PASS/FAIL line (collected in the terminal summary) and
then asserts the same condition.
"""
import math
import time

import numpy as np
import pytest

from secmetrics import cli, llr_analysis, metrics, sim
from secmetrics.codes.bch import bch_construct, bch_decode_batch, bch_encode
from secmetrics.codes.ldpc import ldpc_construct_fixture, ldpc_decode_batch, ldpc_encode
from secmetrics.codes.scramble import Scrambler, deinterleave, descramble, interleave, interleaver_from_key, scramble
from secmetrics.modem import ModScheme, dpsk_demodulate, dpsk_modulate
from secmetrics.scenarios import (BchScenario, KeyedJammingScenario, UncodedScenario, run_keyed_scenario,
                                  run_scrambler_scenario)


def db(x):
    return 10 ** (x / 10)


def sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


def test_criterion_01_analytic_anchors(criterion):
    t0 = time.perf_counter()
    b0, b3 = metrics.ber_bpsk_awgn(db(0)), metrics.ber_bpsk_awgn(db(-3))
    e0, e3 = metrics.be_cdf_analytic(127, 10, b0), metrics.be_cdf_analytic(127, 10, b3)
    dt = time.perf_counter() - t0
    ok = (abs(b0 - 0.0786) <= 5e-4 and abs(b3 - 0.158) <= 2e-3
          and abs(e0 - 0.58) <= 0.01 and abs(e3 - 0.006) <= 0.002 and dt < 1)
    assert criterion(1, ok, f"BER(0dB)={b0:.4f} BER(-3dB)={b3:.4f} BE-CDF(0dB)={e0:.4f} "
                            f"BE-CDF(-3dB)={e3:.4f} [{dt:.3f}s]")


def test_criterion_02_threshold_anchors(criterion):
    t0 = time.perf_counter()
    hi = metrics.be_cdf_threshold_snr(127, 10, 0.99)
    lo = metrics.be_cdf_threshold_snr(127, 10, 0.01)
    dt = time.perf_counter() - t0
    ok = abs(hi - 1.95) <= 0.05 and abs(lo + 2.78) <= 0.05 and dt < 1
    assert criterion(2, ok, f"Pr(E<=10)>0.99 above {hi:.3f} dB, <0.01 below {lo:.3f} dB [{dt:.3f}s]")


def test_criterion_03_limiting_value(criterion):
    v = metrics.limiting_value(0.05, 753)
    halves = [metrics.limiting_value(0.0, s) for s in (1, 16, 64, 184, 753, 4096, 10**6)]
    ok = abs(v - 0.9970) <= 5e-4 and all(h == 0.5 for h in halves)
    assert criterion(3, ok, f"limiting_value(0.05,753)={v:.5f}, delta=0 gives exactly 0.5: {all(h == 0.5 for h in halves)}")


def test_criterion_04_analytic_vs_mc(criterion):
    t0 = time.perf_counter()
    scen = UncodedScenario(n=127)
    hits, worst = 0, 0.0
    grid = range(-6, 7)
    for snr in grid:
        est = metrics.be_cdf_mc(scen, 10, float(snr), 100_000, seed=4)
        want = metrics.be_cdf_analytic(127, 10, metrics.ber_bpsk_awgn(db(snr)))
        z = abs(est.p_hat - want) / est.std_error
        worst = max(worst, z)
        hits += z <= 3
    dt = time.perf_counter() - t0
    frac = hits / len(grid)
    ok = frac >= 0.95 and dt <= 120
    assert criterion(4, ok, f"{hits}/{len(grid)} SNR points within 3 Wilson SE (max |z|={worst:.2f}) [{dt:.1f}s]")


class FlipScenario:
    """iid bit flips with probability p; bypasses channel and codes."""

    rate = 1.0

    def __init__(self, n, p):
        self.n, self.p = n, p
        self.pre_len = self.post_len = n

    def simulate(self, snr_db, n_blocks, rng):
        e = (rng.random((n_blocks, self.n)) < self.p).sum(axis=1)
        return sim.BlockResult(e, e.copy(), self.n, self.n)


def test_criterion_05_iid_oracle(criterion):
    t0 = time.perf_counter()
    trials = 10_000
    bad, worst, n = [], 0.0, 0
    for S_b in (64, 184, 753):
        for delta in (0.05, 0.15, 0.25):
            for p in (0.4, 0.45, 0.5):
                est = metrics.ber_cdf_ac_mc(FlipScenario(S_b, p), delta, S_b, 0.0, trials, seed=5)
                want = metrics.ber_cdf_ac_exact_iid(S_b, delta, p)
                s = sigma(want, trials)
                diff = abs(est.p_hat - want)
                n += 1
                if s > 0:
                    worst = max(worst, diff / s)
                if diff > 3 * s + 1e-12:
                    bad.append((S_b, delta, p, round(est.p_hat, 4), round(want, 4)))
    dt = time.perf_counter() - t0
    ok = not bad and dt <= 60
    assert criterion(5, ok, f"{n - len(bad)}/{n} (S_b, delta, p) cases within 3 sigma "
                            f"(max |z|={worst:.2f}) {bad or ''} [{dt:.1f}s]")


def test_criterion_06_limit_convergence(criterion):
    t0 = time.perf_counter()
    code = bch_construct(7, 5)
    trials, S_b = 10_000, 184
    rows, bad = [], []
    for L in (2, 4):
        scen = BchScenario(code, ModScheme("dpsk", L), codewords_per_frame=2)
        # one simulation serves every delta at this point
        res = sim.simulate(scen, metrics.ebno_to_snr(-20.0, scen.rate), trials * 2, seed=6)
        p_b = res.post_errors.sum() / (res.n_blocks * res.post_len)
        for delta in (0.02, 0.05, 0.1, 0.15):
            est = metrics.estimate_ber_cdf(res, delta, S_b)
            lim = metrics.limiting_value(delta, S_b)
            s = sigma(lim, est.trials)
            z = (est.p_hat - lim) / s if s > 0 else 0.0
            rows.append(f"L={L} d={delta}: {est.p_hat:.4f} vs {lim:.4f} (z={z:+.1f})")
            if abs(est.p_hat - lim) > 3 * s + 1e-12:
                bad.append(rows[-1] + f" [post-decoder BER {p_b:.4f}, "
                           f"exact binomial {metrics.ber_cdf_ac_exact_iid(S_b, delta, p_b):.4f}]")
    dt = time.perf_counter() - t0
    ok = not bad and dt <= 300
    detail = f"{len(rows) - len(bad)}/{len(rows)} configs within 3 sigma [{dt:.1f}s]"
    if bad:
        detail += "; outside: " + "; ".join(bad)
    assert criterion(6, ok, detail)


def test_criterion_07_code_properties(criterion):
    code = bch_construct(7, 10)
    rng = np.random.default_rng(7)
    per_weight = {}
    for w in range(1, 11):
        msgs = rng.integers(0, 2, (10_000, code.k), dtype=np.uint8)
        rx = bch_encode(code, msgs)
        rows = np.arange(10_000)[:, None]
        pos = np.argsort(rng.random((10_000, code.n)), axis=1)[:, :w]
        rx[rows, pos] ^= 1
        dec, ok, _ = bch_decode_batch(code, rx)
        per_weight[w] = float((ok & (dec == msgs).all(axis=1)).mean())
    bch_ok = all(v == 1.0 for v in per_weight.values())

    ldpc = ldpc_construct_fixture()
    cw = ldpc_encode(ldpc, rng.integers(0, 2, (100, ldpc.k), dtype=np.uint8))
    bits, _, iters, success = ldpc_decode_batch(ldpc, 20.0 * (1 - 2.0 * cw))
    ldpc_ok = bool(success.all() and (iters <= 1).all() and np.array_equal(bits, cw))

    s = Scrambler.random(64, rng)
    m64 = rng.integers(0, 2, (1000, 64), dtype=np.uint8)
    scr_ok = np.array_equal(descramble(s, scramble(s, m64)), m64)
    il_ok = True
    for _ in range(1000):
        il = interleaver_from_key(rng.integers(0, 2, 64, dtype=np.uint8), 753)
        m = rng.integers(0, 2, 753, dtype=np.uint8)
        il_ok &= np.array_equal(deinterleave(il, interleave(il, m)), m)
    bits_in = rng.integers(0, 2, (1000, 254), dtype=np.uint8)
    dpsk_ok = all(np.array_equal(dpsk_demodulate(dpsk_modulate(bits_in, L), L), bits_in) for L in (2, 4))

    ok = bch_ok and ldpc_ok and scr_ok and il_ok and dpsk_ok
    assert criterion(7, ok, f"BCH weights 1..10 recovery {min(per_weight.values()):.4f} min over 10^4 each; "
                            f"LDPC noiseless <=1 iter: {ldpc_ok}; round-trips scramble/interleave/DPSK: "
                            f"{scr_ok}/{il_ok}/{dpsk_ok}")


def first_reaching(curve, level):
    hit = [x for x, v in zip(curve.xs, curve.values) if v >= level]
    return hit[0] if hit else None


def test_criterion_08_keyed_scenario(criterion):
    t0 = time.perf_counter()
    trials = 10_000
    snr_grid = [1.0, 2.0, 3.0, 4.0, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5]
    be = {}
    for alpha in (0.2, 0.7, 1.0):
        be[alpha] = run_keyed_scenario(alpha, snr_grid, axis="snr_db", t=10, delta_list=(), trials=trials,
                                       seed=8)["be_cdf_t10"]
    eve_ac = run_keyed_scenario(0.7, [3.0, 4.0, 4.7, 5.5], axis="ebno_db", delta_list=(0.05,), trials=trials,
                                seed=8)["ber_cdf_post_d0.05"]
    dt = time.perf_counter() - t0

    reach = first_reaching(be[0.2], 0.99)
    a = reach is not None and 5.5 <= reach <= 7.5
    eve4 = be[0.7].value_at(4.0).value
    b = eve4 <= 0.02
    low = [p for p in eve_ac.points if p.x <= 5.5]
    c = all(p.value >= 0.98 for p in low)
    order_ok = True
    for hi, lo in ((0.2, 0.7), (0.7, 1.0)):
        for ph, pl in zip(be[hi].points, be[lo].points):
            se = math.hypot(metrics.BerEstimate(ph.events, ph.trials).std_error,
                            metrics.BerEstimate(pl.events, pl.trials).std_error)
            order_ok &= ph.value >= pl.value - 3 * se
    ok = a and b and c and order_ok and dt <= 1800
    assert criterion(8, ok, f"alpha=0.2 BE-CDF>=0.99 first at {reach} dB (want 5.5..7.5): {a}; "
                            f"alpha=0.7 BE-CDF(4dB)={eve4:.4f} (want <=0.02): {b}; "
                            f"alpha=0.7 d=0.05 BER-CDF at Eb/N0<=5.5 = "
                            f"{[round(p.value, 4) for p in low]} (want >=0.98): {c}; "
                            f"ordering 0.2>=0.7>=1.0: {order_ok} [{dt:.0f}s]")


def test_criterion_09_kl_trend(criterion):
    rng = np.random.default_rng(9)
    g = llr_analysis.partition_divergence(
        llr_analysis.LlrPartition(rng.normal(1, 1, 10**6), rng.normal(-1, 1, 10**6)))
    gauss_ok = abs(g - 2 / math.log(2)) <= 0.05

    scen = KeyedJammingScenario.build(alpha=0.0)
    grid = [-25.0, -20.0, -15.0, -12.0, -10.0, -8.0, -6.0, -4.0, -2.0, 0.0, 1.0, 2.0]
    pts = llr_analysis.kl_vs_ber_sweep(scen, grid, 200, seed=9)
    valid = [p for p in pts if not p.degenerate]
    noisy = [p for p in valid if p.ber >= 0.45]
    noisy_ok = bool(noisy) and all(p.kl_bits <= 0.05 for p in noisy)
    rho = llr_analysis.trend_correlation(pts)
    ok = gauss_ok and noisy_ok and rho <= -0.9
    assert criterion(9, ok, f"Gaussian oracle {g:.4f} vs {2 / math.log(2):.4f}; "
                            f"D at BER>=0.45: {[(round(p.ber, 3), round(p.kl_bits, 4)) for p in noisy]}; "
                            f"Spearman={rho:.3f} over {len(valid)} points")


def test_criterion_10_scrambler(criterion):
    grid = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0]
    c = run_scrambler_scenario(grid, [0.15], 10_000, seed=10)
    pre, post = c["ber_pre"].values, c["ber_post"].values
    order_ok = bool((post >= pre).all())
    cdf = c["ber_cdf_post_d0.15"]
    at0, at4 = cdf.value_at(0.0).value, cdf.value_at(4.0).value
    ok = order_ok and at0 > 0.99 and at4 < 0.9
    assert criterion(10, ok, f"after>=before BER everywhere: {order_ok}; d=0.15 after-decoder "
                             f"BER-CDF(0dB)={at0:.4f} (want >0.99, limit {metrics.limiting_value(0.15, 64):.4f}), "
                             f"(4dB)={at4:.4f} (want <0.9)")


CONFIGS = {
    "uncoded": "[scenario]\nkind = uncoded\n[metric]\ndeltas = 0.45\n[sweep]\nstart = -2\nstop = 2\ntrials = 1700\n",
    "bch_dqpsk": ("[scenario]\nkind = bch\n[code]\nbch_t = 5\ncodewords_per_frame = 2\n[modem]\nmodulation = dpsk\n"
                  "order = 4\n[metric]\nt = 5\ndeltas = 0.05, 0.1\ns_b = 184\n[sweep]\naxis = ebno_db\n"
                  "start = -4\nstop = 4\nstep = 2\ntrials = 1200\n"),
    "scrambler": ("[scenario]\nkind = scrambler\n[metric]\ndeltas = 0.15\n[sweep]\naxis = ebno_db\nstart = 0\n"
                  "stop = 4\nstep = 2\ntrials = 1100\n"),
    "keyed": ("[scenario]\nkind = keyed\n[channel]\nparty = eve\n[metric]\ndeltas = 0.05\n[sweep]\nstart = 2\n"
              "stop = 4\ntrials = 1100\n"),
    "analytic": "[scenario]\nkind = analytic\n[metric]\ndeltas = 0.05\n[sweep]\nstart = -3\nstop = 3\n",
}


def test_criterion_11_determinism(criterion, tmp_path):
    mismatched, compared = [], 0
    for name, text in CONFIGS.items():
        cfg = tmp_path / f"{name}.ini"
        cfg.write_text(text)
        cmd = "analytic" if name == "analytic" else "sweep"
        outs = []
        for workers in (1, 3):
            out = tmp_path / f"{name}_w{workers}"
            assert cli.main([cmd, "--config", str(cfg), "--seed", "11", "--workers", str(workers),
                             "--out", str(out)]) == 0
            outs.append(out)
        for csv_path in sorted(outs[0].glob("*.csv")):
            compared += 1
            if csv_path.read_bytes() != (outs[1] / csv_path.name).read_bytes():
                mismatched.append(f"{name}/{csv_path.name}")
    ok = compared > 0 and not mismatched
    assert criterion(11, ok, f"{compared - len(mismatched)}/{compared} CSVs byte-identical across "
                             f"--workers 1 vs 3 for {len(CONFIGS)} configs {mismatched or ''}")
