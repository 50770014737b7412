import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import binom

from secmetrics import metrics, sim
from secmetrics.metrics import BerEstimate, CurvePoint, MetricCurve


def db(x):
    return 10 ** (x / 10)


def test_ber_bpsk_anchors():
    assert metrics.ber_bpsk_awgn(db(0)) == pytest.approx(0.0786, abs=5e-4)
    assert metrics.ber_bpsk_awgn(db(-3)) == pytest.approx(0.158, abs=2e-3)
    assert metrics.ber_bpsk_awgn(1e6) == 0.0
    assert metrics.ber_bpsk_awgn(0.0) == 0.5


def test_be_cdf_anchors():
    assert metrics.be_cdf_analytic(127, 10, metrics.ber_bpsk_awgn(db(0))) == pytest.approx(0.58, abs=0.01)
    assert metrics.be_cdf_analytic(127, 10, metrics.ber_bpsk_awgn(db(-3))) == pytest.approx(0.006, abs=0.002)
    assert metrics.be_cdf_analytic(127, 127, 0.4) == 1.0
    assert metrics.be_cdf_analytic(127, 3, 0.0) == 1.0


@settings(max_examples=200)
@given(n=st.integers(1, 1056), frac=st.floats(0, 1), p=st.floats(0, 1))
def test_binomial_matches_scipy(n, frac, p):
    x = int(frac * n)
    assert metrics.binom_cdf(x, n, p) == pytest.approx(binom.cdf(x, n, p), abs=1e-10)
    assert metrics.binom_sf(x, n, p) == pytest.approx(binom.sf(x, n, p), abs=1e-10)


def test_binomial_tail_precision_at_large_n():
    # direct summation keeps relative precision deep in the tail
    assert metrics.binom_sf(900, 1056, 0.3) == pytest.approx(binom.sf(900, 1056, 0.3), rel=1e-8)


def test_threshold_anchors():
    assert metrics.be_cdf_threshold_snr(127, 10, 0.99) == pytest.approx(1.95, abs=0.05)
    assert metrics.be_cdf_threshold_snr(127, 10, 0.01) == pytest.approx(-2.78, abs=0.05)


def test_limiting_value():
    assert metrics.limiting_value(0.05, 753) == pytest.approx(0.9970, abs=5e-4)
    # Q(-x) = 1 - erfc(x / sqrt 2) / 2
    x = 2 * 0.05 * math.sqrt(753)
    assert metrics.limiting_value(0.05, 753) == pytest.approx(1 - 0.5 * math.erfc(x / math.sqrt(2)), abs=1e-12)
    for s in (1, 64, 184, 753, 10_000):
        assert metrics.limiting_value(0.0, s) == 0.5


def test_error_threshold():
    assert metrics.error_threshold(753, 0.05) == 338
    assert metrics.error_threshold(64, 0.25) == 16  # 0.25 * 64 is exactly 16
    assert metrics.error_threshold(100, 0.5) == 0


def test_ber_cdf_exact_iid_examples():
    for s in (8, 64, 184):
        assert metrics.ber_cdf_ac_exact_iid(s, 0.5, 0.5) == pytest.approx(1 - 2.0 ** -s)
        assert metrics.ber_cdf_ac_exact_iid(s, 0.1, 0.0) == 0.0


def test_wilson_examples():
    lo, hi = metrics.wilson_ci(50, 100)
    assert (lo, hi) == pytest.approx((0.404, 0.596), abs=1e-3)
    lo, hi = metrics.wilson_ci(0, 40)
    assert lo == 0.0 and hi > 0
    assert metrics.wilson_ci(40, 40)[1] == 1.0
    assert isinstance(lo, float)
    with pytest.raises(ValueError):
        metrics.wilson_ci(3, 2)


def test_wilson_against_statsmodels_formula():
    # closed form with z = 1.959963984540054
    z = 1.959963984540054
    k, n = 7, 250
    p = k / n
    c = (p + z * z / (2 * n)) / (1 + z * z / n)
    h = z / (1 + z * z / n) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    assert metrics.wilson_ci(k, n) == pytest.approx((c - h, c + h), abs=1e-12)


@settings(max_examples=200)
@given(n=st.integers(1, 10**6), frac=st.floats(0, 1), conf=st.floats(0.5, 0.999))
def test_wilson_brackets_estimate(n, frac, conf):
    k = int(frac * n)
    est = BerEstimate(k, n, conf)
    lo, hi = est.ci
    assert 0 <= lo <= est.p_hat <= hi <= 1


def _result(pre, post, pre_len, post_len):
    return sim.BlockResult(np.asarray(pre), np.asarray(post), pre_len, post_len)


def test_estimators_from_block_counts():
    r = _result([0, 3, 11, 10], [0, 40, 1, 7], 127, 64)
    assert metrics.estimate_be_cdf(r, 10).errors == 3
    # S_b = 128 pairs consecutive 64-bit blocks: windows of 40 and 8 errors, threshold 38
    est = metrics.estimate_ber_cdf(r, 0.2, 128)
    assert est.trials == 2 and est.errors == 1
    assert metrics.estimate_ber_cdf(r, 0.18, 128).errors == 0
    est = metrics.estimate_ber_cdf(r, 0.25, 64)
    assert est.errors == 1
    assert metrics.estimate_ber(r, "pre").p_hat == pytest.approx(24 / 508)
    with pytest.raises(ValueError):
        metrics.estimate_ber_cdf(r, 0.1, 100)


def test_delta_half_counts_any_error():
    r = _result([0] * 5, [0, 1, 0, 5, 0], 8, 8)
    assert metrics.estimate_ber_cdf(r, 0.5, 8).errors == 2


class FlipScenario:
    """iid bit flips with probability p; no channel, no code."""

    rate = 1.0

    def __init__(self, n, p):
        self.n, self.p = n, p
        self.pre_len = self.post_len = n

    def simulate(self, snr_db, n_blocks, rng):
        e = (rng.random((n_blocks, self.n)) < self.p).sum(axis=1)
        return sim.BlockResult(e, e.copy(), self.n, self.n)


def test_be_cdf_mc_t_equals_n():
    est = metrics.be_cdf_mc(FlipScenario(20, 0.7), 20, 0.0, 100, seed=0)
    assert est.p_hat == 1.0


def test_ber_cdf_mc_matches_iid_formula():
    est = metrics.ber_cdf_ac_mc(FlipScenario(184, 0.5), 0.05, 184, 0.0, 5000, seed=1)
    want = metrics.ber_cdf_ac_exact_iid(184, 0.05, 0.5)
    assert abs(est.p_hat - want) <= 3 * math.sqrt(want * (1 - want) / 5000)


def curve(xs, vals, axis="snr_db"):
    return MetricCurve("c", axis, [CurvePoint.exact(x, v) for x, v in zip(xs, vals)])


def test_curve_validation():
    with pytest.raises(ValueError):
        curve([0, 0], [0.1, 0.2])
    with pytest.raises(ValueError):
        curve([0, 1], [0.1, 1.2])
    with pytest.raises(ValueError):
        MetricCurve("c", "volts")


def test_csv_round_trip(tmp_path):
    c = MetricCurve("c", "snr_db", [CurvePoint.from_estimate(x, BerEstimate(e, 1000)) for x, e in
                                    [(-1.0, 3), (0.5, 400), (2.0, 999)]])
    p = tmp_path / "c.csv"
    c.write_csv(p)
    assert p.read_text().splitlines()[0] == ",".join(metrics.CSV_COLUMNS)
    back = MetricCurve.read_csv(p)
    assert back.points == c.points


def test_gap_definition():
    xs = np.arange(0, 11, dtype=float)
    bob = curve(xs, 10.0 ** -(xs / 2))       # BER 1e-3 at x = 6
    eve = curve(xs, 0.5 - 0.02 * xs)          # 0.4 at x = 5
    assert metrics.reliability_point(bob, 1e-3) == pytest.approx(6.0)
    assert metrics.security_point(eve, 0.4) == pytest.approx(5.0)
    assert metrics.security_gap(bob, 1e-3, eve, 0.4) == pytest.approx(1.0)


@settings(max_examples=50)
@given(shift=st.floats(-10, 10), target=st.floats(0.05, 0.45))
def test_gap_shift_invariance(shift, target):
    xs = np.linspace(-5, 5, 21)
    vals = 0.5 * (1 - np.tanh(xs / 2))
    a = curve(xs, vals)
    b = curve(xs + shift, vals)
    g0 = metrics.security_gap(a, target, a, target)
    g1 = metrics.security_gap(b, target, a, target)
    assert g1 - g0 == pytest.approx(shift, abs=1e-9)


def test_increasing_curve_targets():
    xs = np.arange(5, dtype=float)
    be = curve(xs, [0.1, 0.3, 0.6, 0.9, 0.99])
    assert metrics.reliability_point(be, 0.9) == pytest.approx(3.0)
    assert metrics.security_point(be, 0.2) == pytest.approx(0.5)


def test_target_out_of_range():
    xs = np.arange(4, dtype=float)
    c = curve(xs, [0.4, 0.3, 0.2, 0.1])
    with pytest.raises(ValueError):
        metrics.reliability_point(c, 1e-3)
    with pytest.raises(ValueError):
        metrics.reliability_point(c, 0.45)
