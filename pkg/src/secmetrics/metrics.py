"""Short-blocklength secrecy metrics.

BE-CDF (before the outer code): probability of at most ``t`` bit errors in a
block, as a function of channel SNR.

BER-CDF (after the outer code): probability that the error proportion over
``S_b`` decoded message bits exceeds ``0.5 - delta``, as a function of Eb/N0.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq, isotonic_regression
from scipy.special import erfc, gammaln, logsumexp
from scipy.stats import norm

from secmetrics import sim
from secmetrics.modem import ebno_to_snr

CSV_COLUMNS = ("axis_db", "value", "ci_low", "ci_high", "trials", "errors_or_events")
DEFAULT_CONFIDENCE = 0.95


# ---------------------------------------------------------------- analytic

def ber_bpsk_awgn(snr_linear):
    """Uncoded BPSK bit error rate ``erfc(sqrt(SNR)) / 2``."""
    snr_linear = np.asarray(snr_linear, dtype=float)
    if (snr_linear < 0).any():
        raise ValueError("SNR must be non-negative")
    out = 0.5 * erfc(np.sqrt(snr_linear))
    return float(out) if out.ndim == 0 else out


def binom_cdf(x: int, n: int, p: float) -> float:
    """``P(Bin(n, p) <= x)`` summed in log space."""
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    if x < 0:
        return 0.0
    if x >= n:
        return 1.0
    if p == 0:
        return 1.0
    if p == 1:
        return 0.0
    i = np.arange(x + 1)
    log_terms = (gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
                 + i * math.log(p) + (n - i) * math.log1p(-p))
    return float(min(1.0, math.exp(logsumexp(log_terms))))


def binom_sf(x: int, n: int, p: float) -> float:
    """``P(Bin(n, p) > x)``; summed directly so small tails keep precision."""
    if x < 0:
        return 1.0
    if x >= n:
        return 0.0
    if p == 0:
        return 0.0
    if p == 1:
        return 1.0
    i = np.arange(x + 1, n + 1)
    log_terms = (gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
                 + i * math.log(p) + (n - i) * math.log1p(-p))
    return float(min(1.0, math.exp(logsumexp(log_terms))))


def be_cdf_analytic(n: int, t: int, p_b: float) -> float:
    """Pr(E <= t) for ``n`` bits with independent errors of probability ``p_b``."""
    if not 0 <= t <= n:
        raise ValueError("need 0 <= t <= n")
    return binom_cdf(t, n, p_b)


def error_threshold(S_b: int, delta: float) -> int:
    """Largest error count that does *not* exceed ``S_b (0.5 - delta)``."""
    if not 0 <= delta <= 0.5:
        raise ValueError("delta must be in [0, 0.5]")
    return int(math.floor(S_b * (0.5 - delta) + 1e-9))


def ber_cdf_ac_exact_iid(S_b: int, delta: float, p_b: float) -> float:
    """Pr(P_hat > 0.5 - delta) when the ``S_b`` output bits err independently."""
    if S_b < 1:
        raise ValueError("S_b must be >= 1")
    return binom_sf(error_threshold(S_b, delta), S_b, p_b)


def limiting_value(delta: float, S_b: int) -> float:
    """Gaussian limit of the BER-CDF as Eb/N0 -> -inf: ``Q(-2 delta sqrt(S_b))``."""
    if delta < 0 or S_b < 1:
        raise ValueError("need delta >= 0 and S_b >= 1")
    return float(norm.sf(-2.0 * delta * math.sqrt(S_b)))


def be_cdf_threshold_snr(n: int, t: int, level: float, lo_db: float = -30.0, hi_db: float = 30.0) -> float:
    """SNR (dB) at which the uncoded-BPSK ``Pr(E <= t)`` equals ``level``.

    The curve is increasing in SNR, so this is both the smallest SNR with
    ``Pr > level`` and the largest with ``Pr < level``.
    """
    def f(snr_db):
        return be_cdf_analytic(n, t, ber_bpsk_awgn(10 ** (snr_db / 10))) - level
    return brentq(f, lo_db, hi_db, xtol=1e-10)


# ------------------------------------------------------------- estimation

def wilson_ci(errors: int, trials: int, confidence: float = DEFAULT_CONFIDENCE) -> tuple[float, float]:
    if trials < 1 or not 0 <= errors <= trials:
        raise ValueError("need trials >= 1 and 0 <= errors <= trials")
    z = norm.ppf(0.5 + confidence / 2)
    p = errors / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    lo = 0.0 if errors == 0 else max(0.0, float(center - half))
    hi = 1.0 if errors == trials else min(1.0, float(center + half))
    return lo, hi


@dataclass(frozen=True)
class BerEstimate:
    """Event count over trials with a Wilson interval.

    ``errors`` counts whatever event the estimator tracks (bit errors for a
    BER, qualifying blocks for the CDF metrics).
    """

    errors: int
    trials: int
    confidence: float = DEFAULT_CONFIDENCE

    @property
    def p_hat(self) -> float:
        return self.errors / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_ci(self.errors, self.trials, self.confidence)

    @property
    def std_error(self) -> float:
        """Wilson half-width divided by z."""
        lo, hi = self.ci
        return (hi - lo) / (2 * norm.ppf(0.5 + self.confidence / 2))


def estimate_be_cdf(result: sim.BlockResult, t: int) -> BerEstimate:
    return BerEstimate(int((result.pre_errors <= t).sum()), result.n_blocks)


def window_errors(result: sim.BlockResult, S_b: int) -> np.ndarray:
    """Sum post-decoder errors over consecutive windows of ``S_b`` bits."""
    if S_b % result.post_len:
        raise ValueError(f"S_b={S_b} is not a multiple of the {result.post_len}-bit message block")
    g = S_b // result.post_len
    usable = (result.n_blocks // g) * g
    return result.post_errors[:usable].reshape(-1, g).sum(axis=1)


def estimate_ber_cdf(result: sim.BlockResult, delta: float, S_b: int) -> BerEstimate:
    w = window_errors(result, S_b)
    return BerEstimate(int((w > error_threshold(S_b, delta)).sum()), len(w))


def estimate_ber(result: sim.BlockResult, where: str = "post") -> BerEstimate:
    errs = result.post_errors if where == "post" else result.pre_errors
    bits = result.post_len if where == "post" else result.pre_len
    return BerEstimate(int(errs.sum()), int(result.n_blocks * bits))


def be_cdf_mc(scenario, t: int, x_db: float, trials: int, seed: int, executor=None) -> BerEstimate:
    """Monte Carlo BE-CDF at channel SNR ``x_db``; one trial is one block."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= t:
        raise ValueError("t must be >= 0")
    return estimate_be_cdf(sim.simulate(scenario, x_db, trials, seed, executor=executor), t)


def ber_cdf_ac_mc(scenario, delta: float, S_b: int, ebno_db: float, trials: int, seed: int,
                  executor=None) -> BerEstimate:
    """Monte Carlo BER-CDF at ``ebno_db``; one trial is one ``S_b``-bit window."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if S_b % scenario.post_len:
        raise ValueError(f"S_b={S_b} is not a multiple of the {scenario.post_len}-bit message block")
    g = S_b // scenario.post_len
    snr_db = ebno_to_snr(ebno_db, scenario.rate)
    res = sim.simulate(scenario, snr_db, trials * g, seed, executor=executor)
    return estimate_ber_cdf(res, delta, S_b)


# ------------------------------------------------------------------ curves

@dataclass(frozen=True)
class CurvePoint:
    x: float
    value: float
    ci_low: float
    ci_high: float
    trials: int
    events: int

    @classmethod
    def from_estimate(cls, x: float, est: BerEstimate) -> CurvePoint:
        lo, hi = est.ci
        return cls(float(x), est.p_hat, lo, hi, est.trials, est.errors)

    @classmethod
    def exact(cls, x: float, value: float) -> CurvePoint:
        return cls(float(x), float(value), float(value), float(value), 0, 0)


@dataclass
class MetricCurve:
    metric_id: str
    axis: str  # "snr_db" or "ebno_db"
    points: list[CurvePoint] = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.axis not in ("snr_db", "ebno_db"):
            raise ValueError(f"unknown axis {self.axis!r}")
        self.validate()

    def validate(self) -> None:
        xs = self.xs
        if len(xs) > 1 and not (np.diff(xs) > 0).all():
            raise ValueError("curve x values must be strictly increasing")
        vals = self.values
        if len(vals) and ((vals < 0).any() or (vals > 1).any()):
            raise ValueError("curve values must lie in [0, 1]")

    @property
    def xs(self) -> np.ndarray:
        return np.array([p.x for p in self.points], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points], dtype=float)

    def value_at(self, x: float) -> CurvePoint:
        for p in self.points:
            if math.isclose(p.x, x, abs_tol=1e-9):
                return p
        raise KeyError(f"no point at x={x}")

    def write_csv(self, path: Path | str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for p in self.points:
                w.writerow([f"{p.x:.6f}", repr(p.value), repr(p.ci_low), repr(p.ci_high), p.trials, p.events])

    @classmethod
    def read_csv(cls, path: Path | str, metric_id: str | None = None, axis: str = "snr_db") -> MetricCurve:
        pts = []
        with open(path, newline="") as fh:
            r = csv.DictReader(fh)
            missing = set(CSV_COLUMNS) - set(r.fieldnames or ())
            if missing:
                raise ValueError(f"{path}: missing columns {sorted(missing)}")
            for row in r:
                pts.append(CurvePoint(float(row["axis_db"]), float(row["value"]), float(row["ci_low"]),
                                      float(row["ci_high"]), int(row["trials"]), int(row["errors_or_events"])))
        return cls(metric_id or Path(path).stem, axis, pts)


# ------------------------------------------------------------ security gap

def curve_direction(xs: np.ndarray, values: np.ndarray) -> str:
    """'increasing' or 'decreasing', whichever isotonic fit leaves less residual."""
    up = isotonic_regression(values, increasing=True).x
    down = isotonic_regression(values, increasing=False).x
    return "increasing" if ((values - up) ** 2).sum() <= ((values - down) ** 2).sum() else "decreasing"


def _crossing(xs, ys, target, *, want_smallest: bool, meets) -> float:
    ok = meets(ys)
    if want_smallest:
        idx = np.nonzero(ok)[0]
        if idx.size == 0:
            raise ValueError(f"target {target} not reached within curve range")
        i = idx[0]
        if i == 0:
            if ys[0] == target:
                return float(xs[0])
            raise ValueError(f"target {target} already met at the first grid point; extend the grid")
        j = i - 1
    else:
        idx = np.nonzero(ok)[0]
        if idx.size == 0:
            raise ValueError(f"target {target} not reached within curve range")
        j = idx[-1]
        if j == len(xs) - 1:
            if ys[-1] == target:
                return float(xs[-1])
            raise ValueError(f"target {target} still met at the last grid point; extend the grid")
        i = j + 1
    x0, x1, y0, y1 = xs[j], xs[i], ys[j], ys[i]
    if y1 == y0:
        return float(x0)
    return float(x0 + (target - y0) * (x1 - x0) / (y1 - y0))


def reliability_point(curve: MetricCurve, target: float) -> float:
    """Smallest x at which the curve meets a reliability target.

    For a decreasing curve (BER) meeting means ``value <= target``; for an
    increasing one (BE-CDF) it means ``value >= target``.
    """
    xs, raw = curve.xs, curve.values
    inc = curve_direction(xs, raw) == "increasing"
    ys = isotonic_regression(raw, increasing=inc).x
    meets = (lambda v: v >= target) if inc else (lambda v: v <= target)
    return _crossing(xs, ys, target, want_smallest=True, meets=meets)


def security_point(curve: MetricCurve, target: float) -> float:
    """Largest x at which the curve still meets a security target."""
    xs, raw = curve.xs, curve.values
    inc = curve_direction(xs, raw) == "increasing"
    ys = isotonic_regression(raw, increasing=inc).x
    meets = (lambda v: v <= target) if inc else (lambda v: v >= target)
    return _crossing(xs, ys, target, want_smallest=False, meets=meets)


def security_gap(curve_main: MetricCurve, ber_target_bob: float, curve_eve: MetricCurve,
                 ber_target_eve: float) -> float:
    """Bob's required x minus Eve's maximum allowed x, in dB."""
    return reliability_point(curve_main, ber_target_bob) - security_point(curve_eve, ber_target_eve)
