"""How much a soft decoder's output LLRs still reveal about which bits are wrong.

``D(p || q)`` compares the LLR distribution of correctly decoded bits (p)
with that of erroneous bits (q), using smoothed histograms on shared bins.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import spearmanr

from secmetrics import sim

N_BINS = 101
COVERAGE = 0.999
SMOOTHING = 0.5
# below this many samples in either partition the smoothing pseudo-counts
# dominate the histogram and the divergence estimate is meaningless
MIN_PARTITION_SAMPLES = 1000


@dataclass(frozen=True)
class LlrPartition:
    correct_samples: np.ndarray
    error_samples: np.ndarray


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.counts.sum() * self.widths)


def partition_llrs(llrs, decoded_bits, true_bits) -> LlrPartition:
    llrs = np.asarray(llrs, dtype=float).ravel()
    dec = np.asarray(decoded_bits).ravel()
    tru = np.asarray(true_bits).ravel()
    if not llrs.shape == dec.shape == tru.shape:
        raise ValueError("llrs, decoded_bits and true_bits must have equal lengths")
    wrong = dec != tru
    return LlrPartition(llrs[~wrong], llrs[wrong])


def shared_edges(a, b, bins: int = N_BINS, coverage: float = COVERAGE) -> np.ndarray:
    """Uniform edges over the central ``coverage`` mass of the pooled samples."""
    pooled = np.concatenate([np.asarray(a, float).ravel(), np.asarray(b, float).ravel()])
    tail = (1 - coverage) / 2
    lo, hi = np.quantile(pooled, [tail, 1 - tail])
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, bins + 1)


def histogram(samples, edges, smoothing: float = SMOOTHING) -> Histogram:
    """Counts on ``edges`` (outliers folded into the end bins) plus additive smoothing."""
    x = np.clip(np.asarray(samples, float).ravel(), edges[0], edges[-1])
    counts, _ = np.histogram(x, bins=edges)
    return Histogram(np.asarray(edges, float), counts.astype(float) + smoothing)


def kl_divergence(p: Histogram, q: Histogram) -> float:
    """``sum p log2(p/q) dx`` over shared bins, in bits."""
    if p.bin_edges.shape != q.bin_edges.shape or not np.allclose(p.bin_edges, q.bin_edges):
        raise ValueError("histograms must share bin edges")
    pd, qd, w = p.density, q.density, p.widths
    mask = pd > 0
    if (qd[mask] <= 0).any():
        raise ValueError("q has empty bins where p has mass; smooth q first")
    return max(0.0, float(np.sum(pd[mask] * np.log2(pd[mask] / qd[mask]) * w[mask])))


def partition_divergence(part: LlrPartition, bins: int = N_BINS) -> float:
    if part.correct_samples.size == 0 or part.error_samples.size == 0:
        raise ValueError("both partitions must be nonempty")
    edges = shared_edges(part.correct_samples, part.error_samples, bins)
    return kl_divergence(histogram(part.correct_samples, edges), histogram(part.error_samples, edges))


@dataclass(frozen=True)
class KlPoint:
    x: float
    ber: float
    kl_bits: float
    n_correct: int
    n_error: int
    degenerate: bool = False


def collect_partition(scenario, snr_db: float, trials: int, seed: int) -> LlrPartition:
    correct, wrong = [], []
    for i, size in enumerate(sim.chunk_sizes(trials, 100)):
        rng = sim.chunk_rng(seed, snr_db, i, stream=0x4B4C)
        llr, bits, truth = scenario.soft_simulate(snr_db, size, rng)
        part = partition_llrs(llr, bits, truth)
        correct.append(part.correct_samples)
        wrong.append(part.error_samples)
    return LlrPartition(np.concatenate(correct), np.concatenate(wrong))


def kl_vs_ber_sweep(scenario, snr_grid, trials: int, seed: int, dump_dir: Path | None = None) -> list[KlPoint]:
    """One (post-decoder BER, divergence) point per SNR; ``trials`` is blocks per point.

    Points where either partition has fewer than ``MIN_PARTITION_SAMPLES``
    samples are kept with ``degenerate=True`` and a NaN divergence.
    """
    out = []
    for snr in snr_grid:
        part = collect_partition(scenario, float(snr), trials, seed)
        nc, ne = part.correct_samples.size, part.error_samples.size
        ber = ne / (nc + ne)
        if dump_dir is not None:
            dump_samples(Path(dump_dir), float(snr), part)
        if min(nc, ne) < MIN_PARTITION_SAMPLES:
            out.append(KlPoint(float(snr), ber, float("nan"), nc, ne, True))
        else:
            out.append(KlPoint(float(snr), ber, partition_divergence(part), nc, ne))
    return out


def trend_correlation(points: list[KlPoint]) -> float:
    """Spearman rank correlation between BER and divergence over valid points."""
    valid = [p for p in points if not p.degenerate]
    if len(valid) < 3:
        raise ValueError("need at least three non-degenerate points")
    return float(spearmanr([p.ber for p in valid], [p.kl_bits for p in valid]).statistic)


def dump_samples(directory: Path, snr_db: float, part: LlrPartition) -> tuple[Path, Path]:
    """Write raw samples as little-endian float64 files for external plotting."""
    directory.mkdir(parents=True, exist_ok=True)
    stem = f"llr_snr{snr_db:+.2f}"
    pc = directory / f"{stem}_correct.f64"
    pe = directory / f"{stem}_error.f64"
    part.correct_samples.astype("<f8").tofile(pc)
    part.error_samples.astype("<f8").tofile(pe)
    return pc, pe
