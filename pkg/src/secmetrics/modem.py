"""BPSK and differential PSK modems, plus SNR / Eb/N0 bookkeeping.

Symbols have unit energy. For BPSK the channel SNR is the energy per
transmitted (coded) bit over N0, and SNR = R * Eb/N0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from secmetrics.gf2 import as_bits


@dataclass(frozen=True)
class ModScheme:
    kind: str = "bpsk"
    order: int = 2

    def __post_init__(self):
        if self.kind not in ("bpsk", "dpsk"):
            raise ValueError(f"unknown modulation {self.kind!r}")
        if self.kind == "bpsk" and self.order != 2:
            raise ValueError("BPSK has order 2")
        if self.kind == "dpsk" and self.order not in (2, 4):
            raise ValueError("DPSK order must be 2 or 4")

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.order))


def _check_rate(rate: float) -> None:
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")


def ebno_to_snr(ebno_db, rate: float):
    _check_rate(rate)
    return ebno_db + 10 * math.log10(rate)


def snr_to_ebno(snr_db, rate: float):
    _check_rate(rate)
    return snr_db - 10 * math.log10(rate)


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def bpsk_modulate(bits) -> np.ndarray:
    """0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * as_bits(bits)


def bpsk_hard(received) -> np.ndarray:
    return (np.asarray(received) < 0).astype(np.uint8)


def bpsk_llr(received, noise_var) -> np.ndarray:
    """Channel LLRs ``2 y / sigma^2``; positive favours bit 0.

    ``noise_var`` may be a scalar or broadcastable per-symbol variances.
    """
    nv = np.asarray(noise_var, dtype=float)
    if (nv <= 0).any():
        raise ValueError("noise variance must be positive")
    return 2.0 * np.asarray(received, dtype=float) / nv


# Gray map for DQPSK: dibit -> phase increment in quarter turns
_GRAY4_TO_QUARTERS = np.array([0, 1, 3, 2])  # index = 2*b0 + b1
_QUARTERS_TO_BITS = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)


def dpsk_modulate(bits, order: int = 2) -> np.ndarray:
    """Differentially encoded unit-energy PSK with a leading reference symbol.

    Works on the last axis, so a ``(B, nbits)`` batch gives ``(B, nsym + 1)``.
    """
    bits = as_bits(bits)
    if order == 2:
        steps = bits.astype(np.int64) * 2  # half turns as quarter turns
    elif order == 4:
        if bits.shape[-1] % 2:
            raise ValueError("DQPSK needs an even number of bits")
        pairs = bits.reshape(bits.shape[:-1] + (-1, 2)).astype(np.int64)
        steps = _GRAY4_TO_QUARTERS[2 * pairs[..., 0] + pairs[..., 1]]
    else:
        raise ValueError("DPSK order must be 2 or 4")
    ref = np.zeros(steps.shape[:-1] + (1,), dtype=np.int64)
    phase = np.cumsum(np.concatenate([ref, steps], axis=-1), axis=-1) % 4
    return np.exp(0.5j * np.pi * phase)


def dpsk_demodulate(received, order: int = 2) -> np.ndarray:
    """Non-coherent differential detection from consecutive symbol pairs."""
    y = np.asarray(received, dtype=complex)
    d = y[..., 1:] * np.conj(y[..., :-1])
    if order == 2:
        return (d.real < 0).astype(np.uint8)
    if order == 4:
        quarters = np.rint(np.angle(d) / (0.5 * np.pi)).astype(np.int64) % 4
        bits = _QUARTERS_TO_BITS[quarters]
        return bits.reshape(bits.shape[:-2] + (-1,))
    raise ValueError("DPSK order must be 2 or 4")


def dbpsk_ber(ebno_linear):
    """Closed-form binary DPSK bit error rate, ``exp(-Eb/N0) / 2``."""
    return 0.5 * np.exp(-np.asarray(ebno_linear, dtype=float))
