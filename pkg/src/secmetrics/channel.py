"""AWGN wiretap channel with friendly jamming on selected symbols.

Jamming is modelled as extra white Gaussian noise whose power is a fraction
``alpha`` of the (unit) signal power, i.e. variance ``alpha / 2`` per real
dimension, the same convention as thermal noise ``N0 / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AwgnChannel:
    snr_linear: float

    def __post_init__(self):
        if not self.snr_linear > 0:
            raise ValueError("snr_linear must be positive")

    @classmethod
    def from_db(cls, snr_db: float) -> AwgnChannel:
        return cls(10.0 ** (snr_db / 10.0))

    @property
    def noise_var(self) -> float:
        """Noise variance per real dimension for unit-energy symbols."""
        return 1.0 / (2.0 * self.snr_linear)


@dataclass(frozen=True)
class JammingProfile:
    alpha: float = 0.0
    jammed_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        object.__setattr__(self, "jammed_indices", np.asarray(self.jammed_indices, dtype=np.int64))

    @classmethod
    def none(cls) -> JammingProfile:
        return cls()


def effective_noise_var(ch: AwgnChannel, alpha: float) -> float:
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return ch.noise_var + alpha / 2.0


def noise_var_profile(ch: AwgnChannel, jam: JammingProfile, n: int) -> np.ndarray:
    """Per-symbol noise variance seen by a receiver that knows the jammed set."""
    v = np.full(n, ch.noise_var)
    if jam.jammed_indices.size:
        v[jam.jammed_indices] = effective_noise_var(ch, jam.alpha)
    return v


def transmit(ch: AwgnChannel, symbols, jam: JammingProfile | None, rng: np.random.Generator) -> np.ndarray:
    """Pass real or complex symbols (last axis = time) through the channel."""
    x = np.asarray(symbols)
    jam = jam or JammingProfile.none()
    n = x.shape[-1]
    idx = jam.jammed_indices
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError("jammed index outside the frame")
    std = np.sqrt(noise_var_profile(ch, jam, n))
    if np.iscomplexobj(x):
        noise = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    else:
        noise = rng.standard_normal(x.shape)
    return x + noise * std
