"""Outer-code building blocks: a GF(2) matrix scrambler and a keyed interleaver."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from secmetrics.gf2 import as_bits, invert_matrix, mat_vec_mul, random_invertible_matrix


@dataclass(frozen=True, eq=False)
class Scrambler:
    S: np.ndarray
    S_inv: np.ndarray

    @classmethod
    def random(cls, k: int, rng: np.random.Generator) -> Scrambler:
        S = random_invertible_matrix(k, rng)
        return cls(S, invert_matrix(S))

    @property
    def k(self) -> int:
        return self.S.shape[0]


def scramble(s: Scrambler, msg) -> np.ndarray:
    return mat_vec_mul(s.S, msg)


def descramble(s: Scrambler, v) -> np.ndarray:
    return mat_vec_mul(s.S_inv, v)


def key_to_int(key) -> int:
    key = as_bits(key)
    if key.ndim != 1:
        raise ValueError("key must be a 1-D bit vector")
    out = 0
    for b in key:
        out = (out << 1) | int(b)
    return out


@njit(cache=True)
def _shuffle(raw, length):
    perm = np.arange(length)
    step = 0
    for i in range(length - 1, 0, -1):
        j = raw[step] % np.uint64(i + 1)
        step += 1
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    return perm


def _fisher_yates(seed: int, length: int) -> np.ndarray:
    # Philox is counter-based, so the raw stream is identical on every platform.
    raw = np.random.Philox(key=seed).random_raw(max(length - 1, 1))
    return _shuffle(raw, length)


@dataclass(frozen=True, eq=False)
class KeyedInterleaver:
    key: np.ndarray
    permutation: np.ndarray
    inverse_permutation: np.ndarray

    @property
    def length(self) -> int:
        return len(self.permutation)


def interleaver_from_key(key, length: int) -> KeyedInterleaver:
    """Permutation of ``range(length)`` determined entirely by ``key``."""
    key = as_bits(key)
    if length < 1:
        raise ValueError("length must be >= 1")
    perm = _fisher_yates(key_to_int(key), length)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(length)
    perm.flags.writeable = False
    inv.flags.writeable = False
    return KeyedInterleaver(key=key.copy(), permutation=perm, inverse_permutation=inv)


def identity_interleaver(length: int) -> KeyedInterleaver:
    perm = np.arange(length)
    return KeyedInterleaver(key=np.zeros(0, dtype=np.uint8), permutation=perm, inverse_permutation=perm.copy())


def interleave(il: KeyedInterleaver, msg) -> np.ndarray:
    msg = np.asarray(msg)
    if msg.shape[-1] != il.length:
        raise ValueError(f"length mismatch: {msg.shape[-1]} != {il.length}")
    return msg[..., il.permutation]


def deinterleave(il: KeyedInterleaver, v) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[-1] != il.length:
        raise ValueError(f"length mismatch: {v.shape[-1]} != {il.length}")
    return v[..., il.inverse_permutation]
