"""Binary primitive narrow-sense BCH codes with Berlekamp-Massey decoding.

Bit ``i`` of a codeword array is the coefficient of ``x^(n-1-i)``. Encoding
is systematic: the ``k`` message bits come first, then the ``n-k`` bits of
``x^(n-k) m(x) mod g(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from secmetrics.codes.outcome import DecodeOutcome
from secmetrics.gf2 import ExtField, as_bits, poly_deg, poly_mod, poly_mul


def cyclotomic_coset(s: int, n: int) -> list[int]:
    coset = []
    x = s % n
    while x not in coset:
        coset.append(x)
        x = (2 * x) % n
    return coset


def minimal_polynomial(f: ExtField, s: int) -> int:
    """Minimal polynomial of alpha^s over GF(2), as a bitmask."""
    # product of (x + alpha^j) over the coset, coefficients in GF(2^m)
    coeffs = [1]
    for j in cyclotomic_coset(s, f.order):
        root = f.alpha_pow(j)
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] ^= c
            nxt[i] ^= f.mul(c, root)
        coeffs = nxt
    if any(c not in (0, 1) for c in coeffs):
        raise ArithmeticError("minimal polynomial has non-binary coefficients")
    return sum(c << i for i, c in enumerate(coeffs))


def _bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def _int_to_bits(x: int, width: int) -> np.ndarray:
    return np.array([(x >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class BchCode:
    m: int
    t: int
    field: ExtField
    generator_poly: int
    n: int
    k: int
    G: np.ndarray = field(repr=False)
    _syndrome_planes: np.ndarray = field(repr=False)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def encode(self, msg) -> np.ndarray:
        return bch_encode(self, msg)

    def decode(self, received) -> DecodeOutcome:
        return bch_decode(self, received)


def bch_construct(m: int, t: int, primitive_poly: int | None = None) -> BchCode:
    if not 2 <= m <= 10:
        raise ValueError("m must be in [2, 10]")
    if t < 1:
        raise ValueError("t must be >= 1")
    f = ExtField(m, primitive_poly)
    n = f.order
    g = 1
    seen: set[int] = set()
    for s in range(1, 2 * t + 1):
        if s % n in seen:
            continue
        seen.update(cyclotomic_coset(s, n))
        g = poly_mul(g, minimal_polynomial(f, s))
    k = n - poly_deg(g)
    if k <= 0:
        raise ValueError(f"t={t} too large for n={n}: code dimension would be {k}")

    G = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        shifted = 1 << (n - 1 - i)
        G[i] = _int_to_bits(shifted ^ poly_mod(shifted, g), n)

    # planes[b, j, i] = bit b of alpha^((j+1)(n-1-i)); syndromes then come
    # out of m binary matrix products.
    exps = np.outer(np.arange(1, 2 * t + 1), n - 1 - np.arange(n)) % n
    vals = f.exp[exps]
    planes = np.stack([(vals >> b) & 1 for b in range(m)]).astype(np.float64)
    return BchCode(m=m, t=t, field=f, generator_poly=g, n=n, k=k, G=G, _syndrome_planes=planes)


def bch_encode(code: BchCode, msg) -> np.ndarray:
    """Systematic encoding; accepts one message or a 2-D batch."""
    msg = as_bits(msg)
    if msg.shape[-1] != code.k:
        raise ValueError(f"message length {msg.shape[-1]} != k={code.k}")
    prod = msg.astype(np.float64) @ code.G.astype(np.float64)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


def syndromes(code: BchCode, received) -> np.ndarray:
    """S_1..S_2t for one word (shape (2t,)) or a batch (shape (B, 2t))."""
    r = as_bits(received).astype(np.float64)
    out = np.zeros(r.shape[:-1] + (2 * code.t,), dtype=np.int64)
    for b in range(code.m):
        par = (r @ code._syndrome_planes[b].T).astype(np.int64) & 1
        out |= par << b
    return out


def berlekamp_massey(f: ExtField, synd) -> list[int]:
    """Error-locator coefficients ``[1, L1, L2, ...]`` from syndromes S_1..S_2t."""
    S = [int(s) for s in synd]
    C = [1]
    B = [1]
    L = 0
    shift = 1
    b = 1
    for r in range(len(S)):
        d = S[r]
        for i in range(1, L + 1):
            if i < len(C):
                d ^= f.mul(C[i], S[r - i])
        if d == 0:
            shift += 1
            continue
        coef = f.div(d, b)
        new = C + [0] * max(0, len(B) + shift - len(C))
        for i, bi in enumerate(B):
            new[i + shift] ^= f.mul(coef, bi)
        if 2 * L <= r:
            B = C
            L = r + 1 - L
            b = d
            shift = 1
        else:
            shift += 1
        C = new
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    return C


def chien_search(code: BchCode, locator: list[int]) -> np.ndarray:
    """Bit indices ``i`` whose exponent ``n-1-i`` is an error location."""
    f = code.field
    n = code.n
    e = n - 1 - np.arange(n)
    acc = np.zeros(n, dtype=np.int64)
    for j, c in enumerate(locator):
        if c == 0:
            continue
        acc ^= f.exp[(f.log[c] - j * e) % n]
    return np.nonzero(acc == 0)[0]


def _decode_word(code: BchCode, r: np.ndarray, synd: np.ndarray) -> tuple[np.ndarray, bool, int]:
    if not synd.any():
        return r, True, 0
    locator = berlekamp_massey(code.field, synd)
    deg = len(locator) - 1
    if deg > code.t:
        return r, False, 0
    roots = chien_search(code, locator)
    if len(roots) != deg:
        return r, False, 0
    fixed = r.copy()
    fixed[roots] ^= 1
    return fixed, True, deg


def bch_decode(code: BchCode, received) -> DecodeOutcome:
    """Bounded-distance decoding of one received word.

    On failure the systematic part of the received word is returned
    unchanged. Patterns with more than ``t`` errors may also be miscorrected
    to another codeword; that case is reported as success.
    """
    r = as_bits(received)
    if r.shape != (code.n,):
        raise ValueError(f"received word must have length n={code.n}")
    word, ok, corrected = _decode_word(code, r, syndromes(code, r))
    return DecodeOutcome(bits=word[: code.k].copy(), success=ok, corrected=corrected)


def bch_decode_batch(code: BchCode, received) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decode a ``(B, n)`` batch; returns ``(messages, success, corrected)``."""
    r = as_bits(received)
    if r.ndim != 2 or r.shape[1] != code.n:
        raise ValueError(f"expected a (B, {code.n}) batch")
    synd = syndromes(code, r)
    msgs = r[:, : code.k].copy()
    success = np.ones(len(r), dtype=bool)
    corrected = np.zeros(len(r), dtype=np.int64)
    for i in np.nonzero(synd.any(axis=1))[0]:
        word, ok, c = _decode_word(code, r[i], synd[i])
        msgs[i] = word[: code.k]
        success[i] = ok
        corrected[i] = c
    return msgs, success, corrected
