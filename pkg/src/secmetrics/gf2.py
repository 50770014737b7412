"""Arithmetic over GF(2) and its extension fields GF(2^m).

Bit vectors and bit matrices are plain ``numpy.uint8`` arrays holding 0/1.
Extension-field elements are Python ints in ``[0, 2^m)`` using the
polynomial basis, so bit ``i`` of an element is the coefficient of ``x^i``.
"""
from __future__ import annotations

import numpy as np

# x^7 + x^3 + 1 for m=7; the rest are the usual table entries.
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
}


class SingularMatrixError(ValueError):
    """Raised when a GF(2) matrix has no inverse."""


def as_bits(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.uint8)
    if a.size and a.max() > 1:
        raise ValueError("bit arrays may only contain 0 and 1")
    return a


def mat_vec_mul(m, v) -> np.ndarray:
    """Return ``m @ v`` over GF(2).

    ``v`` may also be a 2-D batch with one vector per row, in which case the
    result has one product per row.
    """
    m = as_bits(m)
    v = as_bits(v)
    if m.ndim != 2:
        raise ValueError("matrix must be 2-D")
    if v.shape[-1] != m.shape[1]:
        raise ValueError(f"dimension mismatch: matrix has {m.shape[1]} columns, vector has {v.shape[-1]} bits")
    # float BLAS is exact here: partial sums never exceed 2**24
    prod = v.astype(np.float64) @ m.T.astype(np.float64)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


def mat_mul(a, b) -> np.ndarray:
    a = as_bits(a)
    b = as_bits(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError("dimension mismatch")
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


def row_reduce(m) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the list of pivot columns."""
    a = as_bits(m).copy().astype(bool)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a.astype(np.uint8), pivots


def rank(m) -> int:
    return len(row_reduce(m)[1])


def invert_matrix(m) -> np.ndarray:
    """Inverse of a square GF(2) matrix by Gauss-Jordan elimination."""
    m = as_bits(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    k = m.shape[0]
    aug = np.concatenate([m, np.eye(k, dtype=np.uint8)], axis=1)
    red, pivots = row_reduce(aug)
    if pivots[:k] != list(range(k)):
        raise SingularMatrixError(f"matrix is singular (rank {sum(p < k for p in pivots)} < {k})")
    return red[:, k:].copy()


def random_invertible_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a uniformly random invertible ``dim x dim`` matrix by rejection."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    while True:
        m = rng.integers(0, 2, size=(dim, dim), dtype=np.uint8)
        if rank(m) == dim:
            return m


class ExtField:
    """GF(2^m) with log/antilog tables."""

    def __init__(self, m: int, primitive_poly: int | None = None):
        if primitive_poly is None:
            if m not in PRIMITIVE_POLYS:
                raise ValueError(f"no default primitive polynomial for m={m}")
            primitive_poly = PRIMITIVE_POLYS[m]
        if primitive_poly >> m != 1:
            raise ValueError("primitive polynomial must have degree m")
        self.m = m
        self.primitive_poly = primitive_poly
        self.order = (1 << m) - 1
        exp = np.zeros(2 * self.order, dtype=np.int64)
        log = np.full(1 << m, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            if log[x] != -1:
                raise ValueError(f"polynomial {primitive_poly:#b} is not primitive")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x >> m:
                x ^= primitive_poly
        if x != 1:
            raise ValueError(f"polynomial {primitive_poly:#b} is not primitive")
        exp[self.order:] = exp[: self.order]
        self.exp = exp
        self.log = log
        self.exp.flags.writeable = False
        self.log.flags.writeable = False

    def __repr__(self) -> str:
        return f"ExtField(m={self.m}, primitive_poly={self.primitive_poly:#b})"

    def alpha_pow(self, e: int) -> int:
        return int(self.exp[e % self.order])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.exp[(self.order - self.log[a]) % self.order])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp[(self.log[a] * e) % self.order])


def field_mul(f: ExtField, a: int, b: int) -> int:
    return f.mul(a, b)


def field_inv(f: ExtField, a: int) -> int:
    return f.inv(a)


# Binary polynomials as int bitmasks: bit i is the coefficient of x^i.

def poly_deg(p: int) -> int:
    return p.bit_length() - 1


def poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = poly_deg(b)
    while a and poly_deg(a) >= db:
        a ^= b << (poly_deg(a) - db)
    return a
