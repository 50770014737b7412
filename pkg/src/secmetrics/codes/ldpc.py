"""LDPC codes: fixture loading, systematic encoding, sum-product decoding.

The fixture file lists one check node per line as whitespace-separated
0-based variable indices; lines starting with ``#`` are comments. Its column
order puts an invertible parity block in the last ``n-k`` columns, so the
message occupies codeword positions ``0..k-1``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from numba import njit

from secmetrics.codes.outcome import DecodeOutcome
from secmetrics.codes.peg import adjacency_to_dense, peg
from secmetrics.gf2 import as_bits, invert_matrix, mat_mul, mat_vec_mul, row_reduce

FIXTURE_NAME = "ldpc_1056_880.txt"
FIXTURE_SEED = 20160101
LLR_CLAMP = 25.0
DEFAULT_MAX_ITERS = 50


class FixtureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LdpcCode:
    n: int
    k: int
    check_adj: tuple[tuple[int, ...], ...] = field(repr=False)
    H: np.ndarray = field(repr=False)
    parity_map: np.ndarray = field(repr=False)  # (n-k, k): parity = parity_map @ msg
    # flattened Tanner graph for the decoder kernel
    check_ptr: np.ndarray = field(repr=False)
    edge_var: np.ndarray = field(repr=False)
    var_ptr: np.ndarray = field(repr=False)
    var_edge: np.ndarray = field(repr=False)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def G(self) -> np.ndarray:
        """Systematic generator ``[I_k | P^T]``."""
        return np.concatenate([np.eye(self.k, dtype=np.uint8), self.parity_map.T], axis=1)

    def encode(self, msg) -> np.ndarray:
        return ldpc_encode(self, msg)

    def decode(self, llrs, max_iters: int = DEFAULT_MAX_ITERS) -> DecodeOutcome:
        return ldpc_decode(self, llrs, max_iters)


def from_check_adjacency(check_adj, n: int) -> LdpcCode:
    check_adj = tuple(tuple(int(v) for v in row) for row in check_adj)
    H = adjacency_to_dense(check_adj, n)
    r = H.shape[0]
    k = n - r
    B = H[:, k:]
    try:
        B_inv = invert_matrix(B)
    except ValueError as exc:
        raise FixtureError("last n-k columns of H are not invertible") from exc
    parity_map = mat_mul(B_inv, H[:, :k])

    degs = np.array([len(row) for row in check_adj])
    check_ptr = np.concatenate([[0], np.cumsum(degs)]).astype(np.int64)
    edge_var = np.array([v for row in check_adj for v in row], dtype=np.int64)
    order = np.argsort(edge_var, kind="stable")
    var_deg = np.bincount(edge_var, minlength=n)
    var_ptr = np.concatenate([[0], np.cumsum(var_deg)]).astype(np.int64)
    return LdpcCode(
        n=n, k=k, check_adj=check_adj, H=H, parity_map=parity_map,
        check_ptr=check_ptr, edge_var=edge_var, var_ptr=var_ptr, var_edge=order.astype(np.int64),
    )


def parse_fixture(text: str) -> tuple[list[list[int]], int]:
    rows: list[list[int]] = []
    n = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split("=")
            if len(parts) == 2 and parts[0].strip() == "n":
                n = int(parts[1])
            continue
        try:
            rows.append([int(x) for x in line.split()])
        except ValueError as exc:
            raise FixtureError(f"bad fixture line: {line!r}") from exc
    if n is None:
        raise FixtureError("fixture header lacks '# n = ...'")
    if not rows or any(not 0 <= v < n for row in rows for v in row):
        raise FixtureError("fixture has no checks or out-of-range variable indices")
    return rows, n


def fixture_path() -> Path:
    return Path(str(resources.files("secmetrics.codes") / "data" / FIXTURE_NAME))


def fixture_digest(path: Path | None = None) -> str:
    path = path or fixture_path()
    return hashlib.sha256(path.read_bytes()).hexdigest()


def ldpc_construct_fixture(path: Path | str | None = None) -> LdpcCode:
    path = Path(path) if path is not None else fixture_path()
    try:
        text = path.read_text()
    except OSError as exc:
        raise FixtureError(f"cannot read LDPC fixture {path}: {exc}") from exc
    rows, n = parse_fixture(text)
    code = from_check_adjacency(rows, n)
    col_w = code.H.sum(axis=0)
    if not (col_w == 3).all():
        raise FixtureError("fixture column weights are not all 3")
    return code


def generate_fixture_text(n: int = 1056, k: int = 880, seed: int = FIXTURE_SEED) -> str:
    """Build the PEG matrix and reorder columns so H = [A | B] with B invertible."""
    rng = np.random.default_rng(seed)
    adj = peg(n, n - k, 3, rng)
    H = adjacency_to_dense(adj, n)
    _, pivots = row_reduce(H)
    if len(pivots) != n - k:
        raise FixtureError(f"PEG matrix has rank {len(pivots)} < {n - k}")
    pivot_set = set(pivots)
    order = [c for c in range(n) if c not in pivot_set] + pivots
    new_index = {old: new for new, old in enumerate(order)}
    lines = [
        f"# LDPC({n},{k}) parity-check matrix, PEG, column weight 3, seed {seed}",
        "# one check per line: 0-based variable indices; message bits are 0..k-1",
        f"# n = {n}",
    ]
    for row in adj:
        lines.append(" ".join(str(v) for v in sorted(new_index[c] for c in row)))
    return "\n".join(lines) + "\n"


def ldpc_encode(code: LdpcCode, msg) -> np.ndarray:
    """Systematic encoding ``[msg | parity]``; accepts a 2-D batch."""
    msg = as_bits(msg)
    if msg.shape[-1] != code.k:
        raise ValueError(f"message length {msg.shape[-1]} != k={code.k}")
    parity = mat_vec_mul(code.parity_map, msg)
    return np.concatenate([msg, parity], axis=-1)


@njit(cache=True, fastmath=True)
def _decode_one(llr, check_ptr, edge_var, var_ptr, var_edge, max_iters, clamp, out_llr, out_bits, v2c, c2v, tbuf, fwd):
    n = llr.size
    n_checks = check_ptr.size - 1
    for e in range(edge_var.size):
        x = llr[edge_var[e]]
        v2c[e] = min(max(x, -clamp), clamp)
        c2v[e] = 0.0
    for it in range(1, max_iters + 1):
        # check nodes: tanh rule, extrinsic products via prefix/suffix
        for c in range(n_checks):
            s = check_ptr[c]
            d = check_ptr[c + 1] - s
            acc = 1.0
            for i in range(d):
                t = np.tanh(0.5 * v2c[s + i])
                tbuf[i] = t
                fwd[i] = acc
                acc *= t
            acc = 1.0
            for i in range(d - 1, -1, -1):
                ext = fwd[i] * acc
                acc *= tbuf[i]
                if ext > 0.999999999999:
                    ext = 0.999999999999
                elif ext < -0.999999999999:
                    ext = -0.999999999999
                c2v[s + i] = 2.0 * np.arctanh(ext)
        # variable nodes and tentative decision; an exact-zero LLR is an erasure
        for v in range(n):
            total = llr[v]
            for j in range(var_ptr[v], var_ptr[v + 1]):
                total += c2v[var_edge[j]]
            out_llr[v] = total
            out_bits[v] = 1 if total < 0.0 else 0
            for j in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge[j]
                x = total - c2v[e]
                v2c[e] = min(max(x, -clamp), clamp)
        ok = True
        for c in range(n_checks):
            par = 0
            for e in range(check_ptr[c], check_ptr[c + 1]):
                v = edge_var[e]
                if out_llr[v] == 0.0:
                    par = 1
                    break
                par ^= out_bits[v]
            if par:
                ok = False
                break
        if ok:
            return it, True
    return max_iters, False


@njit(cache=True, fastmath=True)
def _decode_batch(llrs, check_ptr, edge_var, var_ptr, var_edge, max_iters, clamp, out_llr, out_bits, iters, success):
    n_edges = edge_var.size
    v2c = np.empty(n_edges)
    c2v = np.empty(n_edges)
    max_deg = 0
    for c in range(check_ptr.size - 1):
        max_deg = max(max_deg, check_ptr[c + 1] - check_ptr[c])
    tbuf = np.empty(max_deg)
    fwd = np.empty(max_deg)
    for b in range(llrs.shape[0]):
        it, ok = _decode_one(llrs[b], check_ptr, edge_var, var_ptr, var_edge, max_iters, clamp,
                             out_llr[b], out_bits[b], v2c, c2v, tbuf, fwd)
        iters[b] = it
        success[b] = ok


def ldpc_decode_batch(code: LdpcCode, llrs, max_iters: int = DEFAULT_MAX_ITERS):
    """Sum-product decoding of a ``(B, n)`` LLR batch.

    Returns ``(codeword_bits, final_llrs, iterations, success)``. Positive
    LLRs favour bit 0. Decoding stops per block once every check is met.
    """
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    if llrs.ndim != 2 or llrs.shape[1] != code.n:
        raise ValueError(f"expected a (B, {code.n}) LLR batch")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if not np.isfinite(llrs).all():
        raise ValueError("LLRs must be finite")
    B = llrs.shape[0]
    out_llr = np.empty((B, code.n))
    out_bits = np.empty((B, code.n), dtype=np.uint8)
    iters = np.empty(B, dtype=np.int64)
    success = np.empty(B, dtype=np.bool_)
    _decode_batch(llrs, code.check_ptr, code.edge_var, code.var_ptr, code.var_edge,
                  int(max_iters), LLR_CLAMP, out_llr, out_bits, iters, success)
    return out_bits, out_llr, iters, success


def ldpc_decode(code: LdpcCode, llrs, max_iters: int = DEFAULT_MAX_ITERS) -> DecodeOutcome:
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape != (code.n,):
        raise ValueError(f"LLR vector must have length n={code.n}")
    bits, out, iters, ok = ldpc_decode_batch(code, llrs[None, :], max_iters)
    return DecodeOutcome(bits=bits[0, : code.k].copy(), success=bool(ok[0]),
                         iterations=int(iters[0]), llrs=out[0])
