"""Deterministic Monte Carlo plumbing.

Blocks are simulated in fixed-size chunks. Each chunk draws from its own
Philox stream keyed by ``(seed, stream, SNR, chunk index)``, so results do
not depend on how many workers run the chunks or in which order.
"""
from __future__ import annotations

from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

CHUNK_BLOCKS = 500


@dataclass
class BlockResult:
    """Per-block error counts from one scenario run.

    ``pre_errors`` counts errors over ``pre_len`` bits at the input of the
    outer (secrecy) decoder; ``post_errors`` counts errors over ``post_len``
    message bits at its output.
    """

    pre_errors: np.ndarray
    post_errors: np.ndarray
    pre_len: int
    post_len: int
    extra: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_blocks(self) -> int:
        return len(self.pre_errors)

    @classmethod
    def concat(cls, parts: list[BlockResult]) -> BlockResult:
        first = parts[0]
        return cls(
            pre_errors=np.concatenate([p.pre_errors for p in parts]),
            post_errors=np.concatenate([p.post_errors for p in parts]),
            pre_len=first.pre_len,
            post_len=first.post_len,
            extra={k: np.concatenate([p.extra[k] for p in parts]) for k in first.extra},
        )


def _point_key(snr_db: float) -> int:
    return int(round(snr_db * 1e6)) & 0xFFFFFFFFFFFF


def chunk_rng(seed: int, snr_db: float, chunk: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), _point_key(snr_db), int(chunk)))
    return np.random.Generator(np.random.Philox(ss))


def chunk_sizes(n_blocks: int, chunk: int = CHUNK_BLOCKS) -> list[int]:
    full, rest = divmod(n_blocks, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _run_chunk(args) -> BlockResult:
    scenario, snr_db, size, seed, stream, idx = args
    return scenario.simulate(snr_db, size, chunk_rng(seed, snr_db, idx, stream))


def make_executor(workers: int) -> Executor | None:
    return ProcessPoolExecutor(max_workers=workers) if workers > 1 else None


def simulate(scenario, snr_db: float, n_blocks: int, seed: int, *, stream: int = 0,
             executor: Executor | None = None) -> BlockResult:
    if n_blocks < 1:
        raise ValueError("need at least one block")
    tasks = [(scenario, float(snr_db), size, seed, stream, i) for i, size in enumerate(chunk_sizes(n_blocks))]
    if executor is None:
        parts = [_run_chunk(t) for t in tasks]
    else:
        parts = list(executor.map(_run_chunk, tasks))
    return BlockResult.concat(parts)
