from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of decoding one block.

    ``corrected`` is the number of bit flips applied by a bounded-distance
    decoder; ``iterations`` is only meaningful for iterative decoders.
    ``llrs`` carries the final per-bit LLRs of soft decoders.
    """

    bits: np.ndarray
    success: bool
    corrected: int = 0
    iterations: int = 0
    llrs: np.ndarray | None = None

    @property
    def failure(self) -> bool:
        return not self.success
