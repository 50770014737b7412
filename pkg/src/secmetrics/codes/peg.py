"""Progressive edge growth (PEG) construction of LDPC parity-check matrices.

Used once to generate the committed LDPC(1056, 880) fixture; kept here so
the fixture can be regenerated and audited.
"""
from __future__ import annotations

import numpy as np


def peg(n_vars: int, n_checks: int, var_degree: int, rng: np.random.Generator) -> list[list[int]]:
    """Return the check-node adjacency lists of a PEG Tanner graph.

    Each variable gets ``var_degree`` edges. Every new edge goes to the
    lowest-degree check at maximum graph distance from the variable, which
    keeps local girth as large as possible.
    """
    check_adj: list[list[int]] = [[] for _ in range(n_checks)]
    var_adj: list[list[int]] = [[] for _ in range(n_vars)]
    check_deg = np.zeros(n_checks, dtype=np.int64)

    def pick(candidates: np.ndarray) -> int:
        degs = check_deg[candidates]
        best = candidates[degs == degs.min()]
        return int(rng.choice(best))

    for v in range(n_vars):
        for e in range(var_degree):
            if e == 0:
                c = pick(np.arange(n_checks))
            else:
                reached = np.zeros(n_checks, dtype=bool)
                frontier_vars = {v}
                seen_vars = {v}
                prev_count = -1
                while True:
                    new_checks = set()
                    for u in frontier_vars:
                        for cc in var_adj[u]:
                            if not reached[cc]:
                                new_checks.add(cc)
                    snapshot = reached.copy()
                    for cc in new_checks:
                        reached[cc] = True
                    count = int(reached.sum())
                    if count == n_checks or count == prev_count:
                        # tree saturated or stalled: use the last layer that left checks unreached
                        if count == n_checks:
                            reached = snapshot
                        break
                    prev_count = count
                    frontier_vars = set()
                    for cc in new_checks:
                        for u in check_adj[cc]:
                            if u not in seen_vars:
                                seen_vars.add(u)
                                frontier_vars.add(u)
                candidates = np.nonzero(~reached)[0]
                if candidates.size == 0:
                    candidates = np.array([c for c in range(n_checks) if c not in var_adj[v]])
                c = pick(candidates)
            check_adj[c].append(v)
            var_adj[v].append(c)
            check_deg[c] += 1
    return [sorted(a) for a in check_adj]


def adjacency_to_dense(check_adj: list[list[int]], n_vars: int) -> np.ndarray:
    H = np.zeros((len(check_adj), n_vars), dtype=np.uint8)
    for c, vs in enumerate(check_adj):
        H[c, vs] = 1
    return H


def has_four_cycle(H: np.ndarray) -> bool:
    overlap = H.astype(np.int64).T @ H.astype(np.int64)
    np.fill_diagonal(overlap, 0)
    return bool((overlap > 1).any())
