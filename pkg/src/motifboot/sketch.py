"""Randomized approximation of the rooted averages h1.

The permutation-partition sketch replaces, for each vertex i, the exact
average over all subsets containing i by an average over N random
permutations of the remaining vertices: each permutation is cut into
disjoint (r-1)-blocks and the motif indicator is evaluated on vertex i
together with each block.  Every block is marginally a uniform
(r-1)-subset, so the block average is an unbiased estimate of h1(i);
leftover vertices past the last complete block are discarded.

A with-replacement subset baseline with the same evaluation budget is
provided for timing comparisons.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .counts import LocalStats, _accept_masks
from .graphs import Graph
from .motifs import Motif

PERMUTATION_PARTITION = "permutation_partition"
SUBSET_REPLACEMENT = "subset_replacement"


def default_n_perms(n: int) -> int:
    """The 50*log(n) permutation budget used throughout the experiments."""
    return math.ceil(50.0 * math.log(n))


@dataclass(frozen=True)
class SketchPlan:
    n_perms: int
    seed: int
    strategy: str = PERMUTATION_PARTITION

    def __post_init__(self):
        if self.n_perms < 1:
            raise ValueError("need at least one permutation")
        if self.strategy not in (PERMUTATION_PARTITION, SUBSET_REPLACEMENT):
            raise ValueError(f"unknown strategy {self.strategy!r}")

    def blocks_per_pass(self, n: int, r: int) -> int:
        return (n - 1) // (r - 1)

    def work_budget(self, n: int, r: int) -> int:
        """Motif-indicator evaluations performed, either strategy."""
        return n * self.n_perms * self.blocks_per_pass(n, r)

    def leftovers(self, n: int, r: int) -> int:
        """Vertex slots per (vertex, permutation) that never contribute."""
        return (n - 1) - self.blocks_per_pass(n, r) * (r - 1)


def _accept_lut(motif: Motif) -> np.ndarray:
    n_pairs = motif.r * (motif.r - 1) // 2
    lut = np.zeros(1 << n_pairs, dtype=bool)
    lut[list(_accept_masks(motif))] = True
    return lut


def _block_indicator_mean(A8: np.ndarray, i: int, blocks: np.ndarray,
                          motif: Motif, lut: np.ndarray) -> float:
    """Mean induced-match indicator over subsets {i} + each block row."""
    r = motif.r
    pairs = list(itertools.combinations(range(r), 2))
    mask = np.zeros(blocks.shape[:-1], dtype=np.uint32)
    for k, (a, b) in enumerate(pairs):
        if a == 0:
            bit = A8[i][blocks[..., b - 1]]
        else:
            bit = A8[blocks[..., a - 1], blocks[..., b - 1]]
        mask |= bit.astype(np.uint32) << k
    return float(lut[mask].mean())


def _finish(graph, motif, plan, h1, provenance="sketched"):
    h1 = np.asarray(h1)
    return LocalStats(motif=motif, n=graph.n, t_hat=float(h1.mean()),
                      h1=h1, h2=None, provenance=provenance)


def sketch_local(graph: Graph, motif: Motif, plan: SketchPlan) -> LocalStats:
    """Permutation-partition estimate of h1 for every vertex.

    Deterministic given (plan.seed, graph): vertex i's permutations come
    from the substream keyed by (seed, i), so any parallel schedule over
    vertices reproduces the same numbers.
    """
    n, r = graph.n, motif.r
    if n <= r:
        raise ValueError(f"need n > r (n={n}, r={r})")
    A8 = graph.adjacency.astype(np.uint8)
    if r == 2:
        # blocks have size 1, so each permutation already averages the
        # indicator over every other vertex: the sketch is exact
        return _finish(graph, motif, plan,
                       _exact_pairs_h1(A8, motif))
    lut = _accept_lut(motif)
    nb = plan.blocks_per_pass(n, r)
    used = nb * (r - 1)
    h1 = np.empty(n)
    base = np.arange(n, dtype=np.int64)
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence([plan.seed, i]))
        others = np.delete(base, i)
        perms = np.tile(others, (plan.n_perms, 1))
        rng.permuted(perms, axis=1, out=perms)
        blocks = perms[:, :used].reshape(plan.n_perms, nb, r - 1)
        h1[i] = _block_indicator_mean(A8, i, blocks, motif, lut)
    return _finish(graph, motif, plan, h1)


def _exact_pairs_h1(A8: np.ndarray, motif: Motif) -> np.ndarray:
    n = A8.shape[0]
    counts = A8.sum(axis=1).astype(float)
    if motif.s == 0:  # the two-vertex non-edge pattern
        counts = (n - 1) - counts
    return counts / (n - 1)


def sketch_subset_baseline(graph: Graph, motif: Motif,
                           plan: SketchPlan) -> LocalStats:
    """Same estimand with independently drawn (r-1)-subsets.

    Per vertex, draws n_perms * floor((n-1)/(r-1)) uniform subsets with
    replacement — the same indicator-evaluation budget as sketch_local —
    but pays for full subset sampling instead of partitioned shuffles.
    """
    n, r = graph.n, motif.r
    if n <= r:
        raise ValueError(f"need n > r (n={n}, r={r})")
    A8 = graph.adjacency.astype(np.uint8)
    lut = _accept_lut(motif)
    m = plan.n_perms * plan.blocks_per_pass(n, r)
    h1 = np.empty(n)
    base = np.arange(n, dtype=np.int64)
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence([plan.seed, i]))
        others = np.delete(base, i)
        if r == 2:
            blocks = others[rng.integers(0, n - 1, size=(m, 1))]
        else:
            keys = rng.random((m, n - 1))
            picks = np.argpartition(keys, r - 2, axis=1)[:, :r - 1]
            blocks = others[picks]
        h1[i] = _block_indicator_mean(A8, i, blocks, motif, lut)
    return _finish(graph, motif, plan, h1)
