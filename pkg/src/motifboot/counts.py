"""Exact count functionals and Hoeffding local statistics.

For a graph on n vertices and an r-vertex motif, the count functional is
the fraction of r-subsets whose induced subgraph matches the motif.  The
local statistics are the rooted averages

    h1(i)   = average of H over subsets containing i,
    h2(i,j) = average of H over subsets containing both i and j,

together with the centered versions g1 = h1 - t_hat and
g2_tilde = h2 - t_hat, and the scale tau_hat^2 = mean(g1^2).

Closed-form kernels cover the catalog motifs (edge, twostar, triangle,
fourcycle); everything else goes through guarded subset enumeration,
which also serves as the verification oracle for the kernels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .graphs import Graph
from .motifs import Motif

MAX_BRUTEFORCE_SUBSETS = 5_000_000
MAX_PAIR_TABLE_N = 3000


@dataclass
class LocalStats:
    """Count density plus rooted/pair-rooted averages for one motif."""

    motif: Motif
    n: int
    t_hat: float
    h1: np.ndarray
    h2: Optional[np.ndarray] = None
    instances: Optional[list] = None
    provenance: str = "exact"
    tau_hat: float = field(init=False)

    def __post_init__(self):
        self.h1 = np.asarray(self.h1, dtype=float)
        g1 = self.h1 - self.t_hat
        self.tau_hat = float(np.sqrt(np.mean(g1 * g1)))

    @property
    def g1(self) -> np.ndarray:
        return self.h1 - self.t_hat

    @property
    def g2_tilde(self) -> np.ndarray:
        if self.h2 is None:
            raise ValueError("pairwise table was not computed")
        out = self.h2 - self.t_hat
        np.fill_diagonal(out, 0.0)
        return out

    def g2_hat_table(self) -> np.ndarray:
        """Fully centered pair statistic g2_tilde(i,j) - g1(i) - g1(j)."""
        g1 = self.g1
        out = self.g2_tilde - g1[:, None] - g1[None, :]
        np.fill_diagonal(out, 0.0)
        return out

    def sigma_hat(self) -> float:
        """Scale of sqrt(n)(T_hat - theta): r * tau_hat / sqrt(n)."""
        return self.motif.r * self.tau_hat / np.sqrt(self.n)


def g2_hat(stats: LocalStats, i: int, j: int) -> float:
    """Centered pair influence g2_tilde(i,j) - g1(i) - g1(j)."""
    if stats.h2 is None:
        raise ValueError("pairwise table was not computed")
    if i == j:
        raise ValueError("vertices must be distinct")
    g1 = stats.g1
    return float(stats.h2[i, j] - stats.t_hat - g1[i] - g1[j])


def _accept_masks(motif: Motif) -> frozenset:
    """Upper-triangle bitmasks of every relabeling of the pattern."""
    r = motif.r
    pat = motif.pattern
    pairs = list(itertools.combinations(range(r), 2))
    masks = set()
    for perm in itertools.permutations(range(r)):
        mask = 0
        for k, (a, b) in enumerate(pairs):
            if pat[perm[a], perm[b]]:
                mask |= 1 << k
        masks.add(mask)
    return frozenset(masks)


def count_bruteforce(graph: Graph, motif: Motif,
                     want_pairwise: bool = True,
                     want_instances: bool = False) -> LocalStats:
    """Exhaustive subset enumeration; the oracle for the fast kernels."""
    n, r = graph.n, motif.r
    if n <= r:
        raise ValueError(f"need n > r (n={n}, r={r})")
    n_subsets = comb(n, r)
    if n_subsets > MAX_BRUTEFORCE_SUBSETS:
        raise ValueError(
            f"C({n},{r}) = {n_subsets} exceeds the enumeration bound "
            f"{MAX_BRUTEFORCE_SUBSETS}")
    if want_pairwise and n > MAX_PAIR_TABLE_N:
        raise ValueError(
            f"pairwise table refused for n = {n} > {MAX_PAIR_TABLE_N}")

    # row bitsets make the per-subset induced-adjacency mask cheap
    rows = [int.from_bytes(np.packbits(graph.adjacency[i],
                                       bitorder="little").tobytes(), "little")
            for i in range(n)]
    accept = _accept_masks(motif)
    pairs = list(itertools.combinations(range(r), 2))

    vertex_counts = np.zeros(n, dtype=np.int64)
    pair_counts = np.zeros((n, n), dtype=np.int64) if want_pairwise else None
    instances = [] if want_instances else None
    total = 0
    for subset in itertools.combinations(range(n), r):
        mask = 0
        for k, (a, b) in enumerate(pairs):
            if (rows[subset[a]] >> subset[b]) & 1:
                mask |= 1 << k
        if mask in accept:
            total += 1
            for v in subset:
                vertex_counts[v] += 1
            if want_pairwise:
                for a, b in itertools.combinations(subset, 2):
                    pair_counts[a, b] += 1
                    pair_counts[b, a] += 1
            if want_instances:
                instances.append(subset)

    t_hat = total / n_subsets
    h1 = vertex_counts / comb(n - 1, r - 1)
    h2 = None
    if want_pairwise:
        h2 = pair_counts / comb(n - 2, r - 2)
    return LocalStats(motif=motif, n=n, t_hat=t_hat, h1=h1, h2=h2,
                      instances=instances, provenance="exact")


def _triangles_per_vertex(A: np.ndarray) -> np.ndarray:
    common = A @ A
    return (common * A).sum(axis=1) / 2.0


def _edge_kernel(A, n, want_pairwise):
    degrees = A.sum(axis=1)
    h1 = degrees / (n - 1)
    h2 = A.astype(float) if want_pairwise else None
    return h1, h2


def _twostar_kernel(A, n, want_pairwise):
    degrees = A.sum(axis=1)
    tri = _triangles_per_vertex(A)
    common = A @ A
    # as center: pairs of neighbors; as leaf: neighbor's other edges;
    # each triangle through i is over-counted three times
    as_center = degrees * (degrees - 1) / 2.0
    as_leaf = A @ degrees - degrees
    h1 = (as_center + as_leaf - 3.0 * tri) / comb(n - 1, 2)
    h2 = None
    if want_pairwise:
        d_sum = degrees[:, None] + degrees[None, :]
        h2 = np.where(A, d_sum - 2.0 - 2.0 * common, common) / (n - 2)
        np.fill_diagonal(h2, 0.0)
    return h1, h2


def _triangle_kernel(A, n, want_pairwise):
    common = A @ A
    h1 = (common * A).sum(axis=1) / 2.0 / comb(n - 1, 2)
    h2 = None
    if want_pairwise:
        h2 = np.where(A, common, 0.0) / (n - 2)
        np.fill_diagonal(h2, 0.0)
    return h1, h2


def _k4_per_vertex(A: np.ndarray) -> np.ndarray:
    """Number of 4-cliques containing each vertex (neighborhood triangles)."""
    n = A.shape[0]
    out = np.zeros(n)
    for i in range(n):
        nb = np.flatnonzero(A[i])
        if len(nb) < 3:
            continue
        sub = A[np.ix_(nb, nb)].astype(float)
        out[i] = ((sub @ sub) * sub).sum() / 6.0
    return out


def _fourcycle_h1(A: np.ndarray) -> np.ndarray:
    """Induced 4-cycles containing each vertex, normalized by C(n-1,3).

    Subsets carrying a (not necessarily induced) 4-cycle split by chord
    count: chordless (wanted), one chord (induced diamond, holds exactly
    one 4-cycle), two chords (4-clique, holds three).  Count all 4-cycle
    subgraphs through i, then subtract the diamond and clique subsets.
    """
    n = A.shape[0]
    Af = A.astype(float)
    common = Af @ Af
    choose2 = common * (common - 1) / 2.0

    # 4-cycle subgraphs through i, keyed by the opposite vertex
    cycles = choose2.sum(axis=1) - choose2.diagonal()

    k4 = _k4_per_vertex(A)

    # diamond subgraphs with i on the chord / i off the chord; each
    # 4-clique subset carries three of each kind
    chord_at_i = (choose2 * Af).sum(axis=1)
    M = Af * (common - 1)
    off_chord = (Af @ M @ Af).diagonal() / 2.0
    diamonds = (chord_at_i - 3.0 * k4) + (off_chord - 3.0 * k4)

    induced = cycles - diamonds - 3.0 * k4
    return induced / comb(n - 1, 3)


def count_exact(graph: Graph, motif: Motif,
                want_pairwise: bool = True,
                want_instances: bool = False) -> LocalStats:
    """Count density and local statistics via specialized kernels.

    Catalog motifs use closed-form counting; any other motif, and the
    four-cycle pairwise table or instance lists, fall back to guarded
    enumeration with identical results.
    """
    n, r = graph.n, motif.r
    if n <= r:
        raise ValueError(f"need n > r (n={n}, r={r})")
    if want_pairwise and n > MAX_PAIR_TABLE_N:
        raise ValueError(
            f"pairwise table refused for n = {n} > {MAX_PAIR_TABLE_N}")

    A = graph.adjacency.astype(np.int64)
    name = motif.name
    if name == "edge":
        h1, h2 = _edge_kernel(A, n, want_pairwise)
    elif name == "twostar":
        h1, h2 = _twostar_kernel(A, n, want_pairwise)
    elif name == "triangle":
        h1, h2 = _triangle_kernel(A, n, want_pairwise)
    elif name == "fourcycle":
        h1 = _fourcycle_h1(A)
        h2 = None
        if want_pairwise:
            h2 = count_bruteforce(graph, motif, want_pairwise=True).h2
    else:
        return count_bruteforce(graph, motif, want_pairwise=want_pairwise,
                                want_instances=want_instances)

    instances = None
    if want_instances:
        instances = count_bruteforce(graph, motif, want_pairwise=False,
                                     want_instances=True).instances
    # recover the integer instance total so t_hat is bit-identical to the
    # enumeration oracle (h1 entries are exact multiples of 1/C(n-1,r-1))
    total = int(round(float(h1.sum()) * comb(n - 1, r - 1) / r))
    t_hat = total / comb(n, r)
    return LocalStats(motif=motif, n=n, t_hat=t_hat, h1=h1, h2=h2,
                      instances=instances, provenance="exact")
