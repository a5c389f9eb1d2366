"""Motif patterns, induced-isomorphism testing, and rate classification.

A motif is a small simple graph given by its symmetric 0/1 adjacency
matrix.  All count statistics in this package are built from the induced
indicator: a vertex subset matches the motif iff some relabeling of the
*full* induced adjacency (edges and non-edges) equals the pattern.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

MAX_MOTIF_VERTICES = 8

ACYCLIC = "acyclic"
SIMPLE_CYCLE = "simple_cycle"
GENERAL_CYCLIC = "general_cyclic"


@dataclass(frozen=True)
class Motif:
    """An r-vertex pattern graph with s edges.

    Parameters
    ----------
    pattern : array_like
        Symmetric boolean r x r adjacency with zero diagonal, r <= 8.
    name : str, optional
        Display name; defaults to ``custom``.
    """

    pattern: np.ndarray
    name: str = "custom"
    r: int = field(init=False)
    s: int = field(init=False)
    shape: str = field(init=False)

    def __post_init__(self):
        pat = np.asarray(self.pattern, dtype=bool)
        if pat.ndim != 2 or pat.shape[0] != pat.shape[1]:
            raise ValueError("motif pattern must be a square matrix")
        r = pat.shape[0]
        if r < 2 or r > MAX_MOTIF_VERTICES:
            raise ValueError(f"motif must have between 2 and {MAX_MOTIF_VERTICES} vertices")
        if pat.diagonal().any():
            raise ValueError("motif pattern must have an empty diagonal")
        if not np.array_equal(pat, pat.T):
            raise ValueError("motif pattern must be symmetric")
        object.__setattr__(self, "pattern", pat)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", int(np.triu(pat, 1).sum()))
        object.__setattr__(self, "shape", classify(pat))

    def __hash__(self):
        return hash((self.name, self.pattern.tobytes()))

    def __eq__(self, other):
        if not isinstance(other, Motif):
            return NotImplemented
        return np.array_equal(self.pattern, other.pattern)

    def degree_sequence(self) -> np.ndarray:
        return np.sort(self.pattern.sum(axis=0))


def classify(pattern: np.ndarray) -> str:
    """Classify a pattern as acyclic, a single spanning cycle, or other cyclic.

    A pattern is acyclic when every connected component is a tree; it is a
    simple cycle when it is connected with every degree equal to 2.
    """
    pat = np.asarray(pattern, dtype=bool)
    r = pat.shape[0]
    degrees = pat.sum(axis=0)
    n_edges = int(np.triu(pat, 1).sum())

    # union-find over edges detects both cycles and connectivity
    parent = list(range(r))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    has_cycle = False
    for i, j in zip(*np.triu(pat, 1).nonzero()):
        ri, rj = find(int(i)), find(int(j))
        if ri == rj:
            has_cycle = True
        else:
            parent[ri] = rj
    if not has_cycle:
        return ACYCLIC
    connected = len({find(v) for v in range(r)}) == 1
    if connected and n_edges == r and np.all(degrees == 2):
        return SIMPLE_CYCLE
    return GENERAL_CYCLIC


def _named(name, rows):
    return Motif(np.array(rows, dtype=bool), name=name)


EDGE = _named("edge", [[0, 1], [1, 0]])
TWOSTAR = _named("twostar", [[0, 1, 1], [1, 0, 0], [1, 0, 0]])
TRIANGLE = _named("triangle", [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
FOURCYCLE = _named(
    "fourcycle",
    [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]],
)

CATALOG = {m.name: m for m in (EDGE, TWOSTAR, TRIANGLE, FOURCYCLE)}


def from_name(name: str) -> Motif:
    """Look up a catalog motif by name (edge|twostar|triangle|fourcycle)."""
    try:
        return CATALOG[name]
    except KeyError:
        raise ValueError(
            f"unknown motif {name!r}; choose from {sorted(CATALOG)}"
        ) from None


def from_bitstring(bits: str) -> Motif:
    """Build a custom motif from its upper-triangle bitstring.

    The string lists the strict upper triangle row by row, e.g. ``"111"``
    is the triangle and ``"101101"`` a 4-cycle.
    """
    m = len(bits)
    # m = r(r-1)/2
    r = int(round((1 + np.sqrt(1 + 8 * m)) / 2))
    if r * (r - 1) // 2 != m:
        raise ValueError(f"bitstring length {m} is not a triangular number")
    if set(bits) - {"0", "1"}:
        raise ValueError("bitstring must contain only 0 and 1")
    pat = np.zeros((r, r), dtype=bool)
    k = 0
    for i in range(r):
        for j in range(i + 1, r):
            pat[i, j] = pat[j, i] = bits[k] == "1"
            k += 1
    return Motif(pat, name=f"custom[{bits}]")


def matches(adjacency: np.ndarray, subset, motif: Motif) -> bool:
    """Induced-isomorphism indicator H for one vertex subset.

    Returns True iff some relabeling of the induced subgraph on ``subset``
    equals ``motif.pattern`` exactly, non-edges included.
    """
    subset = tuple(subset)
    if len(subset) != motif.r:
        raise ValueError(
            f"subset has {len(subset)} vertices but motif has {motif.r}"
        )
    if len(set(subset)) != motif.r:
        raise ValueError("subset vertices must be distinct")
    sub = adjacency[np.ix_(subset, subset)].astype(bool)
    return _induced_match(sub, motif)


def _induced_match(sub: np.ndarray, motif: Motif) -> bool:
    if int(np.triu(sub, 1).sum()) != motif.s:
        return False
    if not np.array_equal(np.sort(sub.sum(axis=0)), motif.degree_sequence()):
        return False
    pat = motif.pattern
    for perm in itertools.permutations(range(motif.r)):
        if np.array_equal(sub[np.ix_(perm, perm)], pat):
            return True
    return False


def theoretical_rates(motif: Motif, n: int, rho: float):
    """Heuristic error-rate diagnostics for a motif at size n and sparsity rho.

    Returns ``(delta, m_rate, exact)`` where ``delta`` is the relative size
    of the neglected remainder in the bootstrap decomposition and ``m_rate``
    the size of the Edgeworth remainder.  ``exact`` is False for cyclic
    motifs that are not a single cycle: the published rates cover acyclic
    patterns and simple cycles, so the cyclic formula is only indicative
    there.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    if motif.shape == ACYCLIC:
        delta = 1.0 / (n * rho)
        m_rate = 1.0 / (n * rho)
    else:
        delta = 1.0 / (n * rho ** 1.5)
        m_rate = 1.0 / (n * rho ** (motif.r / 2.0))
    return delta, m_rate, motif.shape != GENERAL_CYCLIC
