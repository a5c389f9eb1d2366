"""Graph storage, sparse-graphon samplers, and data ingestion.

Graphs are simple and undirected, stored as a dense symmetric boolean
adjacency with a cached degree vector.  Samplers draw from the sparse
graphon model: latent positions are i.i.d. uniform (or block labels for a
stochastic block model) and each unordered pair is an independent
Bernoulli with success probability ``rho * w(x_i, x_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

SMOOTH_FORMULAS: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    # continuous, high-rank graphon used in the simulation study
    "smg": lambda u, v: (u**2 + v**2) / 3.0 * np.cos(1.0 / (u**2 + v**2)) + 0.15,
}


class Graph:
    """Immutable simple undirected graph on vertices 0..n-1."""

    __slots__ = ("n", "adjacency", "degrees", "n_edges")

    def __init__(self, adjacency: np.ndarray):
        adj = np.asarray(adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        adj = adj.copy()
        adj.setflags(write=False)
        self.adjacency = adj
        self.n = adj.shape[0]
        self.degrees = adj.sum(axis=0).astype(np.int64)
        self.degrees.setflags(write=False)
        self.n_edges = int(self.degrees.sum()) // 2

    def edge_density(self) -> float:
        if self.n < 2:
            return 0.0
        return 2.0 * self.n_edges / (self.n * (self.n - 1))

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def edge_list(self) -> np.ndarray:
        """Canonical (i < j, lexicographically sorted) edge array."""
        i, j = np.triu(self.adjacency, 1).nonzero()
        return np.column_stack([i, j])

    def subgraph(self, vertices) -> "Graph":
        vertices = np.asarray(vertices, dtype=np.int64)
        return Graph(self.adjacency[np.ix_(vertices, vertices)])

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"


@dataclass(frozen=True)
class GraphonSpec:
    """A graphon together with the sparsity multiplier rho.

    Exactly one of ``block_matrix``, ``formula``, or ``table`` selects the
    kind: stochastic block model, named closed-form w(u, v), or gridded
    values on [0, 1]^2.
    """

    rho: float = 1.0
    block_matrix: Optional[np.ndarray] = None
    block_probs: Optional[np.ndarray] = None
    formula: Optional[str] = None
    table: Optional[np.ndarray] = None
    kind: str = field(init=False)

    def __post_init__(self):
        if not 0 <= self.rho <= 1:
            raise ValueError("rho must lie in [0, 1]")
        given = [self.block_matrix is not None, self.formula is not None,
                 self.table is not None]
        if sum(given) != 1:
            raise ValueError("specify exactly one of block_matrix, formula, table")
        if self.block_matrix is not None:
            B = np.asarray(self.block_matrix, dtype=float)
            pi = np.asarray(self.block_probs, dtype=float)
            if B.ndim != 2 or B.shape[0] != B.shape[1]:
                raise ValueError("block matrix must be square")
            if not np.allclose(B, B.T):
                raise ValueError("block matrix must be symmetric")
            if B.min() < 0 or B.max() > 1:
                raise ValueError("block matrix entries must lie in [0, 1]")
            if pi.shape != (B.shape[0],) or (pi < 0).any():
                raise ValueError("block probabilities must be a nonnegative "
                                 "vector matching the block matrix")
            if abs(pi.sum() - 1.0) > 1e-12:
                raise ValueError("block probabilities must sum to 1")
            B.setflags(write=False)
            pi.setflags(write=False)
            object.__setattr__(self, "block_matrix", B)
            object.__setattr__(self, "block_probs", pi)
            object.__setattr__(self, "kind", "sbm")
        elif self.formula is not None:
            if self.formula not in SMOOTH_FORMULAS:
                raise ValueError(
                    f"unknown graphon formula {self.formula!r}; "
                    f"known: {sorted(SMOOTH_FORMULAS)}")
            object.__setattr__(self, "kind", "formula")
        else:
            tab = np.asarray(self.table, dtype=float)
            if tab.ndim != 2 or not np.allclose(tab, tab.T):
                raise ValueError("table graphon must be a symmetric matrix")
            if tab.min() < 0:
                raise ValueError("table graphon values must be nonnegative")
            tab.setflags(write=False)
            object.__setattr__(self, "table", tab)
            object.__setattr__(self, "kind", "table")
        sup = self.sup_w()
        if self.rho * sup > 1 + 1e-12:
            raise ValueError(
                f"rho * sup w = {self.rho * sup:.6g} exceeds 1; "
                "edge probabilities would not be valid")

    def sup_w(self) -> float:
        if self.kind == "sbm":
            return float(self.block_matrix.max())
        if self.kind == "table":
            return float(self.table.max())
        grid = np.linspace(1e-6, 1.0, 512)
        u, v = np.meshgrid(grid, grid)
        return float(SMOOTH_FORMULAS[self.formula](u, v).max())

    def w(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Evaluate w at latent positions (SBM latents are block labels)."""
        if self.kind == "sbm":
            return self.block_matrix[np.asarray(u, dtype=np.int64),
                                     np.asarray(v, dtype=np.int64)]
        if self.kind == "table":
            k = self.table.shape[0]
            iu = np.minimum((np.asarray(u) * k).astype(np.int64), k - 1)
            iv = np.minimum((np.asarray(v) * k).astype(np.int64), k - 1)
            return self.table[iu, iv]
        return SMOOTH_FORMULAS[self.formula](np.asarray(u, dtype=float),
                                             np.asarray(v, dtype=float))

    def mean_edge_probability(self) -> float:
        """rho * E w(X, X') (exact for SBM, quadrature otherwise)."""
        if self.kind == "sbm":
            pi = self.block_probs
            return float(self.rho * pi @ self.block_matrix @ pi)
        grid = np.linspace(0, 1, 2001)[1:-1]
        u, v = np.meshgrid(grid, grid)
        return float(self.rho * self.w(u, v).mean())


def sbm_g(rho: float = 1.0) -> GraphonSpec:
    """The two-block SBM used in the simulation study."""
    B = np.full((2, 2), 0.2)
    B[0, 0] = 0.6
    return GraphonSpec(rho=rho, block_matrix=B, block_probs=np.array([0.65, 0.35]))


def sm_g(rho: float = 1.0) -> GraphonSpec:
    """The smooth high-rank graphon used in the simulation study."""
    return GraphonSpec(rho=rho, formula="smg")


def sample_graph(spec: GraphonSpec, n: int, seed: int):
    """Draw one graph from the sparse graphon model.

    Returns ``(graph, latents)``.  Latents are uniform positions in [0, 1]
    (block labels for an SBM) and are returned so population-moment
    oracles can condition on them.  The draw is a pure function of
    ``(spec, n, seed)``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
    if spec.kind == "sbm":
        latents = rng.choice(len(spec.block_probs), size=n, p=spec.block_probs)
    else:
        latents = rng.uniform(size=n)
    iu = np.triu_indices(n, 1)
    p = spec.rho * spec.w(latents[iu[0]], latents[iu[1]])
    if np.any(p > 1 + 1e-12):
        raise ValueError("edge probability above 1; invalid spec")
    draws = rng.uniform(size=p.shape) < p
    adj = np.zeros((n, n), dtype=bool)
    adj[iu] = draws
    adj |= adj.T
    return Graph(adj), latents


def ingest_edge_list(path, one_based: bool = False):
    """Read a whitespace-separated edge list file into a Graph.

    Duplicate edges are collapsed and self-loops dropped; the counts of
    both are reported in the returned info dict.
    """
    edges = set()
    self_loops = 0
    duplicates = 0
    max_v = -1
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two vertex ids, "
                                 f"got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer vertex id "
                                 f"in {line!r}") from None
            if one_based:
                i, j = i - 1, j - 1
            if i < 0 or j < 0:
                raise ValueError(f"{path}:{lineno}: negative vertex id")
            if i == j:
                self_loops += 1
                max_v = max(max_v, i)
                continue
            e = (min(i, j), max(i, j))
            if e in edges:
                duplicates += 1
            else:
                edges.add(e)
            max_v = max(max_v, i, j)
    n = max_v + 1
    adj = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        adj[i, j] = adj[j, i] = True
    info = {"self_loops_dropped": self_loops, "duplicates_collapsed": duplicates}
    return Graph(adj), info


def export_edge_list(graph: Graph, path, one_based: bool = False) -> None:
    """Write the canonical edge list (i < j, sorted) to a text file."""
    offset = 1 if one_based else 0
    with open(path, "w") as fh:
        for i, j in graph.edge_list():
            fh.write(f"{i + offset} {j + offset}\n")


def agreement_matrix(votes: np.ndarray) -> np.ndarray:
    """Pairwise count of bills on which two members cast the same yay/nay.

    ``votes`` is a member x bill integer matrix with 1 = yay, -1 = nay,
    0 = anything else.
    """
    votes = np.asarray(votes)
    yay = (votes == 1).astype(np.int64)
    nay = (votes == -1).astype(np.int64)
    agree = yay @ yay.T + nay @ nay.T
    np.fill_diagonal(agree, 0)
    return agree


def rollcall_threshold(agree: np.ndarray, parties) -> int:
    """Histogram-intersection threshold between same- and cross-party pairs.

    Histograms use unit-width bins over agreement counts.  The threshold
    is the smallest agreement value from which the same-party count
    matches or exceeds the cross-party count in every bin at or above it,
    so it sits just past the last bin where cross-party pairs dominate.
    """
    parties = np.asarray(parties)
    if len(set(parties.tolist())) < 2:
        raise ValueError("threshold needs members from at least two parties")
    n = agree.shape[0]
    iu = np.triu_indices(n, 1)
    same = parties[iu[0]] == parties[iu[1]]
    sp = agree[iu][same]
    cp = agree[iu][~same]
    top = int(agree.max()) + 1
    sp_hist = np.bincount(sp, minlength=top + 1)
    cp_hist = np.bincount(cp, minlength=top + 1)
    above = np.flatnonzero(cp_hist > sp_hist)
    return int(above[-1]) + 1 if above.size else 0


def ingest_rollcall(votes, parties, threshold: Optional[int] = None):
    """Build an agreement graph from roll-call votes.

    ``votes`` maps to {1, -1, 0} for yay/nay/other (strings ``Y``/``N``
    are accepted).  An edge joins two members whose agreement count
    strictly exceeds the threshold; when ``threshold`` is None it is
    computed by histogram intersection (same- vs cross-party).

    Returns ``(graph, threshold)``.
    """
    votes = np.asarray(votes)
    if votes.dtype.kind in "UO":
        coded = np.zeros(votes.shape, dtype=np.int64)
        coded[np.char.upper(votes.astype(str)) == "Y"] = 1
        coded[np.char.upper(votes.astype(str)) == "N"] = -1
        votes = coded
    if votes.ndim != 2 or votes.shape[0] < 2 or votes.shape[1] < 1:
        raise ValueError("need at least 2 members and 1 bill")
    agree = agreement_matrix(votes)
    if threshold is None:
        threshold = rollcall_threshold(agree, parties)
    adj = agree > threshold
    np.fill_diagonal(adj, False)
    return Graph(adj), int(threshold)


def read_rollcall_csv(path):
    """Read a roll-call CSV: member id, party, then one column per bill.

    Vote cells are Y/N/other.  Returns ``(member_ids, parties, votes)``.
    """
    member_ids, parties, rows = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = [c.strip() for c in line.split(",")]
            if len(cells) < 3:
                raise ValueError(f"{path}:{lineno}: expected id, party and "
                                 "at least one vote column")
            member_ids.append(cells[0])
            parties.append(cells[1])
            rows.append(cells[2:])
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise ValueError(f"{path}: inconsistent number of vote columns")
    return member_ids, np.array(parties), np.array(rows)
