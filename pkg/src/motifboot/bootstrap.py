"""Multiplier bootstrap procedures and resampling baselines.

All procedures return standardized replicates (T* - center) / scale with
center the observed count density and scale r * tau_hat / sqrt(n), the
estimated standard deviation of the count statistic.  The multiplier
weights are Gaussian products with mean, variance, and third central
moment all equal to 1, which is what drives the second-order accuracy of
the quadratic and multiplicative procedures.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, fsum, sqrt
from typing import Optional, Sequence

import numpy as np

from .counts import LocalStats, count_exact
from .graphs import Graph
from .motifs import Motif

MB_M = "MB_M"
MB_Q = "MB_Q"
MB_L = "MB_L"
MB_L_APX = "MB_L_APX"
EG = "EG"
SS = "SS"

GAUSSIAN_PRODUCT = "gaussian_product"
CONSTANT_ONE = "constant_one"  # test hook: every weight exactly 1


@dataclass(frozen=True)
class MultiplierSpec:
    """Weight distribution plus the master seed for the replicate streams."""

    seed: int
    distribution: str = GAUSSIAN_PRODUCT

    def __post_init__(self):
        if self.distribution not in (GAUSSIAN_PRODUCT, CONSTANT_ONE):
            raise ValueError(f"unknown distribution {self.distribution!r}")


@dataclass
class BootstrapRun:
    """Standardized bootstrap replicates with their centering and scale."""

    method: str
    B: int
    seed: int
    center: float
    scale: float
    replicates: np.ndarray

    def quantile(self, q) -> np.ndarray:
        """Type-1 (inverse ECDF) quantile of the standardized replicates."""
        srt = np.sort(self.replicates)
        q = np.atleast_1d(np.asarray(q, dtype=float))
        idx = np.ceil(q * self.B).astype(int) - 1
        out = srt[np.clip(idx, 0, self.B - 1)]
        return out if out.size > 1 else float(out[0])


_MASK64 = (1 << 64) - 1
_SX = sqrt(0.5)
_SY = sqrt(1.0 / 3.0)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class _WeightStream:
    """Constant-cost generator whose state is re-keyed per replicate.

    Replicate j's stream is a pure function of (seed, j): four splitmix64
    words seed the 128-bit PCG64 state and increment.  Re-keying a single
    generator avoids per-replicate object construction, which would
    otherwise dominate the cost of drawing length-n weight vectors.
    """

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._bg = np.random.PCG64()
        self._gen = np.random.Generator(self._bg)
        self._tmpl = self._bg.state

    def weights(self, n: int, replicate_index: int) -> np.ndarray:
        h1 = _splitmix64(self.seed ^ _splitmix64(replicate_index))
        h2 = _splitmix64(h1)
        h3 = _splitmix64(h2)
        h4 = _splitmix64(h3)
        tmpl = self._tmpl
        tmpl["state"]["state"] = (h1 << 64) | h2
        tmpl["state"]["inc"] = ((h3 << 64) | h4) | 1
        tmpl["has_uint32"] = 0
        tmpl["uinteger"] = 0
        self._bg.state = tmpl
        z = self._gen.standard_normal(2 * n)
        return (1.0 + _SX * z[:n]) * (1.0 + _SY * z[n:])


def draw_weights(n: int, spec: MultiplierSpec, replicate_index: int) -> np.ndarray:
    """Weights for one replicate; a pure function of (seed, replicate)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if spec.distribution == CONSTANT_ONE:
        return np.ones(n)
    return _WeightStream(spec.seed).weights(n, replicate_index)


def _splitmix64_vec(x: np.ndarray) -> np.ndarray:
    x = (x + np.uint64(0x9E3779B97F4A7C15))
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def _weight_matrix(n: int, spec: MultiplierSpec, B: int) -> np.ndarray:
    """All replicate weight vectors; row j is exactly draw_weights(n, spec, j)."""
    if B < 1:
        raise ValueError("B must be at least 1")
    if spec.distribution == CONSTANT_ONE:
        return np.ones((B, n))
    stream = _WeightStream(spec.seed)
    seed = np.uint64(stream.seed)
    h1 = _splitmix64_vec(seed ^ _splitmix64_vec(np.arange(B, dtype=np.uint64)))
    h2 = _splitmix64_vec(h1)
    h3 = _splitmix64_vec(h2)
    h4 = _splitmix64_vec(h3)
    tmpl = stream._tmpl
    bg, gen = stream._bg, stream._gen
    out = np.empty((B, n))
    for j in range(B):
        tmpl["state"]["state"] = (int(h1[j]) << 64) | int(h2[j])
        tmpl["state"]["inc"] = ((int(h3[j]) << 64) | int(h4[j])) | 1
        bg.state = tmpl
        z = gen.standard_normal(2 * n)
        x, y = z[:n], z[n:]
        x *= _SX
        x += 1.0
        y *= _SY
        y += 1.0
        np.multiply(x, y, out=out[j])
    return out


def _check_scale(stats: LocalStats) -> float:
    scale = stats.sigma_hat()
    if scale <= 0.0:
        raise ValueError(
            "tau_hat = 0: the count statistic is degenerate on this graph "
            "(all rooted averages equal), bootstrap scale undefined")
    return scale


def mb_linear(stats: LocalStats, spec: MultiplierSpec, B: int) -> BootstrapRun:
    """Linear multiplier bootstrap from rooted averages (exact or sketched)."""
    scale = _check_scale(stats)
    n, r = stats.n, stats.motif.r
    W = _weight_matrix(n, spec, B)
    shifts = (r / n) * ((W - 1.0) @ stats.g1)
    method = MB_L if stats.provenance == "exact" else MB_L_APX
    return BootstrapRun(method=method, B=B, seed=spec.seed,
                        center=stats.t_hat, scale=scale,
                        replicates=shifts / scale)


def mb_quadratic(stats: LocalStats, spec: MultiplierSpec, B: int) -> BootstrapRun:
    """Quadratic multiplier bootstrap; needs the exact pairwise table."""
    if stats.provenance != "exact":
        raise ValueError("quadratic bootstrap needs exact local statistics")
    scale = _check_scale(stats)
    n, r = stats.n, stats.motif.r
    g2t = stats.g2_tilde
    W = _weight_matrix(n, spec, B)
    U = W - 1.0
    lin = (r / n) * (U @ stats.g1)
    # sum over unordered pairs = half the full bilinear form (zero diagonal)
    quad = (r * (r - 1) / (n * (n - 1))) * 0.5 * ((U @ g2t) * U).sum(axis=1)
    return BootstrapRun(method=MB_Q, B=B, seed=spec.seed,
                        center=stats.t_hat, scale=scale,
                        replicates=(lin + quad) / scale)


def elementary_symmetric(weights: Sequence[float], r: int) -> float:
    """e_r of the weights via the Newton-Girard power-sum recurrence."""
    w = np.asarray(weights, dtype=float)
    p = [fsum(w**k) for k in range(1, r + 1)]
    e = [1.0]
    for k in range(1, r + 1):
        terms = [(-1.0) ** (m - 1) * e[k - m] * p[m - 1]
                 for m in range(1, k + 1)]
        e.append(fsum(terms) / k)
    return e[r]


def mb_multiplicative(stats: LocalStats, spec: MultiplierSpec,
                      B: int) -> BootstrapRun:
    """Multiplicative bootstrap reweighting every matched subset.

    Each replicate reweights the indicator of subset S by the product of
    its vertex weights; the all-subsets product sum needed for the
    centering term is the elementary symmetric polynomial e_r, evaluated
    by Newton-Girard instead of enumeration.
    """
    if stats.instances is None:
        raise ValueError("multiplicative bootstrap needs the instance list")
    scale = _check_scale(stats)
    n, r = stats.n, stats.motif.r
    n_subsets = comb(n, r)
    inst = np.asarray(sorted(stats.instances), dtype=np.int64)
    reps = np.empty(B)
    for j in range(B):
        w = draw_weights(n, spec, j)
        matched = float(np.prod(w[inst], axis=1).sum()) if len(inst) else 0.0
        e_r = elementary_symmetric(w, r)
        t_star = stats.t_hat + (matched - stats.t_hat * e_r) / n_subsets
        reps[j] = t_star - stats.t_hat
    return BootstrapRun(method=MB_M, B=B, seed=spec.seed,
                        center=stats.t_hat, scale=scale,
                        replicates=reps / scale)


def ecdf(run: BootstrapRun, grid) -> np.ndarray:
    """Empirical CDF of the standardized replicates at each grid point."""
    srt = np.sort(run.replicates)
    return np.searchsorted(srt, np.asarray(grid, dtype=float),
                           side="right") / run.B


def baseline_eg(graph: Graph, motif: Motif, B: int, seed: int,
                stats: Optional[LocalStats] = None) -> BootstrapRun:
    """Empirical-graphon baseline: vertex resampling with replacement.

    A replicate draws n vertex labels with replacement and evaluates the
    count density on the label-induced adjacency; pairs formed from a
    duplicated label contribute no edge (the diagonal is empty).
    """
    if stats is None:
        stats = count_exact(graph, motif, want_pairwise=False)
    scale = _check_scale(stats)
    n = graph.n
    reps = np.empty(B)
    for j in range(B):
        rng = np.random.default_rng(np.random.SeedSequence([seed, j]))
        labels = rng.integers(0, n, size=n)
        adj = graph.adjacency[np.ix_(labels, labels)].copy()
        np.fill_diagonal(adj, False)
        t_star = count_exact(Graph(adj), motif, want_pairwise=False).t_hat
        reps[j] = t_star - stats.t_hat
    return BootstrapRun(method=EG, B=B, seed=seed, center=stats.t_hat,
                        scale=scale, replicates=reps / scale)


def baseline_ss(graph: Graph, motif: Motif, b: int, B: int, seed: int,
                stats: Optional[LocalStats] = None) -> BootstrapRun:
    """Subsampling baseline: size-b vertex subsamples without replacement.

    Replicates are centered at the full-graph density and scaled by the
    subsample-size-adjusted standard deviation sqrt(n/b) * sigma_hat.
    """
    n = graph.n
    if not motif.r < b < n:
        raise ValueError(f"subsample size must satisfy r < b < n (b={b})")
    if stats is None:
        stats = count_exact(graph, motif, want_pairwise=False)
    scale = _check_scale(stats) * sqrt(n / b)
    reps = np.empty(B)
    for j in range(B):
        rng = np.random.default_rng(np.random.SeedSequence([seed, j]))
        keep = rng.choice(n, size=b, replace=False)
        t_star = count_exact(graph.subgraph(keep), motif,
                             want_pairwise=False).t_hat
        reps[j] = t_star - stats.t_hat
    return BootstrapRun(method=SS, B=B, seed=seed, center=stats.t_hat,
                        scale=scale, replicates=reps / scale)
