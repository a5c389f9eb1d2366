"""Edgeworth expansions for standardized count densities.

The one-term expansion of the standardized count statistic is

    G_n(u) = Phi(u) - (u^2 - 1) phi(u) / (6 sqrt(n) tau^3)
             * [ m3 + 3 (r - 1) m112 ],

where m3 is the third moment of the vertex influence g1 and m112 the
cross moment of two influences with the pair influence.  Both moments
have empirical plug-ins (from exact local statistics) and population
twins (exact block sums for block models, nested Monte Carlo otherwise).

The endpoint-correction polynomials p1 (standardized) and q1
(studentized) for count confidence intervals live here as well; they are
the d = 1 specialization of the smooth-function machinery and satisfy
p1(0) = q1(0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .counts import LocalStats, _accept_masks
from .graphs import GraphonSpec
from .motifs import Motif

STANDARD_GRID = np.round(np.arange(-30, 31) / 10.0, 1)

EXACT_BLOCK_LIMIT = 100_000  # cap on K^r for the exact block-sum oracle


def norm_cdf(u):
    return ndtr(np.asarray(u, dtype=float))


def norm_pdf(u):
    u = np.asarray(u, dtype=float)
    return np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)


@dataclass
class EdgeworthCoefficients:
    n: int
    r: int
    tau: float
    m3: float
    m112: float
    provenance: str = "empirical"
    theta: Optional[float] = None
    stderr: Optional[dict] = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not (np.isfinite(self.m3) and np.isfinite(self.m112)):
            raise ValueError("coefficients must be finite")

    @property
    def skew_term(self) -> float:
        """The bracket m3 + 3 (r - 1) m112 shared by all formulas."""
        return self.m3 + 3.0 * (self.r - 1) * self.m112


def empirical_coefficients(stats: LocalStats) -> EdgeworthCoefficients:
    """Plug-in moments from exact local statistics with a pairwise table.

    The cross moment pairs two vertex influences with the singly-centered
    pair influence g2_tilde (not the fully centered version).
    """
    if stats.provenance != "exact":
        raise ValueError("expansion coefficients need exact local statistics")
    g1 = stats.g1
    g2t = stats.g2_tilde
    n = stats.n
    m3 = float(np.mean(g1**3))
    # average over unordered pairs: half the bilinear form over C(n,2)
    m112 = float(g1 @ g2t @ g1) / (n * (n - 1))
    return EdgeworthCoefficients(n=n, r=stats.motif.r, tau=stats.tau_hat,
                                 m3=m3, m112=m112, provenance="empirical",
                                 theta=stats.t_hat)


def gn_hat(coeffs: EdgeworthCoefficients, u) -> np.ndarray:
    """One-term Edgeworth CDF estimate at u (scalar or array)."""
    u = np.asarray(u, dtype=float)
    correction = ((u * u - 1.0) * norm_pdf(u)
                  / (6.0 * np.sqrt(coeffs.n) * coeffs.tau**3)) * coeffs.skew_term
    out = norm_cdf(u) - correction
    return out if out.ndim else float(out)


def gn_hat_clipped(coeffs: EdgeworthCoefficients, u) -> np.ndarray:
    """Monotone, [0,1]-clipped variant of gn_hat for plotting only."""
    vals = np.clip(np.atleast_1d(gn_hat(coeffs, u)), 0.0, 1.0)
    return np.maximum.accumulate(vals)


def p1_hat(coeffs: EdgeworthCoefficients, z) -> np.ndarray:
    """Polynomial in front of phi/sqrt(n) for the standardized statistic."""
    z = np.asarray(z, dtype=float)
    out = (1.0 - z * z) / (6.0 * coeffs.tau**3) * coeffs.skew_term
    return out if out.ndim else float(out)


def q1_hat(coeffs: EdgeworthCoefficients, z) -> np.ndarray:
    """Studentized counterpart of p1_hat; agrees with it at z = 0."""
    z = np.asarray(z, dtype=float)
    out = ((2.0 * z * z + 1.0) / 6.0 * coeffs.m3
           + (coeffs.r - 1) / 2.0 * (z * z + 1.0) * coeffs.m112) / coeffs.tau**3
    return out if out.ndim else float(out)


def sup_distance(f, g) -> float:
    """Kolmogorov distance between two CDF evaluations on a shared grid."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError("grids have different lengths")
    return float(np.abs(f - g).max())


# ---------------------------------------------------------------------------
# population twins


def match_probability(spec: GraphonSpec, latents: np.ndarray,
                      motif: Motif) -> np.ndarray:
    """P(induced match | latent positions) for each row of latents.

    Edges are independent Bernoulli(rho * w) given latents, so the match
    probability sums, over every relabeling of the pattern, the product
    of edge probabilities and complement probabilities.
    """
    latents = np.asarray(latents)
    r = motif.r
    if latents.shape[-1] != r:
        raise ValueError("latent tuples must have length r")
    pairs = list(itertools.combinations(range(r), 2))
    p = np.stack([spec.rho * spec.w(latents[..., a], latents[..., b])
                  for a, b in pairs], axis=-1)
    total = np.zeros(latents.shape[:-1])
    for mask in _accept_masks(motif):
        bits = np.array([(mask >> k) & 1 for k in range(len(pairs))],
                        dtype=bool)
        total += np.prod(np.where(bits, p, 1.0 - p), axis=-1)
    return total


def _sbm_population(spec: GraphonSpec, motif: Motif, n: int):
    """Exact block-sum population moments for a stochastic block model."""
    pi = spec.block_probs
    K = len(pi)
    r = motif.r
    if K**r > EXACT_BLOCK_LIMIT:
        raise ValueError("too many block assignments for exact summation")
    labels = np.array(list(itertools.product(range(K), repeat=r)))
    probs = match_probability(spec, labels, motif)
    weights = pi[labels].prod(axis=1)
    theta = float(weights @ probs)

    # conditional match probabilities given one / two root labels
    h1 = np.zeros(K)
    for a in range(K):
        sel = labels[:, 0] == a
        w_rest = pi[labels[sel, 1:]].prod(axis=1) if r > 1 else np.ones(sel.sum())
        h1[a] = w_rest @ probs[sel]
    g1 = h1 - theta

    h2 = np.zeros((K, K))
    for a in range(K):
        for b in range(K):
            sel = (labels[:, 0] == a) & (labels[:, 1] == b)
            if r > 2:
                w_rest = pi[labels[sel, 2:]].prod(axis=1)
            else:
                w_rest = np.ones(sel.sum())
            h2[a, b] = w_rest @ probs[sel]
    g2 = h2 - theta - g1[:, None] - g1[None, :]

    tau = float(np.sqrt(pi @ g1**2))
    m3 = float(pi @ g1**3)
    m112 = float((pi * g1) @ g2 @ (pi * g1))
    return theta, tau, m3, m112


def population_theta(spec: GraphonSpec, motif: Motif,
                     mc_samples: int = 200_000, seed: int = 0) -> float:
    """Expected count density; exact for block models, MC otherwise."""
    if spec.kind == "sbm":
        theta, _, _, _ = _sbm_population(spec, motif, n=0)
        return theta
    rng = np.random.default_rng(np.random.SeedSequence([seed, 17]))
    lat = rng.uniform(size=(mc_samples, motif.r))
    return float(match_probability(spec, lat, motif).mean())


def population_coefficients(spec: GraphonSpec, motif: Motif, n: int,
                            mc_outer: int = 2000, mc_inner: int = 2000,
                            seed: int = 0) -> EdgeworthCoefficients:
    """Population Edgeworth coefficients for a graphon model.

    Block models with few blocks are summed exactly; other graphons use a
    nested Monte Carlo estimate (outer latents, inner conditioning
    samples) and report standard errors for the estimated moments.
    """
    r = motif.r
    if (spec.kind == "sbm"
            and len(spec.block_probs)**r <= EXACT_BLOCK_LIMIT):
        theta, tau, m3, m112 = _sbm_population(spec, motif, n)
        return EdgeworthCoefficients(n=n, r=r, tau=tau, m3=m3, m112=m112,
                                     provenance="population", theta=theta)

    rng = np.random.default_rng(np.random.SeedSequence([seed, 23]))
    theta_lat = rng.uniform(size=(max(mc_outer * mc_inner, 10_000), r))
    theta = float(match_probability(spec, theta_lat, motif).mean())

    # conditional expectations by inner averaging at sampled outer latents
    x = rng.uniform(size=mc_outer)
    inner1 = rng.uniform(size=(mc_outer, mc_inner, r - 1))
    tup1 = np.concatenate([np.broadcast_to(x[:, None, None],
                                           (mc_outer, mc_inner, 1)), inner1],
                          axis=-1)
    g1 = match_probability(spec, tup1, motif).mean(axis=1) - theta

    # random pairs of outer latents for the cross moment
    y = rng.uniform(size=mc_outer)
    inner2 = rng.uniform(size=(mc_outer, mc_inner, r - 2)) if r > 2 else \
        np.zeros((mc_outer, mc_inner, 0))
    tup2 = np.concatenate([np.broadcast_to(x[:, None, None],
                                           (mc_outer, mc_inner, 1)),
                           np.broadcast_to(y[:, None, None],
                                           (mc_outer, mc_inner, 1)),
                           inner2], axis=-1)
    h2 = match_probability(spec, tup2, motif).mean(axis=1)
    inner1y = rng.uniform(size=(mc_outer, mc_inner, r - 1))
    tup1y = np.concatenate([np.broadcast_to(y[:, None, None],
                                            (mc_outer, mc_inner, 1)), inner1y],
                           axis=-1)
    g1y = match_probability(spec, tup1y, motif).mean(axis=1) - theta
    g2 = h2 - theta - g1 - g1y

    tau2 = g1 @ g1 / mc_outer
    m3_samples = g1**3
    m112_samples = g1 * g1y * g2
    m3 = float(m3_samples.mean())
    m112 = float(m112_samples.mean())
    stderr = {
        "tau2": float(np.std(g1**2) / np.sqrt(mc_outer)),
        "m3": float(np.std(m3_samples) / np.sqrt(mc_outer)),
        "m112": float(np.std(m112_samples) / np.sqrt(mc_outer)),
    }
    return EdgeworthCoefficients(n=n, r=r, tau=float(np.sqrt(tau2)),
                                 m3=m3, m112=m112, provenance="population",
                                 theta=theta, stderr=stderr)
