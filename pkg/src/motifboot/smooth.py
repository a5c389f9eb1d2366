"""Smooth functions of count-density vectors.

A statistic f(u) is built from d count densities, each normalized by a
power of the sparsity parameter: u_i = t_hat_i / rho^{s_i}.  This module
evaluates such functionals and their derivatives, bootstraps

    S* = sqrt(n) { f(u*) - f(u) } / sigma_f_tilde

with shared multiplier weights across coordinates (quadratic bootstrap
per coordinate), computes the Edgeworth coefficients A1/A2 of the
bootstrap distribution, and the studentized correction pair (B1, B2)
used to shift percentile confidence intervals.

The studentized machinery expands the moment vector so the variance of
f(u) becomes a function of means (cross and square terms of the rooted
averages); its closed-form moment expansions are specific to d = 1, or
to d = 2 with the (triangle, twostar) pair, and other inputs are
rejected rather than extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bootstrap import MultiplierSpec, _weight_matrix
from .counts import LocalStats
from .motifs import Motif, TRIANGLE, TWOSTAR

FD_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)


@dataclass(frozen=True)
class SmoothFunctional:
    """f together with its input motifs and derivative evaluators."""

    name: str
    motifs: tuple
    func: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def d(self) -> int:
        return len(self.motifs)

    def value(self, u) -> float:
        return float(self.func(np.asarray(u, dtype=float)))

    def gradient(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(u), dtype=float)
        return _fd_gradient(self.func, u)

    def hessian(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.hess is not None:
            return np.asarray(self.hess(u), dtype=float)
        return _fd_hessian(self.func, u)


def _fd_gradient(func, u):
    d = len(u)
    out = np.empty(d)
    for i in range(d):
        h = FD_STEP * max(abs(u[i]), 1.0)
        up, dn = u.copy(), u.copy()
        up[i] += h
        dn[i] -= h
        out[i] = (func(up) - func(dn)) / (2.0 * h)
    return out


def _fd_hessian(func, u):
    d = len(u)
    out = np.empty((d, d))
    h = [FD_STEP ** 0.75 * max(abs(u[i]), 1.0) for i in range(d)]
    f0 = func(u)
    for i in range(d):
        for j in range(i, d):
            if i == j:
                up, dn = u.copy(), u.copy()
                up[i] += h[i]
                dn[i] -= h[i]
                out[i, i] = (func(up) - 2.0 * f0 + func(dn)) / h[i] ** 2
            else:
                pp, pm, mp, mm = u.copy(), u.copy(), u.copy(), u.copy()
                pp[i] += h[i]; pp[j] += h[j]
                pm[i] += h[i]; pm[j] -= h[j]
                mp[i] -= h[i]; mp[j] += h[j]
                mm[i] -= h[i]; mm[j] -= h[j]
                out[i, j] = out[j, i] = (
                    func(pp) - func(pm) - func(mp) + func(mm)
                ) / (4.0 * h[i] * h[j])
    return out


def identity_T(motif: Motif = TRIANGLE) -> SmoothFunctional:
    return SmoothFunctional(
        name="T", motifs=(motif,),
        func=lambda u: u[0],
        grad=lambda u: np.array([1.0]),
        hess=lambda u: np.zeros((1, 1)))


def lincomb(alpha: float = 3.0, beta: float = 5.0) -> SmoothFunctional:
    return SmoothFunctional(
        name="3T+5V" if (alpha, beta) == (3.0, 5.0) else f"{alpha}T+{beta}V",
        motifs=(TRIANGLE, TWOSTAR),
        func=lambda u: alpha * u[0] + beta * u[1],
        grad=lambda u: np.array([alpha, beta]),
        hess=lambda u: np.zeros((2, 2)))


def product_TV() -> SmoothFunctional:
    return SmoothFunctional(
        name="TV", motifs=(TRIANGLE, TWOSTAR),
        func=lambda u: u[0] * u[1],
        grad=lambda u: np.array([u[1], u[0]]),
        hess=lambda u: np.array([[0.0, 1.0], [1.0, 0.0]]))


def ratio_T_over_V() -> SmoothFunctional:
    """Transitivity: three times the triangle-to-twostar ratio."""
    return SmoothFunctional(
        name="3T/V", motifs=(TRIANGLE, TWOSTAR),
        func=lambda u: 3.0 * u[0] / u[1],
        grad=lambda u: np.array([3.0 / u[1], -3.0 * u[0] / u[1] ** 2]),
        hess=lambda u: np.array([
            [0.0, -3.0 / u[1] ** 2],
            [-3.0 / u[1] ** 2, 6.0 * u[0] / u[1] ** 3]]))


def square_product_T2V2() -> SmoothFunctional:
    return SmoothFunctional(
        name="T2V2", motifs=(TRIANGLE, TWOSTAR),
        func=lambda u: u[0] ** 2 * u[1] ** 2,
        grad=lambda u: np.array([2.0 * u[0] * u[1] ** 2,
                                 2.0 * u[0] ** 2 * u[1]]),
        hess=lambda u: np.array([
            [2.0 * u[1] ** 2, 4.0 * u[0] * u[1]],
            [4.0 * u[0] * u[1], 2.0 * u[0] ** 2]]))


def custom(func, motifs, name: str = "custom") -> SmoothFunctional:
    """User functional; derivatives by central finite differences."""
    return SmoothFunctional(name=name, motifs=tuple(motifs), func=func)


BUILTIN_FUNCTIONALS = {
    "T": identity_T,
    "3T+5V": lincomb,
    "TV": product_TV,
    "3T/V": ratio_T_over_V,
    "T2V2": square_product_T2V2,
}


@dataclass
class SmoothBootOutput:
    functional: SmoothFunctional
    n: int
    value: float
    u_hat: np.ndarray
    sigma_f_tilde: float
    a1_tilde: float
    a2_tilde: float
    replicates: Optional[np.ndarray] = None
    b1_hat: Optional[float] = None
    b2_hat: Optional[float] = None

    def p1(self, x):
        """Standardized endpoint-correction polynomial."""
        x = np.asarray(x, dtype=float)
        out = -(self.a1_tilde / self.sigma_f_tilde
                + self.a2_tilde / (6.0 * self.sigma_f_tilde**3) * (x * x - 1.0))
        return out if out.ndim else float(out)

    def q1(self, x):
        """Studentized endpoint-correction polynomial."""
        if self.b1_hat is None or self.b2_hat is None:
            raise ValueError("studentized coefficients were not computed")
        x = np.asarray(x, dtype=float)
        out = -(self.b1_hat + self.b2_hat / 6.0 * (x * x - 1.0))
        return out if out.ndim else float(out)


def _check_inputs(f: SmoothFunctional, stats: Sequence[LocalStats], rho: float):
    if len(stats) != f.d:
        raise ValueError(f"{f.name} needs {f.d} count inputs, got {len(stats)}")
    for st, m in zip(stats, f.motifs):
        if st.motif != m:
            raise ValueError(f"stats for motif {st.motif.name!r} supplied "
                             f"where {m.name!r} expected")
        if st.provenance != "exact":
            raise ValueError("smooth functionals need exact local statistics")
    if not rho > 0:
        raise ValueError("rho must be positive")
    ns = {st.n for st in stats}
    if len(ns) != 1:
        raise ValueError("all count inputs must come from the same graph")


def u_vector(stats: Sequence[LocalStats], rho: float) -> np.ndarray:
    return np.array([st.t_hat / rho**st.motif.s for st in stats])


def _influence_rows(stats, rho):
    """Rows y_i(l) = r_i g1_i(l) / rho^{s_i}, one per coordinate."""
    return np.stack([st.motif.r * st.g1 / rho**st.motif.s for st in stats])


def _lambda_matrix(y: np.ndarray, n: int) -> np.ndarray:
    """Cross-covariance of the influence rows: Lambda_ij = mean(y_i y_j)."""
    return y @ y.T / n


def sigma_f_emp(f: SmoothFunctional, stats: Sequence[LocalStats],
                rho: float) -> float:
    """Empirical asymptotic standard deviation of sqrt(n) f(u)."""
    _check_inputs(f, stats, rho)
    n = stats[0].n
    a = f.gradient(u_vector(stats, rho))
    y = _influence_rows(stats, rho)
    var = a @ _lambda_matrix(y, n) @ a
    if not var > 0:
        raise ValueError("degenerate variance for the smooth functional")
    return float(np.sqrt(var))


def _a1_a2_empirical(f, stats, rho):
    """Edgeworth coefficients of the bootstrap distribution (Thm-style).

    A1 is the curvature bias; A2 the third cumulant, consisting of the
    pure third moment of the projected influence, a curvature cross term,
    and the pair-influence term built from g2_tilde.
    """
    n = stats[0].n
    u = u_vector(stats, rho)
    a = f.gradient(u)
    H = f.hessian(u)
    y = _influence_rows(stats, rho)
    lam = _lambda_matrix(y, n)
    w = a @ y  # projected influence per vertex

    a1 = 0.5 * float(np.sum(H * lam))

    t1 = float(np.mean(w**3))
    v = a @ lam
    t2 = 3.0 * float(v @ H @ v)
    t3 = 0.0
    for k, st in enumerate(stats):
        r, s = st.motif.r, st.motif.s
        g2t = st.g2_tilde
        t3 += a[k] * r * (r - 1) / rho**s * float(w @ g2t @ w) / (n * (n - 1))
    t3 *= 3.0
    return a1, t1 + t2 + t3


def expansion_coefficients(f: SmoothFunctional, stats: Sequence[LocalStats],
                           rho: float,
                           studentized: bool = False) -> SmoothBootOutput:
    """Coefficient-only output (no replicates) for expansion evaluation."""
    _check_inputs(f, stats, rho)
    u_hat = u_vector(stats, rho)
    sigma = sigma_f_emp(f, stats, rho)
    a1, a2 = _a1_a2_empirical(f, stats, rho)
    b1 = b2 = None
    if studentized:
        b1, b2 = studentized_coeffs(f, stats, rho)
    return SmoothBootOutput(functional=f, n=stats[0].n,
                            value=f.value(u_hat), u_hat=u_hat,
                            sigma_f_tilde=sigma, a1_tilde=a1, a2_tilde=a2,
                            b1_hat=b1, b2_hat=b2)


def bootstrap_smooth(f: SmoothFunctional, stats: Sequence[LocalStats],
                     spec: MultiplierSpec, B: int,
                     rho: float) -> SmoothBootOutput:
    """Bootstrap the smooth functional with shared weight streams.

    Every coordinate's quadratic bootstrap replicate uses the identical
    weight vector, preserving the dependence between the counts.
    """
    _check_inputs(f, stats, rho)
    n = stats[0].n
    u_hat = u_vector(stats, rho)
    sigma = sigma_f_emp(f, stats, rho)
    a1, a2 = _a1_a2_empirical(f, stats, rho)
    value = f.value(u_hat)

    U = _weight_matrix(n, spec, B) - 1.0
    u_star = np.empty((B, f.d))
    for i, st in enumerate(stats):
        r, s = st.motif.r, st.motif.s
        lin = (r / n) * (U @ st.g1)
        quad = (r * (r - 1) / (n * (n - 1))) * 0.5 \
            * ((U @ st.g2_tilde) * U).sum(axis=1)
        u_star[:, i] = (st.t_hat + lin + quad) / rho**s
    try:  # the built-ins broadcast over a (d, B) column stack
        f_star = np.asarray(f.func(u_star.T), dtype=float)
        if f_star.shape != (B,):
            raise ValueError
    except Exception:
        f_star = np.array([f.value(row) for row in u_star])
    reps = np.sqrt(n) * (f_star - value) / sigma
    return SmoothBootOutput(functional=f, n=n, value=value, u_hat=u_hat,
                            sigma_f_tilde=sigma, a1_tilde=a1, a2_tilde=a2,
                            replicates=reps)


def _pair_moment(x, y, table, n):
    """Average of x(l) y(m) table(l, m) over ordered pairs l != m."""
    return float(x @ table @ y) / (n * (n - 1))


def studentized_coeffs(f: SmoothFunctional, stats: Sequence[LocalStats],
                       rho: float):
    """Correction pair (B1_hat, B2_hat) for the studentized statistic.

    Supported inputs: d = 1 identity on any motif, or d = 2 on the
    (triangle, twostar) pair.  The expanded moment vector appends, after
    the d densities, the cross term of the two rooted averages and their
    squares; the closed-form second-moment expansions below are specific
    to these cases.
    """
    _check_inputs(f, stats, rho)
    d = f.d
    if d == 2:
        if f.motifs != (TRIANGLE, TWOSTAR):
            raise ValueError(
                "studentized corrections support d=2 only for the "
                "(triangle, twostar) pair")
    elif d == 1:
        if f.name != "T":
            raise ValueError(
                "studentized corrections support d=1 only for the identity")
    else:
        raise ValueError("studentized corrections support d <= 2 only")

    n = stats[0].n
    u = u_vector(stats, rho)
    a = f.gradient(u)
    H = f.hessian(u)
    y = _influence_rows(stats, rho)
    lam = _lambda_matrix(y, n)
    sigma = sigma_f_emp(f, stats, rho)
    a1, a2 = _a1_a2_empirical(f, stats, rho)

    rr = np.array([st.motif.r for st in stats], dtype=float)
    ss = np.array([st.motif.s for st in stats], dtype=float)
    g1 = [st.g1 for st in stats]
    g2h = [st.g2_hat_table() for st in stats]

    def e1(*vecs):
        return float(np.mean(np.prod(vecs, axis=0)))

    if d == 1:
        r, s = rr[0], ss[0]
        # second moments of the expanded vector (density, square term)
        mu_ds = (r**3 / rho**(3 * s)) * (
            e1(g1[0], g1[0], g1[0])
            + 2.0 * (r - 1) * _pair_moment(g1[0], g1[0], g2h[0], n)
        ) + 2.0 * r**4 * u[0] * e1(g1[0], g1[0]) / rho**(2 * s)
        c = np.array([
            2.0 * float(H[0, 0] * a[0] * lam[0, 0])
            - 2.0 * a[0] * r * a[0] * r * u[0],
            a[0] ** 2,
        ])
        mu = np.array([[lam[0, 0], mu_ds]])
    else:
        r = rr[0]  # both catalog motifs here have r = 3
        s1, s2 = ss
        m1, m2 = u  # normalized density estimates play the mean role
        g11, g12 = g1
        G1, G2 = g2h

        def third(x, yv, z):
            return e1(x, yv, z)

        # expanded coordinates: (1, 2, cross, square1, square2)
        mu = np.zeros((2, 5))
        mu[:2, :2] = lam
        mu[0, 3] = (r**3 / rho**(3 * s1)) * (
            third(g11, g11, g11)
            + 2 * (r - 1) * _pair_moment(g11, g11, G1, n)
        ) + 2 * r**4 * m1 * e1(g11, g11) / rho**(2 * s1)
        mu[1, 4] = (r**3 / rho**(3 * s2)) * (
            third(g12, g12, g12)
            + 2 * (r - 1) * _pair_moment(g12, g12, G2, n)
        ) + 2 * r**4 * m2 * e1(g12, g12) / rho**(2 * s2)
        mu[0, 4] = (r**3 / (rho**s1 * rho**(2 * s2))) * (
            third(g11, g12, g12)
            + 2 * (r - 1) * _pair_moment(g11, g12, G2, n)
        ) + 2 * r**4 * m2 * e1(g11, g12) / (rho**s1 * rho**s2)
        mu[1, 3] = (r**3 / (rho**(2 * s1) * rho**s2)) * (
            third(g12, g11, g11)
            + 2 * (r - 1) * _pair_moment(g12, g11, G1, n)
        ) + 2 * r**4 * m1 * e1(g11, g12) / (rho**s1 * rho**s2)
        mu[0, 2] = (r**3 / (rho**(2 * s1) * rho**s2)) * (
            third(g11, g11, g12)
            + (r - 1) * _pair_moment(g11, g11, G2, n)
            + (r - 1) * _pair_moment(g11, g12, G1, n)
        ) + r**4 * m1 * e1(g11, g12) / (rho**s1 * rho**s2) \
          + r**4 * m2 * e1(g11, g11) / rho**(2 * s1)
        mu[1, 2] = (r**3 / (rho**s1 * rho**(2 * s2))) * (
            third(g12, g12, g11)
            + (r - 1) * _pair_moment(g12, g11, G2, n)
            + (r - 1) * _pair_moment(g12, g12, G1, n)
        ) + r**4 * m2 * e1(g11, g12) / (rho**s1 * rho**s2) \
          + r**4 * m1 * e1(g12, g12) / rho**(2 * s2)

        # gradient of the variance map over the expanded coordinates
        drift = float(np.sum(a * rr * u))
        c = np.zeros(5)
        for k in range(2):
            c[k] = (2.0 * float(H[:, k] @ (lam @ a))
                    - 2.0 * a[k] * rr[k] * drift)
        c[2] = 2.0 * a[0] * a[1]
        c[3] = a[0] ** 2
        c[4] = a[1] ** 2

    quad_term = 0.0
    for i in range(d):
        for j in range(mu.shape[1]):
            quad_term += a[i] * c[j] * mu[i, j]
    b1 = a1 / sigma - 0.5 * quad_term / sigma**3
    b2 = 6.0 * b1 - 6.0 * a1 / sigma + a2 / sigma**3
    return float(b1), float(b2)
