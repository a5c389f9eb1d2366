"""Percentile confidence intervals and the second-order endpoint shift.

The percentile interval takes inverse-ECDF quantiles of the raw
(unstandardized) bootstrap replicates.  Because the replicates are
standardized rather than studentized, the interval is only first-order
correct; shifting each endpoint by

    n^{-1} * sigma_hat * { p1(z) + q1(z) }

with z the standard-normal quantile at the endpoint's nominal level
restores second-order coverage.  The polynomials p1 and q1 come from the
expansion module (counts) or the smooth module (functionals of counts).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import ndtri

from .bootstrap import BootstrapRun

MIN_REPLICATES = 100


@dataclass
class CiResult:
    level: float
    lower: float
    upper: float
    corrected: bool = False
    correction_terms: Optional[tuple] = None

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError("interval endpoints are out of order")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _raw_quantiles(run: BootstrapRun, probs):
    """Inverse-ECDF quantiles on the raw statistic scale."""
    values = np.sort(run.center + run.scale * run.replicates)
    idx = np.ceil(np.asarray(probs) * run.B).astype(int) - 1
    return values[np.clip(idx, 0, run.B - 1)]


def percentile_ci(run: BootstrapRun, level: float) -> CiResult:
    """Equal-tailed percentile interval at the nominal coverage level."""
    if run.B < MIN_REPLICATES:
        raise ValueError(f"need at least {MIN_REPLICATES} replicates, "
                         f"got {run.B}")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    lo_p = (1.0 - level) / 2.0
    hi_p = (1.0 + level) / 2.0
    lo, hi = _raw_quantiles(run, [lo_p, hi_p])
    return CiResult(level=level, lower=float(lo), upper=float(hi))


def corrected_ci(run: BootstrapRun, level: float,
                 p1: Callable[[float], float],
                 q1: Callable[[float], float],
                 sigma_hat: float, n: int) -> CiResult:
    """Percentile interval with the second-order endpoint shift applied."""
    base = percentile_ci(run, level)
    lo_p = (1.0 - level) / 2.0
    hi_p = (1.0 + level) / 2.0
    z_lo, z_hi = ndtri(lo_p), ndtri(hi_p)
    shift_lo = (sigma_hat / n) * (p1(z_lo) + q1(z_lo))
    shift_hi = (sigma_hat / n) * (p1(z_hi) + q1(z_hi))
    return CiResult(level=level,
                    lower=base.lower + shift_lo,
                    upper=base.upper + shift_hi,
                    corrected=True,
                    correction_terms=((float(p1(z_lo)), float(q1(z_lo))),
                                      (float(p1(z_hi)), float(q1(z_hi)))))


def bonferroni(runs: Sequence[BootstrapRun], family_level: float,
               **corrected_kwargs) -> list:
    """Simultaneous intervals at per-interval level 1 - (1-family)/m."""
    if not runs:
        raise ValueError("need at least one bootstrap run")
    m = len(runs)
    per_level = 1.0 - (1.0 - family_level) / m
    if corrected_kwargs:
        return [corrected_ci(run, per_level, **corrected_kwargs)
                for run in runs]
    return [percentile_ci(run, per_level) for run in runs]
