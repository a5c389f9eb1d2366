"""Monte Carlo experiment driver for CDF-error, coverage, and timing studies.

Every experiment is described by an ExperimentConfig (loadable from a
TOML file or a named preset) and is a pure function of (config, seed):
dataset m always draws from the substream keyed (seed, m), so reruns and
any worker count produce byte-identical output tables.

Three studies are provided:

* run_cdf_error — estimates the sampling distribution of the
  (standardized or studentized) statistic from M simulated datasets and
  reports the sup-distance of each method's CDF estimate against it,
  together with the Monte Carlo error budget of the truth estimate.
* run_coverage — fraction of percentile / corrected confidence intervals
  covering the population value across M datasets.
* run_timing — wall-clock medians for the precompute and per-replicate
  phases of the linear bootstrap, swept over graph sizes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bootstrap import (MultiplierSpec, baseline_eg, baseline_ss, ecdf,
                        mb_linear, mb_multiplicative, mb_quadratic)
from .counts import count_exact
from .expansion import (empirical_coefficients, gn_hat, norm_cdf, norm_pdf,
                        population_coefficients, population_theta, q1_hat)
from .graphs import GraphonSpec, sample_graph, sbm_g, sm_g
from .motifs import from_name
from .sketch import SketchPlan, default_n_perms, sketch_local
from .smooth import (BUILTIN_FUNCTIONALS, bootstrap_smooth,
                     expansion_coefficients, sigma_f_emp, u_vector)

MODELS = {"sbm-g": sbm_g, "sm-g": sm_g}

CDF_METHODS = ("normal", "edgeworth", "edgeworth-studentized",
               "mbq", "mbl", "mbl-apx", "mbm", "eg", "ss")
COVERAGE_METHODS = ("mbq", "mbl", "mbm", "eg", "ss")
TIMING_METHODS = ("mbl", "mbl-apx")

CENTERINGS = ("statistic", "bootstrap-mean")
STANDARDIZATIONS = ("per-dataset", "population")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment; hashable for provenance."""

    study: str = "cdf-error"          # cdf-error | coverage | timing
    model: str = "sbm-g"              # graphon preset name
    rho: float = 1.0                  # sparsity multiplier
    n: int = 160                      # graph size (single-size studies)
    motif: Optional[str] = "triangle"
    functional: Optional[str] = None  # builtin smooth functional name
    methods: tuple = ("normal", "edgeworth")
    B: int = 2000                     # bootstrap replicates
    M: int = 1000                     # Monte Carlo datasets
    grid: tuple = (-3.0, 3.0, 0.1)
    seed: int = 0
    centering: str = "statistic"      # bootstrap-ECDF centering
    standardization: str = "per-dataset"  # truth scaling convention
    level: float = 0.95               # CI coverage level
    n_values: tuple = ()              # timing sweep sizes
    repeats: int = 5                  # replicate-phase timing repeats
    repeats_precompute: int = 1       # precompute-phase timing repeats
    subsample_fraction: float = 0.5   # b/n for the subsampling baseline
    workers: int = 1
    note: str = ""

    def __post_init__(self):
        if self.study not in ("cdf-error", "coverage", "timing"):
            raise ValueError(f"unknown study {self.study!r}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; "
                             f"choose from {sorted(MODELS)}")
        if (self.motif is None) == (self.functional is None):
            raise ValueError("exactly one of motif / functional is required")
        if self.functional is not None and \
                self.functional not in BUILTIN_FUNCTIONALS:
            raise ValueError(f"unknown functional {self.functional!r}")
        if self.M < 1:
            raise ValueError("M must be at least 1")
        if self.B < 1:
            raise ValueError("B must be at least 1")
        lo, hi, step = self.grid
        if not step > 0:
            raise ValueError("grid step must be positive")
        if not lo < hi:
            raise ValueError("grid must be increasing")
        if self.centering not in CENTERINGS:
            raise ValueError(f"unknown centering {self.centering!r}")
        if self.standardization not in STANDARDIZATIONS:
            raise ValueError(
                f"unknown standardization {self.standardization!r}")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        for name in self.methods:
            if name not in CDF_METHODS:
                raise ValueError(f"unknown method {name!r}")

    # -- derived pieces -----------------------------------------------------

    def graphon(self) -> GraphonSpec:
        return MODELS[self.model](self.rho)

    def grid_points(self) -> np.ndarray:
        lo, hi, step = self.grid
        k = int(round((hi - lo) / step))
        return np.round(lo + step * np.arange(k + 1), 10)

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def metadata(self) -> dict:
        return {"version": __version__, "config_hash": self.config_hash(),
                "seed": self.seed, "config": asdict(self)}


def config_from_toml(path) -> ExperimentConfig:
    try:
        import tomllib
    except ImportError:  # pragma: no cover - python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    data = data.get("experiment", data)
    for key in ("methods", "grid", "n_values"):
        if key in data:
            data[key] = tuple(data[key])
    return ExperimentConfig(**data)


# ---------------------------------------------------------------------------
# deterministic seeding and parallel mapping


def dataset_seed(master: int, index: int) -> int:
    """Substream key for dataset `index`; independent of worker count."""
    return int(np.random.SeedSequence([master, index]).generate_state(1)[0])


def _map(fn, items, workers: int):
    """Order-preserving map; thread pool for workers > 1, same results."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# CDF-error study


def _truth_draw_count(config: ExperimentConfig, motif, spec, pop, m: int):
    graph, _ = sample_graph(spec, config.n, seed=dataset_seed(config.seed, m))
    stats = count_exact(graph, motif, want_pairwise=False)
    if config.standardization == "per-dataset":
        scale = stats.sigma_hat()
    else:
        scale = motif.r * pop.tau / np.sqrt(config.n)
    return (stats.t_hat - pop.theta) / scale


def _truth_draw_functional(config: ExperimentConfig, f, spec, mu_value,
                           m: int):
    graph, _ = sample_graph(spec, config.n, seed=dataset_seed(config.seed, m))
    stats = [count_exact(graph, motif, want_pairwise=False)
             for motif in f.motifs]
    value = f.value(u_vector(stats, config.rho))
    sigma = sigma_f_emp(f, stats, config.rho)
    return np.sqrt(config.n) * (value - mu_value) / sigma


def _count_method_curve(name, config, graph, stats, grid):
    mspec = MultiplierSpec(seed=dataset_seed(config.seed, 10**6 + 1))
    if name == "normal":
        return norm_cdf(grid)
    if name == "edgeworth":
        return gn_hat(empirical_coefficients(stats), grid)
    if name == "edgeworth-studentized":
        co = empirical_coefficients(stats)
        return norm_cdf(grid) \
            + norm_pdf(grid) * q1_hat(co, grid) / np.sqrt(config.n)
    if name == "mbq":
        run = mb_quadratic(stats, mspec, config.B)
    elif name == "mbl":
        run = mb_linear(stats, mspec, config.B)
    elif name == "mbl-apx":
        plan = SketchPlan(n_perms=default_n_perms(config.n),
                          seed=dataset_seed(config.seed, 10**6 + 2))
        sk = sketch_local(graph, stats.motif, plan)
        run = mb_linear(sk, mspec, config.B)
    elif name == "mbm":
        run = mb_multiplicative(stats, mspec, config.B)
    elif name == "eg":
        run = baseline_eg(graph, stats.motif, config.B,
                          seed=mspec.seed, stats=stats)
    elif name == "ss":
        b = max(stats.motif.r + 1,
                int(config.subsample_fraction * config.n))
        run = baseline_ss(graph, stats.motif, b, config.B,
                          seed=mspec.seed, stats=stats)
    else:  # pragma: no cover - guarded by config validation
        raise ValueError(name)
    reps = run.replicates
    if config.centering == "bootstrap-mean":
        reps = reps - reps.mean()
    return np.searchsorted(np.sort(reps), grid, side="right") / run.B


def _functional_method_curve(name, config, f, stats, grid):
    n = config.n
    if name == "normal":
        return norm_cdf(grid)
    if name == "edgeworth":
        out = expansion_coefficients(f, stats, config.rho)
        return norm_cdf(grid) + norm_pdf(grid) * out.p1(grid) / np.sqrt(n)
    if name == "edgeworth-studentized":
        out = expansion_coefficients(f, stats, config.rho, studentized=True)
        return norm_cdf(grid) + norm_pdf(grid) * out.q1(grid) / np.sqrt(n)
    if name == "mbq":
        mspec = MultiplierSpec(seed=dataset_seed(config.seed, 10**6 + 1))
        out = bootstrap_smooth(f, stats, mspec, config.B, config.rho)
        reps = out.replicates
        if config.centering == "bootstrap-mean":
            reps = reps - reps.mean()
        return np.searchsorted(np.sort(reps), grid, side="right") / config.B
    raise ValueError(f"method {name!r} is not available for functionals")


def run_cdf_error(config: ExperimentConfig) -> list:
    """Sup-distance of each method's CDF estimate against the MC truth.

    The truth is the empirical CDF, over M simulated datasets, of the
    statistic standardized per config (per-dataset tau or population
    tau).  Method curves come from one additional reference dataset.
    Each row carries the pointwise binomial standard error of the truth
    ECDF at the location of the largest deviation; separations are only
    meaningful when they exceed a few multiples of that budget.
    """
    spec = config.graphon()
    grid = config.grid_points()
    if config.motif is not None:
        motif = from_name(config.motif)
        pop = population_coefficients(spec, motif, config.n)
        draws = _map(lambda m: _truth_draw_count(config, motif, spec, pop, m),
                     range(config.M), config.workers)
    else:
        f = BUILTIN_FUNCTIONALS[config.functional]()
        mu = np.array([population_theta(spec, mot) / config.rho**mot.s
                       for mot in f.motifs])
        mu_value = f.value(mu)
        draws = _map(
            lambda m: _truth_draw_functional(config, f, spec, mu_value, m),
            range(config.M), config.workers)
    truth = np.searchsorted(np.sort(np.asarray(draws)), grid,
                            side="right") / config.M

    ref_graph, _ = sample_graph(spec, config.n,
                                seed=dataset_seed(config.seed, 10**6))
    rows = []
    if config.motif is not None:
        ref_stats = count_exact(ref_graph, motif, want_pairwise=True,
                                want_instances=("mbm" in config.methods))
        curves = {name: _count_method_curve(name, config, ref_graph,
                                            ref_stats, grid)
                  for name in config.methods}
    else:
        ref_stats = [count_exact(ref_graph, mot, want_pairwise=True)
                     for mot in f.motifs]
        curves = {name: _functional_method_curve(name, config, f,
                                                 ref_stats, grid)
                  for name in config.methods}
    for name, curve in curves.items():
        diff = np.abs(truth - curve)
        i = int(np.argmax(diff))
        budget = float(np.sqrt(truth[i] * (1.0 - truth[i]) / config.M))
        rows.append({"method": name,
                     "sup_distance": float(diff[i]),
                     "argmax_u": float(grid[i]),
                     "mc_budget": budget,
                     "M": config.M})
    return rows


# ---------------------------------------------------------------------------
# coverage study


def _coverage_one(config: ExperimentConfig, motif, spec, truth, m: int):
    from .expansion import p1_hat
    from .interval import corrected_ci, percentile_ci

    sd = dataset_seed(config.seed, m)
    graph, _ = sample_graph(spec, config.n, seed=sd)
    want_inst = "mbm" in config.methods
    stats = count_exact(graph, motif, want_pairwise=True,
                        want_instances=want_inst)
    coeffs = empirical_coefficients(stats)
    mspec = MultiplierSpec(seed=sd)
    out = {}
    for name in config.methods:
        if name == "mbq":
            run = mb_quadratic(stats, mspec, config.B)
        elif name == "mbl":
            run = mb_linear(stats, mspec, config.B)
        elif name == "mbm":
            run = mb_multiplicative(stats, mspec, config.B)
        elif name == "eg":
            run = baseline_eg(graph, motif, config.B, seed=sd, stats=stats)
        elif name == "ss":
            b = max(motif.r + 1, int(config.subsample_fraction * config.n))
            run = baseline_ss(graph, motif, b, config.B, seed=sd, stats=stats)
        else:
            raise ValueError(
                f"method {name!r} is not available for coverage")
        raw = percentile_ci(run, config.level)
        corr = corrected_ci(run, config.level,
                            p1=lambda z: p1_hat(coeffs, z),
                            q1=lambda z: q1_hat(coeffs, z),
                            sigma_hat=stats.sigma_hat(), n=config.n)
        out[name] = (bool(raw.contains(truth)), bool(corr.contains(truth)))
    return out


def run_coverage(config: ExperimentConfig,
                 truth: Optional[float] = None) -> list:
    """Coverage of raw and corrected percentile CIs against the truth."""
    if config.motif is None:
        raise ValueError("coverage study supports count statistics only")
    for name in config.methods:
        if name not in COVERAGE_METHODS:
            raise ValueError(
                f"method {name!r} is not available for coverage")
    spec = config.graphon()
    motif = from_name(config.motif)
    if truth is None:
        truth = population_theta(spec, motif)
    results = _map(
        lambda m: _coverage_one(config, motif, spec, truth, m),
        range(config.M), config.workers)
    rows = []
    for name in config.methods:
        raw = sum(r[name][0] for r in results)
        corr = sum(r[name][1] for r in results)
        rows.append({"method": name, "level": config.level,
                     "truth": float(truth), "M": config.M,
                     "coverage_raw": raw / config.M,
                     "coverage_corrected": corr / config.M})
    return rows


# ---------------------------------------------------------------------------
# timing study


def _timeit(fn, repeats: int) -> float:
    times = []
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def run_timing(config: ExperimentConfig) -> list:
    """Precompute and per-replicate wall times for the linear bootstrap.

    "precompute" covers building the rooted averages (exact counting for
    mbl, the permutation sketch for mbl-apx); "replicates" covers drawing
    B weighted replicates from them.  A small warm-up run precedes the
    sweep so allocator and cache effects do not land on the first cell.
    """
    for name in config.methods:
        if name not in TIMING_METHODS:
            raise ValueError(f"method {name!r} is not available for timing")
    if not config.n_values:
        raise ValueError("timing study needs n_values")
    spec = config.graphon()
    motif = from_name(config.motif)
    mspec = MultiplierSpec(seed=dataset_seed(config.seed, 10**6 + 1))

    warm_graph, _ = sample_graph(spec, 60, seed=dataset_seed(config.seed, 0))
    warm = count_exact(warm_graph, motif, want_pairwise=False)
    mb_linear(warm, mspec, 50)
    sketch_local(warm_graph, motif,
                 SketchPlan(n_perms=8, seed=dataset_seed(config.seed, 1)))

    rows = []
    for idx, n in enumerate(config.n_values):
        graph, _ = sample_graph(spec, int(n),
                                seed=dataset_seed(config.seed, 100 + idx))
        for name in config.methods:
            if name == "mbl":
                holder = {}

                def pre():
                    holder["stats"] = count_exact(graph, motif,
                                                  want_pairwise=False)
            else:
                plan = SketchPlan(n_perms=default_n_perms(int(n)),
                                  seed=dataset_seed(config.seed, 200 + idx))
                holder = {}

                def pre():
                    holder["stats"] = sketch_local(graph, motif, plan)
            t_pre = _timeit(pre, config.repeats_precompute)
            t_rep = _timeit(lambda: mb_linear(holder["stats"], mspec,
                                              config.B),
                            config.repeats)
            rows.append({"method": name, "n": int(n), "B": config.B,
                         "precompute_seconds": t_pre,
                         "replicate_seconds": t_rep,
                         "seconds_per_replicate": t_rep / config.B})
    return rows


def loglog_slope(ns: Sequence[float], times: Sequence[float]) -> float:
    """Least-squares slope of log(time) against log(n)."""
    return float(np.polyfit(np.log(np.asarray(ns, dtype=float)),
                            np.log(np.asarray(times, dtype=float)), 1)[0])


# ---------------------------------------------------------------------------
# output plumbing and presets


def write_rows(path, rows: Sequence[dict]) -> None:
    """CSV with keys of the first row as header; deterministic bytes."""
    if not rows:
        raise ValueError("no rows to write")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()),
                                lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(float(v))
                             if isinstance(v, (float, np.floating)) else v
                             for k, v in row.items()})


def write_metadata(path, config: ExperimentConfig) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(config.metadata(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(config: ExperimentConfig, output_dir) -> list:
    """Dispatch on config.study and write the CSV + metadata artifacts."""
    if config.study == "cdf-error":
        rows = run_cdf_error(config)
    elif config.study == "coverage":
        rows = run_coverage(config)
    else:
        rows = run_timing(config)
    output_dir = Path(output_dir)
    write_rows(output_dir / f"{config.study}.csv", rows)
    write_metadata(output_dir / "metadata.json", config)
    return rows


PRESETS = {
    # CDF error of all methods for the triangle density on the dense
    # two-block model; desk-scale M (the headline studies use M = 1e6).
    "fig1-sbm-triangle": ExperimentConfig(
        study="cdf-error", model="sbm-g", rho=1.0, n=160, motif="triangle",
        methods=("normal", "edgeworth", "mbq", "mbl", "eg", "ss"),
        B=2000, M=2000, seed=101,
        note="desk-scale CDF-error study; direction-only comparisons"),
    # coverage of the corrected 95% percentile interval
    "fig2-coverage": ExperimentConfig(
        study="coverage", model="sbm-g", rho=1.0, n=200, motif="triangle",
        methods=("mbq",), B=2000, M=200, level=0.95, seed=202,
        note="corrected percentile CI coverage, analytic truth"),
    # timing sweep for the four-cycle; dense model so exact counting is
    # expensive enough to separate the phases at the largest size
    "fig3-timing": ExperimentConfig(
        study="timing", model="sbm-g", rho=1.0, motif="fourcycle",
        methods=("mbl", "mbl-apx"), B=500, M=1,
        n_values=(1000, 2000, 4000),
        repeats=5, repeats_precompute=1, seed=303,
        note="single precompute measurement per cell; replicate phase "
             "takes the median of 5; sizes start at 1000 so fixed "
             "per-call generator overhead does not bias the slope"),
    # standardized-statistic expansion accuracy (desk scale): small n so
    # the skew correction is large relative to the M = 1e4 MC budget
    "tableA1": ExperimentConfig(
        study="cdf-error", model="sbm-g", rho=1.0, n=50, motif="triangle",
        methods=("normal", "edgeworth"),
        standardization="population",
        M=10_000, seed=404,
        note="population standardization; desk-scale M"),
    # studentized transitivity expansion accuracy (desk scale)
    "tableA2": ExperimentConfig(
        study="cdf-error", model="sbm-g", rho=1.0, n=60, functional="3T/V",
        motif=None,
        methods=("normal", "edgeworth-studentized"),
        M=10_000, seed=505,
        note="studentized smooth-functional expansion, desk scale"),
}
