"""Command-line entry point.

One binary with subcommands::

    motifboot generate    sample a graph from a graphon preset
    motifboot ingest      normalize an edge list or roll-call CSV
    motifboot count       exact or sketched motif counts as JSON
    motifboot bootstrap   replicate ECDF over a grid as CSV
    motifboot edgeworth   expansion CDF over the standard grid as CSV
    motifboot smooth      smooth-functional bootstrap ECDF + coefficients
    motifboot ci          percentile / corrected interval as JSON
    motifboot experiment  run a config file or preset study

Conventions: validation failures exit with status 2 and a one-line JSON
error object on stderr.  Randomized subcommands take --seed; when it is
omitted a fresh seed is drawn and recorded in the output metadata.  CSV
artifacts get a sibling ``<name>.meta.json`` carrying
{version, config_hash, seed}; JSON outputs embed the same keys.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import (MultiplierSpec, baseline_eg, baseline_ss, ecdf,
                        mb_linear, mb_multiplicative, mb_quadratic)
from .counts import count_exact
from .expansion import (empirical_coefficients, gn_hat, norm_cdf, p1_hat,
                        q1_hat)
from .graphs import (export_edge_list, ingest_edge_list, ingest_rollcall,
                     read_rollcall_csv, sample_graph)
from .harness import MODELS, PRESETS, config_from_toml, run_experiment
from .interval import corrected_ci, percentile_ci
from .motifs import from_bitstring, from_name
from .sketch import SketchPlan, default_n_perms, sketch_local
from .smooth import BUILTIN_FUNCTIONALS, bootstrap_smooth, studentized_coeffs

BOOTSTRAP_METHODS = ("mbm", "mbq", "mbl", "mbl-apx", "eg", "ss")


def _fail(message: str, kind: str = "validation") -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return 2


def _resolve_seed(args) -> tuple:
    """(seed, generated?) — a missing --seed is drawn and reported."""
    if getattr(args, "seed", None) is not None:
        return int(args.seed), False
    return secrets.randbelow(2**31), True


def _metadata(seed, **extra) -> dict:
    payload = json.dumps(extra, sort_keys=True, default=str)
    return {"version": __version__,
            "config_hash": hashlib.sha256(payload.encode()).hexdigest()[:16],
            "seed": seed, **extra}


def _parse_motif(text: str):
    if set(text) <= {"0", "1"}:
        return from_bitstring(text)
    return from_name(text)


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like lo:hi:step, got {text!r}")
    if not (step > 0 and lo < hi):
        raise ValueError("grid needs step > 0 and lo < hi")
    k = int(round((hi - lo) / step))
    return np.round(lo + step * np.arange(k + 1), 10)


def _load_graph(path):
    graph, info = ingest_edge_list(path)
    return graph, info


def _write_csv(path, header, rows, meta: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v))
                              if isinstance(v, (float, np.floating))
                              else str(v) for v in row) + "\n")
    with open(path.with_suffix(path.suffix + ".meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit_json(obj: dict, output) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    seed, generated = _resolve_seed(args)
    spec = MODELS[args.model](args.rho)
    graph, latents = sample_graph(spec, args.n, seed=seed)
    export_edge_list(graph, args.output)
    if args.latents:
        np.savetxt(args.latents, latents, fmt="%.17g")
    _emit_json(_metadata(seed, command="generate", model=args.model,
                         rho=args.rho, n=args.n,
                         seed_generated=generated,
                         n_edges=int(graph.n_edges),
                         edge_density=graph.edge_density(),
                         output=str(args.output)), None)
    return 0


def cmd_ingest(args) -> int:
    if args.format == "edges":
        graph, info = ingest_edge_list(args.input, one_based=args.one_based)
        extra = info
    else:
        _, parties, votes = read_rollcall_csv(args.input)
        graph, threshold = ingest_rollcall(votes, parties,
                                           threshold=args.threshold)
        extra = {"threshold": threshold}
    export_edge_list(graph, args.output)
    _emit_json(_metadata(None, command="ingest", format=args.format,
                         n=graph.n, n_edges=int(graph.n_edges),
                         output=str(args.output), **extra), None)
    return 0


def cmd_count(args) -> int:
    graph, _ = _load_graph(args.input)
    motif = _parse_motif(args.motif)
    if args.sketch:
        seed, generated = _resolve_seed(args)
        n_perms = args.n_perms or default_n_perms(graph.n)
        stats = sketch_local(graph, motif,
                             SketchPlan(n_perms=n_perms, seed=seed))
    else:
        seed, generated = None, False
        stats = count_exact(graph, motif, want_pairwise=bool(args.h2_out))
    out = _metadata(seed, command="count", motif=args.motif,
                    sketch=bool(args.sketch),
                    seed_generated=generated)
    out.update({"n": stats.n, "t_hat": stats.t_hat,
                "tau_hat": stats.tau_hat,
                "provenance": stats.provenance,
                "h1": [float(v) for v in stats.h1]})
    if args.h2_out:
        stats.h2.astype(np.float64).tofile(args.h2_out)
        out["h2_path"] = str(args.h2_out)
    _emit_json(out, args.output)
    return 0


def _run_bootstrap(graph, stats, method, B, seed, subsample_size):
    mspec = MultiplierSpec(seed=seed)
    if method == "mbl":
        return mb_linear(stats, mspec, B)
    if method == "mbq":
        return mb_quadratic(stats, mspec, B)
    if method == "mbm":
        return mb_multiplicative(stats, mspec, B)
    if method == "mbl-apx":
        plan = SketchPlan(n_perms=default_n_perms(graph.n), seed=seed)
        return mb_linear(sketch_local(graph, stats.motif, plan), mspec, B)
    if method == "eg":
        return baseline_eg(graph, stats.motif, B, seed=seed, stats=stats)
    b = subsample_size or graph.n // 2
    return baseline_ss(graph, stats.motif, b, B, seed=seed, stats=stats)


def cmd_bootstrap(args) -> int:
    graph, _ = _load_graph(args.input)
    motif = _parse_motif(args.motif)
    seed, generated = _resolve_seed(args)
    grid = _parse_grid(args.grid)
    stats = count_exact(graph, motif,
                        want_pairwise=(args.method in ("mbq", "mbm")),
                        want_instances=(args.method == "mbm"))
    run = _run_bootstrap(graph, stats, args.method, args.B, seed,
                         args.subsample_size)
    values = ecdf(run, grid)
    meta = _metadata(seed, command="bootstrap", method=args.method,
                     motif=args.motif, B=args.B, grid=args.grid,
                     seed_generated=generated, n=graph.n,
                     center=run.center, scale=run.scale)
    _write_csv(args.output, ("u", "ecdf"), zip(grid.tolist(), values),
               meta)
    return 0


def cmd_edgeworth(args) -> int:
    graph, _ = _load_graph(args.input)
    motif = _parse_motif(args.motif)
    stats = count_exact(graph, motif, want_pairwise=True)
    coeffs = empirical_coefficients(stats)
    grid = _parse_grid(args.grid)
    gh = gn_hat(coeffs, grid)
    phi = norm_cdf(grid)
    meta = _metadata(None, command="edgeworth", motif=args.motif,
                     n=graph.n, tau_hat=coeffs.tau, m3=coeffs.m3,
                     m112=coeffs.m112)
    _write_csv(args.output, ("u", "gn_hat", "phi"),
               zip(grid.tolist(), gh.tolist(), phi.tolist()), meta)
    return 0


def cmd_smooth(args) -> int:
    graph, _ = _load_graph(args.input)
    f = BUILTIN_FUNCTIONALS[args.function]()
    seed, generated = _resolve_seed(args)
    rho = args.rho if args.rho is not None else graph.edge_density()
    stats = [count_exact(graph, motif, want_pairwise=True)
             for motif in f.motifs]
    out = bootstrap_smooth(f, stats, MultiplierSpec(seed=seed), args.B, rho)
    b1, b2 = studentized_coeffs(f, stats, rho)
    grid = _parse_grid(args.grid)
    values = np.searchsorted(np.sort(out.replicates), grid,
                             side="right") / args.B
    meta = _metadata(seed, command="smooth", function=args.function,
                     B=args.B, rho=rho, seed_generated=generated,
                     n=graph.n, value=out.value,
                     sigma_f_tilde=out.sigma_f_tilde,
                     a1_tilde=out.a1_tilde, a2_tilde=out.a2_tilde,
                     b1_hat=b1, b2_hat=b2)
    _write_csv(args.output, ("u", "ecdf"), zip(grid.tolist(), values),
               meta)
    if args.coefficients:
        _emit_json(meta, args.coefficients)
    return 0


def cmd_ci(args) -> int:
    graph, _ = _load_graph(args.input)
    motif = _parse_motif(args.motif)
    seed, generated = _resolve_seed(args)
    stats = count_exact(graph, motif,
                        want_pairwise=True,
                        want_instances=(args.method == "mbm"))
    run = _run_bootstrap(graph, stats, args.method, args.B, seed,
                         args.subsample_size)
    coeffs = empirical_coefficients(stats)
    raw = percentile_ci(run, args.level)
    corr = corrected_ci(run, args.level,
                        p1=lambda z: p1_hat(coeffs, z),
                        q1=lambda z: q1_hat(coeffs, z),
                        sigma_hat=stats.sigma_hat(), n=graph.n)
    out = _metadata(seed, command="ci", method=args.method,
                    motif=args.motif, B=args.B, level=args.level,
                    seed_generated=generated)
    out.update({
        "t_hat": stats.t_hat,
        "raw": {"lower": raw.lower, "upper": raw.upper},
        "corrected": {"lower": corr.lower, "upper": corr.upper},
        "shift_terms": {
            "lower": {"p1": corr.correction_terms[0][0],
                      "q1": corr.correction_terms[0][1]},
            "upper": {"p1": corr.correction_terms[1][0],
                      "q1": corr.correction_terms[1][1]}},
    })
    _emit_json(out, args.output)
    return 0


def cmd_experiment(args) -> int:
    if (args.preset is None) == (args.config is None):
        raise ValueError("provide exactly one of --preset / --config")
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ValueError(f"unknown preset {args.preset!r}; "
                             f"choose from {sorted(PRESETS)}")
        config = PRESETS[args.preset]
    else:
        config = config_from_toml(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = int(args.seed)
    if args.workers is not None:
        overrides["workers"] = int(args.workers)
    if overrides:
        from dataclasses import replace
        config = replace(config, **overrides)
    rows = run_experiment(config, args.output_dir)
    _emit_json({"rows_written": len(rows),
                "study": config.study,
                "output_dir": str(args.output_dir),
                **_metadata(config.seed, command="experiment",
                            config_hash=config.config_hash())}, None)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="motifboot",
        description="Multiplier bootstraps for network count statistics.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, seed=True, workers=True):
        if seed:
            sp.add_argument("--seed", type=int, default=None,
                            help="master seed (drawn and recorded if absent)")
        if workers:
            sp.add_argument("--workers", type=int, default=1,
                            help="parallelism cap; never changes results")

    g = sub.add_parser("generate", help="sample a graph from a model")
    g.add_argument("--model", choices=sorted(MODELS), required=True)
    g.add_argument("--rho", type=float, default=1.0)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--output", required=True, help="edge-list path")
    g.add_argument("--latents", default=None,
                   help="optional path for the latent positions")
    add_common(g)
    g.set_defaults(func=cmd_generate)

    g = sub.add_parser("ingest", help="normalize an input graph")
    g.add_argument("--input", required=True)
    g.add_argument("--format", choices=("edges", "rollcall"),
                   default="edges")
    g.add_argument("--one-based", action="store_true",
                   help="edge list uses 1-based vertex ids")
    g.add_argument("--threshold", type=int, default=None,
                   help="roll-call agreement threshold (else automatic)")
    g.add_argument("--output", required=True, help="canonical edge list")
    add_common(g, seed=False)
    g.set_defaults(func=cmd_ingest)

    g = sub.add_parser("count", help="motif counts and rooted averages")
    g.add_argument("--input", required=True)
    g.add_argument("--motif", required=True,
                   help="name (edge|twostar|triangle|fourcycle) or "
                        "upper-triangle bitstring")
    g.add_argument("--sketch", action="store_true",
                   help="randomized permutation sketch instead of exact")
    g.add_argument("--n-perms", type=int, default=None)
    g.add_argument("--h2-out", default=None,
                   help="write the pairwise table (row-major float64)")
    g.add_argument("--output", default=None, help="JSON path (else stdout)")
    add_common(g)
    g.set_defaults(func=cmd_count)

    g = sub.add_parser("bootstrap", help="bootstrap ECDF over a grid")
    g.add_argument("--input", required=True)
    g.add_argument("--method", choices=BOOTSTRAP_METHODS, required=True)
    g.add_argument("--motif", required=True)
    g.add_argument("--B", type=int, required=True)
    g.add_argument("--grid", default="-3:3:0.1")
    g.add_argument("--subsample-size", type=int, default=None,
                   help="subsample size b for method ss (default n/2)")
    g.add_argument("--output", required=True, help="CSV path")
    add_common(g)
    g.set_defaults(func=cmd_bootstrap)

    g = sub.add_parser("edgeworth", help="expansion CDF on the grid")
    g.add_argument("--input", required=True)
    g.add_argument("--motif", required=True)
    g.add_argument("--grid", default="-3:3:0.1")
    g.add_argument("--output", required=True, help="CSV path")
    add_common(g, seed=False)
    g.set_defaults(func=cmd_edgeworth)

    g = sub.add_parser("smooth", help="smooth-functional bootstrap")
    g.add_argument("--input", required=True)
    g.add_argument("--function", choices=sorted(BUILTIN_FUNCTIONALS),
                   required=True)
    g.add_argument("--B", type=int, required=True)
    g.add_argument("--rho", type=float, default=None,
                   help="sparsity normalizer (default: edge density)")
    g.add_argument("--grid", default="-3:3:0.1")
    g.add_argument("--output", required=True, help="ECDF CSV path")
    g.add_argument("--coefficients", default=None,
                   help="optional JSON path for the coefficient block")
    add_common(g)
    g.set_defaults(func=cmd_smooth)

    g = sub.add_parser("ci", help="percentile + corrected interval")
    g.add_argument("--input", required=True)
    g.add_argument("--motif", required=True)
    g.add_argument("--method", choices=BOOTSTRAP_METHODS, default="mbq")
    g.add_argument("--B", type=int, required=True)
    g.add_argument("--level", type=float, default=0.95)
    g.add_argument("--subsample-size", type=int, default=None)
    g.add_argument("--output", default=None, help="JSON path (else stdout)")
    add_common(g)
    g.set_defaults(func=cmd_ci)

    g = sub.add_parser("experiment", help="run a study config or preset")
    g.add_argument("--config", default=None, help="TOML config path")
    g.add_argument("--preset", default=None,
                   choices=sorted(PRESETS), metavar="NAME",
                   help=f"one of {sorted(PRESETS)}")
    g.add_argument("--output-dir", required=True)
    g.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    g.add_argument("--workers", type=int, default=None,
                   help="override the config worker cap")
    g.set_defaults(func=cmd_experiment)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = int(exc.code or 0)
        if code:  # argparse printed usage; add a machine-readable line
            sys.stderr.write(json.dumps(
                {"error": "usage", "message": "invalid arguments"}) + "\n")
        return code
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, IsADirectoryError,
            PermissionError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
