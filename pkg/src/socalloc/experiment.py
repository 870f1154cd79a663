"""Experiment orchestration: n-grids, repeated trials, report files.

A plan expands into (n, trial) cells.  Each cell derives its own seed
from (master_seed, n, trial), generates one instance, computes one
baseline, and runs every variant on that same instance, so variants are
compared like-for-like.  Cells are independent and run on a small thread
pool (capped by the SOC_ALLOC_THREADS environment variable); each cell
writes its own part file and the parts are merged at the end, keyed by
(n, trial), so reruns and interleavings produce byte-identical reports.
"""

from __future__ import annotations

import json
import os
import re
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .baseline import DualCertificate, minimize_dual
from .errors import ConvergenceError, DomainError
from .generate import GeneratorConfig, generate
from .metrics import MetricsReport, aggregate, build_report, csv_header, csv_row, scaling_slope
from .online import VariantConfig, run_online
from .transform import linearize, to_soc

DEFAULT_VARIANTS = tuple(VariantConfig(v) for v in
                         ("vanilla", "marginal", "marginal-dynamic"))


@dataclass(frozen=True)
class ExperimentPlan:
    """A generator template swept over an n-grid with repeated trials."""

    generator: GeneratorConfig
    n_grid: tuple
    trials: int
    variants: tuple = DEFAULT_VARIANTS
    output_dir: str = "results"
    master_seed: int = 0
    tol: float = 1e-6
    compute_baseline: bool = True


def trial_seed(master_seed: int, n: int, trial: int) -> int:
    """Deterministic 64-bit seed for one (n, trial) cell."""
    ss = np.random.SeedSequence(entropy=(int(master_seed), int(n), int(trial)))
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(plan: ExperimentPlan, n: int, trial: int):
    """Run every variant of one cell; returns (seed, status, results).

    ``results`` maps variant name to its :class:`MetricsReport`.  All
    variants share the same generated instance; the tie-break seed
    equals the generation seed.
    """
    seed = trial_seed(plan.master_seed, n, trial)
    config = replace(plan.generator, n=int(n), seed=seed)
    instance = to_soc(generate(config))
    lin = linearize(instance)

    baseline: DualCertificate | None = None
    status = "ok"
    if plan.compute_baseline:
        try:
            baseline = minimize_dual(lin, tol=plan.tol)
        except ConvergenceError:
            baseline = None
            status = "baseline_failed"

    results: dict[str, MetricsReport] = {}
    for variant in plan.variants:
        cfg = replace(variant, rng_seed=seed)
        trace = run_online(instance, lin, cfg)
        results[variant.variant] = build_report(instance, trace, baseline)
    return seed, status, results


def _scaling_summary(per_variant_by_n: dict) -> dict:
    """Log-log slopes of mean gap / violations against n, per variant."""
    out: dict = {}
    for variant, by_n in per_variant_by_n.items():
        ns = sorted(by_n)
        slopes = {}
        for metric in ("optimality_gap", "soc_violation", "ce_violation",
                       "normalized_ce_violation", "probability_deviation"):
            pts = [(n, np.mean([getattr(r, metric) for r in by_n[n]])) for n in ns]
            if any(np.isnan(v) for _, v in pts):
                continue
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    slopes[metric] = scaling_slope(pts)
            except DomainError:
                continue
        out[variant] = slopes
    return out


def run_experiment(plan: ExperimentPlan) -> dict:
    """Execute the plan and write metrics.csv, aggregate.json, scaling.json.

    Returns the aggregate document.  Rerunning the same plan reproduces
    identical file bytes.
    """
    out_dir = Path(plan.output_dir)
    parts_dir = out_dir / "parts"
    parts_dir.mkdir(parents=True, exist_ok=True)

    cells = [(int(n), t) for n in plan.n_grid for t in range(plan.trials)]
    m = plan.generator.m
    experiment = plan.generator.experiment

    def work(cell):
        n, t = cell
        seed, status, results = run_trial(plan, n, t)
        lines = []
        for variant in plan.variants:
            report = results[variant.variant]
            lines.append(csv_row(experiment, variant.variant, n, t, seed,
                                 report, m, status=status))
        part = parts_dir / f"metrics_n{n}_t{t}.csv"
        part.write_text("".join(lines))
        return cell, seed, status, results

    workers = int(os.environ.get("SOC_ALLOC_THREADS", "0")) or min(4, os.cpu_count() or 1)
    if workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, cells))
    else:
        outcomes = [work(c) for c in cells]

    # Merge every part present, in (n, trial) order: stable regardless of
    # completion order, and processes running disjoint trial subsets into
    # the same directory union cleanly instead of clobbering each other.
    part_key = re.compile(r"metrics_n(\d+)_t(\d+)\.csv$")
    parts = sorted(
        (p for p in parts_dir.iterdir() if part_key.search(p.name)),
        key=lambda p: tuple(int(g) for g in part_key.search(p.name).groups()))
    with (out_dir / "metrics.csv").open("w") as fh:
        fh.write(csv_header(m))
        for part in parts:
            fh.write(part.read_text())

    by_variant_n: dict = {v.variant: {} for v in plan.variants}
    failed = []
    for (n, t), seed, status, results in outcomes:
        if status != "ok":
            failed.append({"n": n, "trial": t, "seed": seed, "status": status})
        for vname, report in results.items():
            by_variant_n[vname].setdefault(n, []).append(report)

    agg_doc = {
        "experiment": experiment,
        "n_grid": [int(n) for n in plan.n_grid],
        "trials": plan.trials,
        "master_seed": plan.master_seed,
        "failed_trials": failed,
        "variants": {
            vname: {str(n): aggregate(reports) for n, reports in by_n.items()}
            for vname, by_n in by_variant_n.items()
        },
    }
    (out_dir / "aggregate.json").write_text(json.dumps(agg_doc, indent=2, sort_keys=True))

    scaling_doc = _scaling_summary(by_variant_n)
    (out_dir / "scaling.json").write_text(json.dumps(scaling_doc, indent=2, sort_keys=True))
    return agg_doc
