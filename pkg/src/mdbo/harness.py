"""Repeated-run experiments and their CSV/JSON exports.

Every run is keyed by ``(algorithm, benchmark, run)`` and seeded from that
key, so results do not depend on execution order or on the worker count.
"""

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import OPTIMIZERS, make_optimizer
from .benchmarks import get_benchmark
from .rng import derive_seed
from .stats import boxplot_stats, describe, significance_mark, wilcoxon_rank_sum

__all__ = [
    "ExperimentPlan",
    "RunRecord",
    "ExperimentResult",
    "run_experiment",
    "wilcoxon_table",
    "export_all",
]

REFERENCE = "mdbo"


@dataclass
class ExperimentPlan:
    algorithms: list
    benchmarks: list
    runs: int = 15
    dim: int = 30
    base_seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.algorithms = [a.lower() for a in self.algorithms]
        self.benchmarks = [b.upper() for b in self.benchmarks]
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        for name in self.algorithms:
            if name not in OPTIMIZERS:
                raise KeyError(
                    f"unknown optimizer {name!r}; valid names: {', '.join(OPTIMIZERS)}"
                )
        for bid in self.benchmarks:
            get_benchmark(bid)
        unknown = set(self.params) - set(OPTIMIZERS)
        if unknown:
            raise KeyError(f"parameter overrides for unknown optimizers: {sorted(unknown)}")

    def seed_for(self, algorithm, benchmark, run):
        return derive_seed(self.base_seed, algorithm, benchmark, run)

    def tasks(self):
        return [
            (a, b, r)
            for a in self.algorithms
            for b in self.benchmarks
            for r in range(self.runs)
        ]

    def to_dict(self):
        return asdict(self)


@dataclass
class RunRecord:
    algorithm: str
    benchmark: str
    run: int
    seed: int
    final_best: float
    curve: np.ndarray
    evaluations: int


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    records: list

    def cell(self, algorithm, benchmark):
        return [r for r in self.records if r.algorithm == algorithm and r.benchmark == benchmark]

    def finals(self, algorithm, benchmark):
        return np.array([r.final_best for r in self.cell(algorithm, benchmark)])

    def summary(self):
        """``{(algorithm, benchmark): {mean, std, best, worst, values}}``."""
        table = {}
        for a in self.plan.algorithms:
            for b in self.plan.benchmarks:
                values = self.finals(a, b)
                table[(a, b)] = dict(describe(values), values=values)
        return table


def _execute(plan, task):
    algorithm, benchmark, run = task
    bench = get_benchmark(benchmark)
    seed = plan.seed_for(algorithm, benchmark, run)
    params = dict(plan.params.get(algorithm, {}))
    optimizer = make_optimizer(algorithm, random_state=seed, **params)
    trace = optimizer.minimize(bench, bench.space(plan.dim))
    return RunRecord(algorithm, benchmark, run, seed, trace.best_mdsi,
                     trace.best_per_iteration, trace.evaluations)


def _execute_packed(args):
    return _execute(*args)


def run_experiment(plan, jobs=1):
    """Execute every (algorithm, benchmark, run) cell of ``plan``."""
    tasks = plan.tasks()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_execute_packed, [(plan, t) for t in tasks], chunksize=4))
    else:
        records = [_execute(plan, t) for t in tasks]
    return ExperimentResult(plan, records)


def wilcoxon_table(result, reference=REFERENCE):
    """Rank-sum test of ``reference`` against every other algorithm, per benchmark."""
    plan = result.plan
    if reference not in plan.algorithms:
        return []
    rows = []
    for b in plan.benchmarks:
        ref = result.finals(reference, b)
        for opponent in plan.algorithms:
            if opponent == reference:
                continue
            other = result.finals(opponent, b)
            p = wilcoxon_rank_sum(ref, other)
            mark = significance_mark(p, ref.mean(), other.mean())
            rows.append({"benchmark": b, "opponent": opponent, "p_value": p, "mark": mark.mark})
    return rows


def _fmt(value):
    return repr(float(value))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_results(result, path):
    _write_csv(
        path,
        ["algorithm", "benchmark", "run", "final_best"],
        [[r.algorithm, r.benchmark, r.run, _fmt(r.final_best)] for r in result.records],
    )


def write_summary(result, path):
    rows = []
    for (a, b), s in result.summary().items():
        rows.append([a, b, _fmt(s["mean"]), _fmt(s["std"]), _fmt(s["best"]), _fmt(s["worst"])])
    _write_csv(path, ["algorithm", "benchmark", "mean", "std", "best", "worst"], rows)


def write_wilcoxon(result, path, reference=REFERENCE):
    rows = [
        [row["benchmark"], row["opponent"], _fmt(row["p_value"]), row["mark"]]
        for row in wilcoxon_table(result, reference)
    ]
    _write_csv(path, ["benchmark", "opponent", "p_value", "mark"], rows)


def convergence_rows(records):
    """Rows of (iteration, best of each run..., cross-run median)."""
    records = sorted(records, key=lambda r: r.run)
    curves = np.column_stack([r.curve for r in records])
    medians = np.median(curves, axis=1)
    return [
        [t + 1, *(_fmt(v) for v in curves[t]), _fmt(medians[t])]
        for t in range(curves.shape[0])
    ]


def export_convergence(result, out_dir):
    """One ``convergence_<alg>_<fn>.csv`` per cell; returns the written paths."""
    out_dir = Path(out_dir)
    paths = []
    for a in result.plan.algorithms:
        for b in result.plan.benchmarks:
            records = result.cell(a, b)
            header = ["iteration", *(f"run_{r.run}" for r in sorted(records, key=lambda r: r.run)),
                      "median"]
            path = out_dir / f"convergence_{a}_{b}.csv"
            _write_csv(path, header, convergence_rows(records))
            paths.append(path)
    return paths


def write_boxplot(result, path):
    rows = []
    for a in result.plan.algorithms:
        for b in result.plan.benchmarks:
            s = boxplot_stats(result.finals(a, b))
            outliers = ";".join(_fmt(v) for v in s.outliers)
            rows.append([a, b, *(_fmt(v) for v in (s.min, s.q1, s.median, s.q3, s.max)), outliers])
    _write_csv(path, ["algorithm", "benchmark", "min", "q1", "median", "q3", "max", "outliers"],
               rows)


def manifest(plan, command="bench"):
    seeds = {
        f"{a}/{b}/{r}": plan.seed_for(a, b, r) for a, b, r in plan.tasks()
    }
    return {
        "command": command,
        "version": __version__,
        "plan": plan.to_dict(),
        "seeds": seeds,
    }


def write_json(data, path):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def export_all(result, out_dir, manifest_data=None):
    """Write every CSV export plus ``manifest.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results(result, out_dir / "results.csv")
    write_summary(result, out_dir / "summary.csv")
    write_wilcoxon(result, out_dir / "wilcoxon.csv")
    write_boxplot(result, out_dir / "boxplot.csv")
    export_convergence(result, out_dir)
    write_json(manifest_data or manifest(result.plan), out_dir / "manifest.json")
