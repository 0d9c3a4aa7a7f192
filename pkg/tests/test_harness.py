import csv

import numpy as np
import pytest

from mdbo import harness
from mdbo.benchmarks import BENCHMARKS, Benchmark
from mdbo.harness import ExperimentPlan, export_all, run_experiment, wilcoxon_table

SMALL = {"mdbo": {"m": 6, "iterations": 12}, "pso": {"m": 6, "iterations": 12}}


def small_plan(**kw):
    base = dict(algorithms=["mdbo", "pso"], benchmarks=["F15", "F1"], runs=3, dim=4,
                base_seed=7, params=SMALL)
    base.update(kw)
    return ExperimentPlan(**base)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_counts():
    plan = ExperimentPlan(["mdbo"], ["F15"], runs=15, dim=3, params={"mdbo": {"m": 5,
                                                                          "iterations": 4}})
    result = run_experiment(plan)
    assert len(result.records) == 15
    assert len(result.summary()) == 1


def test_constant_stub_has_zero_std(monkeypatch):
    stub = Benchmark("F15", "Flat", lambda x: np.full(x.shape[:-1], 2.5), -1.0, 1.0, "unimodal")
    monkeypatch.setitem(BENCHMARKS, "F15", stub)
    result = run_experiment(small_plan(benchmarks=["F15"]))
    cell = result.summary()[("mdbo", "F15")]
    assert cell["std"] == 0.0
    assert cell["mean"] == 2.5


def test_summary_ordering():
    for cell in run_experiment(small_plan()).summary().values():
        assert cell["best"] <= cell["mean"] <= cell["worst"]


def test_rerun_identical():
    a, b = run_experiment(small_plan()), run_experiment(small_plan())
    assert [r.final_best for r in a.records] == [r.final_best for r in b.records]


def test_parallel_matches_serial():
    serial = run_experiment(small_plan())
    parallel = run_experiment(small_plan(), jobs=2)
    assert [r.final_best for r in serial.records] == [r.final_best for r in parallel.records]


def test_seeds_depend_on_cell():
    plan = small_plan()
    seeds = {plan.seed_for(a, b, r) for a, b, r in plan.tasks()}
    assert len(seeds) == len(plan.tasks())
    assert plan.seed_for("mdbo", "F15", 0) != small_plan(base_seed=8).seed_for("mdbo", "F15", 0)


def test_unknown_names():
    with pytest.raises(KeyError):
        small_plan(algorithms=["sa"])
    with pytest.raises(KeyError):
        small_plan(benchmarks=["F99"])
    with pytest.raises(ValueError):
        small_plan(runs=0)


def test_wilcoxon_rows():
    rows = wilcoxon_table(run_experiment(small_plan()))
    assert [(r["benchmark"], r["opponent"]) for r in rows] == [("F15", "pso"), ("F1", "pso")]
    assert all(0 <= r["p_value"] <= 1 and r["mark"] in "+-=" for r in rows)


def test_exports(tmp_path):
    result = run_experiment(small_plan())
    export_all(result, tmp_path)
    assert read_csv(tmp_path / "summary.csv")[0] == ["algorithm", "benchmark", "mean", "std",
                                                     "best", "worst"]
    assert len(read_csv(tmp_path / "summary.csv")) == 1 + 4
    assert len(read_csv(tmp_path / "results.csv")) == 1 + 12
    assert read_csv(tmp_path / "wilcoxon.csv")[0] == ["benchmark", "opponent", "p_value", "mark"]
    assert len(read_csv(tmp_path / "boxplot.csv")) == 1 + 4

    conv = read_csv(tmp_path / "convergence_mdbo_F15.csv")
    assert conv[0] == ["iteration", "run_0", "run_1", "run_2", "median"]
    assert len(conv) == 1 + 12
    assert all(len(row) == 2 + 3 for row in conv)
    values = np.array([[float(v) for v in row[1:4]] for row in conv[1:]])
    assert np.all(np.diff(values, axis=0) <= 0)
    assert (tmp_path / "manifest.json").exists()


def test_convergence_median():
    result = run_experiment(small_plan())
    rows = harness.convergence_rows(result.cell("pso", "F1"))
    last = [float(v) for v in rows[-1][1:]]
    assert last[-1] == np.median(last[:-1])
