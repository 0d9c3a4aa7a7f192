"""Command-line entry point: ``mdbo bench``, ``mdbo cluster`` and ``mdbo list``.

Settings resolve as defaults < ``--config`` file < explicit flags. Every run
writes ``manifest.json`` holding the fully resolved settings; passing it back
through ``--config`` reproduces the outputs byte for byte.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import OPTIMIZERS
from .benchmarks import BENCHMARKS, list_benchmarks
from .clustering import (
    accuracy,
    cluster_optimize,
    kmeans_baseline,
    load_csv,
    normalize_minmax,
    synthetic_blobs,
)
from .harness import ExperimentPlan, export_all, run_experiment, write_json
from .rng import derive_seed

log = logging.getLogger("mdbo")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

COMMON_DEFAULTS = {"seed": 0, "out": "out", "jobs": 1}

BENCH_DEFAULTS = {
    "algorithms": list(OPTIMIZERS),
    "functions": list(BENCHMARKS),
    "runs": 15,
    "dim": 30,
    "iterations": 500,
    "pop_size": 50,
    "params": {},
}

CLUSTER_DEFAULTS = {
    "input": None,
    "synthetic": None,
    "k": 2,
    "optimizer": "mdbo",
    "runs": 1,
    "iterations": 500,
    "pop_size": 50,
    "kmeans_iters": 300,
    "params": {},
}

# settings that never change the written files
NOT_IN_MANIFEST = ("out", "jobs", "config")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_param(text):
    """``alg.key=value`` -> ``(alg, key, value)``."""
    try:
        target, value = text.split("=", 1)
        algorithm, key = target.split(".", 1)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected ALGORITHM.KEY=VALUE, got {text!r}"
        ) from None
    return algorithm.strip().lower(), key.strip(), _parse_value(value.strip())


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="base seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output directory (default ./out)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="parallel workers (default 1)")
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON settings file or a previous manifest.json")

    parser = _Parser(prog="mdbo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    bench = sub.add_parser("bench", parents=[common], help="benchmark experiment")
    bench.add_argument("--algorithms", type=_csv_list, default=argparse.SUPPRESS,
                       help="comma-separated optimizers (default all five)")
    bench.add_argument("--functions", type=_csv_list, default=argparse.SUPPRESS,
                       help="comma-separated benchmark ids (default F1..F17)")
    bench.add_argument("--runs", type=int, default=argparse.SUPPRESS, help="default 15")
    bench.add_argument("--dim", type=int, default=argparse.SUPPRESS, help="default 30")
    bench.add_argument("--iterations", type=int, default=argparse.SUPPRESS, help="default 500")
    bench.add_argument("--pop-size", dest="pop_size", type=int, default=argparse.SUPPRESS,
                       help="default 50")
    bench.add_argument("--param", dest="param_list", type=_parse_param, action="append",
                       default=argparse.SUPPRESS, metavar="ALG.KEY=VALUE",
                       help="optimizer override, e.g. mdbo.p_m=0.3 (repeatable)")

    cluster = sub.add_parser("cluster", parents=[common], help="centroid clustering")
    source = cluster.add_mutually_exclusive_group()
    source.add_argument("--input", default=argparse.SUPPRESS, help="CSV with header row")
    source.add_argument("--synthetic", default=argparse.SUPPRESS,
                        help="generated data, e.g. blobs:k=2,n=6000,d=11")
    cluster.add_argument("--k", type=int, default=argparse.SUPPRESS, help="default 2")
    cluster.add_argument("--optimizer", default=argparse.SUPPRESS, help="default mdbo")
    cluster.add_argument("--runs", type=int, default=argparse.SUPPRESS, help="default 1")
    cluster.add_argument("--iterations", type=int, default=argparse.SUPPRESS, help="default 500")
    cluster.add_argument("--pop-size", dest="pop_size", type=int, default=argparse.SUPPRESS,
                         help="default 50")
    cluster.add_argument("--kmeans-iters", dest="kmeans_iters", type=int,
                         default=argparse.SUPPRESS, help="default 300")
    cluster.add_argument("--param", dest="param_list", type=_parse_param, action="append",
                         default=argparse.SUPPRESS, metavar="ALG.KEY=VALUE")

    sub.add_parser("list", help="show benchmarks and optimizers")
    return parser


def _load_config(path, command):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    if data.get("command", command) != command:
        raise UsageError(f"config {path} was written by '{data['command']}', not '{command}'")
    # a manifest nests the settings under "config"
    return dict(data.get("config", data))


def resolve_settings(args, defaults):
    """Merge defaults, config file and explicit flags, in increasing precedence."""
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "verbose")}
    settings = {**COMMON_DEFAULTS, **defaults}
    if "config" in flags:
        config = _load_config(flags["config"], args.command)
        unknown = set(config) - set(settings)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        settings.update(config)
    param_list = flags.pop("param_list", [])
    settings.update({k: v for k, v in flags.items() if k != "config"})
    params = {alg: dict(kv) for alg, kv in (settings.get("params") or {}).items()}
    for algorithm, key, value in param_list:
        params.setdefault(algorithm, {})[key] = value
    settings["params"] = params
    return settings


def _optimizer_params(settings, name):
    params = {"m": settings["pop_size"], "iterations": settings["iterations"]}
    params.update(settings["params"].get(name, {}))
    return params


def _manifest(command, settings, seeds):
    config = {k: v for k, v in settings.items() if k not in NOT_IN_MANIFEST}
    return {"command": command, "version": __version__, "config": config, "seeds": seeds}


def cmd_bench(settings):
    unknown = [f for f in settings["functions"] if f.upper() not in BENCHMARKS]
    if unknown:
        raise UsageError(
            f"unknown benchmark id(s) {', '.join(unknown)}; valid ids: {', '.join(BENCHMARKS)}"
        )
    bad = [a for a in settings["algorithms"] if a.lower() not in OPTIMIZERS]
    if bad:
        raise UsageError(
            f"unknown optimizer(s) {', '.join(bad)}; valid names: {', '.join(OPTIMIZERS)}"
        )
    for name, value in (("runs", settings["runs"]), ("dim", settings["dim"]),
                        ("pop-size", settings["pop_size"]), ("jobs", settings["jobs"])):
        if value < 1:
            raise UsageError(f"--{name} must be at least 1")
    if settings["iterations"] < 1:
        raise UsageError("--iterations must be at least 1")
    algorithms = [a.lower() for a in settings["algorithms"]]
    unknown_params = set(settings["params"]) - set(OPTIMIZERS)
    if unknown_params:
        raise UsageError(f"--param names unknown optimizer(s): {', '.join(sorted(unknown_params))}")
    try:
        plan = ExperimentPlan(
            algorithms=algorithms,
            benchmarks=settings["functions"],
            runs=settings["runs"],
            dim=settings["dim"],
            base_seed=settings["seed"],
            params={a: _optimizer_params(settings, a) for a in algorithms},
        )
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    try:
        for a in algorithms:
            OPTIMIZERS[a](**plan.params[a])
    except TypeError as exc:
        raise UsageError(f"bad optimizer parameter: {exc}") from None

    log.info("running %d tasks", len(plan.tasks()))
    try:
        result = run_experiment(plan, jobs=settings["jobs"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    seeds = {f"{a}/{b}/{r}": plan.seed_for(a, b, r) for a, b, r in plan.tasks()}
    export_all(result, settings["out"], _manifest("bench", settings, seeds))
    print(f"wrote {len(result.records)} runs to {settings['out']}")
    return EXIT_OK


def _parse_synthetic(text, seed):
    kind, _, rest = text.partition(":")
    if kind != "blobs":
        raise UsageError(f"unknown synthetic generator {kind!r} (expected 'blobs')")
    options = {"k": 2, "n": 6000, "d": 11, "spread": 0.05, "seed": seed}
    for item in _csv_list(rest):
        key, _, value = item.partition("=")
        if key not in options:
            raise UsageError(f"unknown blobs option {key!r}")
        try:
            options[key] = float(value) if key == "spread" else int(value)
        except ValueError:
            raise UsageError(f"bad value for blobs option {key!r}: {value!r}") from None
    dataset, _ = synthetic_blobs(**options)
    return dataset


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_cluster(settings):
    k = settings["k"]
    if k < 1:
        raise UsageError("--k must be at least 1")
    if settings["runs"] < 1:
        raise UsageError("--runs must be at least 1")
    if settings["iterations"] < 1 or settings["pop_size"] < 2:
        raise UsageError("--iterations must be >= 1 and --pop-size >= 2")
    name = settings["optimizer"].lower()
    if name not in OPTIMIZERS:
        raise UsageError(f"unknown optimizer {name!r}; valid names: {', '.join(OPTIMIZERS)}")
    if settings["input"] and settings["synthetic"]:
        raise UsageError("--input and --synthetic are mutually exclusive")
    if settings["synthetic"]:
        raw = _parse_synthetic(settings["synthetic"], settings["seed"])
    elif settings["input"]:
        try:
            raw = load_csv(settings["input"])
        except OSError as exc:
            raise RuntimeError(f"cannot read {settings['input']}: {exc}") from None
    else:
        raise UsageError("one of --input or --synthetic is required")
    if k > raw.n_points:
        raise UsageError(f"--k {k} exceeds the number of points ({raw.n_points})")

    data = normalize_minmax(raw)
    params = _optimizer_params(settings, name)
    opt_runs, km_runs, seeds = [], [], {}
    for r in range(settings["runs"]):
        seed = derive_seed(settings["seed"], "cluster", name, r)
        km_seed = derive_seed(settings["seed"], "kmeans", r)
        seeds[f"{name}/{r}"], seeds[f"kmeans/{r}"] = seed, km_seed
        try:
            opt_runs.append(cluster_optimize(data, k, name, params, random_state=seed))
        except TypeError as exc:
            raise UsageError(f"bad optimizer parameter: {exc}") from None
        km_runs.append(kmeans_baseline(data, k, random_state=km_seed,
                                       max_iters=settings["kmeans_iters"]))

    best = min(opt_runs, key=lambda res: res.fitness)
    metrics = {"n_points": raw.n_points, "n_features": raw.n_features, "k": k}
    for label, runs, chosen in ((name, opt_runs, best),
                                ("kmeans", km_runs, min(km_runs, key=lambda res: res.fitness))):
        entry = {
            "fitness": chosen.fitness,
            "fitness_mean": float(np.mean([res.fitness for res in runs])),
            "fitness_runs": [res.fitness for res in runs],
        }
        if raw.labels is not None:
            accs = [accuracy(res.labels, raw.labels) for res in runs]
            entry.update(accuracy=accuracy(chosen.labels, raw.labels),
                         accuracy_best=max(accs), accuracy_mean=float(np.mean(accs)),
                         accuracy_runs=accs)
        metrics[label] = entry
    metrics["optimizer"] = name
    metrics["fitness"] = best.fitness
    if raw.labels is not None:
        metrics["accuracy"] = metrics[name]["accuracy"]

    out = Path(settings["out"])
    out.mkdir(parents=True, exist_ok=True)
    _write_rows(out / "assignment.csv", ["row", "cluster"],
                [[i, int(c)] for i, c in enumerate(best.labels)])
    names = raw.feature_names or [f"f{j + 1}" for j in range(raw.n_features)]
    _write_rows(out / "centroids.csv", names,
                [[repr(float(v)) for v in row] for row in best.centroids])
    write_json(metrics, out / "metrics.json")
    write_json(_manifest("cluster", settings, seeds), out / "manifest.json")
    summary = f"SSE {best.fitness:.6g}"
    if "accuracy" in metrics:
        summary += f", accuracy {metrics['accuracy']:.4f}"
    print(f"{name}: {summary}; wrote results to {out}")
    return EXIT_OK


def cmd_list():
    for b in list_benchmarks():
        print(f"{b.id:<4} {b.name:<24} [{b.low:g}, {b.high:g}]  {b.modality}")
    print("optimizers: " + ", ".join(OPTIMIZERS))
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help, --version and usage errors: report the code instead of exiting
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "list":
            return cmd_list()
        if args.command == "bench":
            return cmd_bench(resolve_settings(args, BENCH_DEFAULTS))
        return cmd_cluster(resolve_settings(args, CLUSTER_DEFAULTS))
    except UsageError as exc:
        print(f"mdbo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"mdbo: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
