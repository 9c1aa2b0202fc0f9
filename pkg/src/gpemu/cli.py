"""Command-line front end.

Five subcommands: ``generate`` (dataset files from a simulator),
``train`` (the full two-step pipeline, persisted as a JSON manifest plus
training-set CSVs), ``predict``, ``propagate`` (input-sample uncertainty
pushed to an output distribution), and ``benchmark`` (learning curves
and the swarm-size sweep).

Every command is a pure function of its configuration, seed and input
files: reruns produce byte-identical primary outputs, with wall-clock
timings confined to clearly named columns. Parameters come from a flat
``key=value`` config file and/or command-line flags; flags win.

Exit codes: 0 success, 2 configuration, 3 file I/O, 4 numerical,
5 simulation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from .active import PSOSettings, write_audit
from .classification import OVRClassifier
from .emulator import (
    TwoStepConfig,
    TwoStepEmulator,
    boundary_error,
    learning_curve,
    train_two_step,
)
from .errors import ConfigError, IngestionError, NumericalError, SimulationError
from .kernels import RationalQuadratic, SquaredExponential
from .regression import GPRegressor
from .simulators import (
    PoolSimulator,
    SyntheticSurface,
    dataset_header,
    read_dataset,
    read_hill_samples,
    sample_inputs,
    scalings_from_hill_samples,
    tally_labels,
    write_dataset,
)

EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_SIMULATION = 2, 3, 4, 5

MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = "gpemu-emulator/1"


# ----------------------------------------------------------------------
# Simulators and small codecs


def make_simulator(spec: str):
    if spec == "synthetic2d":
        return SyntheticSurface(2)
    if spec == "synthetic4d":
        return SyntheticSurface(4)
    if spec.startswith("pool:"):
        return PoolSimulator.from_csv(spec[len("pool:"):])
    raise ConfigError(
        f"unknown simulator {spec!r}; use synthetic2d, synthetic4d or pool:<path>"
    )


def _kernel_to_dict(kernel) -> dict:
    if isinstance(kernel, SquaredExponential):
        ls = kernel.lengthscale
        return {
            "type": "squared-exponential",
            "variance": kernel.variance,
            "lengthscale": list(ls) if isinstance(ls, tuple) else ls,
        }
    if isinstance(kernel, RationalQuadratic):
        return {
            "type": "rational-quadratic",
            "variance": kernel.variance,
            "lengthscale": kernel.lengthscale,
            "alpha": kernel.alpha,
        }
    raise ConfigError(f"cannot serialize kernel {kernel!r}")


def _kernel_from_dict(d: dict):
    if d["type"] == "squared-exponential":
        ls = d["lengthscale"]
        return SquaredExponential(
            variance=d["variance"], lengthscale=tuple(ls) if isinstance(ls, list) else ls
        )
    if d["type"] == "rational-quadratic":
        return RationalQuadratic(
            variance=d["variance"], lengthscale=d["lengthscale"], alpha=d["alpha"]
        )
    raise ConfigError(f"unknown kernel type {d['type']!r}")


# ----------------------------------------------------------------------
# Emulator persistence (JSON manifest + training-set CSVs)


def save_emulator(emulator: TwoStepEmulator, report, outdir, extra: dict | None = None):
    """Persist a trained emulator: manifest, training sets, audit logs."""
    os.makedirs(outdir, exist_ok=True)
    clf_data = report.classifier_dataset
    write_dataset(
        os.path.join(outdir, "classifier_train.csv"),
        clf_data.X,
        clf_data.labels,
        clf_data.values,
    )
    reg = emulator.surface
    write_dataset(
        os.path.join(outdir, "surface_train.csv"),
        reg.X_train_,
        np.full(reg.X_train_.shape[0], 2),
        reg.y_train_,
    )
    write_audit(os.path.join(outdir, "audit_classifier.csv"), report.classifier_audit)
    write_audit(os.path.join(outdir, "audit_surface.csv"), report.surface_audit)
    clf = emulator.classifier
    manifest = {
        "format": MANIFEST_FORMAT,
        "n_dims": emulator.n_dims,
        "budget": {
            "initial": report.budget_initial,
            "classifier": report.budget_classifier,
            "surface": report.budget_surface,
            "total": report.budget_total,
        },
        "fallback_threshold": emulator.fallback_threshold,
        "classifier": {
            "inducing": clf.inducing,
            "max_sweeps": clf.max_sweeps,
            "tol": clf.tol,
            "random_state": clf.random_state,
            "kernels": [_kernel_to_dict(est.kernel_) for est in clf.estimators_],
        },
        "surface": {
            "inducing": reg.inducing if isinstance(reg.inducing, (int, type(None))) else None,
            "noise": reg.noise_,
            "random_state": reg.random_state,
            "kernel": _kernel_to_dict(reg.kernel_),
        },
        "files": {
            "classifier_train": "classifier_train.csv",
            "surface_train": "surface_train.csv",
        },
        "extra": extra or {},
    }
    with open(os.path.join(outdir, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return os.path.join(outdir, MANIFEST_NAME)


def load_emulator(path) -> TwoStepEmulator:
    """Rebuild an emulator from a manifest (re-factorizing deterministically)."""
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_NAME)
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != MANIFEST_FORMAT:
        raise IngestionError(f"{path}: unsupported manifest format")
    base = os.path.dirname(path)
    cX, clabels, _ = read_dataset(os.path.join(base, manifest["files"]["classifier_train"]))
    sX, _, svalues = read_dataset(os.path.join(base, manifest["files"]["surface_train"]))
    mc = manifest["classifier"]
    kernels = [_kernel_from_dict(d) for d in mc["kernels"]]
    clf = OVRClassifier(
        kernel=kernels,
        inducing=mc["inducing"],
        max_sweeps=mc["max_sweeps"],
        tol=mc["tol"],
        require_all_classes=False,
        random_state=mc["random_state"],
    ).fit(cX, clabels)
    ms = manifest["surface"]
    reg = GPRegressor(
        kernel=_kernel_from_dict(ms["kernel"]),
        noise=ms["noise"],
        inducing=ms["inducing"],
        random_state=ms["random_state"],
    ).fit(sX, svalues)
    return TwoStepEmulator(
        clf, reg, fallback_threshold=manifest.get("fallback_threshold")
    )


# ----------------------------------------------------------------------
# Config handling


def load_config(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _convert(key: str, raw: str, kind):
    try:
        if kind is bool:
            lowered = raw.lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind == "maybe_int":
            return None if raw.lower() in ("none", "") else int(raw)
        if kind == "maybe_float":
            return None if raw.lower() in ("none", "") else float(raw)
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from None


def resolve_params(args, schema: dict) -> dict:
    """Merge defaults, config file and flags (flags win); reject unknown keys."""
    params = {key: default for key, (_, default) in schema.items()}
    if getattr(args, "config", None):
        file_values = load_config(args.config)
        unknown = set(file_values) - set(schema)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, raw in file_values.items():
            params[key] = _convert(key, raw, schema[key][0])
    for key in schema:
        flag = getattr(args, key, None)
        if flag is not None:
            params[key] = flag
    missing = [k for k, v in params.items() if v is _REQUIRED]
    if missing:
        raise ConfigError(f"missing required parameter(s): {missing}")
    return params


_REQUIRED = object()


# ----------------------------------------------------------------------
# Commands


GENERATE_SCHEMA = {
    "simulator": (str, _REQUIRED),
    "n": (int, _REQUIRED),
    "scheme": (str, "uniform"),
    "seed": (int, 0),
    "out": (str, _REQUIRED),
}


def cmd_generate(params) -> int:
    simulator = make_simulator(params["simulator"])
    if not isinstance(simulator, SyntheticSurface):
        raise ConfigError("generate requires a synthetic simulator")
    X = sample_inputs(
        params["n"], simulator.n_dims, seed=params["seed"], scheme=params["scheme"]
    )
    labels, values = simulator.simulate(X)
    write_dataset(params["out"], X, labels, values)
    tally = tally_labels(labels)
    print(f"wrote {len(labels)} rows to {params['out']}")
    print(
        "region tally: "
        + ", ".join(f"label {k}: {tally[k]}" for k in sorted(tally))
    )
    return 0


TRAIN_SCHEMA = {
    "simulator": (str, _REQUIRED),
    "seed": (int, 0),
    "out": (str, _REQUIRED),
    "n_initial": (int, 500),
    "classifier_rounds": (int, 30),
    "swarm_size": (int, 50),
    "surface_rounds": (int, 3000),
    "n_candidates": (int, 10000),
    "threshold": (float, 0.5),
    "corner_augment": (bool, False),
    "refit_hyper": (bool, True),
    "classifier_inducing": ("maybe_int", 300),
    "surface_inducing": ("maybe_int", None),
    "n_restarts": (int, 5),
    "refit_restarts": (int, 1),
    "max_opt_iter": ("maybe_int", 150),
    "fallback": ("maybe_float", None),
    "pso_inertia": (float, 0.72),
    "pso_cognitive": (float, 1.49),
    "pso_social": (float, 1.49),
    "pso_vmax": (float, 0.25),
    "pso_max_iter": (int, 100),
}


def cmd_train(params) -> int:
    simulator = make_simulator(params["simulator"])
    config = TwoStepConfig(
        n_initial=params["n_initial"],
        classifier_rounds=params["classifier_rounds"],
        swarm_size=params["swarm_size"],
        surface_rounds=params["surface_rounds"],
        n_candidates=params["n_candidates"],
        threshold=params["threshold"],
        pso=PSOSettings(
            inertia=params["pso_inertia"],
            cognitive=params["pso_cognitive"],
            social=params["pso_social"],
            v_max=params["pso_vmax"],
            max_iter=params["pso_max_iter"],
        ),
        corner_augment=params["corner_augment"],
        refit_hyper=params["refit_hyper"],
        classifier_inducing=params["classifier_inducing"],
        surface_inducing=params["surface_inducing"],
        n_restarts=params["n_restarts"],
        refit_restarts=params["refit_restarts"],
        max_opt_iter=params["max_opt_iter"],
        fallback_threshold=params["fallback"],
        seed=params["seed"],
    )
    emulator, report = train_two_step(simulator, config)
    extra = {"simulator": params["simulator"], "seed": params["seed"]}
    manifest_path = save_emulator(emulator, report, params["out"], extra=extra)
    print(f"wrote {manifest_path}")
    print(
        f"budget: initial={report.budget_initial} "
        f"classifier={report.budget_classifier} "
        f"surface={report.budget_surface} total={report.budget_total}"
    )
    return 0


PREDICT_SCHEMA = {
    "model": (str, _REQUIRED),
    "points": (str, _REQUIRED),
    "out": (str, _REQUIRED),
    "fallback": ("maybe_float", None),
    "simulator": (str, None),
    "seed": (int, 0),
}


def read_points(path) -> np.ndarray:
    """Read query points from a points-only or full dataset CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise IngestionError(f"{path}: empty file")
    if header[-2:] == ["label", "apd90"]:
        return read_dataset(path)[0]
    n_dims = len(header)
    if header != [f"R_{j}" for j in range(1, n_dims + 1)]:
        raise IngestionError(f"{path}:1: expected columns R_1..R_D, got {header!r}")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise IngestionError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    return np.asarray(rows)


def cmd_predict(params) -> int:
    emulator = load_emulator(params["model"])
    X = read_points(params["points"])
    simulator = make_simulator(params["simulator"]) if params["simulator"] else None
    preds = emulator.predict(
        X, simulator=simulator, fallback_threshold=params["fallback"]
    )
    with open(params["out"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [f"R_{j}" for j in range(1, X.shape[1] + 1)]
            + ["label", "mean", "variance", "certainty", "fallback"]
        )
        for i in range(len(preds)):
            on = preds.labels[i] == 2
            writer.writerow(
                [repr(float(c)) for c in X[i]]
                + [
                    int(preds.labels[i]),
                    repr(float(preds.means[i])) if on else "",
                    repr(float(preds.variances[i])) if on else "",
                    repr(float(preds.certainty[i])),
                    int(preds.fallback[i]),
                ]
            )
    print(f"wrote {len(preds)} predictions to {params['out']}")
    print("region tally: " + str(preds.tally()))
    return 0


PROPAGATE_SCHEMA = {
    "model": (str, _REQUIRED),
    "samples": (str, None),
    "hill_samples": (str, None),
    "concentration": ("maybe_float", None),
    "channel": (int, 1),
    "out": (str, _REQUIRED),
    "tally_out": (str, None),
    "fallback": ("maybe_float", None),
    "simulator": (str, None),
    "seed": (int, 0),
}


def cmd_propagate(params) -> int:
    emulator = load_emulator(params["model"])
    if (params["samples"] is None) == (params["hill_samples"] is None):
        raise ConfigError("provide exactly one of samples / hill_samples")
    if params["samples"] is not None:
        X = read_points(params["samples"])
    else:
        if params["concentration"] is None:
            raise ConfigError("hill_samples requires a concentration")
        channel = params["channel"]
        if not (1 <= channel <= emulator.n_dims):
            raise ConfigError(
                f"channel must lie in 1..{emulator.n_dims}, got {channel}"
            )
        pic50, hill = read_hill_samples(params["hill_samples"])
        scalings = scalings_from_hill_samples(pic50, hill, params["concentration"])
        X = np.ones((scalings.shape[0], emulator.n_dims))
        X[:, channel - 1] = scalings
    simulator = make_simulator(params["simulator"]) if params["simulator"] else None
    dist, tally = emulator.propagate(
        X, simulator=simulator, fallback_threshold=params["fallback"]
    )
    with open(params["out"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "mass"])
        for left, right, mass in zip(dist.edges[:-1], dist.edges[1:], dist.masses):
            writer.writerow([repr(float(left)), repr(float(right)), repr(float(mass))])
    if params["tally_out"]:
        with open(params["tally_out"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label", "count"])
            for k in sorted(tally):
                writer.writerow([k, tally[k]])
    n_ap = tally[2]
    print(f"wrote distribution to {params['out']} (mass sum {dist.masses.sum():.9f})")
    print(f"samples per region: {tally} (valid-AP: {n_ap} of {X.shape[0]})")
    return 0


BENCHMARK_SCHEMA = {
    "simulator": (str, _REQUIRED),
    "mode": (str, "learning-curve"),
    "strategies": (str, "random-surface,active-surface"),
    "budgets": (str, "25,50,75"),
    "repeats": (int, 10),
    "test_n": (int, 2000),
    "test_seed": (int, 1234),
    "seed": (int, 0),
    "out": (str, _REQUIRED),
    "swarm_size": (int, 10),
    "threshold": (float, 0.5),
    "n_candidates": (int, 2000),
    "n_restarts": (int, 3),
    "max_opt_iter": ("maybe_int", 100),
    "swarm_sizes": (str, "100,50,25"),
    "n_initial": (int, 50),
    "active_points": (int, 100),
    "classifier_inducing": ("maybe_int", None),
}


def _benchmark_test_set(simulator, params):
    X = sample_inputs(params["test_n"], simulator.n_dims, seed=params["test_seed"])
    labels, values = simulator.simulate(X)
    return X, labels, values


def cmd_benchmark(params) -> int:
    simulator = make_simulator(params["simulator"])
    if params["mode"] == "learning-curve":
        return _benchmark_learning_curve(simulator, params)
    if params["mode"] == "swarm-size":
        return _benchmark_swarm_size(simulator, params)
    raise ConfigError("mode must be learning-curve or swarm-size")


def _benchmark_learning_curve(simulator, params) -> int:
    X, labels, values = _benchmark_test_set(simulator, params)
    budgets = [int(b) for b in params["budgets"].split(",") if b.strip()]
    rows = []
    for strategy in [s.strip() for s in params["strategies"].split(",") if s.strip()]:
        classifier = OVRClassifier(
            optimizer="nelder-mead",
            n_restarts=params["n_restarts"],
            max_opt_iter=params["max_opt_iter"],
            inducing=params["classifier_inducing"],
            require_all_classes=False,
        )
        regressor = GPRegressor(
            optimizer="nelder-mead",
            n_restarts=params["n_restarts"],
            max_opt_iter=params["max_opt_iter"],
        )
        rows += learning_curve(
            simulator,
            strategy,
            budgets,
            X,
            labels,
            values,
            repeats=params["repeats"],
            seed=params["seed"],
            swarm_size=params["swarm_size"],
            threshold=params["threshold"],
            n_candidates=params["n_candidates"],
            classifier=classifier,
            regressor=regressor,
        )
    with open(params["out"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "budget", "mean_error", "std_error", "repeats"])
        for row in rows:
            writer.writerow(
                [
                    row.strategy,
                    row.budget,
                    repr(row.mean_error),
                    repr(row.std_error),
                    row.n_repeats,
                ]
            )
    print(f"wrote {len(rows)} learning-curve rows to {params['out']}")
    return 0


def _benchmark_swarm_size(simulator, params) -> int:
    from .active import ClassifierALConfig, active_learn_classifier

    X, labels, _ = _benchmark_test_set(simulator, params)
    swarm_sizes = [int(s) for s in params["swarm_sizes"].split(",") if s.strip()]
    out_rows = []
    for n_s in swarm_sizes:
        rounds = max(1, params["active_points"] // n_s)
        cfg = ClassifierALConfig(
            n_initial=params["n_initial"],
            rounds=rounds,
            swarm_size=n_s,
            threshold=params["threshold"],
            seed=params["seed"],
        )
        proto = OVRClassifier(
            optimizer="nelder-mead",
            n_restarts=params["n_restarts"],
            max_opt_iter=params["max_opt_iter"],
            inducing=params["classifier_inducing"],
            require_all_classes=False,
        )
        t0 = time.perf_counter()

        def on_round(calls, clf, _n_s=n_s, _t0=t0):
            out_rows.append(
                {
                    "swarm_size": _n_s,
                    "training_size": calls,
                    "error": boundary_error(_Wrap(clf), X, labels),
                    "cumulative_time_s": time.perf_counter() - _t0,
                }
            )

        active_learn_classifier(simulator, cfg, classifier=proto, round_callback=on_round)
    with open(params["out"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["swarm_size", "training_size", "error", "cumulative_time_s"])
        for row in out_rows:
            writer.writerow(
                [
                    row["swarm_size"],
                    row["training_size"],
                    repr(row["error"]),
                    repr(row["cumulative_time_s"]),
                ]
            )
    print(f"wrote {len(out_rows)} swarm-size rows to {params['out']}")
    return 0


class _Wrap:
    def __init__(self, clf):
        self.clf = clf

    def predict_labels(self, X):
        return self.clf.predict(X)


# ----------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpemu",
        description="Two-step GP emulation of discontinuous response surfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=None, help="cap BLAS workers")

    p = sub.add_parser("generate", help="sample a simulator into a dataset CSV")
    add_common(p)
    p.add_argument("--simulator", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--scheme", default=None, choices=["uniform", "grid", "corners-augmented"])

    p = sub.add_parser("train", help="train a two-step emulator")
    add_common(p)
    p.add_argument("--simulator", default=None)
    p.add_argument("--fallback", type=float, default=None)
    for key in TRAIN_SCHEMA:
        if key in ("simulator", "seed", "out", "fallback"):
            continue
        kind, _ = TRAIN_SCHEMA[key]
        flag = "--" + key.replace("_", "-")
        if kind is bool:
            p.add_argument(flag, type=lambda s: _convert(key, s, bool), default=None)
        elif kind in ("maybe_int", "maybe_float"):
            p.add_argument(
                flag,
                type=lambda s, _k=key, _kind=kind: _convert(_k, s, _kind),
                default=None,
            )
        else:
            p.add_argument(flag, type=kind, default=None)

    p = sub.add_parser("predict", help="predict labels/values for query points")
    add_common(p)
    p.add_argument("--model", default=None)
    p.add_argument("--points", "--in", dest="points", default=None)
    p.add_argument("--fallback", type=float, default=None)
    p.add_argument("--simulator", default=None)

    p = sub.add_parser("propagate", help="propagate input samples to an output density")
    add_common(p)
    p.add_argument("--model", default=None)
    p.add_argument("--samples", default=None)
    p.add_argument("--hill-samples", dest="hill_samples", default=None)
    p.add_argument("--concentration", type=float, default=None)
    p.add_argument("--channel", type=int, default=None)
    p.add_argument("--tally-out", dest="tally_out", default=None)
    p.add_argument("--fallback", type=float, default=None)
    p.add_argument("--simulator", default=None)

    p = sub.add_parser("benchmark", help="learning curves and swarm-size sweeps")
    add_common(p)
    p.add_argument("--simulator", default=None)
    p.add_argument("--mode", default=None, choices=["learning-curve", "swarm-size"])
    p.add_argument("--strategies", default=None)
    p.add_argument("--budgets", default=None)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--test-n", dest="test_n", type=int, default=None)
    p.add_argument("--test-seed", dest="test_seed", type=int, default=None)
    p.add_argument("--swarm-size", dest="swarm_size", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--n-candidates", dest="n_candidates", type=int, default=None)
    p.add_argument("--n-restarts", dest="n_restarts", type=int, default=None)
    p.add_argument("--max-opt-iter", dest="max_opt_iter", type=int, default=None)
    p.add_argument("--swarm-sizes", dest="swarm_sizes", default=None)
    p.add_argument("--n-initial", dest="n_initial", type=int, default=None)
    p.add_argument("--active-points", dest="active_points", type=int, default=None)
    p.add_argument(
        "--classifier-inducing", dest="classifier_inducing", type=int, default=None
    )
    return parser


_COMMANDS = {
    "generate": (GENERATE_SCHEMA, cmd_generate),
    "train": (TRAIN_SCHEMA, cmd_train),
    "predict": (PREDICT_SCHEMA, cmd_predict),
    "propagate": (PROPAGATE_SCHEMA, cmd_propagate),
    "benchmark": (BENCHMARK_SCHEMA, cmd_benchmark),
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    schema, command = _COMMANDS[args.command]
    params = resolve_params(args, schema)
    threads = getattr(args, "threads", None)
    if threads:
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=threads):
            return command(params)
    return command(params)


def main(argv=None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IngestionError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
