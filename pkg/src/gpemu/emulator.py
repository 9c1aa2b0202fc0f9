"""The two-step emulator: classify first, regress inside the valid region.

A boundary detector segments query points into the three response
regions; only points assigned to the valid-AP region are passed to the
surface GP. An optional certainty fallback routes low-confidence points
back to the simulator. Uncertainty propagation sums the per-sample
posterior Gaussians into a discretized output distribution.

A multilinear lookup-table interpolator is included as the baseline the
GP pipeline is judged against, along with the two error metrics (mean
absolute surface error on truly-valid points; percent misclassification
over all points) and learning-curve machinery.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtr
from sklearn.base import BaseEstimator, clone

from .active import (
    ClassifierALConfig,
    PSOSettings,
    SurfaceALConfig,
    active_learn_classifier,
    active_learn_surface,
)
from .classification import OVRClassifier
from .errors import ConfigError, EmptyDistributionError
from .regression import GPRegressor
from .simulators import LabeledSet, sample_inputs, tally_labels
from .validation import as_points, check_unit_cube

VALUE_GRID = (0.0, 1000.0, 1000)  # output axis: [0, 1000] ms in 1000 bins


@dataclass(frozen=True)
class EmulatorPrediction:
    """Per-point emulator output: region label, posterior mean/variance
    (present only for the valid-AP region), prediction certainty, and
    whether the simulator fallback answered the point."""

    label: int
    mean: float | None
    variance: float | None
    certainty: float
    fallback: bool


class EmulatorPredictions:
    """Array-backed batch of :class:`EmulatorPrediction` records."""

    def __init__(self, labels, means, variances, certainty, fallback):
        self.labels = labels
        self.means = means
        self.variances = variances
        self.certainty = certainty
        self.fallback = fallback

    def __len__(self) -> int:
        return self.labels.shape[0]

    def __getitem__(self, i: int) -> EmulatorPrediction:
        on = self.labels[i] == 2
        return EmulatorPrediction(
            int(self.labels[i]),
            float(self.means[i]) if on else None,
            float(self.variances[i]) if on else None,
            float(self.certainty[i]),
            bool(self.fallback[i]),
        )

    def tally(self) -> dict[int, int]:
        return tally_labels(self.labels)


@dataclass(frozen=True)
class BiomarkerDistribution:
    """Discretized output density: 1000 equal bins over [0, 1000] ms,
    masses normalized to one."""

    edges: np.ndarray
    masses: np.ndarray

    @classmethod
    def from_gaussians(cls, means, variances) -> "BiomarkerDistribution":
        """Equal-weight mixture of the given components, binned by CDF
        differences and renormalized. Components with (near-)zero
        variance contribute a point mass to their containing bin."""
        lo, hi, n_bins = VALUE_GRID
        edges = np.linspace(lo, hi, n_bins + 1)
        means = np.asarray(means, dtype=float)
        variances = np.asarray(variances, dtype=float)
        if means.size == 0:
            raise EmptyDistributionError("no components to propagate")
        masses = np.zeros(n_bins)
        spread = variances > 1e-12
        if np.any(spread):
            sd = np.sqrt(variances[spread])
            z = (edges[None, :] - means[spread, None]) / sd[:, None]
            cdf = ndtr(z)
            masses += np.sum(cdf[:, 1:] - cdf[:, :-1], axis=0)
        for m in means[~spread]:
            b = int(np.clip((m - lo) / (hi - lo) * n_bins, 0, n_bins - 1))
            masses[b] += 1.0
        total = masses.sum()
        if total <= 0.0:
            raise EmptyDistributionError("all component mass fell outside the grid")
        return cls(edges, masses / total)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def mean(self) -> float:
        return float(self.centers @ self.masses)


# ----------------------------------------------------------------------
# Error metrics


def mean_absolute_surface_error(pred_means, labels_true, values_true) -> float:
    """Mean absolute error over test points whose TRUE label is valid-AP.

    The surface model is queried regardless of how the point would be
    classified, isolating the surface error from the boundary error.
    Predictions that are unavailable (NaN, e.g. lookup-table cells that
    straddle a boundary) are skipped.
    """
    labels_true = np.asarray(labels_true, dtype=int)
    on = labels_true == 2
    if not np.any(on):
        raise ValueError("test set contains no valid-AP points")
    pred = np.asarray(pred_means, dtype=float)[on]
    truth = np.asarray(values_true, dtype=float)[on]
    have = np.isfinite(pred)
    if not np.any(have):
        raise ValueError("model produced no surface predictions on valid points")
    return float(np.mean(np.abs(truth[have] - pred[have])))


def misclassification_rate(labels_pred, labels_true) -> float:
    """Percentage of test points assigned the wrong region label."""
    labels_pred = np.asarray(labels_pred, dtype=int)
    labels_true = np.asarray(labels_true, dtype=int)
    if labels_true.size == 0:
        raise ValueError("test set is empty")
    return 100.0 * float(np.mean(labels_pred != labels_true))


def surface_error(model, X, labels_true, values_true) -> float:
    """Surface MAE (ms) of any model exposing ``surface_mean``."""
    return mean_absolute_surface_error(
        model.surface_mean(X), labels_true, values_true
    )


def boundary_error(model, X, labels_true) -> float:
    """Misclassification rate (%) of any model exposing ``predict_labels``."""
    return misclassification_rate(model.predict_labels(X), labels_true)


# ----------------------------------------------------------------------
# Two-step emulator


@dataclass(frozen=True)
class TwoStepConfig:
    """Training protocol for the full pipeline.

    Simulator budget is ``n_initial (+ 2^D corners) + classifier_rounds *
    swarm_size + surface_rounds``. Hyperparameters are learnt on the
    initial design; when ``refit_hyper`` is set they are re-learnt once
    more after each active-learning stage (a single polish run starting
    from the current values).
    """

    n_initial: int = 500
    classifier_rounds: int = 30
    swarm_size: int = 50
    surface_rounds: int = 3000
    n_candidates: int = 10000
    threshold: float = 0.5
    pso: PSOSettings = field(default_factory=PSOSettings)
    corner_augment: bool = False
    refit_hyper: bool = True
    classifier_inducing: int | None = 300
    surface_inducing: int | None = None
    n_restarts: int = 5
    refit_restarts: int = 1
    max_opt_iter: int | None = 150
    fallback_threshold: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.fallback_threshold is not None and not (
            0.0 <= self.fallback_threshold <= 1.0
        ):
            raise ConfigError("fallback threshold must lie in [0, 1]")


@dataclass
class TrainReport:
    budget_initial: int = 0
    budget_classifier: int = 0
    budget_surface: int = 0
    classifier_dataset: LabeledSet | None = None
    surface_record: LabeledSet | None = None
    classifier_audit: list = field(default_factory=list)
    surface_audit: list = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def budget_total(self) -> int:
        return self.budget_initial + self.budget_classifier + self.budget_surface


class TwoStepEmulator:
    """Composition of the boundary detector and the surface GP."""

    def __init__(
        self,
        classifier: OVRClassifier,
        surface: GPRegressor,
        config: TwoStepConfig | None = None,
        fallback_threshold: float | None = None,
    ):
        self.classifier = classifier
        self.surface = surface
        self.config = config
        self.fallback_threshold = fallback_threshold

    @property
    def n_dims(self) -> int:
        return self.classifier.X_train_.shape[1]

    def predict(
        self, X, simulator=None, fallback_threshold: float | None = None
    ) -> EmulatorPredictions:
        """Segment the query points and predict inside the valid region.

        With a fallback threshold (argument, or the trained default) and
        a simulator, points whose certainty falls below the threshold
        are answered by the simulator exactly and flagged.
        """
        X = as_points(X, n_dims=self.n_dims)
        threshold = (
            fallback_threshold
            if fallback_threshold is not None
            else self.fallback_threshold
        )
        if threshold is not None and simulator is None:
            raise ConfigError("certainty fallback requires a simulator")
        labels, _, certainty = self.classifier.predict_full(X)
        means = np.full(X.shape[0], np.nan)
        variances = np.full(X.shape[0], np.nan)
        fallback = np.zeros(X.shape[0], dtype=bool)
        if threshold is not None:
            fallback = certainty < threshold
            if np.any(fallback):
                true_labels, true_values = simulator.simulate(X[fallback])
                labels = labels.copy()
                labels[fallback] = true_labels
                means[fallback] = true_values
                variances[fallback] = np.where(true_labels == 2, 0.0, np.nan)
        emulate = (labels == 2) & ~fallback
        if np.any(emulate):
            mean, var = self.surface.predict(X[emulate], return_var=True)
            means[emulate] = mean
            variances[emulate] = var
        return EmulatorPredictions(labels, means, variances, certainty, fallback)

    def predict_labels(self, X) -> np.ndarray:
        return self.classifier.predict(X)

    def surface_mean(self, X) -> np.ndarray:
        return self.surface.predict(X)

    def propagate(
        self, samples, simulator=None, fallback_threshold: float | None = None
    ) -> tuple[BiomarkerDistribution, dict[int, int]]:
        """Push input samples through the emulator into an output density.

        Valid-AP samples contribute their posterior Gaussians (fallback
        answers contribute point masses); the mixture is binned and
        renormalized. Returns the distribution and the per-region tally
        of all samples.
        """
        samples = as_points(samples, n_dims=self.n_dims)
        if samples.shape[0] == 0:
            raise ValueError("no samples to propagate")
        preds = self.predict(
            samples, simulator=simulator, fallback_threshold=fallback_threshold
        )
        tally = preds.tally()
        on = preds.labels == 2
        if not np.any(on):
            raise EmptyDistributionError(
                f"no sample was assigned to the valid-AP region (tally: {tally})",
                tally=tally,
            )
        dist = BiomarkerDistribution.from_gaussians(
            preds.means[on], preds.variances[on]
        )
        return dist, tally


def predict_two_step(emulator, X, simulator=None, fallback_threshold=None):
    return emulator.predict(
        X, simulator=simulator, fallback_threshold=fallback_threshold
    )


def propagate(emulator, samples, simulator=None, fallback_threshold=None):
    return emulator.propagate(
        samples, simulator=simulator, fallback_threshold=fallback_threshold
    )


def _stage(name: str, report: TrainReport):
    class _StageContext:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None:
                exc.args = (f"two-step training failed in stage '{name}': {exc}",)
                exc.partial_report = report
            return False

    return _StageContext()


def train_two_step(simulator, config: TwoStepConfig) -> tuple[TwoStepEmulator, TrainReport]:
    """Run the full training pipeline against a simulator.

    Stages: shared initial design (optionally corner-augmented) with
    hyperparameter learning, classifier active learning, optional
    classifier hyperparameter refresh, surface active learning with
    classifier filtering, optional surface hyperparameter refresh.
    """
    report = TrainReport()
    t0 = time.perf_counter()
    seeds = np.random.SeedSequence(config.seed).generate_state(4)

    with _stage("initial-design", report):
        scheme = "corners-augmented" if config.corner_augment else "uniform"
        X0 = sample_inputs(
            config.n_initial, simulator.n_dims, seed=int(seeds[0]), scheme=scheme
        )
        labels0, values0 = simulator.simulate(X0)
        initial = LabeledSet.build(X0, labels0, values0)
        report.budget_initial = len(initial)

    with _stage("classifier-active-learning", report):
        al_cfg = ClassifierALConfig(
            n_initial=len(initial),
            rounds=config.classifier_rounds,
            swarm_size=config.swarm_size,
            threshold=config.threshold,
            pso=config.pso,
            seed=int(seeds[1]),
        )
        proto = OVRClassifier(
            inducing=config.classifier_inducing,
            optimizer="nelder-mead",
            n_restarts=config.n_restarts,
            max_opt_iter=config.max_opt_iter,
            require_all_classes=False,
            random_state=int(seeds[1]),
        )
        clf, clf_data, clf_audit = active_learn_classifier(
            simulator, al_cfg, classifier=proto, initial=initial
        )
        report.classifier_dataset = clf_data
        report.classifier_audit = clf_audit
        report.budget_classifier = len(clf_data) - len(initial)

    if config.refit_hyper:
        with _stage("classifier-refit", report):
            refit = OVRClassifier(
                kernel=[est.kernel_ for est in clf.estimators_],
                inducing=config.classifier_inducing,
                optimizer="nelder-mead",
                n_restarts=config.refit_restarts,
                max_opt_iter=config.max_opt_iter,
                require_all_classes=False,
                random_state=int(seeds[1]),
            )
            clf = refit.fit(clf_data.X, clf_data.labels)

    with _stage("surface-active-learning", report):
        surf_cfg = SurfaceALConfig(
            n_initial=len(initial),
            rounds=config.surface_rounds,
            n_candidates=config.n_candidates,
            seed=int(seeds[2]),
        )
        reg_proto = GPRegressor(
            optimizer="nelder-mead",
            n_restarts=config.n_restarts,
            max_opt_iter=config.max_opt_iter,
            random_state=int(seeds[2]),
        )
        reg, surf_record, surf_audit = active_learn_surface(
            simulator, clf, surf_cfg, regressor=reg_proto, initial=initial
        )
        report.surface_record = surf_record
        report.surface_audit = surf_audit
        report.budget_surface = len(surf_record) - len(initial)

    with _stage("surface-refit", report):
        X_surf, y_surf = reg.X_train_, reg.y_train_
        if config.refit_hyper:
            final_reg = GPRegressor(
                kernel=reg.kernel_,
                noise=reg.noise_,
                inducing=config.surface_inducing,
                optimizer="nelder-mead",
                n_restarts=config.refit_restarts,
                max_opt_iter=config.max_opt_iter,
                random_state=int(seeds[3]),
            )
        elif config.surface_inducing is not None:
            final_reg = GPRegressor(
                kernel=reg.kernel_,
                noise=reg.noise_,
                inducing=config.surface_inducing,
                random_state=int(seeds[3]),
            )
        else:
            final_reg = None
        if final_reg is not None:
            reg = final_reg.fit(X_surf, y_surf)

    report.wall_time_s = time.perf_counter() - t0
    emulator = TwoStepEmulator(
        clf, reg, config=config, fallback_threshold=config.fallback_threshold
    )
    return emulator, report


# ----------------------------------------------------------------------
# Lookup-table baseline


class LUTInterpolator(BaseEstimator):
    """Regular-grid lookup table with multilinear interpolation.

    Vertices are simulated on a ``resolution^D`` lattice. A query whose
    enclosing cell has valid-AP labels at all 2^D corners gets the
    multilinear interpolant; otherwise it gets the nearest vertex's
    label and no value.
    """

    def __init__(self, resolution: int = 8):
        self.resolution = resolution

    @staticmethod
    def resolution_for_budget(budget: int, n_dims: int) -> int:
        res = int(np.floor(budget ** (1.0 / n_dims)))
        if res < 2:
            raise ConfigError(
                f"budget {budget} cannot fill a {n_dims}-d grid of resolution 2"
            )
        return res

    def fit(self, simulator):
        if self.resolution < 2:
            raise ValueError("grid resolution must be at least 2 per dimension")
        n_dims = simulator.n_dims
        axes = [np.linspace(0.0, 1.0, self.resolution)] * n_dims
        mesh = np.meshgrid(*axes, indexing="ij")
        vertices = np.column_stack([m.ravel() for m in mesh])
        labels, values = simulator.simulate(vertices)
        shape = (self.resolution,) * n_dims
        self.n_dims_ = n_dims
        self.labels_ = labels.reshape(shape)
        self.values_ = values.reshape(shape)
        return self

    def _locate(self, X):
        X = check_unit_cube(as_points(X, n_dims=self.n_dims_))
        pos = X * (self.resolution - 1)
        cell = np.clip(np.floor(pos).astype(int), 0, self.resolution - 2)
        frac = pos - cell
        return pos, cell, frac

    def predict(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Labels and interpolated values (NaN where unavailable)."""
        pos, cell, frac = self._locate(X)
        n = cell.shape[0]
        values = np.zeros(n)
        all_valid = np.ones(n, dtype=bool)
        for offsets in itertools.product((0, 1), repeat=self.n_dims_):
            idx = tuple((cell[:, j] + offsets[j]) for j in range(self.n_dims_))
            weights = np.prod(
                [frac[:, j] if offsets[j] else 1.0 - frac[:, j] for j in range(self.n_dims_)],
                axis=0,
            )
            corner_labels = self.labels_[idx]
            corner_values = self.values_[idx]
            all_valid &= corner_labels == 2
            values += np.where(corner_labels == 2, weights * corner_values, 0.0)
        nearest = tuple(np.rint(pos[:, j]).astype(int) for j in range(self.n_dims_))
        labels = np.where(all_valid, 2, self.labels_[nearest])
        values = np.where(all_valid, values, np.nan)
        return labels, values

    def predict_labels(self, X) -> np.ndarray:
        return self.predict(X)[0]

    def surface_mean(self, X, complete: bool = True) -> np.ndarray:
        """Surface values for error evaluation.

        Queries without a clean interpolation cell (the ones ``predict``
        leaves valueless) are completed with the nearest valid-vertex
        value, so the table answers every in-domain query the way a
        nearest-neighbour lookup would. Pass ``complete=False`` to keep
        them as NaN.
        """
        labels, values = self.predict(X)
        if not complete:
            return values
        missing = ~np.isfinite(values)
        if np.any(missing):
            axes = [np.linspace(0.0, 1.0, self.resolution)] * self.n_dims_
            mesh = np.meshgrid(*axes, indexing="ij")
            vertices = np.column_stack([m.ravel() for m in mesh])
            valid = self.labels_.ravel() == 2
            if not np.any(valid):
                return values
            vv, vx = self.values_.ravel()[valid], vertices[valid]
            X = as_points(X, n_dims=self.n_dims_)
            for i in np.flatnonzero(missing):
                d2 = np.sum((vx - X[i]) ** 2, axis=1)
                values[i] = vv[int(np.argmin(d2))]
        return values


# ----------------------------------------------------------------------
# Learning curves


@dataclass(frozen=True)
class LearningCurvePoint:
    strategy: str
    budget: int
    mean_error: float
    std_error: float
    n_repeats: int


STRATEGIES = (
    "random-surface",
    "active-surface",
    "random-classifier",
    "active-classifier",
)


def learning_curve(
    simulator,
    strategy: str,
    budgets,
    test_X,
    test_labels,
    test_values=None,
    repeats: int = 10,
    seed: int = 0,
    swarm_size: int = 10,
    threshold: float = 0.5,
    n_candidates: int = 2000,
    pso: PSOSettings | None = None,
    classifier: OVRClassifier | None = None,
    regressor: GPRegressor | None = None,
) -> list[LearningCurvePoint]:
    """Prediction error as a function of the simulation budget.

    The first budget is the initial design size (where hyperparameters
    are learnt); the error is recorded the first time the cumulative
    simulator-call count reaches each subsequent budget. Random
    strategies draw points uniformly; active strategies use the scheme
    matching the model. Repeats differ only in their child seed.
    """
    if strategy not in STRATEGIES:
        raise ConfigError(f"strategy must be one of {STRATEGIES}")
    budgets = sorted(int(b) for b in budgets)
    if repeats < 1 or budgets[0] < 1:
        raise ValueError("repeats and budgets must be positive")
    pso = pso or PSOSettings()
    errors = np.full((repeats, len(budgets)), np.nan)
    child_seeds = np.random.SeedSequence(seed).generate_state(repeats)
    for rep in range(repeats):
        errs = _one_learning_run(
            simulator,
            strategy,
            budgets,
            test_X,
            test_labels,
            test_values,
            int(child_seeds[rep]),
            swarm_size,
            threshold,
            n_candidates,
            pso,
            classifier,
            regressor,
        )
        errors[rep] = errs
    return [
        LearningCurvePoint(
            strategy,
            b,
            float(np.nanmean(errors[:, j])),
            float(np.nanstd(errors[:, j])),
            repeats,
        )
        for j, b in enumerate(budgets)
    ]


def _one_learning_run(
    simulator,
    strategy,
    budgets,
    test_X,
    test_labels,
    test_values,
    seed,
    swarm_size,
    threshold,
    n_candidates,
    pso,
    classifier,
    regressor,
):
    rng = np.random.default_rng(seed)
    n_initial = budgets[0]
    errs = np.full(len(budgets), np.nan)
    recorded = np.zeros(len(budgets), dtype=bool)

    if strategy.endswith("surface"):
        def evaluate(calls, reg):
            if not np.any(~recorded & (np.asarray(budgets) <= calls)):
                return
            if callable(reg):  # active learning hands over a lazy factory
                reg = reg()
            for j, b in enumerate(budgets):
                if not recorded[j] and calls >= b:
                    errs[j] = surface_error(
                        _Surface(reg), test_X, test_labels, test_values
                    )
                    recorded[j] = True
    else:
        def evaluate(calls, clf):
            for j, b in enumerate(budgets):
                if not recorded[j] and calls >= b:
                    errs[j] = boundary_error(_Boundary(clf), test_X, test_labels)
                    recorded[j] = True

    if strategy == "random-surface":
        _random_surface_run(simulator, n_initial, budgets[-1], rng, regressor, evaluate)
    elif strategy == "active-surface":
        clf = _pool_filter_classifier(simulator, classifier, rng)
        cfg = SurfaceALConfig(
            n_initial=n_initial,
            rounds=budgets[-1] - n_initial,
            n_candidates=n_candidates,
            seed=int(rng.integers(2**31)),
        )
        active_learn_surface(
            simulator, clf, cfg, regressor=regressor, round_callback=evaluate
        )
    elif strategy == "random-classifier":
        _random_classifier_run(
            simulator, n_initial, budgets, rng, classifier, evaluate
        )
    else:  # active-classifier
        rounds = int(np.ceil((budgets[-1] - n_initial) / swarm_size))
        cfg = ClassifierALConfig(
            n_initial=n_initial,
            rounds=rounds,
            swarm_size=swarm_size,
            threshold=threshold,
            pso=pso,
            seed=int(rng.integers(2**31)),
        )
        active_learn_classifier(
            simulator, cfg, classifier=classifier, round_callback=evaluate
        )
    return errs


class _Surface:
    def __init__(self, reg):
        self.reg = reg

    def surface_mean(self, X):
        return self.reg.predict(X)


class _Boundary:
    def __init__(self, clf):
        self.clf = clf

    def predict_labels(self, X):
        return self.clf.predict(X)


def _random_surface_run(simulator, n_initial, max_budget, rng, regressor, evaluate):
    from .active import _initial_design

    X0 = _initial_design(simulator, n_initial, rng)
    labels, values = simulator.simulate(X0)
    valid = labels == 2
    if not np.any(valid):
        raise ConfigError("initial design contains no valid-AP points")
    proto = regressor if regressor is not None else GPRegressor(optimizer="nelder-mead")
    reg = clone(proto).fit(X0[valid], values[valid])
    calls = n_initial
    evaluate(calls, reg)
    while calls < max_budget:
        x = rng.random((1, simulator.n_dims))
        lab, val = simulator.simulate(x)
        calls += 1
        if lab[0] == 2 and not np.any(np.all(reg.X_train_ == x[0], axis=1)):
            reg.add_point(x[0], float(val[0]))
        evaluate(calls, reg)


def _random_classifier_run(simulator, n_initial, budgets, rng, classifier, evaluate):
    from .active import _initial_design

    proto = classifier if classifier is not None else OVRClassifier(
        optimizer="nelder-mead"
    )
    proto = clone(proto)
    proto.require_all_classes = False
    X = _initial_design(simulator, n_initial, rng)
    labels, values = simulator.simulate(X)
    clf = clone(proto).fit(X, labels)
    kernels = [est.kernel_ for est in clf.estimators_]
    calls = n_initial
    evaluate(calls, clf)
    for budget in budgets:
        if budget <= calls:
            continue
        X_new = rng.random((budget - calls, simulator.n_dims))
        new_labels, _ = simulator.simulate(X_new)
        X = np.vstack([X, X_new])
        labels = np.append(labels, new_labels)
        calls = budget
        refit = clone(proto)
        refit.kernel = kernels
        refit.optimizer = None
        clf = refit.fit(X, labels)
        evaluate(calls, clf)


def _pool_filter_classifier(simulator, classifier, rng):
    """Quick classifier for candidate filtering in surface-only runs."""
    from .active import _initial_design

    proto = classifier if classifier is not None else OVRClassifier(
        optimizer="nelder-mead", n_restarts=2
    )
    proto = clone(proto)
    proto.require_all_classes = False
    X = _initial_design(simulator, 60, rng)
    labels, _ = simulator.simulate(X)
    return clone(proto).fit(X, labels)
