"""Active construction of training sets.

Two schemes, one per model:

- boundary classifier: particle swarm search for regions of minimum
  prediction certainty, deliberately stopped before convergence (once
  the swarm's mean certainty drops below a threshold) so the returned
  particles stay spread out along the class boundaries;
- surface regressor: greedy selection from a fixed candidate pool by
  largest posterior conditional entropy, with the pool filtered once by
  the classifier and mislabeled picks discarded after simulation.

Hyperparameters are learnt on the initial design only; rounds refit the
site/factorization state with those hyperparameters held fixed.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from sklearn.base import clone

from .classification import OVRClassifier
from .errors import ConfigError
from .regression import LOG_2PI, GPRegressor
from .simulators import LabeledSet
from .validation import as_points

VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class PSOSettings:
    """Global-best PSO constants (constriction-style defaults) with
    per-coordinate velocity clamping and reflecting bounds."""

    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    v_max: float = 0.25
    max_iter: int = 100

    def __post_init__(self):
        if self.v_max <= 0 or self.max_iter < 1:
            raise ValueError("v_max must be positive and max_iter >= 1")


@dataclass(frozen=True)
class ClassifierALConfig:
    """Settings for boundary-detector active learning: ``n_initial``
    random points, then ``rounds`` swarms of ``swarm_size`` points each,
    every swarm stopped once its mean certainty falls below
    ``threshold``."""

    n_initial: int
    rounds: int
    swarm_size: int
    threshold: float = 0.5
    pso: PSOSettings = field(default_factory=PSOSettings)
    seed: int = 0

    def __post_init__(self):
        if self.n_initial < 1 or self.swarm_size < 1 or self.rounds < 0:
            raise ValueError("counts must be positive (rounds may be zero)")
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class SurfaceALConfig:
    """Settings for surface active learning: ``n_initial`` random points,
    then ``rounds`` single-point selections from a pool of
    ``n_candidates`` classifier-filtered locations."""

    n_initial: int
    rounds: int
    n_candidates: int
    seed: int = 0

    def __post_init__(self):
        if self.n_initial < 1 or self.rounds < 0 or self.n_candidates < 1:
            raise ValueError("counts must be positive (rounds may be zero)")
        if self.n_initial >= self.n_candidates:
            raise ValueError("n_initial must be much smaller than n_candidates")


@dataclass
class PSOResult:
    positions: np.ndarray
    best_position: np.ndarray
    best_value: float
    mean_value: float
    n_iter: int
    hit_cap: bool


def pso_minimize(
    objective,
    n_particles: int,
    n_dims: int,
    threshold: float,
    settings: PSOSettings,
    rng: np.random.Generator,
) -> PSOResult:
    """Minimize a vectorized objective over [0, 1]^D with global-best PSO.

    Iterations stop as soon as the swarm's mean objective drops below
    ``threshold`` (or the iteration cap is hit), returning the current
    particle positions rather than a single converged optimum.
    """
    positions = rng.random((n_particles, n_dims))
    velocities = np.zeros_like(positions)
    pbest_pos = positions.copy()
    pbest_val = np.full(n_particles, np.inf)
    gbest_pos = positions[0].copy()
    gbest_val = np.inf
    hit_cap = False
    for iteration in range(1, settings.max_iter + 1):
        values = np.asarray(objective(positions), dtype=float)
        improved = values < pbest_val
        pbest_val[improved] = values[improved]
        pbest_pos[improved] = positions[improved]
        leader = int(np.argmin(pbest_val))
        if pbest_val[leader] < gbest_val:
            gbest_val = float(pbest_val[leader])
            gbest_pos = pbest_pos[leader].copy()
        mean_value = float(np.mean(values))
        if mean_value < threshold:
            break
        if iteration == settings.max_iter:
            hit_cap = True
            break
        r1 = rng.random(positions.shape)
        r2 = rng.random(positions.shape)
        velocities = (
            settings.inertia * velocities
            + settings.cognitive * r1 * (pbest_pos - positions)
            + settings.social * r2 * (gbest_pos[None, :] - positions)
        )
        np.clip(velocities, -settings.v_max, settings.v_max, out=velocities)
        positions = positions + velocities
        # reflect at the walls (one bounce suffices given the velocity clamp)
        over, under = positions > 1.0, positions < 0.0
        positions[over] = 2.0 - positions[over]
        positions[under] = -positions[under]
        velocities[over | under] *= -1.0
        np.clip(positions, 0.0, 1.0, out=positions)
    return PSOResult(positions, gbest_pos, gbest_val, mean_value, iteration, hit_cap)


# ----------------------------------------------------------------------


def _initial_design(simulator, n: int, rng: np.random.Generator) -> np.ndarray:
    if hasattr(simulator, "points"):  # finite replay pool
        n = min(n, simulator.points.shape[0])
        idx = rng.choice(simulator.points.shape[0], size=n, replace=False)
        return simulator.points[idx]
    return rng.random((n, simulator.n_dims))


def _simulate_set(simulator, X, round_index: int) -> LabeledSet:
    labels, values = simulator.simulate(X)
    return LabeledSet.build(X, labels, values, np.full(len(labels), round_index))


def active_learn_classifier(
    simulator,
    config: ClassifierALConfig,
    classifier: OVRClassifier | None = None,
    initial: LabeledSet | None = None,
    round_callback=None,
):
    """Grow a boundary-detector training set with PSO-selected swarms.

    Hyperparameters are optimized once on the initial design; each round
    then appends one swarm, refitting the EP state (warm-started) with
    the kernels held fixed. Returns ``(classifier, dataset, audit)``
    where the dataset carries per-point provenance (0 = initial design,
    r = round index) and the audit is one row per round.
    """
    rng = np.random.default_rng(config.seed)
    t0 = time.perf_counter()
    if initial is None:
        X0 = _initial_design(simulator, config.n_initial, rng)
        dataset = _simulate_set(simulator, X0, 0)
    else:
        dataset = initial
    proto = classifier if classifier is not None else OVRClassifier(
        optimizer="nelder-mead"
    )
    proto = clone(proto)
    proto.require_all_classes = False
    clf = clone(proto).fit(dataset.X, dataset.labels)
    kernels = [est.kernel_ for est in clf.estimators_]
    audit = [
        {
            "round": 0,
            "points_added": len(dataset),
            "mean_certainty": np.nan,
            "cumulative_calls": len(dataset),
            "wall_time_s": time.perf_counter() - t0,
        }
    ]
    if round_callback is not None:
        round_callback(len(dataset), clf)
    for rnd in range(1, config.rounds + 1):
        swarm = pso_minimize(
            clf.certainty,
            config.swarm_size,
            simulator.n_dims,
            config.threshold,
            config.pso,
            rng,
        )
        new = _simulate_set(simulator, swarm.positions, rnd)
        dataset = dataset.extend(new.X, new.labels, new.values, rnd)
        sites = [(est.site_tau_, est.site_nu_) for est in clf.estimators_]
        pad = np.zeros(config.swarm_size)
        warm = [(np.r_[t, pad], np.r_[n, pad]) for t, n in sites]
        refit = clone(proto)
        refit.kernel = kernels
        refit.optimizer = None
        clf = refit.fit(dataset.X, dataset.labels, site_init=warm)
        audit.append(
            {
                "round": rnd,
                "points_added": config.swarm_size,
                "mean_certainty": swarm.mean_value,
                "cumulative_calls": len(dataset),
                "wall_time_s": time.perf_counter() - t0,
            }
        )
        if round_callback is not None:
            round_callback(len(dataset), clf)
    return clf, dataset, audit


# ----------------------------------------------------------------------


def entropy_from_variance(var) -> np.ndarray:
    """Differential entropy of a Gaussian with the given variance(s);
    the variance is floored at 1e-12 before the log."""
    var = np.maximum(np.asarray(var, dtype=float), VARIANCE_FLOOR)
    return 0.5 * np.log(var) + 0.5 * (LOG_2PI + 1.0)


def conditional_entropy(model: GPRegressor, X) -> np.ndarray:
    """Posterior predictive entropy of the surface model at ``X``;
    strictly increasing in the posterior variance."""
    _, var = model.predict(X, return_var=True)
    return entropy_from_variance(var)


def _candidate_pool(simulator, n: int, rng, exclude: np.ndarray | None):
    if hasattr(simulator, "points"):
        pool = simulator.points
        taken = set()
        if exclude is not None:
            taken = {np.ascontiguousarray(r).tobytes() for r in exclude}
        free = [
            i
            for i in range(pool.shape[0])
            if np.ascontiguousarray(pool[i]).tobytes() not in taken
        ]
        idx = rng.choice(len(free), size=min(n, len(free)), replace=False)
        return pool[np.asarray(free)[idx]]
    return rng.random((n, simulator.n_dims))


def active_learn_surface(
    simulator,
    classifier: OVRClassifier,
    config: SurfaceALConfig,
    regressor: GPRegressor | None = None,
    initial: LabeledSet | None = None,
    round_callback=None,
):
    """Grow the surface training set by greedy maximum-entropy selection.

    The candidate pool is drawn once, filtered once by the (pre-trained)
    classifier down to predicted-valid points, and then consumed one
    argmax-entropy pick per round. Picks are always simulated (they
    count against the budget) but join the regression set only when the
    simulator confirms a valid-AP label. Returns
    ``(regressor, record, audit)`` where the record holds every
    simulated point including discarded ones.

    ``round_callback``, if given, is invoked after the initial fit and
    after every round with ``(cumulative_calls, regressor_factory)``;
    the factory fits and returns the current regressor when called.
    """
    rng = np.random.default_rng(config.seed)
    t0 = time.perf_counter()
    if initial is None:
        X0 = _initial_design(simulator, config.n_initial, rng)
        record = _simulate_set(simulator, X0, 0)
    else:
        record = initial
    valid = record.labels == 2
    if not np.any(valid):
        raise ConfigError("initial design contains no valid-AP points")
    proto = regressor if regressor is not None else GPRegressor(
        optimizer="nelder-mead"
    )
    reg = clone(proto).fit(record.X[valid], record.values[valid])
    if reg.fitc_ is not None:
        raise ConfigError("surface active learning requires an exact-mode regressor")
    kernel, noise, jitter = reg.kernel_, reg.noise_, reg.jitter_

    candidates = _candidate_pool(
        simulator, config.n_candidates, rng, exclude=record.X
    )
    keep = classifier.predict(candidates) == 2  # single filtering pass
    pool = candidates[keep]
    if pool.shape[0] == 0:
        raise ConfigError("classifier filtered out the entire candidate pool")

    # Incremental posterior-variance tracking. V holds the whitened
    # cross-covariances L^-1 K(X_train, pool); because every selected
    # point is itself a pool column, appending a training point only
    # needs that column, a kernel row and one pass over V. The regressor
    # is rebuilt once at the end from the accumulated training set.
    n0 = reg.X_train_.shape[0]
    X_train = np.empty((n0 + config.rounds, pool.shape[1]))
    y_train = np.empty(n0 + config.rounds)
    X_train[:n0], y_train[:n0] = reg.X_train_, reg.y_train_
    V = np.empty((n0 + config.rounds, pool.shape[0]))
    V[:n0] = solve_triangular(reg.L_, kernel(reg.X_train_, pool), lower=True)
    var = kernel.diag(pool) - np.einsum("ij,ij->j", V[:n0], V[:n0])
    alive = np.ones(pool.shape[0], dtype=bool)
    n_train = n0
    audit = [
        {
            "round": 0,
            "point_added": int(np.sum(valid)),
            "max_entropy": np.nan,
            "cumulative_calls": len(record),
            "wall_time_s": time.perf_counter() - t0,
        }
    ]

    def current_regressor():
        return GPRegressor(kernel=kernel, noise=noise).fit(
            X_train[:n_train], y_train[:n_train]
        )

    if round_callback is not None:
        round_callback(len(record), current_regressor)
    for rnd in range(1, config.rounds + 1):
        alive_idx = np.flatnonzero(alive)
        if alive_idx.size == 0:
            break
        entropies = entropy_from_variance(var[alive_idx])
        pick = alive_idx[int(np.argmax(entropies))]
        x_new = pool[pick]
        alive[pick] = False
        labels, values = simulator.simulate(x_new[None, :])
        record = record.extend(x_new[None, :], labels, values, rnd)
        added = False
        if labels[0] == 2:
            b = V[:n_train, pick].copy()
            d2 = var[pick] + noise + jitter
            if d2 > 0.0:
                d = np.sqrt(d2)
                row = (kernel(x_new[None, :], pool)[0] - b @ V[:n_train]) / d
                var = np.maximum(var - row * row, 0.0)
                V[n_train] = row
                X_train[n_train], y_train[n_train] = x_new, float(values[0])
                n_train += 1
                added = True
        audit.append(
            {
                "round": rnd,
                "point_added": int(added),
                "max_entropy": float(np.max(entropies)),
                "cumulative_calls": len(record),
                "wall_time_s": time.perf_counter() - t0,
            }
        )
        if round_callback is not None:
            round_callback(len(record), current_regressor)
    return current_regressor(), record, audit


def write_audit(path, rows: list[dict]) -> None:
    """Write an active-learning audit log as CSV (one row per round)."""
    if not rows:
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
