"""Ground-truth providers: synthetic discontinuous surfaces, CSV-backed
replay pools, and the concentration-to-conductance-scaling map.

Every simulator takes points in the unit hypercube and returns, per
point, a region label in {1, 2, 3} (1 = no depolarisation, 2 = valid
action potential, 3 = no repolarisation) and a biomarker value that is
present only inside region 2.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import IngestionError, SimulationError
from .validation import as_points, check_unit_cube

VALUE_RANGE = (0.0, 1000.0)  # biomarker bounds (ms) for a 1 Hz protocol


@dataclass(frozen=True)
class SimResult:
    """Outcome of one simulator evaluation: a region label, plus the
    biomarker value iff the point lies in the valid-AP region."""

    label: int
    value: float | None = None

    def __post_init__(self):
        if self.label not in (1, 2, 3):
            raise ValueError(f"label must be 1, 2 or 3, got {self.label}")
        if (self.value is None) != (self.label != 2):
            raise ValueError("value must be present exactly when label == 2")
        if self.value is not None and not (
            VALUE_RANGE[0] < self.value < VALUE_RANGE[1]
        ):
            raise ValueError(f"value {self.value} outside {VALUE_RANGE}")


@dataclass(frozen=True)
class LabeledSet:
    """Points with simulator labels/values and a provenance round index
    (0 for the initial design, r >= 1 for active-learning round r)."""

    X: np.ndarray
    labels: np.ndarray
    values: np.ndarray
    rounds: np.ndarray

    @classmethod
    def build(cls, X, labels, values, rounds=None):
        X = as_points(X)
        labels = np.asarray(labels, dtype=int)
        values = np.asarray(values, dtype=float)
        if rounds is None:
            rounds = np.zeros(X.shape[0], dtype=int)
        return cls(X, labels, values, np.asarray(rounds, dtype=int))

    def extend(self, X, labels, values, round_index: int) -> "LabeledSet":
        X = as_points(X, n_dims=self.X.shape[1])
        return LabeledSet(
            np.vstack([self.X, X]),
            np.append(self.labels, np.asarray(labels, dtype=int)),
            np.append(self.values, np.asarray(values, dtype=float)),
            np.append(self.rounds, np.full(X.shape[0], round_index, dtype=int)),
        )

    def __len__(self) -> int:
        return self.X.shape[0]


class SyntheticSurface:
    """Closed-form stand-in for an expensive bifurcating simulator.

    The unit cube splits into three regions driven by the first two
    coordinates (r1, r2) and the mean M of any remaining ones (M = 0.5
    when there are none):

    - label 1 where ``r1 <  0.12 + 0.03 r2``
    - label 3 where ``r2 <  b2 = 0.28 (1 - 0.4 r1) + 0.05 (M - 0.5)``
    - label 2 elsewhere, with value
      ``220 + 180 (1-r2)^2 + 60 (1-r1) + 50 (0.5-M) + 90 exp(-12 (r2-b2))``

    The exponential term makes the surface steepen sharply as it
    approaches the label-3 boundary, and the value jumps by ~90 across
    it. Coefficients are frozen so tests are reproducible.
    """

    def __init__(self, n_dims: int = 2):
        if n_dims < 2:
            raise ValueError("synthetic surface needs at least 2 input dimensions")
        self.n_dims = int(n_dims)

    def _extra_mean(self, X: np.ndarray) -> np.ndarray:
        if X.shape[1] == 2:
            return np.full(X.shape[0], 0.5)
        return X[:, 2:].mean(axis=1)

    def boundary1(self, X: np.ndarray) -> np.ndarray:
        return 0.12 + 0.03 * X[:, 1]

    def boundary2(self, X: np.ndarray) -> np.ndarray:
        M = self._extra_mean(X)
        return 0.28 * (1.0 - 0.4 * X[:, 0]) + 0.05 * (M - 0.5)

    def simulate(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Labels and values for a batch; values are NaN off region 2."""
        X = check_unit_cube(as_points(X, n_dims=self.n_dims))
        r1, r2 = X[:, 0], X[:, 1]
        M = self._extra_mean(X)
        b2 = self.boundary2(X)
        labels = np.full(X.shape[0], 2, dtype=int)
        labels[r2 < b2] = 3
        labels[r1 < self.boundary1(X)] = 1
        values = np.full(X.shape[0], np.nan)
        on_surface = labels == 2
        values[on_surface] = (
            220.0
            + 180.0 * (1.0 - r2[on_surface]) ** 2
            + 60.0 * (1.0 - r1[on_surface])
            + 50.0 * (0.5 - M[on_surface])
            + 90.0 * np.exp(-12.0 * (r2[on_surface] - b2[on_surface]))
        )
        return labels, values

    def evaluate(self, x) -> SimResult:
        labels, values = self.simulate(x)
        if labels[0] == 2:
            return SimResult(2, float(values[0]))
        return SimResult(int(labels[0]))


class PoolSimulator:
    """Replays a precomputed dataset as a finite-pool simulator.

    The rows double as a candidate pool; evaluation is an exact lookup,
    and querying any point not in the pool raises
    :class:`SimulationError`.
    """

    def __init__(self, X, labels, values):
        self.points = as_points(X)
        self.labels = np.asarray(labels, dtype=int)
        self.values = np.asarray(values, dtype=float)
        self.n_dims = self.points.shape[1]
        self._index = {
            np.ascontiguousarray(row).tobytes(): i
            for i, row in enumerate(self.points)
        }

    @classmethod
    def from_csv(cls, path) -> "PoolSimulator":
        return cls(*read_dataset(path))

    def simulate(self, X) -> tuple[np.ndarray, np.ndarray]:
        X = as_points(X, n_dims=self.n_dims)
        idx = np.empty(X.shape[0], dtype=int)
        for j, row in enumerate(X):
            key = np.ascontiguousarray(row).tobytes()
            if key not in self._index:
                raise SimulationError(f"point {row.tolist()} is not in the pool")
            idx[j] = self._index[key]
        return self.labels[idx].copy(), self.values[idx].copy()

    def evaluate(self, x) -> SimResult:
        labels, values = self.simulate(x)
        if labels[0] == 2:
            return SimResult(2, float(values[0]))
        return SimResult(int(labels[0]))


def tally_labels(labels) -> dict[int, int]:
    labels = np.asarray(labels, dtype=int)
    return {k: int(np.sum(labels == k)) for k in (1, 2, 3)}


# ----------------------------------------------------------------------
# Dataset files


def dataset_header(n_dims: int) -> list[str]:
    return [f"R_{j}" for j in range(1, n_dims + 1)] + ["label", "apd90"]


def write_dataset(path, X, labels, values) -> None:
    """Write rows ``R_1..R_D,label,apd90`` with an empty value field for
    off-surface labels. Floats are written with full round-trip precision."""
    X = as_points(X)
    labels = np.asarray(labels, dtype=int)
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset_header(X.shape[1]))
        for row, k, v in zip(X, labels, values):
            value_field = repr(float(v)) if k == 2 else ""
            writer.writerow([repr(float(c)) for c in row] + [int(k), value_field])


def read_dataset(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a dataset file, validating every row; errors name the line."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if len(header) < 3 or header[-2:] != ["label", "apd90"]:
            raise IngestionError(f"{path}:1: bad header {header!r}")
        n_dims = len(header) - 2
        if header[:n_dims] != [f"R_{j}" for j in range(1, n_dims + 1)]:
            raise IngestionError(f"{path}:1: bad coordinate columns {header!r}")
        X, labels, values = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n_dims + 2:
                raise IngestionError(
                    f"{path}:{lineno}: expected {n_dims + 2} fields, got {len(row)}"
                )
            try:
                coords = [float(c) for c in row[:n_dims]]
                label = int(row[n_dims])
            except ValueError as exc:
                raise IngestionError(f"{path}:{lineno}: {exc}") from None
            if label not in (1, 2, 3):
                raise IngestionError(f"{path}:{lineno}: label {label} not in 1..3")
            if any(not (0.0 <= c <= 1.0) for c in coords):
                raise IngestionError(f"{path}:{lineno}: coordinate outside [0, 1]")
            raw_value = row[n_dims + 1].strip()
            if label == 2:
                if not raw_value:
                    raise IngestionError(
                        f"{path}:{lineno}: label 2 row is missing its apd90 value"
                    )
                try:
                    value = float(raw_value)
                except ValueError:
                    raise IngestionError(
                        f"{path}:{lineno}: bad apd90 value {raw_value!r}"
                    ) from None
                if not (VALUE_RANGE[0] < value < VALUE_RANGE[1]):
                    raise IngestionError(
                        f"{path}:{lineno}: apd90 {value} outside {VALUE_RANGE}"
                    )
            else:
                if raw_value:
                    raise IngestionError(
                        f"{path}:{lineno}: label {label} row must leave apd90 empty"
                    )
                value = np.nan
            X.append(coords)
            labels.append(label)
            values.append(value)
    if not X:
        raise IngestionError(f"{path}: no data rows")
    return np.asarray(X), np.asarray(labels, dtype=int), np.asarray(values)


# ----------------------------------------------------------------------
# Concentration-effect curves


@dataclass(frozen=True)
class HillParams:
    """Concentration-effect parameters: half-maximal concentration,
    Hill coefficient, and the applied concentration (same units as
    ``ic50``; only the ratio matters)."""

    ic50: float
    n: float
    concentration: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.ic50) and self.ic50 > 0):
            raise ValueError("ic50 must be positive")
        if not (np.isfinite(self.n) and self.n > 0):
            raise ValueError("Hill coefficient must be positive")
        if not (np.isfinite(self.concentration) and self.concentration >= 0):
            raise ValueError("concentration must be nonnegative")

    def scaling(self) -> float:
        return float(hill_scaling(self.concentration, self.ic50, self.n))


def hill_scaling(concentration, ic50, n):
    """Remaining conductance fraction ``1 - C^n / (C^n + IC50^n)`` in (0, 1].

    Evaluated as a logistic in log-concentration for numerical range;
    strictly decreasing in the concentration.
    """
    c = np.asarray(concentration, dtype=float)
    ic50 = np.asarray(ic50, dtype=float)
    n = np.asarray(n, dtype=float)
    if np.any(c < 0) or np.any(ic50 <= 0) or np.any(n <= 0):
        raise ValueError("require concentration >= 0, ic50 > 0, n > 0")
    with np.errstate(divide="ignore"):
        logratio = np.where(c > 0, np.log(np.maximum(c, 1e-300)) - np.log(ic50), -np.inf)
    r = expit(-n * logratio)
    r = np.clip(r, np.finfo(float).tiny, 1.0)
    return r if r.ndim else float(r)


def percent_block(scaling):
    """Percentage of the channel blocked for a conductance scaling in [0, 1]."""
    r = np.asarray(scaling, dtype=float)
    if np.any(r < 0.0) or np.any(r > 1.0):
        raise ValueError("conductance scaling must lie in [0, 1]")
    out = 100.0 * (1.0 - r)
    return out if out.ndim else float(out)


def read_hill_samples(path) -> tuple[np.ndarray, np.ndarray]:
    """Read posterior samples of (pIC50, hill) from a two-column CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["pIC50", "hill"]:
            raise IngestionError(f"{path}:1: expected header pIC50,hill")
        pic50, hill = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                p, h = float(row[0]), float(row[1])
            except (ValueError, IndexError) as exc:
                raise IngestionError(f"{path}:{lineno}: {exc}") from None
            if h <= 0:
                raise IngestionError(f"{path}:{lineno}: hill must be positive")
            pic50.append(p)
            hill.append(h)
    if not pic50:
        raise IngestionError(f"{path}: no data rows")
    return np.asarray(pic50), np.asarray(hill)


def scalings_from_hill_samples(pic50, hill, concentration: float) -> np.ndarray:
    """Map (pIC50, hill) samples to conductance scalings at a fixed dose."""
    ic50 = 10.0 ** (-np.asarray(pic50, dtype=float))
    return hill_scaling(concentration, ic50, np.asarray(hill, dtype=float))


# ----------------------------------------------------------------------
# Input designs


def sample_inputs(n: int, n_dims: int, seed: int = 0, scheme: str = "uniform") -> np.ndarray:
    """Deterministic input designs on the unit cube.

    ``uniform`` draws n i.i.d. points; ``grid`` places a regular lattice
    (n must be a perfect D-th power); ``corners-augmented`` appends all
    2^D corner points to a uniform draw.
    """
    if n < 1 or n_dims < 1:
        raise ValueError("n and n_dims must be >= 1")
    rng = np.random.default_rng(seed)
    if scheme == "uniform":
        return rng.random((n, n_dims))
    if scheme == "grid":
        k = round(n ** (1.0 / n_dims))
        if k**n_dims != n:
            raise ValueError(
                f"grid scheme needs n = k^{n_dims} for integer k, got n={n}"
            )
        axes = [np.linspace(0.0, 1.0, k)] * n_dims
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])
    if scheme == "corners-augmented":
        corners = np.array(list(itertools.product((0.0, 1.0), repeat=n_dims)))
        return np.vstack([rng.random((n, n_dims)), corners])
    raise ValueError(f"unknown sampling scheme {scheme!r}")
