import numpy as np
import pytest

from oracles import multilinear_2d

from gpemu.classification import OVRClassifier
from gpemu.emulator import (
    BiomarkerDistribution,
    LUTInterpolator,
    TwoStepConfig,
    TwoStepEmulator,
    boundary_error,
    learning_curve,
    mean_absolute_surface_error,
    misclassification_rate,
    surface_error,
    train_two_step,
)
from gpemu.errors import ConfigError, EmptyDistributionError
from gpemu.kernels import SquaredExponential
from gpemu.regression import GPRegressor
from gpemu.simulators import SyntheticSurface, sample_inputs


def small_config(**overrides):
    base = dict(
        n_initial=50,
        classifier_rounds=2,
        swarm_size=8,
        surface_rounds=25,
        n_candidates=600,
        classifier_inducing=None,
        n_restarts=2,
        max_opt_iter=50,
        seed=3,
    )
    base.update(overrides)
    return TwoStepConfig(**base)


@pytest.fixture(scope="module")
def trained():
    sim = SyntheticSurface(2)
    em, report = train_two_step(sim, small_config())
    return sim, em, report


class TestTrainTwoStep:
    def test_budget_accounting_exact(self, trained):
        _, em, report = trained
        assert report.budget_initial == 50
        assert report.budget_classifier == 2 * 8
        assert report.budget_surface == 25
        assert report.budget_total == 50 + 16 + 25

    def test_paper_scale_config_budget_arithmetic(self):
        cfg = TwoStepConfig(
            n_initial=500, classifier_rounds=30, swarm_size=50, surface_rounds=3000
        )
        assert cfg.n_initial + cfg.classifier_rounds * cfg.swarm_size + cfg.surface_rounds == 5000

    def test_degenerate_config_equals_plain_fit(self):
        sim = SyntheticSurface(2)
        cfg = small_config(classifier_rounds=0, surface_rounds=0, refit_hyper=False, seed=7)
        em, report = train_two_step(sim, cfg)
        assert report.budget_total == 50
        assert em.classifier.X_train_.shape[0] == 50
        labels, values = sim.simulate(em.classifier.X_train_)
        assert em.surface.X_train_.shape[0] == int(np.sum(labels == 2))

    def test_surface_training_purity(self, trained):
        sim, em, _ = trained
        labels, _ = sim.simulate(em.surface.X_train_)
        assert np.all(labels == 2)

    def test_corner_augmentation_adds_corners(self):
        sim = SyntheticSurface(2)
        cfg = small_config(corner_augment=True, classifier_rounds=0, surface_rounds=0,
                           refit_hyper=False)
        em, report = train_two_step(sim, cfg)
        assert report.budget_initial == 50 + 4
        X = em.classifier.X_train_
        corners = X[50:]
        assert np.all(np.isin(corners, (0.0, 1.0)))

    def test_stage_failure_carries_stage_name(self):
        sim = SyntheticSurface(2)

        cfg = small_config(n_candidates=51)  # n_initial=50 < 51 passes config,
        # but the pool will be tiny; force a real failure instead via a broken sim

        class Broken:
            n_dims = 2

            def simulate(self, X):
                raise RuntimeError("boom")

        with pytest.raises(RuntimeError, match="initial-design"):
            train_two_step(Broken(), cfg)


class TestPredict:
    def test_segmentation_complete_and_exclusive(self, trained):
        sim, em, _ = trained
        X = sample_inputs(500, 2, seed=12)
        preds = em.predict(X)
        assert np.all(np.isin(preds.labels, (1, 2, 3)))
        on = preds.labels == 2
        assert np.all(np.isfinite(preds.means[on]))
        assert np.all(np.isnan(preds.means[~on]))

    def test_deep_region_points(self, trained):
        sim, em, _ = trained
        p1 = em.predict(np.array([[0.01, 0.5]]))[0]
        assert p1.label == 1 and p1.mean is None
        p2 = em.predict(np.array([[0.9, 0.9]]))[0]
        assert p2.label == 2
        truth = sim.evaluate([0.9, 0.9]).value
        assert abs(p2.mean - truth) < 5.0

    def test_fallback_all_points_when_threshold_one(self, trained):
        sim, em, _ = trained
        X = sample_inputs(100, 2, seed=13)
        labels, values = sim.simulate(X)
        preds = em.predict(X, simulator=sim, fallback_threshold=1.0)
        assert np.all(preds.fallback)
        assert np.array_equal(preds.labels, labels)
        on = labels == 2
        assert np.allclose(preds.means[on], values[on])
        assert np.all(preds.variances[on] == 0.0)

    def test_fallback_threshold_zero_flags_nothing(self, trained):
        sim, em, _ = trained
        X = sample_inputs(100, 2, seed=14)
        with_fb = em.predict(X, simulator=sim, fallback_threshold=0.0)
        without = em.predict(X)
        assert not np.any(with_fb.fallback)
        assert np.array_equal(with_fb.labels, without.labels)
        on = with_fb.labels == 2
        assert np.allclose(with_fb.means[on], without.means[on])

    def test_fallback_without_simulator_rejected(self, trained):
        _, em, _ = trained
        with pytest.raises(ConfigError):
            em.predict(np.array([[0.5, 0.5]]), fallback_threshold=0.8)

    def test_fallback_flags_exactly_low_certainty_points(self, trained):
        sim, em, _ = trained
        X = sample_inputs(300, 2, seed=15)
        certainty = em.classifier.certainty(X)
        preds = em.predict(X, simulator=sim, fallback_threshold=0.8)
        assert np.array_equal(preds.fallback, certainty < 0.8)


class TestPropagate:
    def test_masses_normalized_and_nonnegative(self, trained):
        _, em, _ = trained
        samples = sample_inputs(2000, 2, seed=16)
        dist, tally = em.propagate(samples)
        assert dist.masses.shape == (1000,)
        assert abs(dist.masses.sum() - 1.0) <= 1e-6
        assert np.all(dist.masses >= 0.0)
        assert sum(tally.values()) == 2000

    def test_mixture_mean_matches_component_average(self, trained):
        _, em, _ = trained
        samples = sample_inputs(2000, 2, seed=17)
        dist, _ = em.propagate(samples)
        preds = em.predict(samples)
        comp = preds.means[preds.labels == 2]
        assert abs(dist.mean() - comp.mean()) <= 0.5  # half bin width

    def test_delta_component_lands_in_single_bin(self):
        # mean strictly inside bin 500 = [500, 501)
        dist = BiomarkerDistribution.from_gaussians([500.5], [1e-6])
        assert dist.masses.sum() == pytest.approx(1.0)
        assert dist.masses[500] == pytest.approx(1.0)
        # exact point masses land in the containing bin too
        dist = BiomarkerDistribution.from_gaussians([500.5], [0.0])
        assert dist.masses[500] == 1.0

    def test_empty_region_raises_with_tally(self, trained):
        _, em, _ = trained
        deep_region1 = np.column_stack([np.full(5, 0.01), np.linspace(0.4, 0.6, 5)])
        with pytest.raises(EmptyDistributionError) as err:
            em.propagate(deep_region1)
        assert err.value.tally[2] == 0
        assert sum(err.value.tally.values()) == 5


class TestErrorMetrics:
    def test_simulator_as_its_own_emulator_scores_zero(self):
        sim = SyntheticSurface(2)
        X = sample_inputs(300, 2, seed=18)
        labels, values = sim.simulate(X)

        class Oracle:
            def surface_mean(self, X):
                return sim.simulate(X)[1]

            def predict_labels(self, X):
                return sim.simulate(X)[0]

        assert surface_error(Oracle(), X, labels, values) == 0.0
        assert boundary_error(Oracle(), X, labels) == 0.0

    def test_constant_predictor_hand_value(self):
        means = np.array([200.0, 200.0])
        assert mean_absolute_surface_error(means, [2, 2], [100.0, 300.0]) == 100.0

    def test_quarter_misclassification(self):
        assert misclassification_rate([1, 2, 3, 2], [1, 2, 3, 3]) == 25.0

    def test_matches_confusion_matrix_off_diagonal(self):
        rng = np.random.default_rng(19)
        truth = rng.integers(1, 4, size=200)
        pred = rng.integers(1, 4, size=200)
        cm = np.zeros((3, 3), int)
        for t, p in zip(truth, pred):
            cm[t - 1, p - 1] += 1
        off = cm.sum() - np.trace(cm)
        assert misclassification_rate(pred, truth) == pytest.approx(100.0 * off / 200)

    def test_scripted_recomputation(self):
        sim = SyntheticSurface(2)
        X = sample_inputs(50, 2, seed=20)
        labels, values = sim.simulate(X)
        reg = GPRegressor(kernel=SquaredExponential(variance=1e4, lengthscale=0.3)).fit(
            X[labels == 2], values[labels == 2]
        )

        class M:
            def surface_mean(self, X):
                return reg.predict(X)

        got = surface_error(M(), X, labels, values)
        on = labels == 2
        want = float(np.mean(np.abs(values[on] - reg.predict(X[on]))))
        assert got == pytest.approx(want, abs=1e-10)

    def test_requires_valid_points(self):
        with pytest.raises(ValueError):
            mean_absolute_surface_error([1.0], [1], [np.nan])


class TestLUT:
    def test_vertex_queries_exact(self):
        sim = SyntheticSurface(2)
        lut = LUTInterpolator(resolution=6).fit(sim)
        grid = sample_inputs(36, 2, scheme="grid")
        labels, values = sim.simulate(grid)
        got_labels, got_values = lut.predict(grid)
        assert np.array_equal(got_labels, labels)
        on = labels == 2
        assert np.allclose(got_values[on], values[on])

    def test_linear_function_reproduced_inside_valid_cell(self):
        class Linear:
            n_dims = 2

            def simulate(self, X):
                return np.full(X.shape[0], 2, int), 100.0 + 7.0 * X[:, 0] + 3.0 * X[:, 1]

        lut = LUTInterpolator(resolution=5).fit(Linear())
        X = sample_inputs(200, 2, seed=21)
        _, values = lut.predict(X)
        assert np.max(np.abs(values - (100.0 + 7.0 * X[:, 0] + 3.0 * X[:, 1]))) < 1e-9

    def test_midpoint_hand_computation(self):
        # one cell, vertex values 0,1,1,2 -> midpoint 1.0 by hand
        class Cell:
            n_dims = 2

            def simulate(self, X):
                v = X[:, 0] + X[:, 1]  # 0,1,1,2 at the corners
                return np.full(X.shape[0], 2, int), 100.0 + v

        lut = LUTInterpolator(resolution=2).fit(Cell())
        _, value = lut.predict(np.array([[0.5, 0.5]]))
        assert value[0] == pytest.approx(100.0 + multilinear_2d((0, 1, 1, 2), 0.5, 0.5))

    def test_boundary_cells_give_label_without_value(self):
        sim = SyntheticSurface(2)
        lut = LUTInterpolator(resolution=9).fit(sim)
        X = sample_inputs(2000, 2, seed=22)
        labels, values = lut.predict(X)
        off = ~np.isfinite(values)
        assert np.any(off)
        assert np.all(np.isin(labels[off], (1, 2, 3)))
        # nearest-vertex labels: exact at the vertices themselves
        assert np.all(np.isfinite(values[labels == 2]) | off[labels == 2])

    def test_out_of_domain_rejected(self):
        sim = SyntheticSurface(2)
        lut = LUTInterpolator(resolution=3).fit(sim)
        with pytest.raises(ValueError):
            lut.predict(np.array([[1.5, 0.2]]))

    def test_surface_mean_completion_uses_nearest_valid_vertex(self):
        sim = SyntheticSurface(2)
        lut = LUTInterpolator(resolution=9).fit(sim)
        X = sample_inputs(1500, 2, seed=25)
        raw = lut.surface_mean(X, complete=False)
        full = lut.surface_mean(X)
        missing = ~np.isfinite(raw)
        assert np.any(missing)
        assert np.all(np.isfinite(full))
        assert np.array_equal(raw[~missing], full[~missing])
        # completed values are genuine table entries
        assert np.all(np.isin(np.round(full[missing], 9),
                              np.round(lut.values_[lut.labels_ == 2], 9)))

    def test_resolution_for_budget(self):
        assert LUTInterpolator.resolution_for_budget(5000, 4) == 8
        assert LUTInterpolator.resolution_for_budget(160, 2) == 12
        with pytest.raises(ConfigError):
            LUTInterpolator.resolution_for_budget(3, 2)


class TestLearningCurve:
    def test_row_shape_and_single_cell(self):
        sim = SyntheticSurface(2)
        X = sample_inputs(300, 2, seed=23)
        labels, values = sim.simulate(X)
        rows = learning_curve(
            sim,
            "random-surface",
            [20],
            X,
            labels,
            values,
            repeats=1,
            seed=1,
            regressor=GPRegressor(optimizer="nelder-mead", n_restarts=1, max_opt_iter=40),
        )
        assert len(rows) == 1
        assert rows[0].n_repeats == 1
        assert np.isfinite(rows[0].mean_error)

    def test_error_trends_down_with_budget(self):
        sim = SyntheticSurface(2)
        X = sample_inputs(500, 2, seed=24)
        labels, values = sim.simulate(X)
        rows = learning_curve(
            sim,
            "random-surface",
            [15, 60],
            X,
            labels,
            values,
            repeats=10,
            seed=2,
            regressor=GPRegressor(optimizer="nelder-mead", n_restarts=1, max_opt_iter=40),
        )
        assert len(rows) == 2
        assert rows[1].mean_error <= rows[0].mean_error

    def test_unknown_strategy_rejected(self):
        sim = SyntheticSurface(2)
        with pytest.raises(ConfigError):
            learning_curve(sim, "nope", [10], None, None)
