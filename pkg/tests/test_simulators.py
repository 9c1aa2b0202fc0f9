import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpemu.errors import IngestionError, SimulationError
from gpemu.simulators import (
    HillParams,
    PoolSimulator,
    SimResult,
    SyntheticSurface,
    hill_scaling,
    percent_block,
    read_dataset,
    read_hill_samples,
    sample_inputs,
    scalings_from_hill_samples,
    write_dataset,
)


class TestSyntheticSurface:
    def test_region_one_example(self):
        assert SyntheticSurface(2).evaluate([0.0, 0.5]) == SimResult(1)

    def test_region_three_example(self):
        assert SyntheticSurface(2).evaluate([1.0, 0.0]) == SimResult(3)

    def test_region_two_closed_form_value(self):
        res = SyntheticSurface(2).evaluate([1.0, 1.0])
        assert res.label == 2
        expected = 220.0 + 90.0 * np.exp(-12.0 * (1.0 - 0.168))
        assert res.value == pytest.approx(expected, abs=1e-9)
        assert res.value == pytest.approx(220.0043, abs=1e-3)

    def test_partition_matches_independent_predicates(self):
        # independent re-implementation of the region predicates
        sim = SyntheticSurface(4)
        rng = np.random.default_rng(11)
        X = rng.random((1_000_000, 4))
        labels, values = sim.simulate(X)
        r1, r2 = X[:, 0], X[:, 1]
        M = X[:, 2:].mean(axis=1)
        expected = np.where(
            r1 < 0.12 + 0.03 * r2,
            1,
            np.where(r2 < 0.28 * (1 - 0.4 * r1) + 0.05 * (M - 0.5), 3, 2),
        )
        assert np.array_equal(labels, expected)
        assert np.all(np.isfinite(values[labels == 2]))
        assert np.all(np.isnan(values[labels != 2]))

    def test_values_inside_output_bounds(self):
        for d in (2, 3, 4):
            sim = SyntheticSurface(d)
            X = np.random.default_rng(3).random((20_000, d))
            _, values = sim.simulate(X)
            vals = values[np.isfinite(values)]
            assert np.all(vals > 0.0) and np.all(vals < 1000.0)

    def test_continuity_inside_region_two(self):
        sim = SyntheticSurface(2)
        rng = np.random.default_rng(5)
        base = rng.random((5000, 2))
        step = rng.normal(size=(5000, 2))
        step /= np.linalg.norm(step, axis=1, keepdims=True)
        other = np.clip(base + 1e-5 * step, 0.0, 1.0)
        lb, vb = sim.simulate(base)
        lo, vo = sim.simulate(other)
        both = (lb == 2) & (lo == 2)
        assert np.max(np.abs(vb[both] - vo[both])) < 0.1

    def test_jump_across_region_three_boundary(self):
        sim = SyntheticSurface(2)
        r1 = np.full(200, 0.6)
        b2 = 0.28 * (1 - 0.4 * 0.6)
        above = np.column_stack([r1, np.full(200, b2 + 1e-4)])
        below = np.column_stack([r1, np.full(200, b2 - 1e-4)])
        la, va = sim.simulate(above)
        lb, _ = sim.simulate(below)
        assert np.all(la == 2) and np.all(lb == 3)
        # just above the boundary the exponential term contributes ~90
        assert np.all(va > 220.0 + 80.0)

    def test_out_of_domain_rejected(self):
        with pytest.raises(ValueError):
            SyntheticSurface(2).evaluate([1.2, 0.3])

    def test_needs_two_dims(self):
        with pytest.raises(ValueError):
            SyntheticSurface(1)


class TestDatasetIO:
    def test_round_trip_identity(self, tmp_path):
        sim = SyntheticSurface(2)
        X = np.random.default_rng(0).random((100, 2))
        labels, values = sim.simulate(X)
        path = tmp_path / "data.csv"
        write_dataset(path, X, labels, values)
        X2, l2, v2 = read_dataset(path)
        assert np.array_equal(X, X2)
        assert np.array_equal(labels, l2)
        assert np.array_equal(values[labels == 2], v2[l2 == 2])
        assert np.all(np.isnan(v2[l2 != 2]))

    def test_label_two_without_value_rejected_with_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("R_1,R_2,label,apd90\n0.1,0.2,2,\n")
        with pytest.raises(IngestionError, match=":2"):
            read_dataset(path)

    def test_off_surface_value_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("R_1,R_2,label,apd90\n0.1,0.2,3,250.0\n")
        with pytest.raises(IngestionError, match=":2"):
            read_dataset(path)

    def test_malformed_row_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("R_1,R_2,label,apd90\n0.1,0.2,2,300.0\nnope,0.2,2,300.0\n")
        with pytest.raises(IngestionError, match=":3"):
            read_dataset(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y,label,apd90\n")
        with pytest.raises(IngestionError, match=":1"):
            read_dataset(path)


class TestPoolSimulator:
    def test_serves_exact_lookups(self, tmp_path):
        sim = SyntheticSurface(2)
        X = np.random.default_rng(1).random((1000, 2))
        labels, values = sim.simulate(X)
        path = tmp_path / "pool.csv"
        write_dataset(path, X, labels, values)
        pool = PoolSimulator.from_csv(path)
        got_labels, got_values = pool.simulate(X)
        assert np.array_equal(got_labels, labels)
        on = labels == 2
        assert np.array_equal(got_values[on], values[on])

    def test_unknown_point_raises(self):
        pool = PoolSimulator(np.array([[0.1, 0.2]]), np.array([2]), np.array([300.0]))
        with pytest.raises(SimulationError):
            pool.simulate(np.array([[0.3, 0.3]]))


class TestHill:
    def test_no_drug_no_block(self):
        assert hill_scaling(0.0, ic50=2.0, n=1.3) == 1.0

    def test_half_block_at_ic50(self):
        assert hill_scaling(2.0, ic50=2.0, n=0.7) == 0.5

    def test_direct_evaluation(self):
        assert hill_scaling(3.0, ic50=1.0, n=1.0) == pytest.approx(0.25, abs=1e-12)

    def test_params_record(self):
        p = HillParams(ic50=1.0, n=2.0, concentration=1.0)
        assert p.scaling() == 0.5
        with pytest.raises(ValueError):
            HillParams(ic50=-1.0, n=1.0)

    @given(
        st.floats(1e-3, 1e3), st.floats(0.1, 5.0), st.floats(1e-6, 1e6), st.floats(1.01, 10.0)
    )
    @settings(max_examples=200, deadline=None)
    def test_strictly_decreasing_in_concentration(self, ic50, n, c, factor):
        lo = hill_scaling(c, ic50, n)
        hi = hill_scaling(c * factor, ic50, n)
        assert hi < lo
        assert 0.0 < hi <= 1.0 and 0.0 < lo <= 1.0

    def test_scale_free(self):
        # only the ratio concentration / ic50 matters
        assert hill_scaling(3.0, 1.0, 1.4) == pytest.approx(
            hill_scaling(300.0, 100.0, 1.4), rel=1e-12
        )


class TestPercentBlock:
    def test_edges(self):
        assert percent_block(1.0) == 0.0
        assert percent_block(0.0) == 100.0

    def test_direct(self):
        assert percent_block(0.25) == pytest.approx(75.0)

    def test_domain_checked(self):
        with pytest.raises(ValueError):
            percent_block(1.1)


class TestHillSamples:
    def test_round_trip_and_scalings(self, tmp_path):
        path = tmp_path / "hill.csv"
        path.write_text("pIC50,hill\n0.5,1.0\n1.0,2.0\n")
        pic50, hill = read_hill_samples(path)
        assert np.array_equal(pic50, [0.5, 1.0])
        r = scalings_from_hill_samples(pic50, hill, concentration=10 ** -0.5)
        # first sample: concentration equals its ic50 -> scaling one half
        assert r[0] == pytest.approx(0.5, abs=1e-12)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "hill.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(IngestionError):
            read_hill_samples(path)


class TestSampleInputs:
    def test_uniform_deterministic_and_in_cube(self):
        a = sample_inputs(1000, 3, seed=4)
        b = sample_inputs(1000, 3, seed=4)
        assert np.array_equal(a, b)
        assert np.all((a >= 0) & (a <= 1))

    def test_uniform_marginals_look_uniform(self):
        from scipy.stats import kstest

        X = sample_inputs(1000, 2, seed=9)
        for j in range(2):
            assert kstest(X[:, j], "uniform").statistic < 0.05

    def test_corners_augmented_appends_all_corners(self):
        X = sample_inputs(10, 4, seed=0, scheme="corners-augmented")
        assert X.shape == (26, 4)
        corners = X[10:]
        assert np.all(np.isin(corners, (0.0, 1.0)))
        assert len({tuple(c) for c in corners}) == 16

    def test_grid_requires_power(self):
        X = sample_inputs(25, 2, scheme="grid")
        assert X.shape == (25, 2)
        with pytest.raises(ValueError):
            sample_inputs(24, 2, scheme="grid")


class TestSimResult:
    def test_invariants(self):
        with pytest.raises(ValueError):
            SimResult(2)  # label 2 needs a value
        with pytest.raises(ValueError):
            SimResult(1, 100.0)  # off-surface labels must not carry one
        with pytest.raises(ValueError):
            SimResult(2, 1500.0)  # outside the output bounds
