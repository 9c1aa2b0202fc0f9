import csv
import json

import numpy as np
import pytest

from gpemu.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_SIMULATION,
    load_config,
    load_emulator,
    main,
    make_simulator,
    read_points,
    resolve_params,
)
from gpemu.errors import ConfigError
from gpemu.simulators import SyntheticSurface, read_dataset


TRAIN_CFG = """
simulator = synthetic2d
n_initial = 40
classifier_rounds = 1
swarm_size = 6
surface_rounds = 15
n_candidates = 500
classifier_inducing = none
n_restarts = 1
max_opt_iter = 40
seed = 11
"""


def write_train_config(tmp_path):
    cfg = tmp_path / "train.cfg"
    cfg.write_text(TRAIN_CFG)
    return cfg


@pytest.fixture(scope="module")
def model_dir(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("model")
    cfg = write_train_config(tmp)
    out = tmp / "model"
    assert main(["train", "--config", str(cfg), "--out", str(out)]) == 0
    return out


class TestGenerate:
    def test_deterministic_and_counted(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["generate", "--simulator", "synthetic2d", "--n", "200", "--seed", "7"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        X, labels, _ = read_dataset(a)
        assert X.shape == (200, 2)

    def test_pool_simulator_rejected(self, tmp_path):
        code = main(
            ["generate", "--simulator", "pool:x.csv", "--n", "5", "--out", str(tmp_path / "x")]
        )
        assert code == EXIT_IO or code == EXIT_CONFIG

    def test_missing_required_key(self, tmp_path):
        assert main(["generate", "--simulator", "synthetic2d", "--out", str(tmp_path / "x")]) == EXIT_CONFIG

    def test_large_4d_dataset_generates_quickly(self, tmp_path):
        import time

        out = tmp_path / "big.csv"
        t0 = time.perf_counter()
        assert main(
            ["generate", "--simulator", "synthetic4d", "--n", "100000", "--seed", "1",
             "--out", str(out)]
        ) == 0
        assert time.perf_counter() - t0 < 60.0
        with open(out) as fh:
            assert sum(1 for _ in fh) == 100001  # header + rows


class TestTrain:
    def test_rerun_reproduces_outputs(self, tmp_path):
        cfg = write_train_config(tmp_path)
        out1, out2 = tmp_path / "m1", tmp_path / "m2"
        assert main(["train", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["train", "--config", str(cfg), "--out", str(out2)]) == 0
        for name in ("manifest.json", "classifier_train.csv", "surface_train.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        # audit logs identical apart from the wall-time column
        for name in ("audit_classifier.csv", "audit_surface.csv"):
            rows1 = list(csv.DictReader(open(out1 / name)))
            rows2 = list(csv.DictReader(open(out2 / name)))
            for r1, r2 in zip(rows1, rows2):
                r1.pop("wall_time_s"), r2.pop("wall_time_s")
                assert r1 == r2

    def test_budget_echoed(self, tmp_path, capsys):
        cfg = write_train_config(tmp_path)
        out = tmp_path / "m"
        assert main(["train", "--config", str(cfg), "--out", str(out)]) == 0
        captured = capsys.readouterr().out
        assert "total=61" in captured  # 40 + 1*6 + 15

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(TRAIN_CFG + "\nbogus_key = 1\n")
        assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "m")]) == EXIT_CONFIG

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = write_train_config(tmp_path)
        out = tmp_path / "m"
        code = main(
            ["train", "--config", str(cfg), "--out", str(out), "--surface-rounds", "5"]
        )
        assert code == 0
        assert "total=51" in capsys.readouterr().out

    def test_manifest_contents(self, model_dir):
        manifest = json.loads((model_dir / "manifest.json").read_text())
        assert manifest["n_dims"] == 2
        assert manifest["budget"]["total"] == 61
        assert len(manifest["classifier"]["kernels"]) == 3
        assert manifest["surface"]["kernel"]["type"] == "rational-quadratic"


class TestPredict:
    def test_outputs_and_determinism(self, model_dir, tmp_path):
        q = tmp_path / "q.csv"
        main(["generate", "--simulator", "synthetic2d", "--n", "50", "--seed", "3", "--out", str(q)])
        o1, o2 = tmp_path / "p1.csv", tmp_path / "p2.csv"
        args = ["predict", "--model", str(model_dir), "--points", str(q)]
        assert main(args + ["--out", str(o1)]) == 0
        assert main(args + ["--out", str(o2)]) == 0
        assert o1.read_bytes() == o2.read_bytes()
        rows = list(csv.DictReader(open(o1)))
        assert len(rows) == 50
        assert set(rows[0]) == {"R_1", "R_2", "label", "mean", "variance", "certainty", "fallback"}
        for row in rows:
            if row["label"] == "2":
                assert row["mean"] != ""
            else:
                assert row["mean"] == ""

    def test_fallback_flags_low_certainty_points(self, model_dir, tmp_path):
        q = tmp_path / "q.csv"
        main(["generate", "--simulator", "synthetic2d", "--n", "80", "--seed", "5", "--out", str(q)])
        out = tmp_path / "pf.csv"
        assert main([
            "predict", "--model", str(model_dir), "--points", str(q),
            "--out", str(out), "--fallback", "0.8", "--simulator", "synthetic2d",
        ]) == 0
        rows = list(csv.DictReader(open(out)))
        em = load_emulator(model_dir)
        X = read_points(q)
        certainty = em.classifier.certainty(X)
        flags = np.array([r["fallback"] == "1" for r in rows])
        assert np.array_equal(flags, certainty < 0.8)

    def test_dimension_mismatch_is_config_error(self, model_dir, tmp_path):
        q = tmp_path / "q4.csv"
        main(["generate", "--simulator", "synthetic4d", "--n", "10", "--seed", "1", "--out", str(q)])
        code = main(["predict", "--model", str(model_dir), "--points", str(q), "--out", str(tmp_path / "o.csv")])
        assert code == EXIT_CONFIG


class TestPropagate:
    def test_mass_sums_to_one_and_deterministic(self, model_dir, tmp_path):
        s = tmp_path / "samples.csv"
        main(["generate", "--simulator", "synthetic2d", "--n", "500", "--seed", "9", "--out", str(s)])
        o1, o2 = tmp_path / "d1.csv", tmp_path / "d2.csv"
        t1 = tmp_path / "t1.csv"
        args = ["propagate", "--model", str(model_dir), "--samples", str(s)]
        assert main(args + ["--out", str(o1), "--tally-out", str(t1)]) == 0
        assert main(args + ["--out", str(o2)]) == 0
        assert o1.read_bytes() == o2.read_bytes()
        rows = list(csv.DictReader(open(o1)))
        assert len(rows) == 1000
        total = sum(float(r["mass"]) for r in rows)
        assert abs(total - 1.0) <= 1e-6
        tally = {int(r["label"]): int(r["count"]) for r in csv.DictReader(open(t1))}
        assert sum(tally.values()) == 500

    def test_hill_samples_path(self, model_dir, tmp_path):
        h = tmp_path / "hill.csv"
        h.write_text("pIC50,hill\n0.5,1.0\n0.4,1.2\n0.6,0.8\n")
        out = tmp_path / "dist.csv"
        assert main([
            "propagate", "--model", str(model_dir), "--hill-samples", str(h),
            "--concentration", "0.05", "--channel", "2", "--out", str(out),
        ]) == 0
        rows = list(csv.DictReader(open(out)))
        assert abs(sum(float(r["mass"]) for r in rows) - 1.0) <= 1e-6

    def test_requires_exactly_one_sample_source(self, model_dir, tmp_path):
        assert main([
            "propagate", "--model", str(model_dir), "--out", str(tmp_path / "o.csv"),
        ]) == EXIT_CONFIG


class TestBenchmark:
    def test_learning_curve_rows_and_determinism(self, tmp_path):
        o1, o2 = tmp_path / "lc1.csv", tmp_path / "lc2.csv"
        args = [
            "benchmark", "--simulator", "synthetic2d", "--mode", "learning-curve",
            "--strategies", "random-classifier", "--budgets", "25,35", "--repeats", "3",
            "--test-n", "300", "--n-restarts", "1", "--max-opt-iter", "30", "--seed", "4",
        ]
        assert main(args + ["--out", str(o1)]) == 0
        assert main(args + ["--out", str(o2)]) == 0
        assert o1.read_bytes() == o2.read_bytes()
        rows = list(csv.DictReader(open(o1)))
        assert len(rows) == 2
        assert {"strategy", "budget", "mean_error", "std_error", "repeats"} == set(rows[0])
        assert all(int(r["repeats"]) == 3 for r in rows)

    def test_swarm_size_sweep(self, tmp_path):
        out = tmp_path / "ss.csv"
        assert main([
            "benchmark", "--simulator", "synthetic2d", "--mode", "swarm-size",
            "--swarm-sizes", "10,5", "--active-points", "20", "--n-initial", "30",
            "--test-n", "200", "--n-restarts", "1", "--max-opt-iter", "30",
            "--seed", "2", "--out", str(out),
        ]) == 0
        rows = list(csv.DictReader(open(out)))
        assert {int(r["swarm_size"]) for r in rows} == {10, 5}


class TestConfigHandling:
    def test_key_value_parsing(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("# comment\nn = 12\nscheme = grid  # inline\n")
        assert load_config(cfg) == {"n": "12", "scheme": "grid"}

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("not a pair\n")
        with pytest.raises(ConfigError):
            load_config(cfg)

    def test_resolve_rejects_unknown(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("zzz = 1\n")

        class Args:
            config = str(cfg)

        with pytest.raises(ConfigError):
            resolve_params(Args(), {"n": (int, 1)})

    def test_make_simulator_forms(self, tmp_path):
        assert make_simulator("synthetic2d").n_dims == 2
        assert make_simulator("synthetic4d").n_dims == 4
        with pytest.raises(ConfigError):
            make_simulator("other")


class TestPersistence:
    def test_load_round_trip_predictions(self, model_dir, tmp_path):
        em = load_emulator(model_dir)
        em2 = load_emulator(model_dir / "manifest.json")
        X = np.random.default_rng(6).random((40, 2))
        p1, p2 = em.predict(X), em2.predict(X)
        assert np.array_equal(p1.labels, p2.labels)
        on = p1.labels == 2
        assert np.array_equal(p1.means[on], p2.means[on])
        assert np.array_equal(p1.certainty, p2.certainty)

    def test_loaded_matches_synthetic_truth_roughly(self, model_dir):
        em = load_emulator(model_dir)
        sim = SyntheticSurface(2)
        X = np.random.default_rng(8).random((200, 2))
        labels, _ = sim.simulate(X)
        agreement = np.mean(em.classifier.predict(X) == labels)
        assert agreement > 0.8
