import json

import numpy as np
import pytest

from swklucb.config import ConfigError, ExperimentConfig, validate_config
from swklucb.environment import EnvironmentSpec, SegmentSpec
from swklucb.experiment import (
    FORMAT_VERSION,
    RunRecord,
    aggregate,
    derive_seed,
    emit,
    policy_labels,
    read_csv_records,
    record_times,
    run_experiment,
    simulate,
    curve_records,
)
from swklucb.policies import SlidingWindowKLUCB

from conftest import small_config


def fake_run(name, seed, regret):
    n = len(regret) - 1
    z = np.zeros(n, dtype=np.int64)
    return RunRecord(name, 0, seed, seed, z, z.astype(np.int8), z.astype(np.int8), np.asarray(regret, float))


@pytest.fixture(scope="module")
def result(tmp_path_factory):
    cfg = ExperimentConfig.from_dict(small_config(tmp_path_factory.mktemp("exp")))
    return run_experiment(cfg, jobs=1)


class TestAggregate:
    def test_single_seed(self):
        regret = [0, 0.5, 0.7, 1.2]
        curve = aggregate([fake_run("p", 1, regret)], np.arange(4))["p"]
        assert np.array_equal(curve.mean, regret)
        assert np.all(curve.std == 0)

    def test_constant_curves(self):
        runs = [fake_run("p", s, [0.0, 0.25, 0.25]) for s in range(5)]
        curve = aggregate(runs, np.arange(3))["p"]
        assert np.array_equal(curve.mean, [0.0, 0.25, 0.25])

    def test_pointwise_over_seeds(self):
        runs = [fake_run("p", 0, [0, 1, 2]), fake_run("p", 1, [0, 3, 4])]
        curve = aggregate(runs, np.array([0, 2]))["p"]
        assert curve.mean.tolist() == [0, 3]
        assert curve.std.tolist() == [0, 1]


class TestSimulation:
    def test_regret_invariants(self, result):
        T = result.config.environment.horizon
        for run in result.runs:
            r = run.regret
            assert r[0] == 0 and len(r) == T + 1
            assert np.all(np.diff(r) >= 0)
            assert np.all(r <= np.arange(T + 1))

    def test_oracle_curve_zero(self, result):
        assert np.all(result.curves["oracle"].per_seed == 0)

    def test_run_counts(self, result):
        assert len(result.runs) == 5 * 3
        assert list(result.curves) == ["sw-klucb-cf", "klucb-cf", "oracle", "uniform", "sw-klucb-cf-doubling"]

    def test_seeds_differ_across_units(self, result):
        assert len({run.seed for run in result.runs}) == len(result.runs)

    def test_seed_derivation(self):
        assert derive_seed(1, 0, 0) == derive_seed(1, 0, 0)
        assert len({derive_seed(1, p, r) for p in range(4) for r in range(50)}) == 200

    def test_parallel_matches_serial(self, tmp_path, result):
        cfg = ExperimentConfig.from_dict(small_config(tmp_path, replications=2))
        serial = run_experiment(cfg, jobs=1)
        parallel = run_experiment(cfg, jobs=2)
        for a, b in zip(serial.runs, parallel.runs):
            assert (a.policy, a.seed) == (b.policy, b.seed)
            assert np.array_equal(a.regret, b.regret)

    def test_simulate_repeatable(self):
        env = EnvironmentSpec(2, 300, (SegmentSpec(1, (0.4, 0.6)),))
        a = simulate(SlidingWindowKLUCB(2, 300, 50), env, 99)
        b = simulate(SlidingWindowKLUCB(2, 300, 50), env, 99)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_record_times(self):
        ts = record_times(10_000, "log-spaced", 512)
        assert ts[0] == 0 and ts[-1] == 10_000 and len(ts) <= 513
        assert np.all(np.diff(ts) > 0)
        assert record_times(5, "every-step").tolist() == [0, 1, 2, 3, 4, 5]

    def test_duplicate_labels(self):
        assert policy_labels([{"policy": "oracle"}, {"policy": "oracle"}, {"policy": "x", "name": "y"}]) == [
            "oracle", "oracle#2", "y"]


class TestOutput:
    def test_csv_round_trip(self, result, tmp_path):
        regret_path, runs_path = emit(result, tmp_path, "csv")
        records = read_csv_records(regret_path)
        expected = curve_records(result.curves)
        assert records == [(p, s, t, v) for p, s, t, v in expected]

    def test_csv_header_and_format(self, result, tmp_path):
        regret_path, runs_path = emit(result, tmp_path, "csv")
        raw = regret_path.read_bytes()
        assert b"\r\n" not in raw
        lines = raw.decode("utf-8").split("\n")
        assert lines[0] == f"# format_version: {FORMAT_VERSION}"
        assert json.loads(lines[1][len("# config: "):]) == result.config.to_dict()
        assert lines[2] == "policy,seed,t,regret"
        tags = {ln.split(",")[1] for ln in lines[3:] if ln}
        assert {"mean", "std"} <= tags
        assert runs_path.read_text().splitlines()[2].startswith("policy,replication,seed")

    def test_json_mirrors_csv(self, result, tmp_path):
        regret_path, runs_path = emit(result, tmp_path, "json")
        doc = json.loads(regret_path.read_text())
        assert doc["format_version"] == FORMAT_VERSION
        assert doc["config"] == result.config.to_dict()
        assert [(r["policy"], r["seed"], r["t"], r["regret"]) for r in doc["records"]] == curve_records(result.curves)
        runs = json.loads(runs_path.read_text())["runs"]
        assert len(runs) == len(result.runs)
        assert all(sum(r["pull_counts"]) == 600 for r in runs)

    def test_unwritable_path(self, result, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OSError, match="file"):
            emit(result, blocker / "sub", "csv")


class TestConfig:
    def test_round_trip(self, tmp_path):
        data = small_config(tmp_path)
        cfg = ExperimentConfig.from_dict(data)
        assert cfg.to_dict() == data
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_generator_config(self, tmp_path):
        gen = {"generate": {"K": 4, "T": 2000, "L": 3, "min_gap": 0.1, "seed": 5,
                            "scheme": {"type": "staircase", "epsilon": 1.0}}}
        cfg = ExperimentConfig.from_dict(small_config(tmp_path, environment=gen))
        env = cfg.environment
        assert (env.n_arms, env.horizon, env.n_changes) == (4, 2000, 3)
        assert ExperimentConfig.from_dict(cfg.to_dict()).environment == env

    @pytest.mark.parametrize(
        "overrides, path",
        [
            ({"replications": 0}, "replications"),
            ({"policies": []}, "policies"),
            ({"policies": [{"policy": "eps-greedy"}]}, "policies[0].policy"),
            ({"output": {"path": "x", "format": "xml"}}, "output.format"),
            ({"base_seed": -1}, "base_seed"),
            ({"policies": [{"policy": "klucb-cf", "window": 10}]}, "policies[0].window"),
        ],
    )
    def test_field_paths(self, tmp_path, overrides, path):
        with pytest.raises(ConfigError) as info:
            validate_config(small_config(tmp_path, **overrides))
        assert path in [p for p, _ in info.value.errors]

    def test_missing_schema_version(self, tmp_path):
        data = small_config(tmp_path)
        del data["schema_version"]
        with pytest.raises(ConfigError):
            validate_config(data)

    def test_environment_invariants_have_paths(self, tmp_path):
        data = small_config(tmp_path)
        data["environment"]["segments"][0]["start"] = 5
        with pytest.raises(ConfigError) as info:
            validate_config(data)
        (path, msg), = info.value.errors
        assert path == "environment.segments[0].start" and "first breakpoint" in msg

    def test_mean_out_of_range(self, tmp_path):
        data = small_config(tmp_path)
        data["environment"]["segments"][1]["means"][2] = 1.5
        with pytest.raises(ConfigError) as info:
            validate_config(data)
        assert info.value.errors[0][0].startswith("environment.segments[1].means")
