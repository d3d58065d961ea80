import numpy as np
import pandas as pd
import pytest
from src.exceptions import ConfigError, PointMismatchError
from src.harness import (
    RunConfig,
    aggregate_runs,
    build_benchmark,
    cmd_report,
    cmd_run,
    default_checkpoints,
    make_black_box,
    run_replicate,
    session_ask,
    session_init,
    session_result,
    session_status,
    session_tell,
)
from src.optimizer import MixMOBO
from src.utils import load_json, save_json


def tiny_config(tmp_path, **overrides):
    data = {
        "benchmark": "styblinski",
        "budget": 8,
        "n_init": 4,
        "batch_size": 2,
        "replicates": 2,
        "ga": {"population_size": 6, "generations": 2},
        "benchmark_options": {"dimension": 4},
        "output_dir": str(tmp_path),
    }
    data.update(overrides)
    return RunConfig.from_sources(overrides=data)


class TestRunConfig:
    """Test campaign settings"""

    def test_defaults(self):
        """Test defaults"""
        config = RunConfig(benchmark="NK")
        assert config.benchmark == "nk"
        assert config.budget == 250 and config.n_init == 50
        assert config.epochs == 200
        assert config.replicate_seeds() == list(range(10))

    def test_seeds_set_replicates(self):
        """Test seeds set replicates"""
        config = RunConfig(benchmark="nk", seeds=[3, 9])
        assert config.replicates == 2
        assert config.replicate_seeds() == [3, 9]

    @pytest.mark.parametrize(
        "overrides",
        [
            {"benchmark": "branin"},
            {"budget": 10, "n_init": 20},
            {"budget": 25, "n_init": 20, "batch_size": 2},
            {"acquisitions": ["EI", "PI"]},
            {"schema_version": 7},
        ],
    )
    def test_invalid(self, overrides):
        """Test invalid"""
        with pytest.raises(ConfigError):
            RunConfig.from_sources(overrides={"benchmark": "nk", **overrides})

    def test_file_and_overrides(self, tmp_path):
        """Test file and overrides"""
        path = tmp_path / "run.json"
        save_json({"benchmark": "zdt6", "budget": 100, "n_init": 20}, str(path))
        config = RunConfig.from_sources(str(path), {"budget": 60, "n_init": None})

        assert config.benchmark == "zdt6"
        assert config.budget == 60
        assert config.n_init == 20

    def test_unreadable_file(self, tmp_path):
        """Test unreadable file"""
        with pytest.raises(ConfigError):
            RunConfig.from_sources(str(tmp_path / "missing.json"))

    def test_zero_workers_uses_every_cpu(self, monkeypatch):
        """Test workers=0 resolves to the CPU count"""
        monkeypatch.setattr("src.harness.os.cpu_count", lambda: 6)
        assert RunConfig(benchmark="nk", workers=0).workers == 6
        assert RunConfig(benchmark="nk", workers=3).workers == 3
        with pytest.raises(ConfigError):
            RunConfig.from_sources(overrides={"benchmark": "nk", "workers": -1})

    def test_optimizer_config(self):
        """Test optimizer config"""
        config = RunConfig(benchmark="nk", budget=60, n_init=20, batch_size=4, acquisitions=["ucb"])
        optimizer_config = config.optimizer_config(5)
        assert optimizer_config.epochs == 10
        assert optimizer_config.seed == 5
        assert [k.value for k in optimizer_config.portfolio] == ["UCB"]


class TestBlackBox:
    """Test the recorded noisy black box"""

    def test_records_clean_values(self, tmp_path):
        """Test records clean values"""
        bench = build_benchmark(tiny_config(tmp_path))
        f, record = make_black_box(bench, 0)
        w = list(bench.space.enumerate_points())[7]
        f(w)
        f(w)

        assert len(record["clean"]) == 2
        np.testing.assert_array_equal(record["clean"][0], bench.evaluate_clean(w))
        assert len(record["seconds"]) == 2

    def test_noise_stream_depends_on_seed(self, tmp_path):
        """Test noise stream depends on seed"""
        bench = build_benchmark(tiny_config(tmp_path))
        w = list(bench.space.enumerate_points())[3]
        assert make_black_box(bench, 0)[0](w) == make_black_box(bench, 0)[0](w)
        assert make_black_box(bench, 0)[0](w) != make_black_box(bench, 1)[0](w)


class TestCampaign:
    """Test seeded benchmark campaigns"""

    def test_run_writes_files(self, tmp_path):
        """Test run writes files"""
        summary = cmd_run(tiny_config(tmp_path))
        directory = tmp_path / "styblinski"

        for name in ["aggregate.csv", "run_meta.json", "pareto_mixmobo_seed0.json"]:
            assert (directory / name).exists()
        for method in ["mixmobo", "random"]:
            for seed in [0, 1]:
                frame = pd.read_csv(directory / f"run_{method}_seed{seed}.csv")
                assert len(frame) == 8
                assert np.all(np.diff(frame["best_f1"]) >= 0)
                assert "normalized_reward" in frame.columns
                assert (directory / f"timings_{method}_seed{seed}.csv").exists()

        assert summary["metric"] == "best_f1"
        assert summary["global_optimum"] == pytest.approx(4 * 38.2537841796875)
        assert summary["final_reward"]["mixmobo"]["count"] == 2
        assert summary["final_reward"]["random"]["mean"] == pytest.approx(0.0)

    def test_same_seeds_same_bytes(self, tmp_path):
        """Test same seeds same bytes"""
        cmd_run(tiny_config(tmp_path / "a"))
        cmd_run(tiny_config(tmp_path / "b"))
        for name in ["run_mixmobo_seed0.csv", "run_mixmobo_seed1.csv", "aggregate.csv"]:
            first = (tmp_path / "a" / "styblinski" / name).read_bytes()
            assert first == (tmp_path / "b" / "styblinski" / name).read_bytes()

    def test_parallel_workers_same_bytes(self, tmp_path):
        """Test a process pool writes the same files as a single worker"""
        cmd_run(tiny_config(tmp_path / "serial"))
        cmd_run(tiny_config(tmp_path / "pool", workers=2))
        for name in ["run_mixmobo_seed1.csv", "run_random_seed0.csv", "aggregate.csv"]:
            serial = (tmp_path / "serial" / "styblinski" / name).read_bytes()
            assert serial == (tmp_path / "pool" / "styblinski" / name).read_bytes()

    def test_replicate_evaluates_budget(self, tmp_path):
        """Test replicate evaluates budget"""
        config = tiny_config(tmp_path)
        result = run_replicate(config.model_dump(), 0)
        assert len(result["points"]) == 8
        assert result["clean"].shape == (8, 1)

    def test_guided_search_beats_random_sampling(self, tmp_path):
        """Test at least one replicate ends above the random-sampling optimum"""
        config = tiny_config(
            tmp_path,
            budget=40,
            n_init=10,
            seeds=[0, 1, 2],
            ga={"population_size": 20, "generations": 5},
        )
        summary = cmd_run(config)
        directory = tmp_path / "styblinski"
        finals = [
            pd.read_csv(directory / f"run_mixmobo_seed{s}.csv")["normalized_reward"].iloc[-1]
            for s in [0, 1, 2]
        ]

        assert summary["random_optimum"] < summary["global_optimum"]
        assert max(finals) > 0.0

    def test_multi_objective_campaign(self, tmp_path):
        """Test multi-objective campaign"""
        config = tiny_config(tmp_path, benchmark="zdt6", benchmark_options={"dimension": 3})
        summary = cmd_run(config)
        frame = pd.read_csv(tmp_path / "zdt6" / "run_mixmobo_seed0.csv")

        assert summary["metric"] == "p_optimum"
        assert summary["global_optimum"] == 1.0
        assert {"best_f1", "best_f2", "p_optimum"} <= set(frame.columns)
        assert np.all((frame["p_optimum"] > 0) & (frame["p_optimum"] <= 1))
        assert np.all(np.diff(frame["p_optimum_best"]) >= 0)
        assert np.all(frame["p_optimum_best"] >= frame["p_optimum"])


class TestReport:
    """Test campaign reports"""

    def test_checkpoints(self):
        """Test checkpoints"""
        assert default_checkpoints(250) == [50, 100, 150, 200, 250]
        assert default_checkpoints(120) == [50, 100, 120]

    def test_identical_runs_have_zero_std(self):
        """Test identical runs have zero std"""
        run = pd.DataFrame({"seed": 0, "eval": [1, 2], "normalized_reward": [0.2, 0.7]})
        frame = pd.concat(
            [run.assign(seed=s, method="mixmobo") for s in range(10)], ignore_index=True
        )
        aggregate = aggregate_runs(frame)

        assert aggregate["normalized_reward_mean"].tolist() == pytest.approx([0.2, 0.7])
        assert aggregate["normalized_reward_std"].tolist() == pytest.approx([0.0, 0.0])
        assert aggregate["n_runs"].tolist() == [10, 10]

    def test_report_on_run_output(self, tmp_path):
        """Test report on run output"""
        cmd_run(tiny_config(tmp_path))
        directory = tmp_path / "styblinski"
        output = tmp_path / "plots" / "long.csv"
        summary = cmd_report([str(directory)], [4, 8], str(output))

        assert len(summary) == 4
        assert set(summary["method"]) == {"mixmobo", "random"}
        assert summary["n_runs"].tolist() == [2, 2, 2, 2]
        long = pd.read_csv(output)
        assert list(long.columns) == ["benchmark", "method", "seed", "eval", "metric", "value"]
        assert set(long["benchmark"]) == {"styblinski"}

    def test_mixed_benchmarks_rejected(self, tmp_path):
        """Test mixed benchmarks rejected"""
        cmd_run(tiny_config(tmp_path))
        original = tmp_path / "styblinski"
        other = tmp_path / "renamed"
        other.mkdir()
        for path in original.iterdir():
            (other / path.name).write_bytes(path.read_bytes())
        meta = load_json(str(other / "run_meta.json"))
        meta["benchmark"] = "nk"
        save_json(meta, str(other / "run_meta.json"))

        with pytest.raises(ConfigError):
            cmd_report([str(original), str(other)])

    def test_missing_directory(self, tmp_path):
        """Test missing directory"""
        with pytest.raises(ConfigError):
            cmd_report([str(tmp_path / "nothing")])


class TestSessions:
    """Test file-backed ask/tell sessions"""

    def test_session_matches_campaign_run(self, tmp_path):
        """Test session matches campaign run"""
        config = tiny_config(tmp_path)
        state = str(tmp_path / "session.json")
        session_init(state, run_config=config, seed=0)
        f, _ = make_black_box(build_benchmark(config), 0)

        while not session_status(state)["finished"]:
            points = session_ask(state)
            session_tell(state, [f(p) for p in points])

        session = MixMOBO.load_state(state)
        assert session.dataset.points == run_replicate(config.model_dump(), 0)["points"]
        assert len(session_result(state).points) >= 1

    def test_custom_space_session(self, tmp_path):
        """Test custom space session"""
        state = str(tmp_path / "custom.json")
        space = {"continuous": [[0.0, 1.0]], "categorical": [3]}
        session_init(state, space_doc=space, config_doc={"n_init": 3, "epochs": 1})

        points = session_ask(state)
        assert len(points) == 3
        status = session_status(state)
        assert status["pending_points"] == 3
        assert status["n_objectives"] is None

        session_tell(state, [[p.continuous_values[0]] for p in points], points)
        assert session_status(state)["evaluations"] == 3

    def test_tell_with_wrong_points(self, tmp_path):
        """Test tell with wrong points"""
        state = str(tmp_path / "custom.json")
        session_init(state, space_doc={"categorical": [4, 4]}, config_doc={"n_init": 2})
        points = session_ask(state)
        with pytest.raises(PointMismatchError):
            session_tell(state, [[0.0]], points[:1])

    def test_missing_state(self, tmp_path):
        """Test missing state"""
        with pytest.raises(ConfigError):
            session_ask(str(tmp_path / "absent.json"))

    def test_init_needs_space(self, tmp_path):
        """Test init needs space"""
        with pytest.raises(ConfigError):
            session_init(str(tmp_path / "s.json"))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
