import json
import logging

import numpy as np
import pytest
from src.utils import (
    aggregate_values,
    derive_seed,
    ensure_directories,
    format_benchmark_name,
    get_output_dir,
    load_json,
    make_rng,
    rng_from_state,
    rng_to_state,
    save_json,
    setup_logging,
)


class TestOutputDirectory:
    """Test output directory resolution"""

    def test_override_wins(self, monkeypatch):
        """Test an explicit override beats the environment"""
        monkeypatch.setenv("MIXMOBO_OUTPUT_DIR", "/tmp/from-env")
        assert str(get_output_dir("custom")) == "custom"

    def test_environment_variable(self, monkeypatch):
        """Test environment variable"""
        monkeypatch.setenv("MIXMOBO_OUTPUT_DIR", "/tmp/from-env")
        assert str(get_output_dir()) == "/tmp/from-env"

    def test_default(self, monkeypatch):
        """Test default"""
        monkeypatch.delenv("MIXMOBO_OUTPUT_DIR", raising=False)
        assert str(get_output_dir()) == "results"

    def test_ensure_directories(self, tmp_path):
        """Test directory creation"""
        root = ensure_directories(str(tmp_path / "out"))
        for name in ["logs", "cache", "sessions"]:
            assert (root / name).is_dir()

    def test_setup_logging_creates_log_dir(self, tmp_path):
        """Test setup logging creates log dir"""
        logger = setup_logging("DEBUG", str(tmp_path))
        assert isinstance(logger, logging.Logger)
        assert (tmp_path / "logs").is_dir()


class TestJsonFunctions:
    """Test JSON helpers"""

    def test_save_and_load(self, tmp_path):
        """Test save and load"""
        path = tmp_path / "nested" / "doc.json"
        save_json({"a": [1, 2.5], "b": "text"}, str(path))
        assert load_json(str(path)) == {"a": [1, 2.5], "b": "text"}

    def test_saved_file_is_indented(self, tmp_path):
        """Test saved file is indented"""
        path = tmp_path / "doc.json"
        save_json({"a": 1}, str(path))
        assert json.loads(path.read_text()) == {"a": 1}
        assert "\n" in path.read_text()


class TestRandomStreams:
    """Test generator persistence"""

    def test_state_roundtrip_continues_stream(self, tmp_path):
        """Test a restored generator continues exactly where the original stopped"""
        rng = make_rng(7)
        rng.random(5)
        path = tmp_path / "rng.json"
        save_json(rng_to_state(rng), str(path))
        restored = rng_from_state(load_json(str(path)))
        np.testing.assert_array_equal(rng.random(10), restored.random(10))

    def test_derive_seed_is_deterministic(self):
        """Test derive seed is deterministic"""
        assert derive_seed(make_rng(3)) == derive_seed(make_rng(3))
        assert derive_seed(make_rng(3)) != derive_seed(make_rng(4))


class TestAggregation:
    """Test replicate aggregation"""

    def test_aggregate_values(self):
        """Test aggregate values"""
        result = aggregate_values([1.0, 2.0, 3.0, 4.0])

        assert result["mean"] == pytest.approx(2.5)
        assert result["median"] == pytest.approx(2.5)
        assert result["std"] == pytest.approx(np.std([1.0, 2.0, 3.0, 4.0]))
        assert result["min"] == 1.0
        assert result["max"] == 4.0
        assert result["count"] == 4

    def test_identical_values_have_zero_std(self):
        """Test identical values have zero std"""
        assert aggregate_values([0.7] * 10)["std"] == pytest.approx(0.0)

    def test_aggregate_empty(self):
        """Test aggregation with empty list"""
        result = aggregate_values([])

        assert result["mean"] == 0.0
        assert result["count"] == 0

    def test_format_benchmark_name(self):
        """Test format benchmark name"""
        assert format_benchmark_name("  NK ") == "nk"
        assert format_benchmark_name("Styblinski") == "styblinski"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
