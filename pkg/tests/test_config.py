"""Tests for settings, tolerances and logging setup."""

import io
import logging

import pytest
from pydantic import ValidationError

from petz_geometry.api.schemas import SuiteConfig
from petz_geometry.config import Config, Tolerances
from petz_geometry.logging_config import get_logger, set_run_id, setup_logging


class TestTolerances:
    """Test the tolerance record."""

    def test_defaults(self):
        tol = Tolerances()
        assert tol.analytic == 1e-9
        assert tol.numeric == 1e-6
        assert tol.witness == 1e-8

    def test_scaled(self):
        tol = Tolerances().scaled(100)
        assert tol.bracket == pytest.approx(1e-3)
        assert tol.exact == pytest.approx(1e-10)

    def test_scale_must_be_positive(self):
        with pytest.raises(ValueError):
            Tolerances().scaled(0)

    def test_frozen(self):
        with pytest.raises(ValidationError):
            Tolerances().analytic = 1.0


class TestConfig:
    """Test PETZ_* environment overrides."""

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("PETZ_DEFAULT_TRIALS", "7")
        monkeypatch.setenv("PETZ_DEFAULT_DIMS", "[2, 5]")
        settings = Config()
        assert settings.DEFAULT_TRIALS == 7
        assert settings.DEFAULT_DIMS == [2, 5]

    def test_suite_config_normalizes_lists(self):
        cfg = SuiteConfig(dims=[3, 2, 3], kappas=[1.0, 0.5], specs=["wy", "gl:0.5", "bkm"])
        assert cfg.dims == [2, 3]
        assert cfg.kappas == [0.5, 1.0]
        assert cfg.specs == ["wy", "gl:0.5", "bkm"]

    def test_suite_config_rejects_test_functions(self):
        with pytest.raises(ValidationError):
            SuiteConfig(specs=["test:square"])

    def test_suite_config_rejects_nonpositive_kappa(self):
        with pytest.raises(ValidationError):
            SuiteConfig(kappas=[0.0])


class TestLogging:
    """Test the run id filter."""

    def test_run_id_in_records(self):
        stream = io.StringIO()
        setup_logging(stream=stream, level="INFO")
        run_id = set_run_id("abc123")
        get_logger("petz_geometry.test").info("hello")
        assert run_id == "abc123"
        assert "| abc123 |" in stream.getvalue()
        assert "hello" in stream.getvalue()

    def test_level_override(self):
        stream = io.StringIO()
        setup_logging(stream=stream, level="WARNING")
        get_logger("petz_geometry.test").info("hidden")
        assert "hidden" not in stream.getvalue()
        assert logging.getLogger().level == logging.WARNING

    def test_generated_run_id(self):
        assert len(set_run_id()) == 12
