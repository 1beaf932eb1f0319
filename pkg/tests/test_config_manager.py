import logging

import click
import pytest
from pydantic import ValidationError

from src.config_manager import (
    ENV_LOG_LEVEL, ENV_MATERIALS, ENV_NOISE_MODEL, ENV_SWEEP_WORKERS, EXIT_INFEASIBLE, EXIT_IO,
    EXIT_VALIDATION, ConfigManager, ErrorHandler, resolve_materials_file, setup_logging,
)
from src.inverse import InfeasibleMeasurementError
from src.materials import MaterialFileError
from src.models import AppConfig, CliConfig, FeasibilityInterval, InvalidSetupError

ENV_NAMES = (ENV_MATERIALS, ENV_LOG_LEVEL, ENV_SWEEP_WORKERS, ENV_NOISE_MODEL, "THERMIFACE_LOG_FILE")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    # 先 setenv 再 delenv，保证 load_dotenv 写入的变量在用例结束后被清除
    for name in ENV_NAMES:
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)


def test_defaults(tmp_path):
    config = ConfigManager(str(tmp_path / ".env")).create_config_from_env()
    assert config == AppConfig()
    assert config.log_level == "WARNING"
    assert config.sweep_workers == 1
    assert config.noise_model == "uniform"


def test_env_file_is_loaded(tmp_path):
    env_file = tmp_path / ".env"
    env_file.write_text(
        f"{ENV_MATERIALS}=user.csv\n{ENV_SWEEP_WORKERS}=3\n{ENV_NOISE_MODEL}=Gaussian\n",
        encoding="utf-8",
    )
    config = ConfigManager(str(env_file)).create_config_from_env()
    assert config.materials_file == "user.csv"
    assert config.sweep_workers == 3
    assert config.noise_model == "gaussian"


def test_process_environment_wins_over_env_file(tmp_path, monkeypatch):
    env_file = tmp_path / ".env"
    env_file.write_text(f"{ENV_SWEEP_WORKERS}=3\n", encoding="utf-8")
    monkeypatch.setenv(ENV_SWEEP_WORKERS, "2")
    assert ConfigManager(str(env_file)).create_config_from_env().sweep_workers == 2


@pytest.mark.parametrize("name,value", [
    (ENV_SWEEP_WORKERS, "many"),
    (ENV_NOISE_MODEL, "cauchy"),
])
def test_malformed_values_name_the_variable(tmp_path, monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValueError, match=name):
        ConfigManager(str(tmp_path / ".env")).create_config_from_env()


def test_validate_config(tmp_path):
    manager = ConfigManager(str(tmp_path / ".env"))
    result = manager.validate_config(AppConfig(sweep_workers=0, materials_file=str(tmp_path / "nope.csv")))
    assert not result["valid"]
    assert len(result["issues"]) == 2

    result = manager.validate_config(AppConfig(log_level="LOUD"))
    assert result["valid"]
    assert result["warnings"]


def test_sample_env_file(tmp_path):
    path = tmp_path / ".env.example"
    ConfigManager(str(tmp_path / ".env")).create_sample_env_file(str(path))
    text = path.read_text(encoding="utf-8")
    for name in (ENV_MATERIALS, ENV_LOG_LEVEL, ENV_SWEEP_WORKERS, ENV_NOISE_MODEL):
        assert f"{name}=" in text


def test_flag_wins_over_environment():
    config = AppConfig(materials_file="from-env.csv")
    assert resolve_materials_file("from-flag.csv", config) == "from-flag.csv"
    assert resolve_materials_file(None, config) == "from-env.csv"
    assert resolve_materials_file(None, AppConfig()) is None


def test_setup_logging_writes_file(tmp_path):
    log_file = tmp_path / "run.log"
    setup_logging("DEBUG", str(log_file))
    logging.getLogger("src.test").debug("hello from the test")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "hello from the test" in log_file.read_text(encoding="utf-8")
    assert logging.getLogger().level == logging.DEBUG


def test_setup_logging_unknown_level_falls_back():
    setup_logging("LOUD")
    assert logging.getLogger().level == logging.WARNING


class Test_ErrorHandler:
    @pytest.mark.parametrize("error,code", [
        (InfeasibleMeasurementError(600.0, FeasibilityInterval(q_m=1.0, q_M=2.0)), EXIT_INFEASIBLE),
        (InvalidSetupError("length", -1.0, "length must be positive"), EXIT_VALIDATION),
        (MaterialFileError("m.csv", 2, "kappa must be positive"), EXIT_VALIDATION),
        (ValueError("bad"), EXIT_VALIDATION),
        (click.UsageError("no such option"), EXIT_VALIDATION),
        (FileNotFoundError("m.csv"), EXIT_IO),
        (click.FileError("m.csv"), EXIT_IO),
        (RuntimeError("boom"), 1),
    ])
    def test_exit_codes(self, error, code):
        assert ErrorHandler.exit_code_for(error) == code

    def test_validation_error_message(self):
        with pytest.raises(ValidationError) as info:
            CliConfig(subcommand="flux", material_a="Fe")
        assert ErrorHandler.exit_code_for(info.value) == EXIT_VALIDATION
        assert ErrorHandler.describe(info.value) == "Error: material b needs --material-b or --kappa-b"

    def test_domain_error_message(self):
        error = InvalidSetupError("length", -1.0, "length must be positive")
        assert ErrorHandler.describe(error) == "Error: length must be positive: length=-1.0"
