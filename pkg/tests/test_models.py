import math
from datetime import datetime, timedelta

import pytest
from pydantic import ValidationError

from src.models import (
    CliConfig, EqualConductivitiesError, FdSolution, FeasibilityInterval, FluxMeasurement,
    InvalidSetupError, Material, RunStatistics, parse_decimal, validate_bar_setup,
    validate_inverse_setup, validate_material, validate_measurement,
)


def test_valid_setup_is_returned_unchanged(make_setup):
    setup = make_setup()
    assert validate_bar_setup(setup) is setup


@pytest.mark.parametrize("overrides,field", [
    ({"length": -1.0, "h": -1.0}, "length"),
    ({"length": 0.0}, "length"),
    ({"h": 0.0, "interface": 20.0}, "convection_coeff"),
    ({"interface": 0.0}, "interface"),
    ({"interface": 10.0}, "interface"),
    ({"interface": 4.0, "source_temp": 25.0}, "source_temp"),
    ({"source_temp": 20.0, "ka": -1.0}, "source_temp"),
    ({"ambient_temp": math.nan}, "ambient_temp"),
    ({"ka": 0.0, "kb": -5.0}, "material_a.kappa"),
    ({"kb": math.inf}, "material_b.kappa"),
])
def test_first_violation_wins(make_setup, overrides, field):
    with pytest.raises(InvalidSetupError) as info:
        validate_bar_setup(make_setup(**overrides))
    assert info.value.field == field


def test_error_message_names_field_and_value(make_setup):
    with pytest.raises(InvalidSetupError, match=r"length must be positive: length=-2\.0"):
        validate_bar_setup(make_setup(length=-2.0))


def test_inverse_setup_requires_distinct_conductivities(make_setup):
    setup = make_setup(ka=200.0, kb=200.0).without_interface()
    with pytest.raises(EqualConductivitiesError):
        validate_inverse_setup(setup)


def test_inverse_setup_validation_order_before_equal_kappa(make_setup):
    setup = make_setup(ka=200.0, kb=200.0, length=-1.0).without_interface()
    with pytest.raises(InvalidSetupError) as info:
        validate_inverse_setup(setup)
    assert info.value.field == "length"
    assert not isinstance(info.value, EqualConductivitiesError)


def test_material_name_and_symbol_required():
    with pytest.raises(InvalidSetupError, match="name"):
        validate_material(Material(name=" ", symbol="X", kappa=1.0))
    with pytest.raises(InvalidSetupError, match="symbol"):
        validate_material(Material(name="Xenon", symbol="", kappa=1.0))


@pytest.mark.parametrize("q_hat,epsilon,field", [
    (0.0, 0.0, "q_hat"),
    (-3.0, 1.0, "q_hat"),
    (math.nan, 0.0, "q_hat"),
    (100.0, -0.1, "epsilon"),
    (100.0, math.inf, "epsilon"),
])
def test_invalid_measurement(q_hat, epsilon, field):
    with pytest.raises(InvalidSetupError) as info:
        validate_measurement(FluxMeasurement(q_hat=q_hat, epsilon=epsilon))
    assert info.value.field == field


def test_interface_round_trip(make_setup):
    setup = make_setup(interface=3.5)
    inverse = setup.without_interface()
    assert not hasattr(inverse, "interface")
    assert inverse.with_interface(3.5) == setup
    assert setup.with_interface(6.0).interface == 6.0


def test_temperature_drop(make_setup):
    assert make_setup(source_temp=80.0, ambient_temp=-5.0).temperature_drop == 85.0


def test_models_are_immutable(make_setup):
    setup = make_setup()
    with pytest.raises(ValidationError):
        setup.length = 3.0


def test_feasibility_interval_is_open():
    interval = FeasibilityInterval(q_m=1.0, q_M=3.0)
    assert interval.contains(2.0)
    assert not interval.contains(1.0)
    assert not interval.contains(3.0)
    assert interval.width == 2.0
    assert str(FeasibilityInterval(q_m=316.473988, q_M=595.679012)) == "(316.474, 595.679)"


def test_fd_solution_shape_is_checked():
    with pytest.raises(ValidationError):
        FdSolution(nodes=(0.0, 1.0), temps=(1.0,), interface_index=0, kappa_b=1.0,
                   convection_coeff=1.0, ambient_temp=0.0)
    with pytest.raises(ValidationError):
        FdSolution(nodes=(0.0, 0.0), temps=(1.0, 1.0), interface_index=0, kappa_b=1.0,
                   convection_coeff=1.0, ambient_temp=0.0)


@pytest.mark.parametrize("text,expected", [
    ("436", 436.0),
    ("+4.299", 4.299),
    ("-25", -25.0),
    (".5", 0.5),
    ("3.", 3.0),
    ("1e-3", 1e-3),
    ("2.5E+2", 250.0),
    (" 7 ", 7.0),
])
def test_parse_decimal_accepts(text, expected):
    assert parse_decimal(text) == expected


@pytest.mark.parametrize("text", ["", "1,5", "nan", "inf", "1e", "0x10", "1_000", "--1", "e5"])
def test_parse_decimal_rejects(text):
    with pytest.raises(ValueError):
        parse_decimal(text)


class Test_CliConfig:
    def test_symbol_or_kappa(self):
        config = CliConfig(subcommand="flux", material_a="Fe", kappa_b=386.0)
        assert config.material_b is None
        assert config.length == 10.0
        assert config.output_format == "text"

    def test_both_given(self):
        with pytest.raises(ValidationError, match="material a given both"):
            CliConfig(subcommand="flux", material_a="Fe", kappa_a=73.0, material_b="Cu")

    def test_missing_side(self):
        with pytest.raises(ValidationError, match="material b needs"):
            CliConfig(subcommand="flux", material_a="Fe")


def test_run_statistics():
    stats = RunStatistics(samples=200, feasible=150, infeasible=50)
    assert stats.duration is None
    assert stats.feasible_rate == pytest.approx(75.0)
    start = datetime(2024, 1, 1, 12, 0, 0)
    stats.start_time = start
    stats.end_time = start + timedelta(seconds=2.5)
    assert stats.duration == pytest.approx(2.5)
    assert RunStatistics().feasible_rate == 0.0
