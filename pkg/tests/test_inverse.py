import numpy as np
import pytest

from src.experiments import example_setup
from src.forward import boundary_flux
from src.inverse import (
    EqualConductivitiesError, InfeasibleMeasurementError, NoiseSwampsSignalError,
    bound_from_fluxes, error_bound_exact, error_bound_practical, estimate_interface,
    feasibility_interval, interface_from_flux, is_feasible,
)
from src.models import FluxMeasurement, InvalidSetupError

from random_bars import random_setups


@pytest.mark.parametrize("example,q_m,q_M", [
    (1, 316.473988, 595.679012),
    (2, 194.444444, 605.491329),
    (3, 457.03125, 503.289474),
])
def test_reference_intervals(example, q_m, q_M):
    interval = feasibility_interval(example_setup(example).without_interface())
    assert interval.q_m == pytest.approx(q_m, abs=1e-6)
    assert interval.q_M == pytest.approx(q_M, abs=1e-6)


def test_interval_does_not_depend_on_order_of_materials(fe_cu):
    swapped = fe_cu.model_copy(update={"material_a": fe_cu.material_b, "material_b": fe_cu.material_a})
    assert feasibility_interval(swapped.without_interface()) == feasibility_interval(fe_cu.without_interface())


def test_true_flux_recovers_interface(reference_setup):
    q = boundary_flux(reference_setup)
    l_hat = estimate_interface(reference_setup.without_interface(), FluxMeasurement(q_hat=q))
    assert l_hat == pytest.approx(4.0, rel=1e-10)


def test_example_one_estimate(fe_cu):
    l_hat = estimate_interface(fe_cu.without_interface(), FluxMeasurement(q_hat=436.0, epsilon=4.299))
    assert l_hat == pytest.approx(4.15122, abs=1e-5)


RANDOM_SETUPS = random_setups(1000, seed=20240601)


@pytest.mark.parametrize("setup", RANDOM_SETUPS)
def test_noise_free_round_trip(setup):
    q = boundary_flux(setup)
    inverse = setup.without_interface()
    assert is_feasible(inverse, q)
    assert estimate_interface(inverse, FluxMeasurement(q_hat=q)) == pytest.approx(
        setup.interface, rel=1e-9, abs=1e-10 * setup.length
    )


@pytest.mark.parametrize("offset", [0.0, 1e-9])
def test_interval_endpoints_are_excluded(fe_cu, offset):
    inverse = fe_cu.without_interface()
    interval = feasibility_interval(inverse)
    for q in (interval.q_m - offset, interval.q_M + offset):
        assert not is_feasible(inverse, q)
        with pytest.raises(InfeasibleMeasurementError) as info:
            estimate_interface(inverse, FluxMeasurement(q_hat=q))
        assert info.value.interval == interval


def test_endpoints_map_to_bar_ends(fe_cu):
    inverse = fe_cu.without_interface()
    interval = feasibility_interval(inverse)
    # κ_A < κ_B: q_M 对应 l = 0, q_m 对应 l = L
    assert interface_from_flux(inverse, interval.q_M) == pytest.approx(0.0, abs=1e-9)
    assert interface_from_flux(inverse, interval.q_m) == pytest.approx(fe_cu.length, rel=1e-12)


def test_endpoints_map_to_bar_ends_for_better_conducting_left_side(ag_pb):
    inverse = ag_pb.without_interface()
    interval = feasibility_interval(inverse)
    # κ_A > κ_B: q_m 对应 l = 0, q_M 对应 l = L
    assert interface_from_flux(inverse, interval.q_m) == pytest.approx(0.0, abs=1e-9)
    assert interface_from_flux(inverse, interval.q_M) == pytest.approx(ag_pb.length, abs=1e-9)
    near_low = estimate_interface(inverse, FluxMeasurement(q_hat=interval.q_m * (1 + 1e-9)))
    near_high = estimate_interface(inverse, FluxMeasurement(q_hat=interval.q_M * (1 - 1e-9)))
    assert 0.0 < near_low < 1e-6
    assert ag_pb.length - 1e-6 < near_high < ag_pb.length


MONOTONE_SETUPS = random_setups(100, seed=417)


@pytest.mark.parametrize("setup", MONOTONE_SETUPS)
def test_estimate_is_strictly_monotone_in_flux(setup):
    inverse = setup.without_interface()
    interval = feasibility_interval(inverse)
    fluxes = np.linspace(interval.q_m, interval.q_M, 52)[1:-1]
    estimates = np.array([interface_from_flux(inverse, float(q)) for q in fluxes])
    steps = np.diff(estimates)
    # κ_A < κ_B 时 l̂ 随 q̂ 减小，反之增大
    if setup.material_a.kappa < setup.material_b.kappa:
        assert np.all(steps < 0)
    else:
        assert np.all(steps > 0)
    assert np.all((estimates > 0) & (estimates < setup.length))


def test_equal_conductivities_rejected(make_setup):
    inverse = make_setup(ka=100.0, kb=100.0).without_interface()
    with pytest.raises(EqualConductivitiesError):
        feasibility_interval(inverse)
    with pytest.raises(EqualConductivitiesError):
        estimate_interface(inverse, FluxMeasurement(q_hat=300.0))


def test_invalid_measurement_checked_before_feasibility(fe_cu):
    with pytest.raises(InvalidSetupError) as info:
        estimate_interface(fe_cu.without_interface(), FluxMeasurement(q_hat=-1.0))
    assert info.value.field == "q_hat"


@pytest.mark.parametrize("q_hat", [436.0, 437.0, 439.0, 441.0, 444.0, 445.0])
def test_exact_bound_covers_error(fe_cu, q_hat):
    q = boundary_flux(fe_cu)
    m = FluxMeasurement(q_hat=q_hat, epsilon=abs(q - q_hat))
    inverse = fe_cu.without_interface()
    l_hat = estimate_interface(inverse, m)
    K = error_bound_exact(inverse, q, m)
    # 误差界在 ε = |q - q̂| 时取等
    assert abs(l_hat - fe_cu.interface) == pytest.approx(K, rel=1e-9)


def test_exact_bound_table_values(fe_cu):
    q = boundary_flux(fe_cu)
    inverse = fe_cu.without_interface()
    m = FluxMeasurement(q_hat=444.0, epsilon=abs(q - 444.0))
    assert error_bound_exact(inverse, q, m) == pytest.approx(0.127804, abs=1e-5)


def test_exact_bound_requires_feasible_true_flux(fe_cu):
    inverse = fe_cu.without_interface()
    with pytest.raises(InfeasibleMeasurementError):
        error_bound_exact(inverse, 600.0, FluxMeasurement(q_hat=440.0, epsilon=1.0))


def test_practical_bound(fe_cu):
    inverse = fe_cu.without_interface()
    K = error_bound_practical(inverse, FluxMeasurement(q_hat=436.0, epsilon=4.299))
    assert K == pytest.approx(0.1542, abs=5e-4)
    # 最坏情况不小于真实热流处的误差界
    q = boundary_flux(fe_cu)
    assert K >= bound_from_fluxes(inverse, q, 436.0, 4.299)


def test_practical_bound_clamps_to_interval(ag_pb):
    inverse = ag_pb.without_interface()
    interval = feasibility_interval(inverse)
    q_hat = interval.q_m + 1.0
    K = error_bound_practical(inverse, FluxMeasurement(q_hat=q_hat, epsilon=50.0))
    assert K == pytest.approx(bound_from_fluxes(inverse, interval.q_m, q_hat, 50.0))


def test_practical_bound_noise_swamps_signal(al_mg):
    inverse = al_mg.without_interface()
    with pytest.raises(NoiseSwampsSignalError):
        error_bound_practical(inverse, FluxMeasurement(q_hat=480.0, epsilon=100.0))


def test_practical_bound_zero_noise(fe_cu):
    inverse = fe_cu.without_interface()
    assert error_bound_practical(inverse, FluxMeasurement(q_hat=440.0, epsilon=0.0)) == 0.0


def test_infeasible_message_lists_interval(fe_cu):
    with pytest.raises(InfeasibleMeasurementError, match=r"\(316\.474, 595\.679\)"):
        estimate_interface(fe_cu.without_interface(), FluxMeasurement(q_hat=600.0))
