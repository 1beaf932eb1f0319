"""
反问题：由右端一次带噪热流测量估计界面位置

包括可行区间 (必要且充分条件)、界面估计以及两种误差界。
"""
import logging

from .models import (
    EqualConductivitiesError, FeasibilityInterval, FluxMeasurement, InverseSetup,
    InvalidSetupError, ThermifaceError, validate_inverse_setup, validate_measurement,
)

logger = logging.getLogger(__name__)


class InfeasibleMeasurementError(ThermifaceError):
    """测量热流不在可行开区间内，无法得到严格位于杆内部的界面"""

    def __init__(self, q_hat: float, interval: FeasibilityInterval):
        self.q_hat = q_hat
        self.interval = interval
        super().__init__(
            f"measured flux {q_hat:.6g} outside feasibility interval {interval}"
        )


class NoiseSwampsSignalError(ThermifaceError):
    """噪声区间覆盖了整个可行区间"""

    def __init__(self, q_hat: float, epsilon: float, interval: FeasibilityInterval):
        self.q_hat = q_hat
        self.epsilon = epsilon
        self.interval = interval
        super().__init__(
            f"noise interval [{q_hat - epsilon:.6g}, {q_hat + epsilon:.6g}] "
            f"covers the whole feasibility interval {interval}"
        )


def _endpoint_flux(kappa: float, setup: InverseSetup) -> float:
    h = setup.convection_coeff
    return kappa * h * setup.temperature_drop / (setup.length * h + kappa)


def _gain(setup: InverseSetup) -> float:
    """κ_A·κ_B / |κ_B - κ_A|"""
    ka = setup.material_a.kappa
    kb = setup.material_b.kappa
    return ka * kb / abs(kb - ka)


def feasibility_interval(setup: InverseSetup) -> FeasibilityInterval:
    """可行区间 (q_m, q_M)"""
    validate_inverse_setup(setup)
    ka = setup.material_a.kappa
    kb = setup.material_b.kappa
    return FeasibilityInterval(
        q_m=_endpoint_flux(min(ka, kb), setup),
        q_M=_endpoint_flux(max(ka, kb), setup),
    )


def is_feasible(setup: InverseSetup, q_hat: float) -> bool:
    """0 < l̂ < L 当且仅当 q_m < q̂ < q_M"""
    return feasibility_interval(setup).contains(q_hat)


def _require_feasible(setup: InverseSetup, q_hat: float) -> FeasibilityInterval:
    interval = feasibility_interval(setup)
    if not interval.contains(q_hat):
        raise InfeasibleMeasurementError(q_hat, interval)
    return interval


def interface_from_flux(setup: InverseSetup, q: float) -> float:
    """反演公式本身，不做可行性检查"""
    ka = setup.material_a.kappa
    kb = setup.material_b.kappa
    return ka * kb / (kb - ka) * (
        setup.temperature_drop / q - 1.0 / setup.convection_coeff - setup.length / kb
    )


def estimate_interface(setup: InverseSetup, measurement: FluxMeasurement) -> float:
    """由测量热流 q̂ 估计界面位置 l̂"""
    validate_measurement(measurement)
    _require_feasible(setup, measurement.q_hat)
    l_hat = interface_from_flux(setup, measurement.q_hat)
    logger.debug(f"Estimated interface l_hat={l_hat!r} from q_hat={measurement.q_hat!r}")
    return l_hat


def bound_from_fluxes(setup: InverseSetup, q_true: float, q_hat: float, epsilon: float) -> float:
    """误差界公式本身，不做可行性检查"""
    return _gain(setup) * setup.temperature_drop / (q_true * q_hat) * epsilon


def error_bound_exact(setup: InverseSetup, q_true: float, measurement: FluxMeasurement) -> float:
    """真实热流已知时的误差界 K，满足 |l - l̂| ≤ K"""
    validate_measurement(measurement)
    interval = _require_feasible(setup, measurement.q_hat)
    if not interval.contains(q_true):
        raise InfeasibleMeasurementError(q_true, interval)
    return bound_from_fluxes(setup, q_true, measurement.q_hat, measurement.epsilon)


def error_bound_practical(setup: InverseSetup, measurement: FluxMeasurement) -> float:
    """真实热流未知时，在容许区间上取最坏情况的误差界"""
    validate_measurement(measurement)
    q_hat = measurement.q_hat
    eps = measurement.epsilon
    interval = _require_feasible(setup, q_hat)
    if q_hat - eps <= interval.q_m and q_hat + eps >= interval.q_M:
        raise NoiseSwampsSignalError(q_hat, eps, interval)
    if q_hat - eps <= 0:
        raise InvalidSetupError("epsilon", eps, "noise level must be smaller than the measured flux")
    worst_q = max(q_hat - eps, interval.q_m)
    return bound_from_fluxes(setup, worst_q, q_hat, eps)


__all__ = [
    "EqualConductivitiesError", "InfeasibleMeasurementError", "NoiseSwampsSignalError",
    "feasibility_interval", "is_feasible", "interface_from_flux", "estimate_interface",
    "bound_from_fluxes", "error_bound_exact", "error_bound_practical",
]
