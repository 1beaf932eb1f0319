"""
弹性分析：测量热流对界面估计的局部影响

E(q) = (q / l) · ∂l/∂q，即热流 1% 的误差导致的界面估计百分比误差。
"""
import logging
from typing import Tuple

from .inverse import InfeasibleMeasurementError, interface_from_flux, feasibility_interval
from .models import (
    ElasticityProfile, ElasticitySign, EqualConductivitiesError, InverseSetup,
    ThermifaceError, validate_inverse_setup,
)

logger = logging.getLogger(__name__)

# |分母| < ASYMPTOTE_RTOL·|分子| 视为落在渐近线上
ASYMPTOTE_RTOL = 1e-12


class AtAsymptoteError(ThermifaceError):
    """求值点落在弹性函数的垂直渐近线上"""

    def __init__(self, q: float, asymptote: float):
        self.q = q
        self.asymptote = asymptote
        super().__init__(f"flux {q:.6g} is at the elasticity asymptote {asymptote:.6g}")


def _terms(setup: InverseSetup, q: float) -> Tuple[float, float, float]:
    h = setup.convection_coeff
    kb = setup.material_b.kappa
    numerator = setup.temperature_drop * h * kb
    slope = kb + setup.length * h
    denominator = q * slope - numerator
    return numerator, slope, denominator


def _checked_terms(setup: InverseSetup, q: float) -> Tuple[float, float, float]:
    interval = feasibility_interval(setup)
    if not interval.contains(q):
        raise InfeasibleMeasurementError(q, interval)
    numerator, slope, denominator = _terms(setup, q)
    if abs(denominator) < ASYMPTOTE_RTOL * abs(numerator):
        raise AtAsymptoteError(q, asymptote_location(setup))
    return numerator, slope, denominator


def asymptote_location(setup: InverseSetup) -> float:
    """垂直渐近线位置 h·κ_B·(F-Ta)/(κ_B + L·h)"""
    validate_inverse_setup(setup)
    numerator, slope, _ = _terms(setup, 0.0)
    return numerator / slope


def classify_sign(setup: InverseSetup) -> ElasticitySign:
    """κ_A < κ_B 时弹性为负，κ_A > κ_B 时为正"""
    ka = setup.material_a.kappa
    kb = setup.material_b.kappa
    if ka == kb:
        raise EqualConductivitiesError(ka)
    validate_inverse_setup(setup)
    return ElasticitySign.NEGATIVE if ka < kb else ElasticitySign.POSITIVE


def elasticity_profile(setup: InverseSetup) -> ElasticityProfile:
    return ElasticityProfile(
        setup=setup,
        asymptote_q=asymptote_location(setup),
        sign_on_feasible_interval=classify_sign(setup),
    )


def elasticity(setup: InverseSetup, q: float) -> float:
    """弹性函数 E(q)"""
    numerator, _, denominator = _checked_terms(setup, q)
    value = numerator / denominator
    logger.debug(f"Elasticity at q={q:.6g}: {value:.6g}")
    return value


def elasticity_derivative(setup: InverseSetup, q: float) -> float:
    """∂E/∂q，在可行区间上恒为负"""
    numerator, slope, denominator = _checked_terms(setup, q)
    return -numerator * slope / (denominator * denominator)


def elasticity_finite_difference(setup: InverseSetup, q: float, rel_step: float = 1e-4) -> float:
    """用界面反演公式的中心差分近似 E(q)，作为闭式解的校验"""
    _checked_terms(setup, q)
    delta = rel_step * q
    l_mid = interface_from_flux(setup, q)
    slope = (interface_from_flux(setup, q + delta) - interface_from_flux(setup, q - delta)) / (2 * delta)
    return q / l_mid * slope
