"""
正问题：两种材料组成的隔热杆稳态温度分布的解析解与右端热流
"""
import logging
import math

from .models import (
    BarSetup, InvalidSetupError, ProfileCoefficients, TemperatureProfile,
    validate_bar_setup,
)

logger = logging.getLogger(__name__)


class OutOfDomainError(InvalidSetupError):
    """求值点不在 [0, L] 内"""

    def __init__(self, x: float, length: float):
        self.x = x
        self.length = length
        super().__init__("x", x, f"position outside the bar [0, {length:g}]")


def solve_coefficients(setup: BarSetup) -> ProfileCoefficients:
    """求分段线性解的四个系数及 ζ"""
    validate_bar_setup(setup)
    ka = setup.material_a.kappa
    kb = setup.material_b.kappa
    h = setup.convection_coeff
    length = setup.length
    l = setup.interface
    drop = setup.ambient_temp - setup.source_temp  # Ta - F < 0

    zeta = ka * kb + kb * h * l + ka * h * (length - l)
    coeffs = ProfileCoefficients(
        a=setup.source_temp,
        b=kb * h * drop / zeta,
        c=setup.source_temp + l * h * (kb - ka) * drop / zeta,
        d=ka * h * drop / zeta,
        zeta=zeta,
    )
    logger.debug(f"Profile coefficients: {coeffs}")
    return coeffs


def solve_profile(setup: BarSetup) -> TemperatureProfile:
    """求解温度分布"""
    return TemperatureProfile(setup=setup, coeffs=solve_coefficients(setup))


def temperature_at(profile: TemperatureProfile, x: float) -> float:
    """x 处温度；x = l 时取左段（两段在界面处连续）"""
    setup = profile.setup
    if not (math.isfinite(x) and 0 <= x <= setup.length):
        raise OutOfDomainError(x, setup.length)
    k = profile.coeffs
    if x <= setup.interface:
        return k.a + k.b * x
    return k.c + k.d * x


def interface_temperature(profile: TemperatureProfile) -> float:
    """界面处温度 u(l)"""
    return temperature_at(profile, profile.setup.interface)


def heat_flux_at(profile: TemperatureProfile, x: float) -> float:
    """x 处热流 -κ u'(x)，沿杆为常数"""
    setup = profile.setup
    if not (math.isfinite(x) and 0 <= x <= setup.length):
        raise OutOfDomainError(x, setup.length)
    if x <= setup.interface:
        return -setup.material_a.kappa * profile.coeffs.b
    return -setup.material_b.kappa * profile.coeffs.d


def boundary_flux(setup: BarSetup) -> float:
    """右端 x = L 处热流 q"""
    validate_bar_setup(setup)
    ka = setup.material_a.kappa
    kb = setup.material_b.kappa
    h = setup.convection_coeff
    q = kb * ka * h * setup.temperature_drop / (
        ka * kb + ka * h * setup.length + (kb - ka) * h * setup.interface
    )
    logger.debug(f"Boundary flux q={q!r}")
    return q
