"""
有限差分求解器 - 用于校验解析解的独立参照

每段材料内部均匀剖分，界面恰好落在节点上，三对角方程组用 Thomas 算法求解。
解为分段线性，因此任意网格下节点值都与解析解一致（仅有舍入误差）。
"""
import logging

import numpy as np

from .models import (
    BarSetup, FdSolution, InvalidSetupError, ThermifaceError, validate_bar_setup,
)

logger = logging.getLogger(__name__)


class SingularSystemError(ThermifaceError):
    """三对角消元遇到零主元（有效参数下不会发生）"""

    def __init__(self, row: int):
        self.row = row
        super().__init__(f"Singular tridiagonal system at row {row}")


def thomas_solve(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Thomas 算法求解三对角方程组

    lower[i] 为第 i 行次对角元 (lower[0] 不使用)，upper[i] 为第 i 行超对角元
    (upper[-1] 不使用)。
    """
    n = len(rhs)
    b = diag.astype(float).copy()
    d = rhs.astype(float).copy()
    x = np.zeros(n)

    # 前向消元
    if b[0] == 0:
        raise SingularSystemError(0)
    for i in range(1, n):
        factor = lower[i] / b[i - 1]
        b[i] = b[i] - factor * upper[i - 1]
        d[i] = d[i] - factor * d[i - 1]
        if b[i] == 0:
            raise SingularSystemError(i)

    # 回代
    x[n - 1] = d[n - 1] / b[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (d[i] - upper[i] * x[i + 1]) / b[i]
    return x


def solve_fd(setup: BarSetup, cells_per_segment: int) -> FdSolution:
    """有限差分求解正问题"""
    validate_bar_setup(setup)
    if cells_per_segment < 1:
        raise InvalidSetupError("cells_per_segment", cells_per_segment, "need at least one cell per segment")

    n_a = n_b = int(cells_per_segment)
    l = setup.interface
    dx_a = l / n_a
    dx_b = (setup.length - l) / n_b
    ka = setup.material_a.kappa
    kb = setup.material_b.kappa
    h = setup.convection_coeff
    n = n_a + n_b + 1

    nodes = np.concatenate([
        dx_a * np.arange(n_a),
        [l],
        l + dx_b * np.arange(1, n_b),
        [setup.length],
    ])

    lower = np.zeros(n)
    diag = np.zeros(n)
    upper = np.zeros(n)
    rhs = np.zeros(n)

    # x = 0: u = F
    diag[0] = 1.0
    rhs[0] = setup.source_temp

    # 段内 u'' = 0
    lower[1:n - 1] = -1.0
    diag[1:n - 1] = 2.0
    upper[1:n - 1] = -1.0

    # 界面：两侧热流相等
    ga = ka / dx_a
    gb = kb / dx_b
    lower[n_a] = -ga
    diag[n_a] = ga + gb
    upper[n_a] = -gb

    # x = L: -κ_B (u_N - u_{N-1}) / Δx_B = h (u_N - Ta)
    lower[n - 1] = -gb
    diag[n - 1] = gb + h
    rhs[n - 1] = h * setup.ambient_temp

    temps = thomas_solve(lower, diag, upper, rhs)
    logger.debug(f"FD solve with {n} nodes, u(L)={temps[-1]!r}")
    return FdSolution(
        nodes=tuple(nodes.tolist()),
        temps=tuple(temps.tolist()),
        interface_index=n_a,
        kappa_b=kb,
        convection_coeff=h,
        ambient_temp=setup.ambient_temp,
    )


def recovered_flux(solution: FdSolution) -> float:
    """
    恢复右端热流

    离散 Robin 行中最后一个单元的传导热流 -κ_B (u_N - u_{N-1}) / Δx_B 与对流热流
    h (u_N - Ta) 相等，取温差较大的一种计算。
    """
    temps = solution.temps
    dx = solution.nodes[-1] - solution.nodes[-2]
    cell_drop = temps[-2] - temps[-1]
    film_drop = temps[-1] - solution.ambient_temp
    if abs(cell_drop) >= abs(film_drop):
        return solution.kappa_b * cell_drop / dx
    return solution.convection_coeff * film_drop
