"""
数据模型定义

所有物理量均使用国际单位制 (m, °C, W·m⁻², W·m⁻¹·°C⁻¹, W·m⁻²·°C⁻¹)，
全程不做单位换算。模型均为不可变值对象，可在线程间直接共享。
"""
import math
import re
from datetime import datetime
from enum import Enum
from typing import Any, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ThermifaceError(Exception):
    """领域错误基类"""


class InvalidSetupError(ThermifaceError, ValueError):
    """参数校验错误，指明第一个不满足约束的字段"""

    def __init__(self, field: str, value: Any, reason: str):
        self.field = field
        self.value = value
        self.reason = reason
        super().__init__(f"{reason}: {field}={value!r}")


class EqualConductivitiesError(InvalidSetupError):
    """两种材料导热系数相同，反演公式奇异"""

    def __init__(self, kappa: float):
        super().__init__(
            "kappa",
            kappa,
            "conductivities must differ for interface estimation",
        )


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class Material(_Frozen):
    """材料及其导热系数"""
    name: str = Field(..., description="材料名称")
    symbol: str = Field(..., description="材料符号")
    kappa: float = Field(..., description="导热系数 W·m⁻¹·°C⁻¹")


class InverseSetup(_Frozen):
    """反问题参数：不含界面位置"""
    length: float = Field(..., description="杆长 L (m)")
    source_temp: float = Field(..., description="左端热源温度 F (°C)")
    ambient_temp: float = Field(..., description="环境温度 Ta (°C)")
    convection_coeff: float = Field(..., description="对流换热系数 h")
    material_a: Material = Field(..., description="占据 [0, l] 的材料")
    material_b: Material = Field(..., description="占据 [l, L] 的材料")

    @property
    def temperature_drop(self) -> float:
        """F - Ta"""
        return self.source_temp - self.ambient_temp

    def with_interface(self, interface: float) -> "BarSetup":
        """补上界面位置，得到完整的正问题参数"""
        return BarSetup(**{**dict(self), "interface": interface})


class BarSetup(InverseSetup):
    """正问题参数：几何、材料、边界条件与界面位置"""
    interface: float = Field(..., description="界面位置 l (m)")

    def without_interface(self) -> InverseSetup:
        """去掉界面位置，得到反问题参数"""
        return InverseSetup(
            length=self.length,
            source_temp=self.source_temp,
            ambient_temp=self.ambient_temp,
            convection_coeff=self.convection_coeff,
            material_a=self.material_a,
            material_b=self.material_b,
        )


class FluxMeasurement(_Frozen):
    """右端热流测量值"""
    q_hat: float = Field(..., description="测量热流 q̂ (W·m⁻²)")
    epsilon: float = Field(default=0.0, description="噪声水平 ε，|q - q̂| 的上界")


class ProfileCoefficients(_Frozen):
    """分段线性解 u = a + b·x (x ≤ l), u = c + d·x (x > l)"""
    a: float
    b: float
    c: float
    d: float
    zeta: float


class TemperatureProfile(_Frozen):
    """温度分布：参数 + 系数"""
    setup: BarSetup
    coeffs: ProfileCoefficients


class FdSolution(_Frozen):
    """有限差分解"""
    nodes: Tuple[float, ...] = Field(..., description="节点坐标，严格递增")
    temps: Tuple[float, ...] = Field(..., description="节点温度")
    interface_index: int = Field(..., description="界面所在节点下标")
    kappa_b: float = Field(..., description="右段导热系数，用于恢复边界热流")
    convection_coeff: float = Field(..., description="右端对流换热系数")
    ambient_temp: float = Field(..., description="环境温度")

    @model_validator(mode="after")
    def _check_shape(self) -> "FdSolution":
        if len(self.nodes) != len(self.temps):
            raise ValueError("nodes and temps must have the same length")
        if any(b <= a for a, b in zip(self.nodes, self.nodes[1:])):
            raise ValueError("nodes must be strictly increasing")
        return self


class FeasibilityInterval(_Frozen):
    """可反演的热流开区间 (q_m, q_M)"""
    q_m: float = Field(..., description="下界 (开)")
    q_M: float = Field(..., description="上界 (开)")

    @property
    def width(self) -> float:
        return self.q_M - self.q_m

    def contains(self, q: float) -> bool:
        """严格包含"""
        return self.q_m < q < self.q_M

    def __str__(self) -> str:
        return f"({self.q_m:.6g}, {self.q_M:.6g})"


class EstimateReport(_Frozen):
    """界面位置估计报告"""
    l_hat: float = Field(..., description="界面位置估计 (m)")
    measurement: FluxMeasurement
    interval: FeasibilityInterval
    error_bound_practical: float = Field(..., description="最坏情况误差界 (m)")
    elasticity_at_measurement: float = Field(..., description="测量点处的弹性")


class ElasticitySign(str, Enum):
    """弹性函数在可行区间上的符号"""
    NEGATIVE = "negative"
    POSITIVE = "positive"


class ElasticityProfile(_Frozen):
    """弹性函数的渐近线与符号"""
    setup: InverseSetup
    asymptote_q: float
    sign_on_feasible_interval: ElasticitySign


class ReferenceExample(_Frozen):
    """数值算例：材料对与表格中的 q̂ 网格"""
    number: int
    material_a: str
    material_b: str
    interface: float = 4.0
    q_hat_grid: Tuple[float, ...]


class TableRow(_Frozen):
    """估计表格的一行"""
    q_hat: float
    l_hat: float
    epsilon: float
    K: float


class ElasticityCurve(_Frozen):
    """弹性曲线采样"""
    points: Tuple[Tuple[float, float], ...]
    omitted: int = Field(default=0, description="渐近线附近被跳过的采样数")


class SweepSample(_Frozen):
    """蒙特卡罗单次抽样"""
    i: int
    q_hat: float
    feasible: bool
    l_hat: Optional[float] = None
    abs_error: Optional[float] = None
    K: Optional[float] = None


class SweepSummary(_Frozen):
    """蒙特卡罗汇总"""
    feasible: int
    infeasible: int
    max_abs_error: float
    max_bound: float
    bound_violations: int


class SweepResult(_Frozen):
    """蒙特卡罗噪声扫描结果"""
    seed: int
    samples: int
    epsilon: float
    noise_model: Literal["uniform", "gaussian"] = "uniform"
    rows: Tuple[SweepSample, ...]
    summary: SweepSummary


class AppConfig(BaseModel):
    """配置模型"""
    materials_file: Optional[str] = Field(default=None, description="用户材料CSV文件")
    log_level: str = Field(default="WARNING", description="日志级别")
    log_file: Optional[str] = Field(default=None, description="日志文件路径")
    sweep_workers: int = Field(default=1, description="蒙特卡罗并行线程数")
    noise_model: Literal["uniform", "gaussian"] = Field(default="uniform", description="噪声分布")


class CliConfig(_Frozen):
    """命令行参数"""
    subcommand: str
    length: float = 10.0
    source_temp: float = 100.0
    ambient_temp: float = 25.0
    convection_coeff: float = 10.0
    interface: Optional[float] = None
    material_a: Optional[str] = None
    material_b: Optional[str] = None
    kappa_a: Optional[float] = None
    kappa_b: Optional[float] = None
    materials_file: Optional[str] = None
    output: Optional[str] = None
    output_format: Literal["text", "csv"] = "text"

    @model_validator(mode="after")
    def _one_source_per_side(self) -> "CliConfig":
        for side, symbol, kappa in (("a", self.material_a, self.kappa_a),
                                    ("b", self.material_b, self.kappa_b)):
            if symbol is not None and kappa is not None:
                raise ValueError(f"material {side} given both by --material-{side} and --kappa-{side}")
            if symbol is None and kappa is None:
                raise ValueError(f"material {side} needs --material-{side} or --kappa-{side}")
        return self


class RunStatistics(BaseModel):
    """统计信息模型"""
    samples: int = Field(default=0, description="总抽样数")
    feasible: int = Field(default=0, description="可行抽样数")
    infeasible: int = Field(default=0, description="被丢弃的抽样数")
    bound_violations: int = Field(default=0, description="误差界违反次数")
    start_time: Optional[datetime] = Field(default=None, description="开始时间")
    end_time: Optional[datetime] = Field(default=None, description="结束时间")

    @property
    def duration(self) -> Optional[float]:
        """获取执行时长(秒)"""
        if self.start_time and self.end_time:
            return (self.end_time - self.start_time).total_seconds()
        return None

    @property
    def feasible_rate(self) -> float:
        """可行抽样比例 (%)"""
        if self.samples == 0:
            return 0.0
        return self.feasible / self.samples * 100


def _finite_positive(value: float) -> bool:
    return math.isfinite(value) and value > 0


def _check_material(prefix: str, material: Material) -> None:
    if not material.name.strip():
        raise InvalidSetupError(f"{prefix}.name", material.name, "material name must be non-empty")
    if not material.symbol.strip():
        raise InvalidSetupError(f"{prefix}.symbol", material.symbol, "material symbol must be non-empty")
    if not _finite_positive(material.kappa):
        raise InvalidSetupError(f"{prefix}.kappa", material.kappa, "kappa must be positive")


def validate_material(material: Material) -> Material:
    """校验单个材料"""
    _check_material("material", material)
    return material


def _check_setup(setup: InverseSetup, interface: Optional[float]) -> None:
    # 固定顺序: L, h, l, 温度, 导热系数
    if not _finite_positive(setup.length):
        raise InvalidSetupError("length", setup.length, "length must be positive")
    if not _finite_positive(setup.convection_coeff):
        raise InvalidSetupError("convection_coeff", setup.convection_coeff,
                                "convection coefficient must be positive")
    if interface is not None and not (math.isfinite(interface) and 0 < interface < setup.length):
        raise InvalidSetupError("interface", interface, "interface not strictly interior")
    if not math.isfinite(setup.source_temp):
        raise InvalidSetupError("source_temp", setup.source_temp, "temperature must be finite")
    if not math.isfinite(setup.ambient_temp):
        raise InvalidSetupError("ambient_temp", setup.ambient_temp, "temperature must be finite")
    if not setup.source_temp > setup.ambient_temp:
        raise InvalidSetupError("source_temp", setup.source_temp, "source must exceed ambient")
    _check_material("material_a", setup.material_a)
    _check_material("material_b", setup.material_b)


def validate_bar_setup(setup: BarSetup) -> BarSetup:
    """校验正问题参数，通过时原样返回"""
    _check_setup(setup, setup.interface)
    return setup


def validate_inverse_setup(setup: InverseSetup) -> InverseSetup:
    """校验反问题参数，额外要求两种材料导热系数不同"""
    _check_setup(setup, None)
    if setup.material_a.kappa == setup.material_b.kappa:
        raise EqualConductivitiesError(setup.material_a.kappa)
    return setup


def validate_measurement(measurement: FluxMeasurement) -> FluxMeasurement:
    """校验热流测量值"""
    if not _finite_positive(measurement.q_hat):
        raise InvalidSetupError("q_hat", measurement.q_hat, "measured flux must be positive")
    if not (math.isfinite(measurement.epsilon) and measurement.epsilon >= 0):
        raise InvalidSetupError("epsilon", measurement.epsilon, "noise level must be non-negative")
    return measurement


_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")


def parse_decimal(text: str) -> float:
    """只接受 '.' 作小数点的十进制数，与区域设置无关"""
    stripped = text.strip()
    if not _DECIMAL.fullmatch(stripped):
        raise ValueError(f"not a decimal number: {text!r}")
    return float(stripped)
