"""
数值实验：复现算例表格、温度分布与弹性曲线数据、带种子的蒙特卡罗噪声扫描
"""
import bisect
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from decimal import ROUND_HALF_UP, Decimal
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from .elasticity import AtAsymptoteError, elasticity
from .forward import boundary_flux, solve_profile, temperature_at
from .inverse import (
    InfeasibleMeasurementError, bound_from_fluxes, error_bound_exact, estimate_interface,
    feasibility_interval, interface_from_flux,
)
from .materials import MaterialDb, builtin_materials
from .models import (
    BarSetup, ElasticityCurve, FeasibilityInterval, FluxMeasurement, InverseSetup,
    InvalidSetupError, ReferenceExample, SweepResult, SweepSample, SweepSummary,
    TableRow, ThermifaceError,
)

logger = logging.getLogger(__name__)

Point = Tuple[float, float]
ProgressCallback = Callable[[str, int, int], None]

# 数值算例的公共参数
EXAMPLE_LENGTH = 10.0
EXAMPLE_SOURCE_TEMP = 100.0
EXAMPLE_AMBIENT_TEMP = 25.0
EXAMPLE_CONVECTION = 10.0

# 温度分布算例的杆长
PROFILE_LENGTH = 1.0

EXAMPLES: Dict[int, ReferenceExample] = {
    1: ReferenceExample(
        number=1, material_a="Fe", material_b="Cu",
        q_hat_grid=(436, 437, 438, 439, 440.299, 441, 442, 443, 444, 445),
    ),
    2: ReferenceExample(
        number=2, material_a="Ag", material_b="Pb",
        q_hat_grid=(263, 264, 265, 266, 266.927, 268, 269, 270, 271, 272),
    ),
    3: ReferenceExample(
        number=3, material_a="Al", material_b="Mg",
        q_hat_grid=(470, 471, 472, 473, 474, 474.475, 476, 477, 478, 479),
    ),
}

FIGURE_CASES: Dict[int, Tuple[Tuple[str, str, float], ...]] = {
    2: (("Al", "Cu", 0.3), ("Al", "Cu", 0.5), ("Cu", "Al", 0.3), ("Cu", "Al", 0.5)),
    3: (("Fe", "Cu", 0.5), ("Ag", "Pb", 0.5), ("Al", "Mg", 0.5)),
}

SWEEP_CHUNK = 1000
# |l - l̂| ≤ K 的舍入容差，相对于界面位置的量级
BOUND_RTOL = 1e-9


class AllSamplesInfeasibleError(ThermifaceError):
    """所有抽样都落在可行区间之外"""

    def __init__(self, samples: int, interval: FeasibilityInterval):
        self.samples = samples
        self.interval = interval
        super().__init__(
            f"all {samples} noisy draws fall outside the feasibility interval {interval}"
        )


def round_half_away(value: float, digits: int = 3) -> float:
    """四舍五入（远离零），与表格的打印精度一致"""
    quantum = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def _get_example(example: int) -> ReferenceExample:
    if example not in EXAMPLES:
        raise InvalidSetupError("example", example, f"example must be one of {sorted(EXAMPLES)}")
    return EXAMPLES[example]


def example_setup(example: int, materials: Optional[MaterialDb] = None) -> BarSetup:
    """算例的完整正问题参数 (l = 4 m)"""
    ref = _get_example(example)
    db = materials or builtin_materials()
    return BarSetup(
        length=EXAMPLE_LENGTH,
        interface=ref.interface,
        source_temp=EXAMPLE_SOURCE_TEMP,
        ambient_temp=EXAMPLE_AMBIENT_TEMP,
        convection_coeff=EXAMPLE_CONVECTION,
        material_a=db.lookup(ref.material_a),
        material_b=db.lookup(ref.material_b),
    )


def reproduce_table(example: int) -> List[TableRow]:
    """复现算例表格：对每个 q̂ 计算 l̂、ε = |q - q̂| 与 K"""
    setup = example_setup(example)
    q_true = boundary_flux(setup)
    inverse_setup = setup.without_interface()

    rows = []
    for q_hat in _get_example(example).q_hat_grid:
        measurement = FluxMeasurement(q_hat=q_hat, epsilon=abs(q_true - q_hat))
        rows.append(TableRow(
            q_hat=q_hat,
            l_hat=estimate_interface(inverse_setup, measurement),
            epsilon=measurement.epsilon,
            K=error_bound_exact(inverse_setup, q_true, measurement),
        ))
    logger.info(f"Reproduced table for example {example} ({len(rows)} rows)")
    return rows


def emit_profile_data(setup: BarSetup, n_points: int) -> List[Point]:
    """[0, L] 上等距采样温度，并恰好插入一次界面点"""
    if n_points < 2:
        raise InvalidSetupError("n_points", n_points, "need at least two points")
    profile = solve_profile(setup)
    xs = [float(x) for x in np.linspace(0.0, setup.length, n_points)]
    if setup.interface not in xs:
        bisect.insort(xs, setup.interface)
    return [(x, temperature_at(profile, x)) for x in xs]


def figure_setup(material_a: str, material_b: str, interface: float,
                 materials: Optional[MaterialDb] = None) -> BarSetup:
    """温度分布算例：L = 1 m，其余参数同数值算例"""
    db = materials or builtin_materials()
    return BarSetup(
        length=PROFILE_LENGTH,
        interface=interface,
        source_temp=EXAMPLE_SOURCE_TEMP,
        ambient_temp=EXAMPLE_AMBIENT_TEMP,
        convection_coeff=EXAMPLE_CONVECTION,
        material_a=db.lookup(material_a),
        material_b=db.lookup(material_b),
    )


def figure_profiles(figure: int, n_points: int = 101) -> Dict[str, List[Point]]:
    """温度分布图的数据，按 "A-B l=…" 标注"""
    if figure not in FIGURE_CASES:
        raise InvalidSetupError("figure", figure, f"figure must be one of {sorted(FIGURE_CASES)}")
    series = {}
    for material_a, material_b, interface in FIGURE_CASES[figure]:
        label = f"{material_a}-{material_b} l={interface:g}"
        series[label] = emit_profile_data(figure_setup(material_a, material_b, interface), n_points)
    return series


def emit_elasticity_data(setup: InverseSetup, n_points: int, margin: float) -> ElasticityCurve:
    """在 [q_m + margin·W, q_M - margin·W] 上采样弹性函数"""
    if n_points < 2:
        raise InvalidSetupError("n_points", n_points, "need at least two points")
    if not 0 < margin < 0.5:
        raise InvalidSetupError("margin", margin, "margin must lie in (0, 0.5)")
    interval = feasibility_interval(setup)
    lo = interval.q_m + margin * interval.width
    hi = interval.q_M - margin * interval.width

    points = []
    omitted = 0
    for q in np.linspace(lo, hi, n_points):
        try:
            points.append((float(q), elasticity(setup, float(q))))
        except (AtAsymptoteError, InfeasibleMeasurementError):
            omitted += 1
    if omitted:
        logger.warning(f"Omitted {omitted} elasticity samples next to the asymptote")
    return ElasticityCurve(points=tuple(points), omitted=omitted)


def example_elasticity(example: int, n_points: int = 201, margin: float = 0.01) -> ElasticityCurve:
    """弹性曲线图的数据"""
    return emit_elasticity_data(example_setup(example).without_interface(), n_points, margin)


def _draw_noise(rng: np.random.Generator, epsilon: float, noise_model: str) -> float:
    if epsilon == 0:
        return 0.0
    if noise_model == "uniform":
        return float(rng.uniform(-epsilon, epsilon))
    # 截断高斯 σ = ε/2，拒绝采样
    while True:
        eta = float(rng.normal(0.0, 0.5 * epsilon))
        if abs(eta) <= epsilon:
            return eta


def _sweep_chunk(setup: InverseSetup, interval: FeasibilityInterval, q_true: float, interface: float,
                 epsilon: float, seed: int, noise_model: str, indices: Sequence[int]) -> List[SweepSample]:
    samples = []
    for i in indices:
        # 每个抽样独立的随机流，结果与执行顺序无关
        rng = np.random.default_rng([seed, i])
        q_hat = q_true + _draw_noise(rng, epsilon, noise_model)
        if not interval.contains(q_hat):
            samples.append(SweepSample(i=i, q_hat=q_hat, feasible=False))
            continue
        l_hat = interface_from_flux(setup, q_hat)
        samples.append(SweepSample(
            i=i,
            q_hat=q_hat,
            feasible=True,
            l_hat=l_hat,
            abs_error=abs(interface - l_hat),
            K=bound_from_fluxes(setup, q_true, q_hat, epsilon),
        ))
    return samples


def noise_sweep(setup: BarSetup, epsilon: float, samples: int, seed: int,
                noise_model: str = "uniform", workers: int = 1,
                progress_callback: Optional[ProgressCallback] = None) -> SweepResult:
    """蒙特卡罗噪声扫描：q̂_i = q + η_i，|η_i| ≤ ε"""
    if not epsilon >= 0:
        raise InvalidSetupError("epsilon", epsilon, "noise level must be non-negative")
    if samples < 1:
        raise InvalidSetupError("samples", samples, "need at least one sample")
    if seed < 0:
        raise InvalidSetupError("seed", seed, "seed must be non-negative")
    if noise_model not in ("uniform", "gaussian"):
        raise InvalidSetupError("noise_model", noise_model, "noise model must be uniform or gaussian")
    if workers < 1:
        raise InvalidSetupError("workers", workers, "need at least one worker")

    q_true = boundary_flux(setup)
    inverse_setup = setup.without_interface()
    interval = feasibility_interval(inverse_setup)
    if not interval.contains(q_true):
        raise InvalidSetupError("interface", setup.interface, "true flux is not strictly feasible")

    chunks = [range(start, min(start + SWEEP_CHUNK, samples)) for start in range(0, samples, SWEEP_CHUNK)]

    def run_chunk(indices: Sequence[int]) -> List[SweepSample]:
        return _sweep_chunk(inverse_setup, interval, q_true, setup.interface,
                            epsilon, seed, noise_model, indices)

    rows: List[SweepSample] = []
    done = 0
    with ThreadPoolExecutor(max_workers=workers) as executor:
        for chunk_rows in executor.map(run_chunk, chunks):
            rows.extend(chunk_rows)
            done += len(chunk_rows)
            if progress_callback:
                progress_callback("noise sweep", done, samples)

    summary = _summarize(rows, setup.interface)
    if summary.feasible == 0:
        raise AllSamplesInfeasibleError(samples, interval)
    if summary.infeasible:
        logger.warning(f"Discarded {summary.infeasible}/{samples} infeasible draws")
    if summary.bound_violations:
        logger.error(f"Error bound violated by {summary.bound_violations} draws")
    logger.info(
        f"Noise sweep done: seed={seed}, samples={samples}, epsilon={epsilon}, "
        f"max |l - l_hat|={summary.max_abs_error:.6g}, max K={summary.max_bound:.6g}"
    )
    return SweepResult(
        seed=seed,
        samples=samples,
        epsilon=epsilon,
        noise_model=noise_model,
        rows=tuple(rows),
        summary=summary,
    )


def _summarize(rows: Sequence[SweepSample], interface: float) -> SweepSummary:
    feasible = [r for r in rows if r.feasible]
    infeasible = sum(1 for r in rows if not r.feasible)
    violations = sum(
        1 for r in feasible
        if r.abs_error > r.K + BOUND_RTOL * max(r.K, interface)
    )
    return SweepSummary(
        feasible=len(feasible),
        infeasible=infeasible,
        max_abs_error=max((r.abs_error for r in feasible), default=0.0),
        max_bound=max((r.K for r in feasible), default=0.0),
        bound_violations=violations,
    )


def _fmt(value) -> str:
    """CSV 字段：浮点数用最短往返表示"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _writer(stream: TextIO):
    return csv.writer(stream, lineterminator="\n")


def write_profile_csv(points: Iterable[Point], stream: TextIO) -> None:
    writer = _writer(stream)
    writer.writerow(["x", "u"])
    for x, u in points:
        writer.writerow([_fmt(float(x)), _fmt(float(u))])


def write_figure_csv(series: Dict[str, List[Point]], stream: TextIO) -> None:
    writer = _writer(stream)
    writer.writerow(["case", "x", "u"])
    for label, points in series.items():
        for x, u in points:
            writer.writerow([label, _fmt(float(x)), _fmt(float(u))])


def write_elasticity_csv(curve: ElasticityCurve, stream: TextIO) -> None:
    writer = _writer(stream)
    writer.writerow(["q", "E"])
    for q, e in curve.points:
        writer.writerow([_fmt(q), _fmt(e)])


def write_table_csv(tables: Dict[int, List[TableRow]], stream: TextIO) -> None:
    """单个表格写 q_hat,l_hat,epsilon,K；多个表格时前加 example 列"""
    writer = _writer(stream)
    columns = ["q_hat", "l_hat", "epsilon", "K"]
    with_example = len(tables) > 1
    writer.writerow((["example"] if with_example else []) + columns)
    for example, rows in tables.items():
        for row in rows:
            values = [_fmt(float(row.q_hat)), _fmt(row.l_hat), _fmt(row.epsilon), _fmt(row.K)]
            writer.writerow(([str(example)] if with_example else []) + values)


def write_sweep_csv(result: SweepResult, stream: TextIO) -> None:
    writer = _writer(stream)
    writer.writerow(["i", "q_hat", "l_hat", "abs_error", "K", "feasible"])
    for r in result.rows:
        writer.writerow([_fmt(r.i), _fmt(r.q_hat), _fmt(r.l_hat), _fmt(r.abs_error), _fmt(r.K), _fmt(r.feasible)])
