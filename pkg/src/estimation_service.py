"""
界面估计服务 - 组合反演、误差界与弹性分析
"""
import logging
from datetime import datetime
from typing import Any, Callable, Dict, Optional

from .elasticity import elasticity
from .experiments import noise_sweep
from .inverse import error_bound_practical, estimate_interface, feasibility_interval
from .models import (
    BarSetup, EstimateReport, FluxMeasurement, InverseSetup, RunStatistics, SweepResult,
)

logger = logging.getLogger(__name__)


class EstimationService:
    """界面估计服务"""

    def __init__(self, sweep_workers: int = 1, noise_model: str = "uniform"):
        self.sweep_workers = sweep_workers
        self.noise_model = noise_model
        self.statistics = RunStatistics()
        self.progress_callback: Optional[Callable[[str, int, int], None]] = None

    def set_progress_callback(self, callback: Callable[[str, int, int], None]):
        """设置进度回调函数"""
        self.progress_callback = callback

    def _update_progress(self, stage: str, current: int, total: int):
        """更新进度"""
        if self.progress_callback:
            self.progress_callback(stage, current, total)

    def estimate(self, setup: InverseSetup, measurement: FluxMeasurement) -> EstimateReport:
        """估计界面位置并给出可行区间、最坏误差界与测量点处的弹性"""
        interval = feasibility_interval(setup)
        l_hat = estimate_interface(setup, measurement)
        bound = error_bound_practical(setup, measurement)
        # 真实热流未知，弹性在测量值处求值
        report = EstimateReport(
            l_hat=l_hat,
            measurement=measurement,
            interval=interval,
            error_bound_practical=bound,
            elasticity_at_measurement=elasticity(setup, measurement.q_hat),
        )
        logger.info(f"Estimated interface {l_hat:.6g} m (K={bound:.6g} m) from q_hat={measurement.q_hat:.6g}")
        return report

    def run_sweep(self, setup: BarSetup, epsilon: float, samples: int, seed: int,
                  noise_model: Optional[str] = None) -> SweepResult:
        """运行蒙特卡罗噪声扫描并记录统计"""
        self.statistics = RunStatistics(samples=samples, start_time=datetime.now())
        try:
            result = noise_sweep(
                setup,
                epsilon=epsilon,
                samples=samples,
                seed=seed,
                noise_model=noise_model or self.noise_model,
                workers=self.sweep_workers,
                progress_callback=self._update_progress,
            )
            self.statistics.feasible = result.summary.feasible
            self.statistics.infeasible = result.summary.infeasible
            self.statistics.bound_violations = result.summary.bound_violations
            return result
        except Exception as e:
            logger.error(f"Noise sweep failed: {e}")
            raise
        finally:
            self.statistics.end_time = datetime.now()

    def get_final_statistics(self) -> Dict[str, Any]:
        """获取最终统计信息"""
        stats: Dict[str, Any] = {
            "samples": self.statistics.samples,
            "feasible": self.statistics.feasible,
            "discarded": self.statistics.infeasible,
            "bound violations": self.statistics.bound_violations,
            "feasible rate": f"{self.statistics.feasible_rate:.1f}%",
        }
        if self.statistics.duration is not None:
            stats["duration"] = f"{self.statistics.duration:.2f}s"
        return stats
