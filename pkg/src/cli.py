"""
命令行界面
"""
import csv
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, TextIO

import click
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
from rich.table import Table

from . import __version__
from .config_manager import (
    EXIT_OK, NOISE_MODELS, ConfigManager, ErrorHandler, resolve_materials_file, setup_logging,
)
from .elasticity import elasticity
from .estimation_service import EstimationService
from .experiments import (
    EXAMPLES, FIGURE_CASES, emit_elasticity_data, emit_profile_data, example_elasticity,
    figure_profiles, reproduce_table, round_half_away, write_elasticity_csv,
    write_figure_csv, write_profile_csv, write_sweep_csv, write_table_csv,
)
from .forward import boundary_flux
from .inverse import InfeasibleMeasurementError, feasibility_interval
from .materials import MaterialDb, builtin_materials, load_materials, write_materials_csv
from .models import (
    BarSetup, CliConfig, ElasticityCurve, FluxMeasurement, InverseSetup, Material,
    TableRow, parse_decimal,
)

logger = logging.getLogger(__name__)

PROG_NAME = "thermiface"


class DecimalFloat(click.ParamType):
    """只接受 [+-]digits[.digits][e±N] 形式的数字"""
    name = "number"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        try:
            return parse_decimal(str(value))
        except ValueError:
            self.fail(f"{value!r} is not a decimal number", param, ctx)


DECIMAL = DecimalFloat()


class ProgressTracker:
    """进度跟踪器，只在 stderr 是终端时显示"""

    def __init__(self, console: Console):
        self.console = console
        self.progress: Optional[Progress] = None
        self.current_task = None

    def start(self):
        """开始进度跟踪"""
        if not self.console.is_terminal:
            return
        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=self.console,
            transient=True,
        )
        self.progress.start()

    def stop(self):
        """停止进度跟踪"""
        if self.progress:
            self.progress.stop()

    def update_progress(self, stage: str, current: int, total: int):
        """更新进度"""
        if not self.progress:
            return

        if self.current_task is None:
            self.current_task = self.progress.add_task(stage, total=total, completed=current)
        else:
            self.progress.update(self.current_task, description=stage, completed=current, total=total)


def _stderr_console() -> Console:
    return Console(file=sys.stderr, highlight=False, soft_wrap=True)


def _g(value: float) -> str:
    """人类可读输出统一 6 位有效数字"""
    return f"{value:.6g}"


def materials_option(func):
    return click.option("--materials-file", type=click.Path(dir_okay=False),
                        help="用户材料CSV (覆盖 THERMIFACE_MATERIALS)")(func)


def output_options(func):
    """所有子命令共用的输出选项"""
    func = click.option("--output", "-o", type=click.Path(dir_okay=False, writable=True),
                        help="输出文件，默认 stdout")(func)
    func = click.option("--format", "output_format", type=click.Choice(["text", "csv"]),
                        default="text", show_default=True, help="输出格式")(func)
    return func


def bar_options(func):
    """杆的几何、边界条件与材料选项"""
    options = [
        click.option("--length", type=DECIMAL, default=10.0, show_default=True, help="杆长 L (m)"),
        click.option("--source-temp", type=DECIMAL, default=100.0, show_default=True, help="左端温度 F (°C)"),
        click.option("--ambient-temp", type=DECIMAL, default=25.0, show_default=True, help="环境温度 Ta (°C)"),
        click.option("--h", "convection_coeff", type=DECIMAL, default=10.0, show_default=True,
                     help="右端对流换热系数 (W·m⁻²·°C⁻¹)"),
        click.option("--material-a", help="左段材料符号"),
        click.option("--material-b", help="右段材料符号"),
        click.option("--kappa-a", type=DECIMAL, help="左段导热系数（代替 --material-a）"),
        click.option("--kappa-b", type=DECIMAL, help="右段导热系数（代替 --material-b）"),
    ]
    for option in reversed(options):
        func = option(func)
    return output_options(materials_option(func))


def _cli_config(subcommand: str, params: Dict) -> CliConfig:
    return CliConfig(subcommand=subcommand, **params)


def _material_db(ctx: click.Context, materials_file: Optional[str]) -> MaterialDb:
    """命令行材料文件优先于环境变量，都没有时使用内置材料"""
    path = resolve_materials_file(materials_file, ctx.obj["app_config"])
    if path:
        return load_materials(path)
    return builtin_materials()


def _side_material(db: MaterialDb, side: str, symbol: Optional[str], kappa: Optional[float]) -> Material:
    if symbol is not None:
        return db.lookup(symbol)
    return Material(name=f"material {side.upper()}", symbol=side.upper(), kappa=kappa)


def _inverse_setup(ctx: click.Context, config: CliConfig) -> InverseSetup:
    db = _material_db(ctx, config.materials_file)
    return InverseSetup(
        length=config.length,
        source_temp=config.source_temp,
        ambient_temp=config.ambient_temp,
        convection_coeff=config.convection_coeff,
        material_a=_side_material(db, "a", config.material_a, config.kappa_a),
        material_b=_side_material(db, "b", config.material_b, config.kappa_b),
    )


def _bar_setup(ctx: click.Context, config: CliConfig) -> BarSetup:
    if config.interface is None:
        raise click.UsageError(f"{config.subcommand} needs --interface")
    return _inverse_setup(ctx, config).with_interface(config.interface)


@contextmanager
def _open_output(path: Optional[str]) -> Iterator[TextIO]:
    """数据写到 --output 指定的文件或 stdout"""
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as stream:
        yield stream
    logger.info(f"Wrote output to {path}")


def _text_console(stream: TextIO) -> Console:
    return Console(file=stream, highlight=False, soft_wrap=True, width=100)


def _print_lines(output: Optional[str], lines: Sequence[str]):
    with _open_output(output) as stream:
        console = _text_console(stream)
        for line in lines:
            console.print(line, markup=False)


def _print_table(output: Optional[str], table: Table):
    with _open_output(output) as stream:
        _text_console(stream).print(table)


def _write_csv_rows(output: Optional[str], header: Sequence[str], rows: Sequence[Sequence[float]]):
    with _open_output(output) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])


def _xy_table(title: str, columns: Sequence[str], points) -> Table:
    table = Table(title=title)
    for column in columns:
        table.add_column(column, justify="right")
    for x, y in points:
        table.add_row(_g(x), _g(y))
    return table


@click.group()
@click.option('--config', '-c', default='.env', help='配置文件路径')
@click.option('--log-level', help='日志级别 (默认 THERMIFACE_LOG_LEVEL 或 WARNING)')
@click.option('--log-file', help='日志文件路径')
@click.version_option(version=__version__, prog_name=PROG_NAME)
@click.pass_context
def cli(ctx, config, log_level, log_file):
    """两种材料隔热杆的界面位置反演工具"""
    ctx.ensure_object(dict)
    config_manager = ConfigManager(config)
    app_config = config_manager.create_config_from_env()
    setup_logging(log_level or app_config.log_level, log_file or app_config.log_file)

    validation_result = config_manager.validate_config(app_config)
    for warning in validation_result["warnings"]:
        logger.warning(warning)
    if not validation_result["valid"]:
        for issue in validation_result["issues"]:
            logger.error(issue)

    ctx.obj["config_file"] = config
    ctx.obj["app_config"] = app_config


@cli.command()
@bar_options
@click.option("--interface", type=DECIMAL, help="界面位置 l (m)")
@click.option("--points", type=int, default=101, show_default=True, help="采样点数")
@click.option("--figure", type=click.Choice([str(n) for n in sorted(FIGURE_CASES)]),
              help="输出温度分布算例 (L = 1 m)，忽略杆参数")
@click.pass_context
def forward(ctx, figure, points, **params):
    """温度分布 u(x)"""
    if figure is not None:
        series = figure_profiles(int(figure), points)
        with _open_output(params["output"]) as stream:
            if params["output_format"] == "csv":
                write_figure_csv(series, stream)
                return
            console = _text_console(stream)
            for label, series_points in series.items():
                console.print(_xy_table(label, ("x", "u"), series_points))
        return

    config = _cli_config("forward", params)
    setup = _bar_setup(ctx, config)
    profile_points = emit_profile_data(setup, points)
    if config.output_format == "csv":
        with _open_output(config.output) as stream:
            write_profile_csv(profile_points, stream)
    else:
        title = f"{setup.material_a.symbol}-{setup.material_b.symbol} l={_g(setup.interface)}"
        _print_table(config.output, _xy_table(title, ("x", "u"), profile_points))


@cli.command()
@bar_options
@click.option("--interface", type=DECIMAL, required=True, help="界面位置 l (m)")
@click.pass_context
def flux(ctx, **params):
    """右端热流 q"""
    config = _cli_config("flux", params)
    q = boundary_flux(_bar_setup(ctx, config))
    if config.output_format == "csv":
        _write_csv_rows(config.output, ["q"], [(q,)])
    else:
        _print_lines(config.output, [f"q = {_g(q)}"])


@cli.command()
@bar_options
@click.option("--flux", "q_hat", type=DECIMAL, required=True, help="测量热流 q̂")
@click.option("--noise", "epsilon", type=DECIMAL, default=0.0, show_default=True, help="噪声上界 ε")
@click.pass_context
def estimate(ctx, q_hat, epsilon, **params):
    """由测量热流估计界面位置"""
    config = _cli_config("estimate", params)
    setup = _inverse_setup(ctx, config)
    report = EstimationService().estimate(setup, FluxMeasurement(q_hat=q_hat, epsilon=epsilon))
    if config.output_format == "csv":
        values = (report.l_hat, report.interval.q_m, report.interval.q_M,
                  report.error_bound_practical, report.elasticity_at_measurement)
        _write_csv_rows(config.output, ["l_hat", "q_m", "q_M", "K", "E"], [values])
    else:
        _print_lines(config.output, [
            f"l_hat = {_g(report.l_hat)}",
            f"feasibility interval = {report.interval}",
            f"K = {_g(report.error_bound_practical)}",
            f"E(q_hat) = {_g(report.elasticity_at_measurement)}",
        ])


@cli.command()
@bar_options
@click.pass_context
def feasibility(ctx, **params):
    """可行区间 (q_m, q_M)"""
    config = _cli_config("feasibility", params)
    interval = feasibility_interval(_inverse_setup(ctx, config))
    if config.output_format == "csv":
        _write_csv_rows(config.output, ["q_m", "q_M"], [(interval.q_m, interval.q_M)])
    else:
        _print_lines(config.output, [str(interval)])


@cli.command(name="elasticity")
@bar_options
@click.option("--flux", "q", type=DECIMAL, help="只求该热流处的弹性值")
@click.option("--example", type=click.Choice([str(n) for n in sorted(EXAMPLES)]),
              help="数值算例的弹性曲线，忽略杆参数")
@click.option("--points", type=int, default=201, show_default=True, help="采样点数")
@click.option("--margin", type=DECIMAL, default=0.01, show_default=True,
              help="两端各留出的可行区间宽度比例")
@click.pass_context
def elasticity_command(ctx, q, example, points, margin, **params):
    """弹性函数 E(q)"""
    if example is not None:
        curve = example_elasticity(int(example), points, margin)
        _emit_curve(params["output_format"], params["output"], f"example {example}", curve)
        return

    config = _cli_config("elasticity", params)
    setup = _inverse_setup(ctx, config)
    if q is not None:
        value = elasticity(setup, q)
        if config.output_format == "csv":
            _write_csv_rows(config.output, ["q", "E"], [(q, value)])
        else:
            _print_lines(config.output, [f"E({_g(q)}) = {_g(value)}"])
        return

    curve = emit_elasticity_data(setup, points, margin)
    _emit_curve(config.output_format, config.output, f"{setup.material_a.symbol}-{setup.material_b.symbol}", curve)


def _emit_curve(output_format: str, output: Optional[str], title: str, curve: ElasticityCurve):
    if curve.omitted:
        _stderr_console().print(f"omitted {curve.omitted} samples next to the asymptote")
    if output_format == "csv":
        with _open_output(output) as stream:
            write_elasticity_csv(curve, stream)
    else:
        _print_table(output, _xy_table(title, ("q", "E"), curve.points))


def _example_table(example: int, rows: List[TableRow]) -> Table:
    ref = EXAMPLES[example]
    table = Table(title=f"Example {example} ({ref.material_a}-{ref.material_b}, l = {ref.interface:g})")
    for column in ("q_hat", "l_hat", "epsilon", "K"):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(
            f"{row.q_hat:g}",
            *(f"{round_half_away(v):.3f}" for v in (row.l_hat, row.epsilon, row.K)),
        )
    return table


@cli.command()
@output_options
@click.argument("which", type=click.Choice([str(n) for n in sorted(EXAMPLES)] + ["all"]))
def tables(which, output_format, output):
    """复现数值算例的估计表格"""
    examples = sorted(EXAMPLES) if which == "all" else [int(which)]
    results = {example: reproduce_table(example) for example in examples}
    with _open_output(output) as stream:
        if output_format == "csv":
            write_table_csv(results, stream)
            return
        console = _text_console(stream)
        for example, rows in results.items():
            console.print(_example_table(example, rows))


@cli.command()
@bar_options
@click.option("--interface", type=DECIMAL, required=True, help="真实界面位置 l (m)")
@click.option("--noise", "epsilon", type=DECIMAL, required=True, help="噪声上界 ε")
@click.option("--samples", type=int, default=10000, show_default=True, help="抽样数")
@click.option("--seed", type=int, default=0, show_default=True, help="随机种子")
@click.option("--noise-model", type=click.Choice(NOISE_MODELS), help="噪声分布 (默认 THERMIFACE_NOISE_MODEL)")
@click.option("--workers", type=int, help="并行线程数 (默认 THERMIFACE_SWEEP_WORKERS)")
@click.pass_context
def sweep(ctx, epsilon, samples, seed, noise_model, workers, **params):
    """蒙特卡罗噪声扫描，检验 |l - l̂| ≤ K"""
    config = _cli_config("sweep", params)
    setup = _bar_setup(ctx, config)
    app_config = ctx.obj["app_config"]
    service = EstimationService(
        sweep_workers=workers if workers is not None else app_config.sweep_workers,
        noise_model=noise_model or app_config.noise_model,
    )

    err_console = _stderr_console()
    progress_tracker = ProgressTracker(err_console)
    service.set_progress_callback(progress_tracker.update_progress)
    progress_tracker.start()
    try:
        result = service.run_sweep(setup, epsilon=epsilon, samples=samples, seed=seed)
    finally:
        progress_tracker.stop()

    if config.output_format == "csv":
        with _open_output(config.output) as stream:
            write_sweep_csv(result, stream)
    else:
        summary = result.summary
        _print_lines(config.output, [
            f"seed = {result.seed}, samples = {result.samples}, epsilon = {_g(result.epsilon)}, "
            f"noise model = {result.noise_model}",
            f"feasible = {summary.feasible}, discarded = {summary.infeasible}",
            f"max |l - l_hat| = {_g(summary.max_abs_error)}",
            f"max K = {_g(summary.max_bound)}",
            f"bound violations = {summary.bound_violations}",
        ])

    stats_table = Table(title="执行统计")
    stats_table.add_column("指标", style="cyan")
    stats_table.add_column("数值")
    for key, value in service.get_final_statistics().items():
        stats_table.add_row(key, str(value))
    err_console.print(stats_table)


@cli.command()
@output_options
@materials_option
@click.pass_context
def materials(ctx, output_format, output, materials_file):
    """列出材料数据库"""
    db = _material_db(ctx, materials_file)
    with _open_output(output) as stream:
        if output_format == "csv":
            write_materials_csv(db, stream)
            return
        table = Table(title="Materials")
        table.add_column("symbol", style="cyan")
        table.add_column("name")
        table.add_column("kappa", justify="right")
        for material in db:
            table.add_row(material.symbol, material.name, _g(material.kappa))
        _text_console(stream).print(table)


@cli.command()
@click.option("--force", is_flag=True, help="覆盖已存在的配置文件")
@click.pass_context
def init(ctx, force):
    """初始化配置文件"""
    config_file = ctx.obj["config_file"]
    if Path(config_file).exists() and not force:
        raise click.UsageError(f"config file {config_file} already exists, use --force to overwrite")

    ConfigManager(config_file).create_sample_env_file(config_file)
    _print_lines(None, [f"created {config_file}"])


def run(argv: Optional[Sequence[str]] = None) -> int:
    """运行命令行并返回退出码 (0 成功, 2 校验/解析, 3 不可行, 4 I/O)"""
    args = list(argv) if argv is not None else None
    try:
        cli.main(args=args, prog_name=PROG_NAME, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        _stderr_console().print("Aborted!")
        return 1
    except Exception as e:
        exit_code = ErrorHandler.exit_code_for(e)
        err_console = _stderr_console()
        err_console.print(ErrorHandler.describe(e), markup=False)
        if isinstance(e, InfeasibleMeasurementError):
            err_console.print(f"feasibility interval: {e.interval}", markup=False)
        if exit_code == 1:
            logger.exception("Unexpected error")
        return exit_code
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(run())
