"""
配置管理模块
"""
import logging
import os
from typing import Any, Dict, Optional

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from .inverse import InfeasibleMeasurementError
from .models import AppConfig, ThermifaceError

logger = logging.getLogger(__name__)

ENV_MATERIALS = "THERMIFACE_MATERIALS"
ENV_LOG_LEVEL = "THERMIFACE_LOG_LEVEL"
ENV_LOG_FILE = "THERMIFACE_LOG_FILE"
ENV_SWEEP_WORKERS = "THERMIFACE_SWEEP_WORKERS"
ENV_NOISE_MODEL = "THERMIFACE_NOISE_MODEL"

NOISE_MODELS = ("uniform", "gaussian")

# 命令行退出码
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


class ConfigManager:
    """配置管理器"""

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = config_file or ".env"
        self.load_env_file()

    def load_env_file(self):
        """加载环境变量文件（不覆盖已有环境变量）"""
        if os.path.exists(self.config_file):
            load_dotenv(self.config_file, override=False)
            logger.info(f"Loaded configuration from {self.config_file}")
        else:
            logger.debug(f"Configuration file {self.config_file} not found")

    def create_config_from_env(self) -> AppConfig:
        """从环境变量创建配置"""
        raw_workers = os.getenv(ENV_SWEEP_WORKERS, "1")
        try:
            sweep_workers = int(raw_workers)
        except ValueError:
            raise ValueError(f"{ENV_SWEEP_WORKERS} must be an integer, got {raw_workers!r}") from None

        noise_model = os.getenv(ENV_NOISE_MODEL, "uniform").strip().lower()
        if noise_model not in NOISE_MODELS:
            raise ValueError(f"{ENV_NOISE_MODEL} must be one of {', '.join(NOISE_MODELS)}, got {noise_model!r}")

        config = AppConfig(
            materials_file=os.getenv(ENV_MATERIALS) or None,
            log_level=os.getenv(ENV_LOG_LEVEL, "WARNING"),
            log_file=os.getenv(ENV_LOG_FILE) or None,
            sweep_workers=sweep_workers,
            noise_model=noise_model,
        )
        logger.debug("Configuration created successfully")
        return config

    def create_sample_env_file(self, file_path: str = ".env.example"):
        """创建示例配置文件"""
        sample_content = f"""# 用户材料CSV (表头 name,symbol,kappa)，命令行 --materials-file 优先
{ENV_MATERIALS}=

# 日志配置
{ENV_LOG_LEVEL}=WARNING
{ENV_LOG_FILE}=

# 蒙特卡罗扫描
{ENV_SWEEP_WORKERS}=1
{ENV_NOISE_MODEL}=uniform
"""
        with open(file_path, 'w', encoding='utf-8') as f:
            f.write(sample_content)

        logger.info(f"Sample configuration file created: {file_path}")

    def validate_config(self, config: AppConfig) -> Dict[str, Any]:
        """验证配置"""
        issues = []
        warnings = []

        if config.sweep_workers < 1:
            issues.append("Sweep workers must be at least 1")
        elif config.sweep_workers > (os.cpu_count() or 1):
            warnings.append("More sweep workers than CPUs")

        if config.materials_file and not os.path.exists(config.materials_file):
            issues.append(f"Materials file {config.materials_file} does not exist")

        if getattr(logging, config.log_level.upper(), None) is None:
            warnings.append(f"Unknown log level {config.log_level}, falling back to WARNING")

        return {
            "valid": len(issues) == 0,
            "issues": issues,
            "warnings": warnings
        }


def resolve_materials_file(flag_value: Optional[str], config: AppConfig) -> Optional[str]:
    """命令行参数优先于环境变量"""
    return flag_value or config.materials_file


def setup_logging(level: str = "WARNING", log_file: Optional[str] = None):
    """设置日志配置"""
    log_level = getattr(logging, level.upper(), logging.WARNING)

    # 创建格式化器
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # 设置根日志器
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # 清除现有处理器
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # 控制台处理器写到 stderr，stdout 只输出数据
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    # 添加文件处理器（如果指定）
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    logger.debug(f"Logging configured with level: {level}")


class ErrorHandler:
    """错误处理器：把异常映射为退出码与提示信息"""

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        """0 成功; 2 校验/解析错误; 3 测量不可行; 4 I/O 错误"""
        if isinstance(error, InfeasibleMeasurementError):
            return EXIT_INFEASIBLE
        if isinstance(error, (OSError, click.FileError)):
            return EXIT_IO
        if isinstance(error, (ThermifaceError, ValidationError, ValueError, click.UsageError)):
            return EXIT_VALIDATION
        return 1

    @staticmethod
    def describe(error: BaseException) -> str:
        """生成面向用户的错误信息"""
        if isinstance(error, ValidationError):
            first = error.errors()[0]
            message = str(first.get("msg", error))
            if message.startswith("Value error, "):
                message = message[len("Value error, "):]
        elif isinstance(error, click.ClickException):
            message = error.format_message()
        else:
            message = str(error) or type(error).__name__
        error_msg = f"Error: {message}"
        logger.debug(error_msg)
        return error_msg
