import logging
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.experiments import example_setup  # noqa: E402
from src.models import BarSetup, Material  # noqa: E402


@pytest.fixture(autouse=True)
def restore_logging():
    """命令行会重设根日志器，用例结束后还原"""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        if handler not in handlers:
            handler.close()
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)


@pytest.fixture
def fe_cu():
    """Example 1: Fe | Cu, l = 4"""
    return example_setup(1)


@pytest.fixture
def ag_pb():
    """Example 2: Ag | Pb, l = 4"""
    return example_setup(2)


@pytest.fixture
def al_mg():
    """Example 3: Al | Mg, l = 4"""
    return example_setup(3)


@pytest.fixture(params=[1, 2, 3], ids=["Fe-Cu", "Ag-Pb", "Al-Mg"])
def reference_setup(request):
    return example_setup(request.param)


def _make_setup(ka=73.0, kb=386.0, length=10.0, interface=4.0,
                source_temp=100.0, ambient_temp=25.0, h=10.0) -> BarSetup:
    return BarSetup(
        length=length,
        interface=interface,
        source_temp=source_temp,
        ambient_temp=ambient_temp,
        convection_coeff=h,
        material_a=Material(name="left", symbol="A", kappa=ka),
        material_b=Material(name="right", symbol="B", kappa=kb),
    )


@pytest.fixture
def make_setup():
    """按需构造任意材料组合的正问题参数"""
    return _make_setup
