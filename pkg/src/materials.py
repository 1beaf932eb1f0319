"""
材料数据库：内置导热系数表与用户CSV材料文件
"""
import csv
import logging
import math
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, TextIO, Tuple, Union

from .models import Material, ThermifaceError, parse_decimal, validate_material

logger = logging.getLogger(__name__)

CSV_HEADER = "name,symbol,kappa"

# 平均导热系数 W·m⁻¹·°C⁻¹
BUILTIN_MATERIALS: Tuple[Material, ...] = (
    Material(name="Aluminium", symbol="Al", kappa=204.0),
    Material(name="Copper", symbol="Cu", kappa=386.0),
    Material(name="Iron", symbol="Fe", kappa=73.0),
    Material(name="Silver", symbol="Ag", kappa=419.0),
    Material(name="Lead", symbol="Pb", kappa=35.0),
    Material(name="Magnesium", symbol="Mg", kappa=156.0),
)


class MaterialNotFoundError(ThermifaceError, KeyError):
    """材料符号不存在"""

    def __init__(self, symbol: str, available: List[str]):
        self.symbol = symbol
        self.available = available
        super().__init__(f"Material '{symbol}' not found. Available: {', '.join(available)}")

    def __str__(self) -> str:
        return self.args[0]


class MaterialFileError(ThermifaceError, ValueError):
    """材料文件解析错误"""

    def __init__(self, path: str, line: int, reason: str):
        self.path = path
        self.line = line
        self.reason = reason
        super().__init__(f"{path}: {reason} (line {line})")


class MaterialDb:
    """按符号索引的有序材料表，构造后不可变"""

    def __init__(self, entries: Iterable[Material]):
        by_symbol: Dict[str, Material] = {}
        for material in entries:
            if material.symbol in by_symbol:
                raise ValueError(f"Duplicate material symbol: {material.symbol}")
            validate_material(material)
            by_symbol[material.symbol] = material
        self._entries: Tuple[Material, ...] = tuple(by_symbol.values())
        self._by_symbol = by_symbol

    def lookup(self, symbol: str) -> Material:
        """按符号查找（区分大小写）"""
        try:
            return self._by_symbol[symbol]
        except KeyError:
            raise MaterialNotFoundError(symbol, self.symbols()) from None

    def symbols(self) -> List[str]:
        return [m.symbol for m in self._entries]

    def merged_with(self, entries: Iterable[Material]) -> "MaterialDb":
        """用户条目按符号覆盖已有条目（保留原位置），新符号追加在末尾"""
        merged = dict(self._by_symbol)
        for material in entries:
            merged[material.symbol] = material
        return MaterialDb(merged.values())

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Material]:
        return iter(self._entries)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._by_symbol


def builtin_materials() -> MaterialDb:
    """内置六种材料"""
    return MaterialDb(BUILTIN_MATERIALS)


def parse_materials_csv(text: str, source: str = "<string>") -> List[Material]:
    """解析材料CSV文本，返回文件内的条目（保持文件顺序）"""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [line[:-1] if line.endswith("\r") else line for line in lines]

    if not lines or lines[0] != CSV_HEADER:
        raise MaterialFileError(source, 1, f"header must be '{CSV_HEADER}'")

    materials: List[Material] = []
    seen = set()
    for number, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 3:
            raise MaterialFileError(source, number, f"expected 3 fields, got {len(fields)}")
        name, symbol, raw_kappa = (f.strip() for f in fields)
        if not name:
            raise MaterialFileError(source, number, "name must be non-empty")
        if not symbol:
            raise MaterialFileError(source, number, "symbol must be non-empty")
        try:
            kappa = parse_decimal(raw_kappa)
        except ValueError:
            raise MaterialFileError(source, number, f"invalid kappa '{raw_kappa}'") from None
        if not math.isfinite(kappa) or kappa <= 0:
            raise MaterialFileError(source, number, "kappa must be positive")
        if symbol in seen:
            raise MaterialFileError(source, number, f"duplicate symbol '{symbol}'")
        seen.add(symbol)
        materials.append(Material(name=name, symbol=symbol, kappa=kappa))
    return materials


def load_materials(path: Union[str, Path]) -> MaterialDb:
    """读取用户材料文件并覆盖到内置材料之上"""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    entries = parse_materials_csv(text, str(path))
    db = builtin_materials().merged_with(entries)
    shadowed = [m.symbol for m in entries if m.symbol in builtin_materials()]
    if shadowed:
        logger.info(f"User materials shadow builtins: {', '.join(shadowed)}")
    logger.info(f"Loaded {len(entries)} materials from {path}")
    return db


def write_materials_csv(db: MaterialDb, stream: TextIO) -> None:
    """以材料文件相同的格式输出，可直接作为 --materials-file 读回"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for material in db:
        writer.writerow([material.name, material.symbol, repr(material.kappa)])
