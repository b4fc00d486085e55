"""
Вспомогательные функции: разбор чисел из командной строки и детерминированный вывод.
"""
import json
import logging
import math
from fractions import Fraction
from typing import Any, Iterable, List, Sequence, Union

from config import Config

logger = logging.getLogger(__name__)


def parse_rational(text: str) -> Fraction:
    """
    Точное рациональное число из строки вида "p/r" или "p".

    Args:
        text: строка с числом

    Returns:
        Fraction: значение; ValueError, если строка не является рациональным числом
    """
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        logger.warning(f"Неверный формат рационального числа: {text!r}")
        raise ValueError(f"Ожидалось рациональное число p/r, получено {text!r}") from e


def parse_q_mode(text: str) -> Union[str, Fraction]:
    """'generic' или ненулевое рациональное значение q."""
    if text.strip().lower() == "generic":
        return "generic"
    value = parse_rational(text)
    if value == 0:
        raise ValueError("q = 0 недопустимо")
    return value


def format_float(value: float) -> float:
    """Округление до фиксированного числа значащих цифр для стабильного JSON."""
    if not math.isfinite(value):
        return value
    return float(f"{value:.{Config.FLOAT_DIGITS}g}")


def normalize_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        return {key: normalize_floats(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize_floats(value) for value in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dump_json(obj: Any) -> str:
    """Детерминированный JSON: сортированные ключи, округлённые вещественные числа."""
    return json.dumps(normalize_floats(obj), sort_keys=True, indent=2, ensure_ascii=False)


def format_table(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Простая текстовая таблица для вывода в терминал."""
    cells: List[List[str]] = [[str(h) for h in header]]
    for row in rows:
        cells.append([f"{v:.{Config.FLOAT_DIGITS}g}" if isinstance(v, float) else str(v) for v in row])
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
