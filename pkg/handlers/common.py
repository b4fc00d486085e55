"""
Общие части обработчиков команд: коды возврата, вывод и работа с кэшем.
"""
import logging
import sys
from typing import Callable, Dict, Optional, TextIO

from database import load_entry, make_key, store_entry
from utils.helpers import dump_json

logger = logging.getLogger(__name__)

# Коды возврата командной строки
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def emit(text: str, out: Optional[TextIO] = None) -> None:
    print(text, file=out or sys.stdout)


def report_error(message: str) -> None:
    """Сообщение об ошибке пользователю (stderr) и в лог."""
    logger.error(message)
    print(f"Ошибка: {message}", file=sys.stderr)


def cached_payload(command: str, params: Dict[str, object], compute: Callable[[], Dict[str, object]],
                   use_cache: bool = True) -> str:
    """
    JSON-результат команды: из кэша или вычисленный заново.

    Args:
        command: имя команды
        params: параметры, определяющие результат
        compute: функция, возвращающая словарь для сериализации
        use_cache: False отключает и чтение, и запись

    Returns:
        str: детерминированный JSON; при сбое кэша результат просто пересчитывается
    """
    key = make_key(command, params)
    if use_cache:
        hit = load_entry(key)
        if hit is not None:
            return hit
    payload = dump_json(compute())
    if use_cache and not store_entry(key, command, params, payload):
        logger.warning(f"Результат {command} не сохранён в кэш")
    return payload
