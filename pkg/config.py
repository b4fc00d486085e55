"""
Конфигурация qinstanton.
Загружает настройки из переменных окружения (и файла .env).
"""

import os
import logging
from dotenv import load_dotenv

# Настройка логирования
logger = logging.getLogger(__name__)

# Загрузка переменных окружения
load_dotenv()


def _int_setting(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Некорректное значение {name}={raw!r}, используется {default}")
        return default


class Config:
    """Класс конфигурации qinstanton"""

    # Каталог кэша результатов (SQLite)
    CACHE_DIR = os.getenv('QINSTANTON_CACHE', '.qinstanton_cache')

    # Бюджет мономов для нормальных форм (защита от взрыва степени)
    MAX_TERMS = _int_setting('QINSTANTON_MAX_TERMS', 10 ** 6)
    if MAX_TERMS <= 0:
        logger.warning("QINSTANTON_MAX_TERMS должен быть положительным, используется 10^6")
        MAX_TERMS = 10 ** 6

    # Максимальный |n| для командной строки
    MAX_CHARGE = _int_setting('QINSTANTON_MAX_CHARGE', 8)

    # Число процессов для поэлементной проверки p_n
    WORKERS = max(1, _int_setting('QINSTANTON_WORKERS', 1))

    # Каталог для логов
    LOG_DIR = os.getenv('QINSTANTON_LOG_DIR', 'logs')

    # Режим отладки
    DEBUG = os.getenv('DEBUG', 'False').lower() in ('true', '1', 't')

    # Численные параметры по умолчанию
    DEFAULT_Q0 = 0.5
    DEFAULT_K = 1
    DEFAULT_M = 60
    DEFAULT_TOL = 1e-6
    DEFAULT_RESOLUTION = 24

    # Версия схемы JSON-отчётов и ключей кэша
    SCHEMA_VERSION = "1"

    # Число значащих цифр при выводе вещественных чисел
    FLOAT_DIGITS = 12

    @classmethod
    def cache_dir(cls) -> str:
        """Каталог кэша; переменная окружения перечитывается при каждом вызове."""
        return os.getenv('QINSTANTON_CACHE', cls.CACHE_DIR)


logger.debug(f"Каталог кэша: {Config.CACHE_DIR}")
logger.debug(f"Бюджет мономов: {Config.MAX_TERMS}")
logger.debug(f"Режим отладки: {'включен' if Config.DEBUG else 'выключен'}")
