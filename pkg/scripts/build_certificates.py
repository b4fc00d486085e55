#!/usr/bin/env python
"""
Скрипт для предварительного расчёта сертификатов p_n.
Заполняет кэш результатами `pn -n <n> --check` для всех |n| ≤ заданного предела.
"""
import argparse
import json
import os
import sys
import logging

# Добавляем путь к корню проекта для корректного импорта
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import Config
from database import check_database_connection, init_db
from handlers.common import cached_payload
from handlers.instanton import build_certificate

logger = logging.getLogger(__name__)


def build_all(limit: int, q: str = "generic") -> bool:
    """
    Считает и кэширует сертификаты для n = −limit, …, limit.

    Returns:
        bool: True, если все сертификаты построены и прошли проверки
    """
    if not init_db() or not check_database_connection():
        logger.error("Кэш недоступен, сертификаты не будут сохранены")
        return False

    failures = 0
    for n in range(-limit, limit + 1):
        params = {"n": n, "q_mode": q, "check": True, "unicode": False, "charge": False}
        try:
            payload = cached_payload("pn", params, lambda: build_certificate(n, q, check=True))
            if not json.loads(payload)["passed"]:
                logger.error(f"p_{n}: сертификат не прошёл проверки")
                failures += 1
                continue
            logger.info(f"p_{n}: сертификат готов ({len(payload)} байт)")
        except Exception as e:
            logger.error(f"Ошибка при построении сертификата p_{n}: {e}", exc_info=True)
            failures += 1

    logger.info(f"Сертификатов прошло проверки: {2 * limit + 1 - failures}, с ошибкой или не прошло: {failures}")
    return failures == 0


if __name__ == "__main__":
    os.makedirs(Config.LOG_DIR, exist_ok=True)
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=logging.INFO,
        handlers=[
            logging.StreamHandler(sys.stderr),
            logging.FileHandler(os.path.join(Config.LOG_DIR, "certificates.log"), encoding='utf-8')
        ]
    )
    parser = argparse.ArgumentParser(description="Предварительный расчёт сертификатов p_n")
    parser.add_argument("--limit", type=int, default=3, help="максимальный |n|")
    args = parser.parse_args()
    logger.info("Запуск расчёта сертификатов")
    sys.exit(0 if build_all(min(args.limit, Config.MAX_CHARGE)) else 1)
