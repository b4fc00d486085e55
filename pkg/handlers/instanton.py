"""
Обработчик команды pn: построение идемпотента p_n и его сертификат.
"""
import json
import logging
from argparse import Namespace
from typing import Dict, Optional, TextIO

from bspace import Certificate, instanton_idempotent, q_mode_text, specialize, verify
from config import Config
from fredholm import pairing_report
from handlers.common import (
    EXIT_BUDGET,
    EXIT_CHECK_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    cached_payload,
    emit,
    report_error,
)
from qalgebra import BudgetExceededError
from utils.helpers import parse_q_mode

logger = logging.getLogger(__name__)


def charge_of(n: int) -> Dict[str, object]:
    """Заряд p_n через двойственность ⟨[p_n], ch_even⟩ = ⟨[U^n], ch_odd⟩."""
    report = pairing_report(f"U^{n}", Config.DEFAULT_K, Config.DEFAULT_Q0, Config.DEFAULT_M, n=n)
    return {"value": report.value, "nearest_integer": report.nearest_integer, "error_bound": report.error_bound}


def _specialized(entry, q_mode):
    return entry if q_mode == "generic" else specialize(entry, q_mode)


def build_certificate(n: int, q_mode, check: bool, unicode: bool = False, charge: bool = False) -> Dict[str, object]:
    """
    Словарь для JSON-вывода команды pn.

    Без check выводятся только элементы p_n, с check полный сертификат.
    """
    p = instanton_idempotent(n)
    if not check:
        return {
            "schema_version": Config.SCHEMA_VERSION,
            "n": n,
            "q_mode": q_mode_text(q_mode),
            "entries": [_specialized(entry, q_mode).to_text(unicode) for _, _, entry in p.entries()],
        }
    certificate: Certificate = verify(p, q_mode, n=n, unicode=unicode)
    if charge:
        certificate.charge = charge_of(n)
    payload = certificate.to_dict()
    payload["passed"] = certificate.passed
    return payload


def cmd_pn(args: Namespace, out: Optional[TextIO] = None) -> int:
    """
    Команда pn.

    Returns:
        int: 0: проверки пройдены (или не запрашивались), 1: проверка не пройдена,
             2: неверные параметры, 3: превышен бюджет мономов
    """
    if abs(args.n) > Config.MAX_CHARGE:
        report_error(f"|n| = {abs(args.n)} больше допустимого {Config.MAX_CHARGE}")
        return EXIT_USAGE
    try:
        q_mode = parse_q_mode(args.q)
    except ValueError as e:
        report_error(str(e))
        return EXIT_USAGE

    params = {
        "n": args.n,
        "q_mode": q_mode_text(q_mode),
        "check": args.check,
        "unicode": args.unicode,
        "charge": args.charge,
    }
    logger.info(f"Команда pn: {params}")
    try:
        payload = cached_payload(
            "pn", params,
            lambda: build_certificate(args.n, q_mode, args.check, args.unicode, args.charge),
            use_cache=not args.no_cache,
        )
    except BudgetExceededError as e:
        report_error(str(e))
        return EXIT_BUDGET

    emit(payload, out)
    if args.check and not json.loads(payload)["passed"]:
        return EXIT_CHECK_FAILED
    return EXIT_OK
