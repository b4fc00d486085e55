"""
Обработчики команд pairing и winding.
"""
import json
import logging
import re
from argparse import Namespace
from typing import Dict, Optional, TextIO, Tuple

from fredholm import (
    NonUnitaryError,
    ResolutionTooSmallError,
    WindowTooSmallError,
    cutoff_for_tolerance,
    pairing_report,
    winding_degree,
)
from config import Config
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
from utils.helpers import format_table

logger = logging.getLogger(__name__)

_U_PATTERN = re.compile(r"^U(?:\^([+-]?\d+))?$")

WINDING_TOLERANCE = 0.05


def parse_unitary(text: str) -> Tuple[str, Optional[int]]:
    """
    Разбирает описание унитарного элемента: "U", "U^n" или "V".

    Returns:
        (descriptor, n): n = None для V
    """
    text = text.strip()
    if text == "V":
        return "V", None
    match = _U_PATTERN.match(text)
    if not match:
        raise ValueError(f"Ожидалось U, U^n или V, получено {text!r}")
    n = int(match.group(1)) if match.group(1) is not None else 1
    return f"U^{n}", n


def _print_report(payload: str, table: bool, out: Optional[TextIO]) -> None:
    if not table:
        emit(payload, out)
        return
    data = json.loads(payload)
    emit(format_table(["параметр", "значение"], sorted(data.items())), out)


def cmd_pairing(args: Namespace, out: Optional[TextIO] = None) -> int:
    """
    Команда pairing: ⟨[u], ch_odd⟩ для u = U^n или V.

    Returns:
        int: 0, если значение целое с точностью max(tol, оценка ошибки)
    """
    try:
        descriptor, n = parse_unitary(args.u)
    except ValueError as e:
        report_error(str(e))
        return EXIT_USAGE
    if n is not None and abs(n) > Config.MAX_CHARGE:
        report_error(f"|n| = {abs(n)} больше допустимого {Config.MAX_CHARGE}")
        return EXIT_USAGE
    if not 0.0 < args.q0 < 1.0 or args.tol <= 0 or args.k < 0:
        report_error("Требуется 0 < q0 < 1, tol > 0, k ≥ 0")
        return EXIT_USAGE

    M = args.M if args.M is not None else cutoff_for_tolerance(args.q0, args.tol)
    params: Dict[str, object] = {"u": descriptor, "k": args.k, "q0": args.q0, "M": M}
    try:
        payload = cached_payload(
            "pairing", params,
            lambda: pairing_report(descriptor, args.k, args.q0, M, n=n).to_dict(),
            use_cache=not args.no_cache,
        )
    except (WindowTooSmallError, NonUnitaryError, ValueError) as e:
        report_error(str(e))
        return EXIT_USAGE
    except BudgetExceededError as e:
        report_error(str(e))
        return EXIT_BUDGET

    _print_report(payload, args.table, out)
    data = json.loads(payload)
    if abs(data["value"] - data["nearest_integer"]) > max(args.tol, data["error_bound"]):
        logger.warning(f"Спаривание {descriptor} не целое: {data['value']}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def winding_report(n: int, resolution: int) -> Dict[str, object]:
    degree = winding_degree(n, resolution)
    return {
        "n": n,
        "resolution": resolution,
        "degree": degree,
        "nearest_integer": int(round(degree)),
        "error": abs(degree - n),
    }


def cmd_winding(args: Namespace, out: Optional[TextIO] = None) -> int:
    """Команда winding: степень θ^(n): S³ → SU(2)."""
    if abs(args.n) > Config.MAX_CHARGE:
        report_error(f"|n| = {abs(args.n)} больше допустимого {Config.MAX_CHARGE}")
        return EXIT_USAGE
    params = {"n": args.n, "resolution": args.resolution}
    try:
        payload = cached_payload("winding", params, lambda: winding_report(args.n, args.resolution),
                                 use_cache=not args.no_cache)
    except ResolutionTooSmallError as e:
        report_error(str(e))
        return EXIT_USAGE

    _print_report(payload, args.table, out)
    return EXIT_OK if json.loads(payload)["error"] <= WINDING_TOLERANCE else EXIT_CHECK_FAILED
