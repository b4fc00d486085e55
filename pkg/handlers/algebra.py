"""
Обработчики команд nf и hopf-check: нормальные формы и набор алгебраических проверок.
"""
import logging
import random
from argparse import Namespace
from typing import Dict, Optional, TextIO

from qalgebra import (
    BudgetExceededError,
    EvaluationError,
    generators,
    h_mul,
    h_star,
    hopf_axiom_residuals,
    normal_form,
    random_element,
    reduce_word,
    relation_residuals,
    unitarity_residual,
    unitary_u,
)
from handlers.common import EXIT_BUDGET, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, emit, report_error
from utils.expr import ExprSyntaxError, normal_form_text
from utils.helpers import dump_json

logger = logging.getLogger(__name__)

LETTERS = "aAbB"


def _check(failures: int) -> Dict[str, object]:
    return {"pass": failures == 0, "failures": failures}


def run_property_suite(trials: int = 200, seed: int = 0) -> Dict[str, Dict[str, object]]:
    """
    Точные проверки алгебры на образующих и случайных элементах.

    Args:
        trials: число случайных троек (и случайных слов)
        seed: зерно генератора, чтобы отчёт был воспроизводим

    Returns:
        dict: имя проверки → {"pass", "failures"}
    """
    rng = random.Random(seed)
    checks: Dict[str, Dict[str, object]] = {}

    relations = relation_residuals()
    checks["relations"] = _check(sum(1 for value in relations.values() if not value.is_zero()))

    associativity = star_anti = involution = 0
    for _ in range(trials):
        x, y, z = (random_element(rng) for _ in range(3))
        if h_mul(h_mul(x, y), z) != h_mul(x, h_mul(y, z)):
            associativity += 1
        if h_star(h_mul(x, y)) != h_mul(h_star(y), h_star(x)):
            star_anti += 1
        if h_star(h_star(x)) != x:
            involution += 1
    checks["associativity"] = _check(associativity)
    checks["star_antihomomorphism"] = _check(star_anti)
    checks["star_involution"] = _check(involution)

    hopf = hopf_axiom_residuals()
    checks["hopf_axioms"] = _check(sum(1 for residual in hopf.values() if residual))

    rewriting = 0
    for _ in range(trials):
        word = [rng.choice(LETTERS) for _ in range(rng.randint(0, 5))]
        if reduce_word([(1, word)]) != normal_form([(1, word)]):
            rewriting += 1
    checks["rewriting_agrees"] = _check(rewriting)

    checks["unitary_u"] = _check(unitarity_residual(unitary_u()))
    logger.info("Проверки алгебры: " + ", ".join(f"{k}={v['pass']}" for k, v in checks.items()))
    return checks


def cmd_nf(args: Namespace, out: Optional[TextIO] = None) -> int:
    """
    Печатает нормальную форму выражения.

    Returns:
        int: код возврата
    """
    try:
        emit(normal_form_text(args.expr, unicode=args.unicode), out)
        return EXIT_OK

    except ExprSyntaxError as e:
        report_error(f"синтаксическая ошибка {e}")
        return EXIT_USAGE

    except EvaluationError as e:
        report_error(f"не удалось вычислить выражение: {e}")
        return EXIT_USAGE

    except BudgetExceededError as e:
        report_error(str(e))
        return EXIT_BUDGET


def cmd_hopf_check(args: Namespace, out: Optional[TextIO] = None) -> int:
    """Набор свойств алгебры Хопфа; код 0, только если все проверки пройдены."""
    try:
        checks = run_property_suite(trials=args.trials, seed=args.seed)
        payload = {
            "generators": sorted(generators()),
            "seed": args.seed,
            "trials": args.trials,
            "checks": checks,
        }
        emit(dump_json(payload), out)
        return EXIT_OK if all(c["pass"] for c in checks.values()) else EXIT_CHECK_FAILED

    except BudgetExceededError as e:
        report_error(str(e))
        return EXIT_BUDGET

    except Exception as e:
        logger.error(f"Неожиданная ошибка при проверке алгебры: {e}", exc_info=True)
        return EXIT_CHECK_FAILED
