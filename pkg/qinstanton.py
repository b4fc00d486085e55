"""
Основной файл командной строки qinstanton.
Отвечает за настройку логирования, разбор аргументов и вызов обработчиков команд.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional, TextIO

from config import Config
from handlers import cmd_hopf_check, cmd_nf, cmd_pairing, cmd_pn, cmd_winding

logger = logging.getLogger(__name__)


def setup_logging() -> None:
    """Логи в stderr (stdout остаётся для JSON) и в файл каталога логов."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    try:
        os.makedirs(Config.LOG_DIR, exist_ok=True)
        handlers.append(logging.FileHandler(os.path.join(Config.LOG_DIR, "qinstanton.log"), encoding='utf-8'))
    except OSError as e:
        print(f"Не удалось открыть файл лога в {Config.LOG_DIR}: {e}", file=sys.stderr)
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=logging.INFO if not Config.DEBUG else logging.DEBUG,
        handlers=handlers,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qinstanton",
        description="Инстантонные идемпотенты над квантовой 4-сферой и спаривания K-теории",
    )
    parser.add_argument("--no-cache", action="store_true", help="не читать и не писать кэш результатов")
    sub = parser.add_subparsers(dest="command", required=True)

    nf = sub.add_parser("nf", help="нормальная форма выражения в a, A, b, B, q")
    nf.add_argument("expr", help='выражение, например "A a + b B"')
    nf.add_argument("--unicode", action="store_true", help="печать α, α*, β, β*")
    nf.set_defaults(handler=cmd_nf)

    pn = sub.add_parser("pn", help="идемпотент p_n и его сертификат")
    pn.add_argument("-n", type=int, required=True, help="целый параметр заряда")
    pn.add_argument("--q", default="generic", help='"generic" или рациональное p/r')
    pn.add_argument("--check", action="store_true", help="выполнить точные проверки")
    pn.add_argument("--charge", action="store_true", help="добавить заряд через спаривание с U^n")
    pn.add_argument("--unicode", action="store_true", help="печать α, α*, β, β*")
    pn.set_defaults(handler=cmd_pn)

    pairing = sub.add_parser("pairing", help="нечётное спаривание Черна для U^n или V")
    pairing.add_argument("--u", default="U", help="U, U^n или V")
    pairing.add_argument("--k", type=int, default=Config.DEFAULT_K)
    pairing.add_argument("--q0", type=float, default=Config.DEFAULT_Q0)
    pairing.add_argument("--tol", type=float, default=Config.DEFAULT_TOL)
    pairing.add_argument("--M", type=int, default=None, help="отсечка по m (по умолчанию из tol)")
    pairing.add_argument("--table", action="store_true", help="табличный вывод вместо JSON")
    pairing.set_defaults(handler=cmd_pairing)

    winding = sub.add_parser("winding", help="степень классической функции перехода θ^(n)")
    winding.add_argument("-n", type=int, required=True)
    winding.add_argument("--resolution", type=int, default=Config.DEFAULT_RESOLUTION)
    winding.add_argument("--table", action="store_true", help="табличный вывод вместо JSON")
    winding.set_defaults(handler=cmd_winding)

    hopf = sub.add_parser("hopf-check", help="соотношения, ассоциативность и аксиомы Хопфа")
    hopf.add_argument("--trials", type=int, default=200)
    hopf.add_argument("--seed", type=int, default=0)
    hopf.set_defaults(handler=cmd_hopf_check)
    return parser


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    """
    Точка входа.

    Returns:
        int: 0: успех, 1: проверка не пройдена, 2: ошибка использования,
             3: превышен бюджет мономов
    """
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logger.debug(f"Команда {args.command}, каталог кэша {Config.cache_dir()}")
    try:
        return args.handler(args, out)
    except Exception as e:
        logger.error(f"Критическая ошибка при выполнении {args.command}: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
