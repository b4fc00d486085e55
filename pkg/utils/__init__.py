"""
Инициализация пакета utils.
Экспортирует разбор выражений и вспомогательные функции вывода.
"""

from utils.expr import ExprSyntaxError, evaluate, normal_form_text, parse, to_source
from utils.helpers import dump_json, format_float, format_table, parse_q_mode, parse_rational

__all__ = [
    'ExprSyntaxError', 'evaluate', 'normal_form_text', 'parse', 'to_source',
    'dump_json', 'format_float', 'format_table', 'parse_q_mode', 'parse_rational',
]
