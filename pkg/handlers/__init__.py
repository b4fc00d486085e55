"""
Инициализация пакета handlers.
Экспортирует обработчики команд.
"""

from handlers.algebra import cmd_hopf_check, cmd_nf
from handlers.instanton import cmd_pn
from handlers.pairing import cmd_pairing, cmd_winding

__all__ = ['cmd_nf', 'cmd_hopf_check', 'cmd_pn', 'cmd_pairing', 'cmd_winding']
