"""
Язык выражений для элементов O(SU_q(2)).

Грамматика:
    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'] factor)*
    factor := atom ['^' ['+'|'-'] целое]
    atom   := 'a' | 'A' | 'b' | 'B' | 'q' | число ['/' число] | '(' expr ')'

a, A, b, B означают α, α*, β, β*; соседние множители перемножаются.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Tuple, Union

from qalgebra import ALPHA, ALPHA_STAR, BETA, BETA_STAR, HElement, QLaurent, h_add, h_mul, is_scalar

logger = logging.getLogger(__name__)

SYMBOLS = ("a", "A", "b", "B", "q")
DIGITS = frozenset("0123456789")
MAX_DEPTH = 100
ATOM_START = frozenset(SYMBOLS + ("число", "("))


class ExprSyntaxError(ValueError):
    """Синтаксическая ошибка с позицией и множеством ожидаемых токенов."""

    def __init__(self, line: int, column: int, expected: Iterable[str], found: str = "конец ввода"):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        self.found = found
        super().__init__(f"{line}:{column}: ожидалось одно из {{{', '.join(sorted(self.expected))}}}, "
                         f"найдено {found}")


@dataclass(frozen=True)
class Token:
    kind: str  # символ, 'число', оператор или 'eof'
    text: str
    offset: int
    line: int
    column: int


def tokenize(src: str) -> List[Token]:
    tokens: List[Token] = []
    i, line, column = 0, 1, 1
    while i < len(src):
        ch = src[i]
        if ch == "\n":
            i, line, column = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, column = i + 1, column + 1
            continue
        if ch in DIGITS:
            j = i
            while j < len(src) and src[j] in DIGITS:
                j += 1
            if j + 1 < len(src) and src[j] == "/" and src[j + 1] in DIGITS:
                j += 1
                while j < len(src) and src[j] in DIGITS:
                    j += 1
            tokens.append(Token("число", src[i:j], i, line, column))
            column += j - i
            i = j
            continue
        if ch in SYMBOLS or ch in "+-*^()":
            tokens.append(Token(ch, ch, i, line, column))
            i, column = i + 1, column + 1
            continue
        raise ExprSyntaxError(line, column, ATOM_START | {"+", "-", "*", "^", ")"}, repr(ch))
    tokens.append(Token("eof", "", len(src), line, column))
    return tokens


# AST: позиции в исходном тексте не участвуют в сравнении узлов

Span = Tuple[int, int]


@dataclass(frozen=True)
class Num:
    value: Fraction
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Sym:
    name: str
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Power:
    base: "Expr"
    exponent: int
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Product:
    factors: Tuple["Expr", ...]
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Sum:
    """Знаковые слагаемые; первое слагаемое со знаком '+' записывается без знака."""

    items: Tuple[Tuple[str, "Expr"], ...]
    span: Span = field(default=(0, 0), compare=False)


Expr = Union[Num, Sym, Power, Product, Sum]


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.pos = 0
        self.depth = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, expected: Iterable[str]) -> None:
        token = self.current
        found = "конец ввода" if token.kind == "eof" else repr(token.text)
        raise ExprSyntaxError(token.line, token.column, expected, found)

    def parse(self) -> Expr:
        node = self.expr()
        if self.current.kind != "eof":
            self.fail({"+", "-", "*", "^"} | ATOM_START)
        return node

    def expr(self) -> Expr:
        start = self.current.offset
        sign = "+"
        if self.current.kind in ("+", "-"):
            sign = self.advance().kind
        items = [(sign, self.term())]
        while self.current.kind in ("+", "-"):
            op = self.advance().kind
            items.append((op, self.term()))
        if len(items) == 1 and sign == "+":
            return items[0][1]
        return Sum(tuple(items), (start, self.current.offset))

    def term(self) -> Expr:
        start = self.current.offset
        factors = [self.factor()]
        while self.current.kind in ATOM_START or self.current.kind == "*":
            if self.current.kind == "*":
                self.advance()
            factors.append(self.factor())
        if len(factors) == 1:
            return factors[0]
        return Product(tuple(factors), (start, self.current.offset))

    def factor(self) -> Expr:
        start = self.current.offset
        base = self.atom()
        if self.current.kind != "^":
            return base
        self.advance()
        negative = False
        if self.current.kind in ("+", "-"):
            negative = self.advance().kind == "-"
        if self.current.kind != "число" or "/" in self.current.text:
            self.fail({"целое"})
        exponent = int(self.advance().text)
        return Power(base, -exponent if negative else exponent, (start, self.current.offset))

    def atom(self) -> Expr:
        token = self.current
        if token.kind in SYMBOLS:
            self.advance()
            return Sym(token.kind, (token.offset, token.offset + 1))
        if token.kind == "число":
            numerator, _, denominator = token.text.partition("/")
            if denominator and int(denominator) == 0:
                raise ExprSyntaxError(token.line, token.column, {"ненулевой знаменатель"}, repr(token.text))
            self.advance()
            return Num(Fraction(token.text), (token.offset, token.offset + len(token.text)))
        if token.kind == "(":
            if self.depth >= MAX_DEPTH:
                raise ExprSyntaxError(token.line, token.column, {f"вложенность скобок ≤ {MAX_DEPTH}"}, "'('")
            self.advance()
            self.depth += 1
            node = self.expr()
            self.depth -= 1
            if self.current.kind != ")":
                self.fail({")", "+", "-", "*", "^"} | ATOM_START)
            self.advance()
            return node
        self.fail(ATOM_START)


def parse(src: str) -> Expr:
    """
    Разбирает текст выражения в AST.

    Raises:
        ExprSyntaxError: с номером строки, столбца и множеством ожидаемых токенов
    """
    return _Parser(src).parse()


def _num_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _wrap(node: Expr, bare: tuple) -> str:
    text = to_source(node)
    return text if isinstance(node, bare) else f"({text})"


def to_source(node: Expr) -> str:
    """Печать AST; parse(to_source(t)) == t."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Power):
        base = _wrap(node.base, (Sym,))
        if isinstance(node.base, Num) and node.base.value.denominator == 1:
            base = to_source(node.base)
        return f"{base}^{node.exponent}"
    if isinstance(node, Product):
        return "*".join(_wrap(f, (Num, Sym, Power)) for f in node.factors)
    parts = []
    for index, (sign, item) in enumerate(node.items):
        text = _wrap(item, (Num, Sym, Power, Product))
        if index == 0:
            parts.append(f"-{text}" if sign == "-" else text)
        else:
            parts.append(f" {sign} {text}")
    return "".join(parts)


_SYMBOL_VALUES = {"a": ALPHA, "A": ALPHA_STAR, "b": BETA, "B": BETA_STAR}


def evaluate(node: Expr) -> HElement:
    """Значение выражения в нормальной форме."""
    if isinstance(node, Num):
        return HElement.scalar(node.value)
    if isinstance(node, Sym):
        if node.name == "q":
            return HElement.scalar(QLaurent.q_power(1))
        return _SYMBOL_VALUES[node.name]
    if isinstance(node, Power):
        base = evaluate(node.base)
        coeff = is_scalar(base)
        if coeff is not None:
            return HElement.scalar(coeff ** node.exponent)
        return base ** node.exponent
    if isinstance(node, Product):
        result = HElement.one()
        for factor in node.factors:
            result = h_mul(result, evaluate(factor))
        return result
    total = HElement.zero()
    for sign, item in node.items:
        value = evaluate(item)
        total = h_add(total, value if sign == "+" else -value)
    return total


def normal_form_text(src: str, unicode: bool = False) -> str:
    """Каноническая запись нормальной формы выражения src."""
    tree = parse(src)
    value = evaluate(tree)
    logger.debug(f"'{src}' → {len(value)} мономов")
    return value.to_text(unicode)
