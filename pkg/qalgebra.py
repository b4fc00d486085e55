"""
Точная модель Хопфовой *-алгебры O(SU_q(2)) при общем (формальном) q.

Элементы хранятся в нормальной форме по базису PBW
{α^a β^b β*^c} ∪ {α*^a β^b β*^c, a > 0}; коэффициенты: полиномы Лорана по q
над рациональными числами.
"""
import logging
import random
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from config import Config
from ringmat import Ring, RingMatrix, identity, mat_mul, mat_pow, mat_star, mat_sub

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
Scalar = Union[int, Fraction, "QLaurent"]

_SUPERSCRIPTS = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


class BudgetExceededError(RuntimeError):
    """Нормальная форма превысила бюджет мономов (защита от взрыва степени)."""

    def __init__(self, attempted: int, budget: int, what: str = "произведение"):
        self.attempted = attempted
        self.budget = budget
        super().__init__(f"{what}: {attempted} мономов при бюджете {budget}")


class EvaluationError(ValueError):
    """Подстановка значения, недопустимая для полинома Лорана."""


def _clean(value: Rational) -> Rational:
    # Целые коэффициенты храним как int: арифметика Fraction заметно медленнее
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def _as_rational(value) -> Rational:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return _clean(value)
    if isinstance(value, str):
        return _clean(Fraction(value))
    raise TypeError(f"Ожидалось точное рациональное число, получено {type(value).__name__}")


class QLaurent:
    """
    Полином Лорана по q с рациональными коэффициентами.

    Таблица показатель → коэффициент без нулевых значений, поэтому равенство
    сводится к сравнению таблиц.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[int, Rational]] = None):
        clean = {}
        for exponent, value in (coeffs or {}).items():
            value = _as_rational(value)
            if value:
                clean[int(exponent)] = value
        self._coeffs = clean

    @classmethod
    def _from_raw(cls, raw: Dict[int, Rational]) -> "QLaurent":
        obj = cls.__new__(cls)
        obj._coeffs = {e: _clean(v) for e, v in raw.items() if v}
        return obj

    @classmethod
    def constant(cls, value) -> "QLaurent":
        return cls({0: _as_rational(value)})

    @classmethod
    def q_power(cls, exponent: int, value: Rational = 1) -> "QLaurent":
        return cls({exponent: value})

    @property
    def coeffs(self) -> Mapping[int, Rational]:
        return MappingProxyType(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def is_constant(self) -> bool:
        return not self._coeffs or set(self._coeffs) == {0}

    def constant_term(self) -> Rational:
        return self._coeffs.get(0, 0)

    def exponent_range(self) -> Tuple[int, int]:
        if not self._coeffs:
            return (0, 0)
        return (min(self._coeffs), max(self._coeffs))

    @staticmethod
    def _coerce(other) -> Optional["QLaurent"]:
        if isinstance(other, QLaurent):
            return other
        if isinstance(other, (int, Fraction)):
            return QLaurent.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        raw = dict(self._coeffs)
        for e, v in other._coeffs.items():
            raw[e] = raw.get(e, 0) + v
        return QLaurent._from_raw(raw)

    __radd__ = __add__

    def __neg__(self) -> "QLaurent":
        return QLaurent._from_raw({e: -v for e, v in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        raw: Dict[int, Rational] = {}
        for e1, v1 in self._coeffs.items():
            for e2, v2 in other._coeffs.items():
                e = e1 + e2
                raw[e] = raw.get(e, 0) + v1 * v2
        return QLaurent._from_raw(raw)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QLaurent":
        if exponent < 0:
            if len(self._coeffs) != 1:
                raise EvaluationError("Отрицательная степень определена только для одночлена c·q^e")
            (e, v), = self._coeffs.items()
            power = -exponent
            return QLaurent({-e * power: Fraction(1) / Fraction(v) ** power})
        result = QLaurent.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def evaluate(self, value):
        """
        Подставляет q = value.

        Для рационального value результат точный (Fraction/int), для float вещественный.
        """
        if value == 0 and any(e < 0 for e in self._coeffs):
            raise EvaluationError("q = 0 является полюсом полинома Лорана")
        if isinstance(value, (int, Fraction)):
            total: Rational = 0
            for e, v in self._coeffs.items():
                total += v * Fraction(value) ** e
            return _clean(Fraction(total))
        return sum(float(v) * value ** e for e, v in sorted(self._coeffs.items()))

    def to_text(self, unicode: bool = False) -> str:
        if not self._coeffs:
            return "0"
        pieces = []
        for e in sorted(self._coeffs):
            v = self._coeffs[e]
            sign = "-" if v < 0 else "+"
            magnitude = abs(v)
            if e == 0:
                body = str(magnitude)
            else:
                power = "q" if e == 1 else (f"q{str(e).translate(_SUPERSCRIPTS)}" if unicode else f"q^{e}")
                body = power if magnitude == 1 else f"{magnitude}*{power}"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"QLaurent({self.to_text()})"


class PBWMonomial(NamedTuple):
    """k ≥ 0 кодирует α^k, k < 0 кодирует (α*)^{-k}; затем β^b и β*^c."""

    k: int
    b: int
    c: int

    def degree(self) -> int:
        return abs(self.k) + self.b + self.c

    def to_text(self, unicode: bool = False) -> str:
        if self == UNIT:
            return "1"
        parts = []
        for letter, star, power in (("a", "α", self.k if self.k > 0 else 0),
                                    ("A", "α*", -self.k if self.k < 0 else 0),
                                    ("b", "β", self.b), ("B", "β*", self.c)):
            if not power:
                continue
            if unicode:
                parts.append(star if power == 1 else f"{star}{str(power).translate(_SUPERSCRIPTS)}")
            else:
                parts.append(letter if power == 1 else f"{letter}^{power}")
        return ("·" if unicode else "*").join(parts)


UNIT = PBWMonomial(0, 0, 0)

_LETTER_MONOMIALS = {
    "a": PBWMonomial(1, 0, 0),
    "A": PBWMonomial(-1, 0, 0),
    "b": PBWMonomial(0, 1, 0),
    "B": PBWMonomial(0, 0, 1),
}


@lru_cache(maxsize=None)
def _gamma_poly(exponents: Tuple[int, ...]) -> Tuple[Dict[int, int], ...]:
    """Раскрывает ∏ (1 − q^e γ) по степеням γ = ββ*."""
    poly = [{0: 1}]
    for shift in exponents:
        grown = [dict(c) for c in poly] + [{}]
        for i, coeffs in enumerate(poly):
            slot = grown[i + 1]
            for e, v in coeffs.items():
                slot[e + shift] = slot.get(e + shift, 0) - v
        poly = [{e: v for e, v in c.items() if v} for c in grown]
    return tuple(poly)


@lru_cache(maxsize=None)
def _monomial_product(left: PBWMonomial, right: PBWMonomial) -> Tuple[Tuple[PBWMonomial, Dict[int, int]], ...]:
    """
    Нормальная форма произведения двух базисных мономов.

    Правые β, β* переносятся через α-часть правого множителя
    (βα = q⁻¹αβ, βα* = qα*β), смешанные пары α…α* сворачиваются по формулам
    α^jα*^j = ∏_{s=1}^{j}(1 − q^{2s}γ) и α*^jα^j = ∏_{s=0}^{j−1}(1 − q^{−2s}γ).
    """
    k1, b1, c1 = left
    k2, b2, c2 = right
    shift = -(b1 + c1) * k2
    b, c = b1 + b2, c1 + c2
    if (k1 >= 0 and k2 >= 0) or (k1 <= 0 and k2 <= 0):
        return ((PBWMonomial(k1 + k2, b, c), {shift: 1}),)
    if k1 > 0:
        j = -k2
        poly = _gamma_poly(tuple(2 * s for s in range(1, min(k1, j) + 1)))
        # γ^i α*^m = q^{2im} α*^m γ^i
        move = 0 if k1 >= j else 2 * (j - k1)
    else:
        j = -k1
        poly = _gamma_poly(tuple(-2 * s for s in range(min(j, k2))))
        # γ^i α^m = q^{-2im} α^m γ^i
        move = 0 if j >= k2 else -2 * (k2 - j)
    k = k1 + k2
    return tuple(
        (PBWMonomial(k, b + i, c + i), {e + shift + move * i: v for e, v in coeffs.items()})
        for i, coeffs in enumerate(poly)
        if coeffs
    )


def _accumulate(acc: Dict, key, coeffs: Mapping[int, Rational], factor: Mapping[int, Rational]) -> None:
    slot = acc.get(key)
    if slot is None:
        slot = acc[key] = {}
    for e1, v1 in coeffs.items():
        for e2, v2 in factor.items():
            e = e1 + e2
            slot[e] = slot.get(e, 0) + v1 * v2


def _raw_product(a: Mapping[int, Rational], b: Mapping[int, Rational]) -> Dict[int, Rational]:
    out: Dict[int, Rational] = {}
    for e1, v1 in a.items():
        for e2, v2 in b.items():
            e = e1 + e2
            out[e] = out.get(e, 0) + v1 * v2
    return out


class HElement:
    """
    Элемент O(SU_q(2)) в нормальной форме: таблица PBWMonomial → QLaurent.

    Значения неизменяемы, все операции возвращают новые объекты.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[PBWMonomial, Scalar]] = None):
        clean = {}
        for mono, coeff in (terms or {}).items():
            coeff = coeff if isinstance(coeff, QLaurent) else QLaurent.constant(coeff)
            if coeff:
                clean[PBWMonomial(*mono)] = coeff
        self._terms = clean

    @classmethod
    def _from_raw(cls, raw: Dict[PBWMonomial, Dict[int, Rational]]) -> "HElement":
        obj = cls.__new__(cls)
        terms = {}
        for mono, coeffs in raw.items():
            coeff = QLaurent._from_raw(coeffs)
            if coeff:
                terms[mono] = coeff
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls) -> "HElement":
        return cls()

    @classmethod
    def one(cls) -> "HElement":
        return cls({UNIT: 1})

    @classmethod
    def scalar(cls, value: Scalar) -> "HElement":
        return cls({UNIT: value})

    @classmethod
    def monomial(cls, mono: Sequence[int], coeff: Scalar = 1) -> "HElement":
        return cls({PBWMonomial(*mono): coeff})

    @classmethod
    def generator(cls, letter: str) -> "HElement":
        try:
            return cls({_LETTER_MONOMIALS[letter]: 1})
        except KeyError:
            raise ValueError(f"Неизвестный генератор '{letter}' (ожидались a, A, b, B)") from None

    @property
    def terms(self) -> Mapping[PBWMonomial, QLaurent]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((m.degree() for m in self._terms), default=0)

    def beta_degree(self) -> int:
        return max((max(m.b, m.c) for m in self._terms), default=0)

    def __add__(self, other):
        if not isinstance(other, HElement):
            if isinstance(other, (int, Fraction, QLaurent)):
                other = HElement.scalar(other)
            else:
                return NotImplemented
        return h_add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "HElement":
        return HElement._from_raw({m: {e: -v for e, v in c._coeffs.items()} for m, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, QLaurent)):
            other = HElement.scalar(other)
        if not isinstance(other, HElement):
            return NotImplemented
        return h_add(self, -other)

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction, QLaurent)):
            return h_add(HElement.scalar(other), -self)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, HElement):
            return h_mul(self, other)
        if isinstance(other, (int, Fraction, QLaurent)):
            return h_scale(other, self)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, QLaurent)):
            return h_scale(other, self)
        return NotImplemented

    def __pow__(self, exponent: int) -> "HElement":
        if exponent < 0:
            raise EvaluationError("Отрицательные степени элементов алгебры не определены")
        result = HElement.one()
        base = self
        while exponent:
            if exponent & 1:
                result = h_mul(result, base)
            exponent >>= 1
            if exponent:
                base = h_mul(base, base)
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, QLaurent)):
            other = HElement.scalar(other)
        if not isinstance(other, HElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def star(self) -> "HElement":
        return h_star(self)

    def to_text(self, unicode: bool = False) -> str:
        """
        Каноническая запись `coeff*a^k*b^m*B^n`, термы отсортированы
        лексикографически по записи монома.
        """
        if not self._terms:
            return "0"
        rows = sorted(((m.to_text(unicode), c) for m, c in self._terms.items()), key=lambda item: item[0])
        pieces = []
        for mono_text, coeff in rows:
            coeff_text = coeff.to_text(unicode)
            negative = False
            if len(coeff.coeffs) > 1:
                coeff_text = f"({coeff_text})"
            elif coeff_text.startswith("-"):
                negative, coeff_text = True, coeff_text[1:]
            if mono_text == "1":
                body = coeff_text
            elif coeff_text == "1":
                body = mono_text
            else:
                body = f"{coeff_text}{'·' if unicode else '*'}{mono_text}"
            pieces.append(("-" if negative else "+", body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"HElement({self.to_text()})"


ALPHA = HElement.generator("a")
ALPHA_STAR = HElement.generator("A")
BETA = HElement.generator("b")
BETA_STAR = HElement.generator("B")


def generators() -> Dict[str, HElement]:
    """Генераторы α, α*, β, β* по их ASCII-именам."""
    return {"a": ALPHA, "A": ALPHA_STAR, "b": BETA, "B": BETA_STAR}


def _check_budget(size: int, what: str) -> None:
    if size > Config.MAX_TERMS:
        logger.error(f"Превышен бюджет мономов ({what}): {size} > {Config.MAX_TERMS}")
        raise BudgetExceededError(size, Config.MAX_TERMS, what)


def h_add(x: HElement, y: HElement) -> HElement:
    raw = {m: dict(c._coeffs) for m, c in x._terms.items()}
    for mono, coeff in y._terms.items():
        slot = raw.setdefault(mono, {})
        for e, v in coeff._coeffs.items():
            slot[e] = slot.get(e, 0) + v
    return HElement._from_raw(raw)


def h_scale(value: Scalar, x: HElement) -> HElement:
    factor = value if isinstance(value, QLaurent) else QLaurent.constant(value)
    if not factor:
        return HElement.zero()
    return HElement._from_raw({m: _raw_product(c._coeffs, factor._coeffs) for m, c in x._terms.items()})


def h_mul(x: HElement, y: HElement) -> HElement:
    """
    Точное произведение с повторной нормализацией произведений базисных мономов.

    Бюджет Config.MAX_TERMS ограничивает число мономов нормальной формы результата.
    """
    acc: Dict[PBWMonomial, Dict[int, Rational]] = {}
    for m1, c1 in x._terms.items():
        for m2, c2 in y._terms.items():
            pair = _raw_product(c1._coeffs, c2._coeffs)
            for mono, shift in _monomial_product(m1, m2):
                _accumulate(acc, mono, pair, shift)
    result = HElement._from_raw(acc)
    _check_budget(len(result._terms), "нормальная форма")
    return result


def _star_monomial(mono: PBWMonomial) -> Tuple[PBWMonomial, int]:
    # (X β^b β*^c)* = β^c β*^b X*, затем β-часть уходит вправо через X*
    k, b, c = mono
    return PBWMonomial(-k, c, b), (b + c) * k


def h_star(x: HElement) -> HElement:
    """Антилинейный антигомоморфизм; q вещественно и остаётся на месте."""
    raw: Dict[PBWMonomial, Dict[int, Rational]] = {}
    for mono, coeff in x._terms.items():
        image, shift = _star_monomial(mono)
        _accumulate(raw, image, coeff._coeffs, {shift: 1})
    return HElement._from_raw(raw)


def normal_form(expr: Iterable[Tuple[Scalar, Sequence[str]]]) -> HElement:
    """
    Нормальная форма линейной комбинации свободных слов в {a, A, b, B}.

    Args:
        expr: пары (коэффициент, слово); пустое слово означает единицу

    Returns:
        HElement: единственная PBW-нормальная форма
    """
    total = HElement.zero()
    for coeff, word in expr:
        term = HElement.scalar(coeff)
        for letter in word:
            term = h_mul(term, HElement.generator(letter))
        total = h_add(total, term)
    return total


# Ориентированные правила переписывания: пара букв → [(коэффициент, замена)]
REWRITE_RULES: Dict[str, Tuple[Tuple[Dict[int, int], str], ...]] = {
    "ba": (({-1: 1}, "ab"),),
    "Ba": (({-1: 1}, "aB"),),
    "bA": (({1: 1}, "Ab"),),
    "BA": (({1: 1}, "AB"),),
    "Bb": (({0: 1}, "bB"),),
    "Aa": (({0: 1}, ""), ({0: -1}, "bB")),
    "aA": (({0: 1}, ""), ({2: -1}, "bB")),
}


def _word_to_monomial(word: str) -> PBWMonomial:
    k = word.count("a") - word.count("A")
    return PBWMonomial(k, word.count("b"), word.count("B"))


def reduce_word(expr: Iterable[Tuple[Scalar, Sequence[str]]]) -> HElement:
    """
    Перебор правил переписывания на уровне свободных слов.

    Медленный независимый оракул для normal_form и h_mul.
    """
    pending: Dict[str, Dict[int, Rational]] = {}
    for coeff, word in expr:
        coeff = coeff if isinstance(coeff, QLaurent) else QLaurent.constant(coeff)
        slot = pending.setdefault("".join(word), {})
        for e, v in coeff._coeffs.items():
            slot[e] = slot.get(e, 0) + v
    done: Dict[PBWMonomial, Dict[int, Rational]] = {}
    steps = 0
    while pending:
        word, coeffs = pending.popitem()
        coeffs = {e: v for e, v in coeffs.items() if v}
        if not coeffs:
            continue
        for i in range(len(word) - 1):
            rule = REWRITE_RULES.get(word[i:i + 2])
            if rule is not None:
                for factor, replacement in rule:
                    _accumulate(pending, word[:i] + replacement + word[i + 2:], coeffs, factor)
                steps += 1
                break
        else:
            _accumulate(done, _word_to_monomial(word), coeffs, {0: 1})
    logger.debug(f"reduce_word: {steps} шагов переписывания")
    return HElement._from_raw(done)


def counit(x: HElement) -> QLaurent:
    total = QLaurent()
    for mono, coeff in x._terms.items():
        if mono.b == 0 and mono.c == 0:
            total = total + coeff
    return total


def eval_q(x: HElement, q0) -> HElement:
    """Подставляет q = q₀ (точное рациональное) во все коэффициенты."""
    q0 = _as_rational(q0)
    if q0 == 0:
        raise EvaluationError("q₀ = 0 недопустимо: коэффициенты имеют полюсы в нуле")
    return HElement({m: c.evaluate(q0) for m, c in x._terms.items()})


def is_scalar(x: HElement) -> Optional[QLaurent]:
    if not x._terms:
        return QLaurent()
    if set(x._terms) == {UNIT}:
        return x._terms[UNIT]
    return None


class HTensor:
    """
    Элемент H^{⊗r}: таблица (моном, …, моном) → QLaurent.

    Обычно r = 2 (область значений Δ), для коассоциативности используется r = 3.
    """

    __slots__ = ("_terms", "legs")

    def __init__(self, terms: Optional[Mapping[Tuple[PBWMonomial, ...], Scalar]] = None, legs: int = 2):
        self.legs = legs
        clean = {}
        for key, coeff in (terms or {}).items():
            if len(key) != legs:
                raise ValueError(f"Ожидалось {legs} тензорных множителей, получено {len(key)}")
            coeff = coeff if isinstance(coeff, QLaurent) else QLaurent.constant(coeff)
            if coeff:
                clean[tuple(PBWMonomial(*m) for m in key)] = coeff
        self._terms = clean

    @classmethod
    def _from_raw(cls, raw: Dict[Tuple[PBWMonomial, ...], Dict[int, Rational]], legs: int) -> "HTensor":
        obj = cls.__new__(cls)
        obj.legs = legs
        obj._terms = {}
        for key, coeffs in raw.items():
            coeff = QLaurent._from_raw(coeffs)
            if coeff:
                obj._terms[key] = coeff
        return obj

    @classmethod
    def pure(cls, *factors: HElement) -> "HTensor":
        """Простой тензор x₁ ⊗ … ⊗ x_r."""
        raw: Dict[Tuple[PBWMonomial, ...], Dict[int, Rational]] = {}
        for combo in cartesian(*(f._terms.items() for f in factors)):
            coeffs: Dict[int, Rational] = {0: 1}
            for _, coeff in combo:
                coeffs = _raw_product(coeffs, coeff._coeffs)
            _accumulate(raw, tuple(m for m, _ in combo), coeffs, {0: 1})
        return cls._from_raw(raw, len(factors))

    @property
    def terms(self) -> Mapping[Tuple[PBWMonomial, ...], QLaurent]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "HTensor") -> "HTensor":
        if not isinstance(other, HTensor):
            return NotImplemented
        if other.legs != self.legs:
            raise ValueError("Сложение тензоров разной арности")
        raw = {k: dict(c._coeffs) for k, c in self._terms.items()}
        for key, coeff in other._terms.items():
            _accumulate(raw, key, coeff._coeffs, {0: 1})
        return HTensor._from_raw(raw, self.legs)

    def __neg__(self) -> "HTensor":
        return HTensor._from_raw({k: {e: -v for e, v in c._coeffs.items()} for k, c in self._terms.items()}, self.legs)

    def __sub__(self, other: "HTensor") -> "HTensor":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QLaurent)):
            factor = other if isinstance(other, QLaurent) else QLaurent.constant(other)
            return HTensor._from_raw({k: _raw_product(c._coeffs, factor._coeffs) for k, c in self._terms.items()},
                                     self.legs)
        if not isinstance(other, HTensor):
            return NotImplemented
        if other.legs != self.legs:
            raise ValueError("Умножение тензоров разной арности")
        raw: Dict[Tuple[PBWMonomial, ...], Dict[int, Rational]] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                pair = _raw_product(c1._coeffs, c2._coeffs)
                for combo in cartesian(*(_monomial_product(a, b) for a, b in zip(k1, k2))):
                    factor: Dict[int, Rational] = {0: 1}
                    for _, shift in combo:
                        factor = _raw_product(factor, shift)
                    _accumulate(raw, tuple(m for m, _ in combo), pair, factor)
        result = HTensor._from_raw(raw, self.legs)
        _check_budget(len(result._terms), "тензорное произведение")
        return result

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, HTensor):
            return NotImplemented
        return self.legs == other.legs and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.legs, frozenset(self._terms.items())))

    def apply_leg(self, leg: int, fn: Callable[[PBWMonomial], Union[HElement, "HTensor", QLaurent]]) -> "HTensor":
        """
        Линейно применяет fn к одному тензорному множителю.

        HElement сохраняет арность, HTensor вклеивается на место множителя,
        QLaurent (скаляр) множитель удаляет.
        """
        raw: Dict[Tuple[PBWMonomial, ...], Dict[int, Rational]] = {}
        legs = self.legs
        for key, coeff in self._terms.items():
            image = fn(key[leg])
            if isinstance(image, QLaurent):
                legs = self.legs - 1
                if image:
                    _accumulate(raw, key[:leg] + key[leg + 1:], coeff._coeffs, image._coeffs)
            elif isinstance(image, HElement):
                for mono, c in image._terms.items():
                    _accumulate(raw, key[:leg] + (mono,) + key[leg + 1:], coeff._coeffs, c._coeffs)
            else:
                legs = self.legs - 1 + image.legs
                for sub, c in image._terms.items():
                    _accumulate(raw, key[:leg] + sub + key[leg + 1:], coeff._coeffs, c._coeffs)
        return HTensor._from_raw(raw, legs)

    def multiply_legs(self) -> HElement:
        """m: H ⊗ H → H."""
        total = HElement.zero()
        for key, coeff in self._terms.items():
            term = HElement({key[0]: coeff})
            for mono in key[1:]:
                term = h_mul(term, HElement.monomial(mono))
            total = h_add(total, term)
        return total

    def to_element(self) -> HElement:
        if not self._terms:
            return HElement.zero()
        if self.legs != 1:
            raise ValueError(f"Тензор арности {self.legs} не является элементом алгебры")
        return HElement({key[0]: coeff for key, coeff in self._terms.items()})

    def to_text(self, unicode: bool = False) -> str:
        if not self._terms:
            return "0"
        join = " ⊗ " if unicode else " (x) "
        rows = sorted(
            (join.join(m.to_text(unicode) for m in key), coeff.to_text(unicode))
            for key, coeff in self._terms.items()
        )
        return " + ".join(f"({c})*[{k}]" for k, c in rows)

    def __repr__(self) -> str:
        return f"HTensor({self.to_text()})"


_GENERATOR_COPRODUCTS = {
    "a": lambda: HTensor.pure(ALPHA, ALPHA) - HTensor.pure(BETA_STAR, BETA) * QLaurent.q_power(1),
    "A": lambda: HTensor.pure(ALPHA_STAR, ALPHA_STAR) - HTensor.pure(BETA, BETA_STAR) * QLaurent.q_power(1),
    "b": lambda: HTensor.pure(BETA, ALPHA) + HTensor.pure(ALPHA_STAR, BETA),
    "B": lambda: HTensor.pure(BETA_STAR, ALPHA_STAR) + HTensor.pure(ALPHA, BETA_STAR),
}


@lru_cache(maxsize=None)
def _generator_coproduct(letter: str) -> HTensor:
    return _GENERATOR_COPRODUCTS[letter]()


@lru_cache(maxsize=None)
def _coproduct_monomial(mono: PBWMonomial) -> HTensor:
    result = HTensor.pure(HElement.one(), HElement.one())
    letter = "a" if mono.k > 0 else "A"
    for name, power in ((letter, abs(mono.k)), ("b", mono.b), ("B", mono.c)):
        for _ in range(power):
            result = result * _generator_coproduct(name)
    return result


def coproduct(x: HElement) -> HTensor:
    """Гомоморфизм Δ, продолженный мультипликативно с генераторов."""
    total = HTensor(legs=2)
    for mono, coeff in x._terms.items():
        total = total + _coproduct_monomial(mono) * coeff
    return total


_GENERATOR_ANTIPODES = {
    "a": lambda: ALPHA_STAR,
    "A": lambda: ALPHA,
    "b": lambda: h_scale(QLaurent.q_power(1, -1), BETA),
    "B": lambda: h_scale(QLaurent.q_power(-1, -1), BETA_STAR),
}


@lru_cache(maxsize=None)
def _antipode_monomial(mono: PBWMonomial) -> HElement:
    # антигомоморфизм: S(X β^b β*^c) = S(β*)^c S(β)^b S(X)
    letter = "a" if mono.k > 0 else "A"
    result = HElement.one()
    for name, power in (("B", mono.c), ("b", mono.b), (letter, abs(mono.k))):
        for _ in range(power):
            result = h_mul(result, _GENERATOR_ANTIPODES[name]())
    return result


def antipode(x: HElement) -> HElement:
    total = HElement.zero()
    for mono, coeff in x._terms.items():
        total = h_add(total, h_scale(coeff, _antipode_monomial(mono)))
    return total


def monomial_counit(mono: PBWMonomial) -> QLaurent:
    return QLaurent.constant(1 if mono.b == 0 and mono.c == 0 else 0)


def tensor_star(t: HTensor) -> HTensor:
    """(x ⊗ y)* = x* ⊗ y*."""
    raw: Dict[Tuple[PBWMonomial, ...], Dict[int, Rational]] = {}
    for key, coeff in t._terms.items():
        images = [_star_monomial(m) for m in key]
        _accumulate(raw, tuple(m for m, _ in images), coeff._coeffs, {sum(s for _, s in images): 1})
    return HTensor._from_raw(raw, t.legs)


def hopf_axiom_residuals() -> Dict[str, int]:
    """
    Аксиомы Хопфовой *-алгебры на генераторах α, α*, β, β*.

    Returns:
        Dict[str, int]: имя проверки → число ненулевых термов невязки
    """
    apply_antipode = lambda m: antipode(HElement.monomial(m))  # noqa: E731
    apply_coproduct = lambda m: coproduct(HElement.monomial(m))  # noqa: E731
    residuals: Dict[str, int] = {}
    for name, gen in generators().items():
        delta = coproduct(gen)
        unit_value = h_scale(counit(gen), HElement.one())
        checks = {
            "counit_left": delta.apply_leg(0, monomial_counit).to_element() - gen,
            "counit_right": delta.apply_leg(1, monomial_counit).to_element() - gen,
            "antipode_left": delta.apply_leg(0, apply_antipode).multiply_legs() - unit_value,
            "antipode_right": delta.apply_leg(1, apply_antipode).multiply_legs() - unit_value,
            "star_coproduct": tensor_star(delta) - coproduct(h_star(gen)),
            "coassociativity": delta.apply_leg(0, apply_coproduct) - delta.apply_leg(1, apply_coproduct),
            "star_antipode": h_star(antipode(h_star(antipode(gen)))) - gen,
            "counit_star": HElement.scalar(counit(h_star(gen)) - counit(gen)),
        }
        for check, residual in checks.items():
            residuals[f"{check}[{name}]"] = len(residual)
    return residuals


def relation_residuals() -> Dict[str, HElement]:
    """Определяющие соотношения и их *-сопряжения, приведённые к нормальной форме."""
    q = QLaurent.q_power(1)
    q2 = QLaurent.q_power(2)
    relations = {
        "ab=qba": [(1, "ab"), (-q, "ba")],
        "aB=qBa": [(1, "aB"), (-q, "Ba")],
        "bB=Bb": [(1, "bB"), (-1, "Bb")],
        "Aa+bB=1": [(1, "Aa"), (1, "bB"), (-1, "")],
        "aA+q2bB=1": [(1, "aA"), (q2, "bB"), (-1, "")],
        "BA=qAB": [(1, "BA"), (-q, "AB")],
        "bA=qAb": [(1, "bA"), (-q, "Ab")],
    }
    return {name: normal_form(expr) for name, expr in relations.items()}


def random_element(rng: random.Random, max_degree: int = 3, max_terms: int = 4) -> HElement:
    """Случайный элемент ограниченной степени с небольшими коэффициентами в Z[q, q⁻¹]."""
    terms: Dict[PBWMonomial, QLaurent] = {}
    for _ in range(rng.randint(1, max_terms)):
        k = rng.randint(-max_degree, max_degree)
        rest = max_degree - abs(k)
        b = rng.randint(0, rest)
        c = rng.randint(0, rest - b)
        coeff = QLaurent({rng.randint(-2, 2): rng.choice([-2, -1, 1, 2, 3]), rng.randint(-2, 2): rng.randint(-1, 1)})
        mono = PBWMonomial(k, b, c)
        terms[mono] = terms.get(mono, QLaurent()) + coeff
    return HElement(terms)


class HRing(Ring):
    """O(SU_q(2)) как кольцо для ringmat."""

    name = "H"
    has_star = True

    def add(self, x: HElement, y: HElement) -> HElement:
        return h_add(x, y)

    def mul(self, x: HElement, y: HElement) -> HElement:
        return h_mul(x, y)

    def zero(self) -> HElement:
        return HElement.zero()

    def one(self) -> HElement:
        return HElement.one()

    def star(self, x: HElement) -> HElement:
        return h_star(x)

    def from_int(self, value: int) -> HElement:
        return HElement.scalar(value)


H_RING = HRing()


def unitary_u() -> RingMatrix:
    """U = [[α, −qβ*], [β, α*]] ∈ M₂(H)."""
    return RingMatrix(H_RING, [
        [ALPHA, h_scale(QLaurent.q_power(1, -1), BETA_STAR)],
        [BETA, ALPHA_STAR],
    ])


def unitary_power(n: int) -> RingMatrix:
    """U^n; для n < 0 используется U^{−1} = U*."""
    base = unitary_u() if n >= 0 else mat_star(unitary_u())
    return mat_pow(base, abs(n))


def unitarity_residual(x: RingMatrix) -> int:
    """Число ненулевых мономов в U*U − I и UU* − I."""
    one = identity(H_RING, x.n)
    gaps = (mat_sub(mat_mul(mat_star(x), x), one), mat_sub(mat_mul(x, mat_star(x)), one))
    return sum(len(entry) for gap in gaps for _, _, entry in gap.entries())
