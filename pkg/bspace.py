"""
Расслоённое произведение B = B₀ ×_H B₁ на уровне кусочно-полиномиальных функций.

Элемент B есть пара полиномов по t с коэффициентами из O(SU_q(2)): один на [0, ½],
другой на [½, 1], совпадающих в точке ½. Здесь строятся подъёмы c, d унитарной
матрицы U, идемпотенты p_n любого заряда и сертификаты их проверки.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import Config
from qalgebra import (
    ALPHA,
    BETA,
    BudgetExceededError,
    HElement,
    QLaurent,
    eval_q,
    h_add,
    h_mul,
    h_scale,
    h_star,
    is_scalar,
)
from ringmat import Ring, RingMatrix, diagonal, mat_pow, mat_star, mat_sub, milnor_block

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
QMode = Union[str, Fraction]


class ContinuityError(ValueError):
    """Куски не совпадают в точке t = ½."""


class OutOfRangeError(ValueError):
    """Точка вне отрезка [0, 1]."""


class NotOnSphereError(ValueError):
    """Точка (α₀, β₀) не лежит на S³."""


Poly = Tuple[HElement, ...]


def _trim(coeffs: Sequence[HElement]) -> Poly:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return tuple(coeffs)


def _poly_add(x: Poly, y: Poly) -> Poly:
    size = max(len(x), len(y))
    zero = HElement.zero()
    return _trim(h_add(x[i] if i < len(x) else zero, y[i] if i < len(y) else zero) for i in range(size))


def _poly_mul(x: Poly, y: Poly) -> Poly:
    if not x or not y:
        return ()
    out = [HElement.zero()] * (len(x) + len(y) - 1)
    for i, a in enumerate(x):
        if a.is_zero():
            continue
        for j, b in enumerate(y):
            if not b.is_zero():
                out[i + j] = h_add(out[i + j], h_mul(a, b))
    return _trim(out)


def _poly_eval(x: Poly, t0: Fraction) -> HElement:
    # схема Горнера
    acc = HElement.zero()
    for coeff in reversed(x):
        acc = h_add(h_scale(t0, acc), coeff)
    return acc


def _poly_text(x: Poly, unicode: bool) -> str:
    if not x:
        return "0"
    parts = []
    for power, coeff in enumerate(x):
        if coeff.is_zero():
            continue
        text = f"({coeff.to_text(unicode)})"
        if power == 1:
            text += "*t"
        elif power > 1:
            text += f"*t^{power}"
        parts.append(text)
    return " + ".join(parts)


class BPoly:
    """
    Кусочно-полиномиальная функция [0, 1] → O(SU_q(2)) с изломом в ½.

    Непрерывность в ½ проверяется при создании. Скалярность на концах
    (принадлежность B) проверяется отдельным предикатом in_fiber_product; подъёмы вроде ōα
    живут в объемлющей алгебре, так как ōα(0) = α.
    """

    __slots__ = ("left", "right")

    def __init__(self, left: Sequence[HElement], right: Sequence[HElement], check: bool = True):
        self.left = _trim(left)
        self.right = _trim(right)
        if check and _poly_eval(self.left, HALF) != _poly_eval(self.right, HALF):
            raise ContinuityError("Куски BPoly не совпадают в t = 1/2")

    @classmethod
    def constant(cls, value: HElement) -> "BPoly":
        return cls((value,), (value,), check=False)

    @classmethod
    def scalar(cls, value) -> "BPoly":
        return cls.constant(HElement.scalar(value))

    @classmethod
    def zero(cls) -> "BPoly":
        return cls((), (), check=False)

    @classmethod
    def one(cls) -> "BPoly":
        return cls.scalar(1)

    def is_zero(self) -> bool:
        return not self.left and not self.right

    def degree(self) -> int:
        return max(len(self.left), len(self.right), 1) - 1

    def term_count(self) -> int:
        return sum(len(c) for c in self.left) + sum(len(c) for c in self.right)

    def __add__(self, other: "BPoly") -> "BPoly":
        return b_add(self, other)

    def __neg__(self) -> "BPoly":
        return BPoly(tuple(-c for c in self.left), tuple(-c for c in self.right), check=False)

    def __sub__(self, other: "BPoly") -> "BPoly":
        return b_add(self, -other)

    def __mul__(self, other: "BPoly") -> "BPoly":
        return b_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BPoly):
            return NotImplemented
        return self.left == other.left and self.right == other.right

    def __hash__(self) -> int:
        return hash((self.left, self.right))

    def to_text(self, unicode: bool = False) -> str:
        return f"[0,1/2]: {_poly_text(self.left, unicode)}; [1/2,1]: {_poly_text(self.right, unicode)}"

    def __repr__(self) -> str:
        return f"BPoly({self.to_text()})"


def b_add(x: BPoly, y: BPoly) -> BPoly:
    return BPoly(_poly_add(x.left, y.left), _poly_add(x.right, y.right), check=False)


def b_mul(x: BPoly, y: BPoly) -> BPoly:
    """Поточечное произведение: свёртка полиномов по t на каждом куске."""
    return BPoly(_poly_mul(x.left, y.left), _poly_mul(x.right, y.right), check=False)


def b_star(x: BPoly) -> BPoly:
    # t вещественно, поэтому инволюция действует только на коэффициенты
    return BPoly(tuple(h_star(c) for c in x.left), tuple(h_star(c) for c in x.right), check=False)


def _as_point(t0) -> Fraction:
    if isinstance(t0, float):
        raise TypeError("Символьные вычисления принимают только рациональные t")
    t0 = Fraction(t0)
    if not 0 <= t0 <= 1:
        raise OutOfRangeError(f"t = {t0} вне отрезка [0, 1]")
    return t0


def b_eval(x: BPoly, t0) -> HElement:
    """Точное значение в рациональной точке t₀ ∈ [0, 1]."""
    t0 = _as_point(t0)
    return _poly_eval(x.left if t0 <= HALF else x.right, t0)


def restrict(x: BPoly, piece: int) -> Poly:
    """Ограничение на [0, ½] (piece = 0) или на [½, 1] (piece = 1)."""
    if piece not in (0, 1):
        raise ValueError(f"Кусок должен быть 0 или 1, получено {piece}")
    return x.left if piece == 0 else x.right


def glue_point(x: BPoly) -> HElement:
    """Значение в ½, общая точка двух кусков."""
    return b_eval(x, HALF)


def in_fiber_product(x: BPoly) -> bool:
    """x(0) и x(1) скалярны."""
    return is_scalar(b_eval(x, 0)) is not None and is_scalar(b_eval(x, 1)) is not None


def specialize(x: BPoly, q0: Fraction) -> BPoly:
    """Подстановка q = q₀ во все коэффициенты обоих кусков."""
    return BPoly(tuple(eval_q(c, q0) for c in x.left), tuple(eval_q(c, q0) for c in x.right), check=False)


def specialize_matrix(x: RingMatrix, q0: Fraction) -> RingMatrix:
    """Поэлементная подстановка q = q₀ (только для готовых невязок и печати)."""
    return RingMatrix(B_RING, [[specialize(entry, q0) for entry in row] for row in x.rows])


class BRing(Ring):
    """B как кольцо для ringmat."""

    name = "B"
    has_star = True

    def add(self, x: BPoly, y: BPoly) -> BPoly:
        return b_add(x, y)

    def mul(self, x: BPoly, y: BPoly) -> BPoly:
        return b_mul(x, y)

    def zero(self) -> BPoly:
        return BPoly.zero()

    def one(self) -> BPoly:
        return BPoly.one()

    def star(self, x: BPoly) -> BPoly:
        return b_star(x)

    def from_int(self, value: int) -> BPoly:
        return BPoly.scalar(value) if value else BPoly.zero()


B_RING = BRing()


def lift_alpha() -> BPoly:
    """ōα: α на [0, ½] и (2t − 1) + 2(1 − t)α на [½, 1]."""
    return BPoly((ALPHA,), (h_add(HElement.scalar(-1), h_scale(2, ALPHA)), h_add(HElement.scalar(2), h_scale(-2, ALPHA))))


def lift_beta() -> BPoly:
    """ōβ: β на [0, ½] и 2(1 − t)β на [½, 1]."""
    return BPoly((BETA,), (h_scale(2, BETA), h_scale(-2, BETA)))


def _scale(value, x: BPoly) -> BPoly:
    return BPoly(tuple(h_scale(value, c) for c in x.left), tuple(h_scale(value, c) for c in x.right), check=False)


@lru_cache(maxsize=None)
def base_lifts() -> Tuple[RingMatrix, RingMatrix]:
    """c = [[ōα, −qōβ*], [ōβ, ōα*]] и d = [[ōα*, ōβ*], [−qōβ, ōα]] над B."""
    a, b = lift_alpha(), lift_beta()
    a_star, b_star_ = b_star(a), b_star(b)
    minus_q = QLaurent.q_power(1, -1)
    c = RingMatrix(B_RING, [[a, _scale(minus_q, b_star_)], [b, a_star]])
    d = RingMatrix(B_RING, [[a_star, b_star_], [_scale(minus_q, b), a]])
    return c, d


@lru_cache(maxsize=None)
def make_lifts(n: int) -> Tuple[RingMatrix, RingMatrix]:
    """
    Подъёмы (c^{|n|}, d^{|n|}) матриц U^{|n|} и U^{−|n|}.

    Для n < 0 роли меняются в instanton_idempotent, сами подъёмы от знака не зависят.
    """
    c, d = base_lifts()
    power = abs(n)
    return mat_pow(c, power), mat_pow(d, power)


@lru_cache(maxsize=None)
def _build_idempotent(n: int) -> RingMatrix:
    started = time.perf_counter()
    try:
        c_n, d_n = make_lifts(n)
        p = milnor_block(c_n, d_n) if n >= 0 else milnor_block(d_n, c_n)
    except BudgetExceededError as e:
        logger.error(f"p_{n}: превышен бюджет мономов при степени {4 * abs(n)}: {e}")
        raise BudgetExceededError(e.attempted, e.budget, f"p_{n} (степень {4 * abs(n)})") from e
    logger.info(f"p_{n} построен за {time.perf_counter() - started:.2f} с")
    return p


def instanton_idempotent(n: int) -> RingMatrix:
    """
    Идемпотент p_n ∈ M₄(B) заряда −n.

    Args:
        n: целый параметр; при n ≥ 0 используется c^n(2 − d^n c^n)d^n,
           при n < 0 та же формула с переставленными c и d

    Returns:
        RingMatrix: матрица 4×4 над BRing

    Raises:
        BudgetExceededError: если построение или уже готовый p_n превышает Config.MAX_TERMS
    """
    p = _build_idempotent(n)
    # готовый результат берётся из памяти, поэтому бюджет проверяется и здесь
    largest = max(entry.term_count() for _, _, entry in p.entries())
    if largest > Config.MAX_TERMS:
        logger.error(f"p_{n}: элемент из {largest} мономов превышает бюджет {Config.MAX_TERMS}")
        raise BudgetExceededError(largest, Config.MAX_TERMS, f"p_{n} (степень {4 * abs(n)})")
    return p


def corner_matrix() -> RingMatrix:
    """diag(1, 1, 0, 0) над B."""
    return diagonal(B_RING, [BPoly.one(), BPoly.one(), BPoly.zero(), BPoly.zero()])


@dataclass
class CheckResult:
    passed: bool
    residual_terms: int

    def to_dict(self) -> Dict[str, object]:
        return {"pass": self.passed, "residual_terms": self.residual_terms}


@dataclass
class Certificate:
    """Результат проверки идемпотента; каждое true подкреплено нулевой точной невязкой."""

    n: Optional[int]
    q_mode: str
    checks: Dict[str, CheckResult]
    entries: List[str]
    charge: Optional[Dict[str, object]] = None
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for name, c in self.checks.items() if name in EXPECTED_TRUE)

    def to_dict(self) -> Dict[str, object]:
        payload: Dict[str, object] = {
            "schema_version": Config.SCHEMA_VERSION,
            "n": self.n,
            "q_mode": self.q_mode,
            "checks": {name: check.to_dict() for name, check in sorted(self.checks.items())},
            "entries": list(self.entries),
        }
        if self.charge is not None:
            payload["charge"] = self.charge
        payload.update(self.extra)
        return payload


# star_invariant считается всегда, но не входит в итоговый вердикт: формула склейки
# даёт идемпотент, а не проекцию
EXPECTED_TRUE = ("idempotent", "boundary_scalar", "left_piece_constant")


def q_mode_text(q_mode: QMode) -> str:
    if isinstance(q_mode, str):
        if q_mode != "generic":
            raise ValueError(f"Неизвестный режим q: {q_mode}")
        return q_mode
    return str(Fraction(q_mode))


def _entry_of_square(task: Tuple[RingMatrix, int, int, Optional[Fraction]]) -> int:
    # q₀ подставляется только в невязку: h_mul не вычисляет множители перестановки при q = q₀
    p, i, j, q0 = task
    total = BPoly.zero()
    for k in range(p.n):
        total = b_add(total, b_mul(p[i, k], p[k, j]))
    residual = b_add(total, -p[i, j])
    if q0 is not None:
        residual = specialize(residual, q0)
    return residual.term_count()


def _idempotency_residuals(p: RingMatrix, q0: Optional[Fraction] = None) -> List[int]:
    tasks = [(p, i, j, q0) for i in range(p.n) for j in range(p.n)]
    if Config.WORKERS > 1:
        logger.info(f"Поэлементная проверка p² = p в {Config.WORKERS} процессах")
        with ProcessPoolExecutor(max_workers=Config.WORKERS) as pool:
            # map сохраняет порядок задач, поэтому агрегирование детерминировано
            return list(pool.map(_entry_of_square, tasks))
    return [_entry_of_square(task) for task in tasks]


def _boundary_residual(p: RingMatrix) -> int:
    bad = 0
    for _, _, entry in p.entries():
        for t0 in (0, 1):
            value = b_eval(entry, t0)
            if is_scalar(value) is None:
                bad += len(value)
    return bad


def _left_constant_residual(p: RingMatrix) -> int:
    bad = 0
    for _, _, entry in p.entries():
        head = entry.left[0] if entry.left else HElement.zero()
        bad += sum(len(c) for c in entry.left[1:])
        if is_scalar(head) is None:
            bad += len(head)
    return bad


def verify(p: RingMatrix, q_mode: QMode = "generic", n: Optional[int] = None, unicode: bool = False) -> Certificate:
    """
    Точные проверки идемпотента над B.

    Args:
        p: квадратная матрица над BRing
        q_mode: "generic" или рациональное значение q
        n: заряд, если p = p_n (только для отчёта)
        unicode: печать элементов символами α, β

    Returns:
        Certificate: именованные проверки с числом ненулевых термов невязки
    """
    mode = q_mode_text(q_mode)
    q0 = None if mode == "generic" else Fraction(q_mode)
    started = time.perf_counter()
    square = _idempotency_residuals(p, q0)
    star_gap = mat_sub(mat_star(p), p)
    if q0 is not None:
        star_gap = specialize_matrix(star_gap, q0)
        p = specialize_matrix(p, q0)
    checks = {
        "idempotent": CheckResult(not any(square), sum(square)),
        "star_invariant": CheckResult(*_zero_report(star_gap)),
        "boundary_scalar": CheckResult(*_passed(_boundary_residual(p))),
        "left_piece_constant": CheckResult(*_passed(_left_constant_residual(p))),
    }
    logger.info(f"Проверка p (n={n}, q={mode}) заняла {time.perf_counter() - started:.2f} с: "
                + ", ".join(f"{k}={v.passed}" for k, v in checks.items()))
    return Certificate(n=n, q_mode=mode, checks=checks, entries=[x.to_text(unicode) for _, _, x in p.entries()])


def _passed(residual: int) -> Tuple[bool, int]:
    return residual == 0, residual


def _zero_report(x: RingMatrix) -> Tuple[bool, int]:
    return _passed(sum(entry.term_count() for _, _, entry in x.entries()))


def _substitute(value: HElement, alpha0: complex, beta0: complex) -> complex:
    alpha_bar, beta_bar = alpha0.conjugate(), beta0.conjugate()
    total = 0j
    for mono, coeff in sorted(value.terms.items()):
        base = alpha0 ** mono.k if mono.k >= 0 else alpha_bar ** (-mono.k)
        total += float(coeff.constant_term()) * base * beta0 ** mono.b * beta_bar ** mono.c
    return total


def classical_fiber(p: RingMatrix, t0, alpha0: complex, beta0: complex) -> np.ndarray:
    """
    Численная матрица p(t₀) в точке (α₀, β₀) ∈ S³ при q = 1.

    При q = 1 алгебра коммутативна, и подстановка α ↦ α₀, α* ↦ conj(α₀),
    β ↦ β₀, β* ↦ conj(β₀) является гомоморфизмом.
    """
    alpha0, beta0 = complex(alpha0), complex(beta0)
    radius = abs(alpha0) ** 2 + abs(beta0) ** 2
    if abs(radius - 1.0) > 1e-12:
        raise NotOnSphereError(f"|α₀|² + |β₀|² = {radius!r} ≠ 1")
    out = np.zeros((p.n, p.n), dtype=complex)
    for i, j, entry in p.entries():
        out[i, j] = _substitute(eval_q(b_eval(entry, t0), 1), alpha0, beta0)
    return out
