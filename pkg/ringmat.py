"""
Матрицы над абстрактным кольцом.

Здесь же подъём по лемме Уайтхеда и блочная формула идемпотента склейки
Милнора; всё работает над любым кольцом с интерфейсом Ring
(целые, рациональные, комплексные числа, HElement, BPoly).
"""
import logging
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence, Tuple

logger = logging.getLogger(__name__)


class DimensionMismatchError(ValueError):
    """Несовпадение размеров (или колец) матриц."""


class StarUnavailableError(TypeError):
    """У кольца нет инволюции."""


class Ring:
    """
    Интерфейс кольца: add, mul, neg, zero, one, eq и необязательная star.

    По умолчанию операции делегируются операторам Python, поэтому конкретным
    кольцам достаточно задать zero/one и, при наличии, star.
    """

    name = "ring"
    has_star = False

    def add(self, x, y):
        return x + y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def eq(self, x, y) -> bool:
        return x == y

    def star(self, x):
        raise StarUnavailableError(f"Кольцо {self.name} не имеет инволюции")

    def from_int(self, value: int):
        """Образ целого числа value·1."""
        result = self.zero()
        base = self.one() if value >= 0 else self.neg(self.one())
        value = abs(value)
        while value:
            if value & 1:
                result = self.add(result, base)
            base = self.add(base, base)
            value >>= 1
        return result

    def __repr__(self) -> str:
        return f"<Ring {self.name}>"


class IntegerRing(Ring):
    name = "Z"
    has_star = True

    def zero(self):
        return 0

    def one(self):
        return 1

    def star(self, x):
        return x

    def from_int(self, value: int):
        return value


class RationalRing(IntegerRing):
    name = "Q"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, value: int):
        return Fraction(value)


class ComplexRing(Ring):
    name = "C"
    has_star = True

    def zero(self):
        return 0j

    def one(self):
        return 1 + 0j

    def star(self, x):
        return complex(x).conjugate()

    def from_int(self, value: int):
        return complex(value)

    def eq(self, x, y) -> bool:
        return abs(x - y) <= 1e-12


INTEGERS = IntegerRing()
RATIONALS = RationalRing()
COMPLEX = ComplexRing()


class RingMatrix:
    """Квадратная матрица n×n над кольцом ring; значение неизменяемо."""

    __slots__ = ("ring", "n", "_rows")

    def __init__(self, ring: Ring, rows: Sequence[Sequence[Any]]):
        rows = tuple(tuple(row) for row in rows)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise DimensionMismatchError(f"Матрица не квадратная: строки длины {[len(r) for r in rows]}")
        self.ring = ring
        self.n = n
        self._rows = rows

    @classmethod
    def from_rows(cls, ring: Ring, rows: Iterable[Iterable[Any]]) -> "RingMatrix":
        return cls(ring, [list(row) for row in rows])

    @property
    def rows(self) -> Tuple[Tuple[Any, ...], ...]:
        return self._rows

    def __getitem__(self, index: Tuple[int, int]):
        i, j = index
        return self._rows[i][j]

    def entries(self) -> Iterable[Tuple[int, int, Any]]:
        for i, row in enumerate(self._rows):
            for j, value in enumerate(row):
                yield i, j, value

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        return mat_add(self, other)

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        return mat_sub(self, other)

    def __neg__(self) -> "RingMatrix":
        return mat_neg(self)

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        return mat_mul(self, other)

    def __pow__(self, exponent: int) -> "RingMatrix":
        return mat_pow(self, exponent)

    def star(self) -> "RingMatrix":
        return mat_star(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingMatrix):
            return NotImplemented
        if self.n != other.n:
            return False
        eq = self.ring.eq
        return all(eq(a, b) for ra, rb in zip(self._rows, other._rows) for a, b in zip(ra, rb))

    def __hash__(self) -> int:
        return hash((self.n, self._rows))

    def __repr__(self) -> str:
        return f"RingMatrix[{self.ring.name}]({[list(r) for r in self._rows]})"


def _check_pair(x: RingMatrix, y: RingMatrix) -> None:
    if x.n != y.n:
        raise DimensionMismatchError(f"Размеры матриц не совпадают: {x.n} и {y.n}")
    if type(x.ring) is not type(y.ring):
        raise DimensionMismatchError(f"Матрицы над разными кольцами: {x.ring.name} и {y.ring.name}")


def identity(ring: Ring, n: int) -> RingMatrix:
    zero, one = ring.zero(), ring.one()
    return RingMatrix(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])


def zeros(ring: Ring, n: int) -> RingMatrix:
    zero = ring.zero()
    return RingMatrix(ring, [[zero] * n for _ in range(n)])


def diagonal(ring: Ring, values: Sequence[Any]) -> RingMatrix:
    zero = ring.zero()
    n = len(values)
    return RingMatrix(ring, [[values[i] if i == j else zero for j in range(n)] for i in range(n)])


def scalar_matrix(ring: Ring, n: int, value: int) -> RingMatrix:
    """value·I_n для целого value."""
    return diagonal(ring, [ring.from_int(value)] * n)


def mat_add(x: RingMatrix, y: RingMatrix) -> RingMatrix:
    _check_pair(x, y)
    add = x.ring.add
    return RingMatrix(x.ring, [[add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(x.rows, y.rows)])


def mat_neg(x: RingMatrix) -> RingMatrix:
    neg = x.ring.neg
    return RingMatrix(x.ring, [[neg(a) for a in row] for row in x.rows])


def mat_sub(x: RingMatrix, y: RingMatrix) -> RingMatrix:
    return mat_add(x, mat_neg(y))


def mat_mul(x: RingMatrix, y: RingMatrix) -> RingMatrix:
    _check_pair(x, y)
    ring = x.ring
    n = x.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            total = ring.zero()
            for k in range(n):
                total = ring.add(total, ring.mul(x[i, k], y[k, j]))
            row.append(total)
        rows.append(row)
    return RingMatrix(ring, rows)


def mat_star(x: RingMatrix) -> RingMatrix:
    """Транспонирование с инволюцией элементов."""
    if not x.ring.has_star:
        raise StarUnavailableError(f"Кольцо {x.ring.name} не имеет инволюции")
    star = x.ring.star
    return RingMatrix(x.ring, [[star(x[j, i]) for j in range(x.n)] for i in range(x.n)])


def mat_pow(x: RingMatrix, exponent: int) -> RingMatrix:
    if exponent < 0:
        raise ValueError("Отрицательные степени не вычисляются: подъёмы задаются явно")
    result = identity(x.ring, x.n)
    base = x
    while exponent:
        if exponent & 1:
            result = mat_mul(result, base)
        exponent >>= 1
        if exponent:
            base = mat_mul(base, base)
    return result


def apply_hom(x: RingMatrix, fn: Callable[[Any], Any], target: Ring) -> RingMatrix:
    """Поэлементное применение гомоморфизма колец fn: ring → target."""
    return RingMatrix(target, [[fn(a) for a in row] for row in x.rows])


def block(a: RingMatrix, b: RingMatrix, c: RingMatrix, d: RingMatrix) -> RingMatrix:
    """Сборка [[a, b], [c, d]] из четырёх блоков N×N."""
    for other in (b, c, d):
        _check_pair(a, other)
    rows = [list(ra) + list(rb) for ra, rb in zip(a.rows, b.rows)]
    rows += [list(rc) + list(rd) for rc, rd in zip(c.rows, d.rows)]
    return RingMatrix(a.ring, rows)


def sub_block(x: RingMatrix, i: int, j: int) -> RingMatrix:
    """Блок (i, j) ∈ {0,1}² матрицы размера 2N."""
    if x.n % 2:
        raise DimensionMismatchError(f"Матрица размера {x.n} не делится на блоки 2×2")
    size = x.n // 2
    return RingMatrix(x.ring, [row[j * size:(j + 1) * size] for row in x.rows[i * size:(i + 1) * size]])


def elementary_factors(c: RingMatrix, d: RingMatrix) -> Tuple[RingMatrix, ...]:
    """
    Разложение Уайтхеда: [[1,c],[0,1]]·[[1,0],[−d,1]]·[[1,c],[0,1]]·[[0,−1],[1,0]].
    """
    _check_pair(c, d)
    ring, n = c.ring, c.n
    one, zero = identity(ring, n), zeros(ring, n)
    upper = block(one, c, zero, one)
    lower = block(one, zero, mat_neg(d), one)
    rotation = block(zero, mat_neg(one), one, zero)
    return upper, lower, upper, rotation


def whitehead_lift(c: RingMatrix, d: RingMatrix) -> Tuple[RingMatrix, RingMatrix]:
    """
    Обратимые подъёмы C, D ∈ M_{2N} по лемме Уайтхеда.

    Args:
        c: подъём обратимой матрицы
        d: подъём обратной к ней

    Returns:
        (C, D): C = [[(2−cd)c, cd−1], [1−dc, d]], D = [[d, 1−dc], [cd−1, (2−cd)c]];
        C·D = D·C = I без каких-либо условий на c, d
    """
    _check_pair(c, d)
    ring, n = c.ring, c.n
    one, two = identity(ring, n), scalar_matrix(ring, n, 2)
    cd, dc = mat_mul(c, d), mat_mul(d, c)
    corner = mat_mul(mat_sub(two, cd), c)
    big_c = block(corner, mat_sub(cd, one), mat_sub(one, dc), d)
    big_d = block(d, mat_sub(one, dc), mat_sub(cd, one), corner)
    return big_c, big_d


def milnor_block(c: RingMatrix, d: RingMatrix) -> RingMatrix:
    """
    Вторая компонента идемпотента склейки:
    Q = [[c(2−dc)d, c(2−dc)(1−dc)], [(1−dc)d, (1−dc)²]].
    """
    _check_pair(c, d)
    ring, n = c.ring, c.n
    one, two = identity(ring, n), scalar_matrix(ring, n, 2)
    dc = mat_mul(d, c)
    logger.debug(f"milnor_block: N={n}, кольцо {ring.name}")
    head = mat_mul(c, mat_sub(two, dc))
    tail = mat_sub(one, dc)
    return block(mat_mul(head, d), mat_mul(head, tail), mat_mul(tail, d), mat_mul(tail, tail))


def corner_projection(ring: Ring, n: int) -> RingMatrix:
    """E = diag(I_N, 0) размера 2N."""
    return block(identity(ring, n), zeros(ring, n), zeros(ring, n), zeros(ring, n))


def milnor_block_via_lift(c: RingMatrix, d: RingMatrix) -> RingMatrix:
    """Тот же Q, собранный как C·diag(I_N, 0)·D."""
    big_c, big_d = whitehead_lift(c, d)
    return mat_mul(mat_mul(big_c, corner_projection(c.ring, c.n)), big_d)


def free_module_block(ring: Ring, n: int) -> RingMatrix:
    """Случай обратимого подъёма: d·c = c·d = 1 и Q = diag(I_N, 0)."""
    return corner_projection(ring, n)
