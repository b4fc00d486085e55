"""
Численные спаривания K-теории.

Усечённое представление O(SU_q(2)) на ℓ²(N) ⊗ ℓ²(Z), оператор знака F,
нечётное спаривание Черна для унитарных матриц над H, унитарный элемент V
и классическая степень отображения θ^(n): S³ → SU(2).
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from bspace import NotOnSphereError
from config import Config
from qalgebra import HElement, PBWMonomial, unitarity_residual, unitary_power, unitary_u
from ringmat import RingMatrix, mat_star

logger = logging.getLogger(__name__)


class NonUnitaryError(ValueError):
    """Матрица не унитарна над H."""


class WindowTooSmallError(ValueError):
    """Окно по n слишком мало для точного усечения."""

    def __init__(self, required: int, actual: int):
        super().__init__(f"Окно N={actual} мало, требуется N ≥ {required}")
        self.required = required
        self.actual = actual


class ResolutionTooSmallError(ValueError):
    """Сетка для интеграла степени слишком грубая."""


MIN_RESOLUTION = 4


class TruncRep:
    """
    Представление π на базисе e_{m,n}, 0 ≤ m ≤ M, −N ≤ n ≤ N.

    π(α)e_{m,n} = λ_m e_{m−1,n}, π(α*)e_{m,n} = λ_{m+1} e_{m+1,n},
    π(β)e_{m,n} = q^m e_{m,n+1}, π(β*)e_{m,n} = q^m e_{m,n−1}, λ_m = (1 − q^{2m})^{1/2}.
    Векторы, выходящие из окна, отбрасываются.
    """

    def __init__(self, q0: float, M: int = Config.DEFAULT_M, N: int = 8):
        if not 0.0 < q0 < 1.0:
            raise ValueError(f"q₀ должно лежать в (0, 1), получено {q0}")
        if M < 1 or N < 1:
            raise ValueError(f"Некорректное усечение M={M}, N={N}")
        self.q0 = float(q0)
        self.M = M
        self.N = N
        self.width = 2 * N + 1
        self.dim = (M + 1) * self.width
        self.lam = np.sqrt(1.0 - self.q0 ** (2 * np.arange(M + 2)))
        m, n = np.meshgrid(np.arange(M + 1), np.arange(-N, N + 1), indexing="ij")
        self.m_values = m.ravel()
        self.n_values = n.ravel()
        self._generators = self._build_generators()
        self._powers: Dict[Tuple[str, int], sparse.csr_matrix] = {}
        logger.debug(f"TruncRep: q₀={q0}, M={M}, N={N}, размерность {self.dim}")

    def index(self, m: int, n: int) -> int:
        return m * self.width + (n + self.N)

    def _shift(self, dm: int, dn: int, weights: np.ndarray) -> sparse.csr_matrix:
        m2, n2 = self.m_values + dm, self.n_values + dn
        keep = (m2 >= 0) & (m2 <= self.M) & (np.abs(n2) <= self.N) & (weights != 0)
        rows = m2[keep] * self.width + (n2[keep] + self.N)
        cols = np.flatnonzero(keep)
        return sparse.csr_matrix((weights[keep], (rows, cols)), shape=(self.dim, self.dim))

    def _build_generators(self) -> Dict[str, sparse.csr_matrix]:
        decay = self.q0 ** self.m_values
        return {
            "a": self._shift(-1, 0, self.lam[self.m_values]),
            "A": self._shift(1, 0, self.lam[self.m_values + 1]),
            "b": self._shift(0, 1, decay),
            "B": self._shift(0, -1, decay),
        }

    def identity(self) -> sparse.csr_matrix:
        return sparse.identity(self.dim, format="csr")

    def power(self, letter: str, exponent: int) -> sparse.csr_matrix:
        key = (letter, exponent)
        if key not in self._powers:
            result = self.identity()
            for _ in range(exponent):
                result = result @ self._generators[letter]
            self._powers[key] = result.tocsr()
        return self._powers[key]

    def monomial(self, mono: PBWMonomial) -> sparse.csr_matrix:
        head = self.power("a", mono.k) if mono.k >= 0 else self.power("A", -mono.k)
        return head @ self.power("b", mono.b) @ self.power("B", mono.c)

    def sign(self) -> np.ndarray:
        return np.where(self.n_values >= 0, 1.0, -1.0)


class TruncOp:
    """Разреженный оператор на C^r ⊗ (усечённое ℓ²), r блоков."""

    __slots__ = ("matrix", "rep", "blocks")

    def __init__(self, matrix, rep: TruncRep, blocks: int = 1):
        if matrix.shape != (blocks * rep.dim, blocks * rep.dim):
            raise ValueError(f"Форма {matrix.shape} не соответствует {blocks} блокам размерности {rep.dim}")
        self.matrix = sparse.csr_matrix(matrix)
        self.rep = rep
        self.blocks = blocks

    def _wrap(self, matrix) -> "TruncOp":
        return TruncOp(matrix, self.rep, self.blocks)

    def __add__(self, other: "TruncOp") -> "TruncOp":
        return self._wrap(self.matrix + other.matrix)

    def __sub__(self, other: "TruncOp") -> "TruncOp":
        return self._wrap(self.matrix - other.matrix)

    def __neg__(self) -> "TruncOp":
        return self._wrap(-self.matrix)

    def __matmul__(self, other: "TruncOp") -> "TruncOp":
        return self._wrap(self.matrix @ other.matrix)

    def scale(self, value: float) -> "TruncOp":
        return self._wrap(self.matrix * value)

    def adjoint(self) -> "TruncOp":
        return self._wrap(self.matrix.conj().T)

    def identity(self) -> "TruncOp":
        return self._wrap(sparse.identity(self.matrix.shape[0], format="csr"))

    def trace(self) -> float:
        """След с компенсированным суммированием в фиксированном порядке базиса."""
        return math.fsum(np.real(self.matrix.diagonal()))

    def image(self, m: int, n: int, block: int = 0) -> Dict[Tuple[int, int, int], float]:
        """Образ базисного вектора e_{m,n} в блоке block: {(блок, m′, n′): коэффициент}."""
        column = self.matrix[:, block * self.rep.dim + self.rep.index(m, n)].tocoo()
        out = {}
        for row, value in zip(column.row, column.data):
            if value != 0:
                b, local = divmod(int(row), self.rep.dim)
                m2, n2 = divmod(local, self.rep.width)
                out[(b, m2, n2 - self.rep.N)] = value
        return out

    def max_abs(self) -> float:
        return float(abs(self.matrix).max()) if self.matrix.nnz else 0.0


def rep_of(x: HElement, rep: TruncRep) -> TruncOp:
    """π(x) с коэффициентами, вычисленными при q = q₀."""
    total = sparse.csr_matrix((rep.dim, rep.dim))
    for mono, coeff in sorted(x.terms.items()):
        value = coeff.evaluate(rep.q0)
        if value:
            total = total + value * rep.monomial(mono)
    return TruncOp(total, rep)


def rep_of_matrix(u: RingMatrix, rep: TruncRep) -> TruncOp:
    """Блочный оператор π(u) на C^r ⊗ ℓ²."""
    grid = [[rep_of(u[i, j], rep).matrix for j in range(u.n)] for i in range(u.n)]
    return TruncOp(sparse.bmat(grid, format="csr"), rep, u.n)


def sign_f(rep: TruncRep, blocks: int = 1) -> TruncOp:
    """F̃ = diag(F, …, F), F e_{m,n} = sign(n) e_{m,n}, sign(0) = +1."""
    diag = sparse.diags(np.tile(rep.sign(), blocks), format="csr")
    return TruncOp(diag, rep, blocks)


def commutator_f(x: TruncOp) -> TruncOp:
    f = sign_f(x.rep, x.blocks)
    return f @ x - x @ f


def e_zero(rep: TruncRep) -> TruncOp:
    """Спектральный проектор β*β на {0}: e(0)e_{m,n} = δ_{m,0} e_{m,n}."""
    return TruncOp(sparse.diags((rep.m_values == 0).astype(float), format="csr"), rep)


def v_unitary(rep: TruncRep) -> TruncOp:
    """V = β e(0) + (1 − e(0)): сдвиг по n на слое m = 0."""
    projector = e_zero(rep)
    beta = rep_of(HElement.generator("b"), rep)
    return beta @ projector + (projector.identity() - projector)


def required_window(k: int, degree: int) -> int:
    """Минимальное N, при котором усечение по n не влияет на след."""
    return 2 * (k + 2) * (degree + 1)


def cutoff_for_tolerance(q0: float, tol: float) -> int:
    """Наименьшее M с q₀^{2M} ≤ tol/100, но не меньше значения по умолчанию."""
    if tol <= 0:
        raise ValueError(f"tol должно быть положительным, получено {tol}")
    needed = math.ceil(math.log(tol / 100.0) / (2.0 * math.log(q0)))
    return max(Config.DEFAULT_M, needed)


def _pairing_trace(u: TruncOp, u_inv: TruncOp, k: int) -> float:
    # ориентация, в которой [U] имеет заряд −1:
    # Tr((u − 1)[F̃, u⁻¹]([F̃, u][F̃, u⁻¹])^k)
    comm_u, comm_inv = commutator_f(u), commutator_f(u_inv)
    product = (u - u.identity()) @ comm_inv
    square = comm_u @ comm_inv
    for _ in range(k):
        product = product @ square
    return product.trace()


def _normalize(trace: float, k: int) -> float:
    return (-1) ** k * 2.0 ** -(2 * k + 1) * trace


def _check_window(rep: TruncRep, k: int, degree: int) -> None:
    required = required_window(k, degree)
    if rep.N < required:
        raise WindowTooSmallError(required, rep.N)


def _matrix_degree(u: RingMatrix) -> int:
    return max(entry.beta_degree() for _, _, entry in u.entries())


def odd_pairing(u: RingMatrix, k: int, rep: TruncRep) -> float:
    """
    Нечётное спаривание Черна ⟨[u], ch_odd⟩ для унитарной матрицы над H.

    Args:
        u: унитарная матрица над HRing (проверяется символьно)
        k: неотрицательный индекс формулы следа
        rep: усечённое представление; окно по n должно быть не меньше required_window

    Returns:
        float: (−1)^k 2^{−(2k+1)} · усечённый след
    """
    if k < 0:
        raise ValueError(f"k должно быть неотрицательным, получено {k}")
    residual = unitarity_residual(u)
    if residual:
        raise NonUnitaryError(f"u*u − I и uu* − I содержат {residual} ненулевых мономов")
    _check_window(rep, k, _matrix_degree(u))
    started = time.perf_counter()
    trace = _pairing_trace(rep_of_matrix(u, rep), rep_of_matrix(mat_star(u), rep), k)
    logger.debug(f"След для r={u.n}, k={k}, M={rep.M}, N={rep.N}: {trace!r} "
                 f"за {time.perf_counter() - started:.2f} с")
    return _normalize(trace, k)


def v_pairing(k: int, rep: TruncRep) -> float:
    """Спаривание для V, заданного только как оператор."""
    _check_window(rep, k, 1)
    v = v_unitary(rep)
    return _normalize(_pairing_trace(v, v.adjoint(), k), k)


def trace_term(k: int, rep: TruncRep) -> float:
    """Усечённый след для U; в пределе M → ∞ равен (−1)^{k+1} 2^{2k+1}."""
    u = unitary_u()
    _check_window(rep, k, 1)
    return _pairing_trace(rep_of_matrix(u, rep), rep_of_matrix(mat_star(u), rep), k)


def closed_form_trace(k: int, q0: float, M: int) -> float:
    """Σ_{m=0}^{M} (−1)^k 2^{2k+1} q₀^{2km+2m}(q₀^{2k+2} − 1)."""
    sign = (-1) ** k * 2.0 ** (2 * k + 1)
    tail = q0 ** (2 * k + 2) - 1.0
    return math.fsum(sign * q0 ** ((2 * k + 2) * m) * tail for m in range(M + 1))


def commutator_square_blocks(rep: TruncRep) -> Tuple[TruncOp, TruncOp]:
    """
    Обе стороны тождества [F̃, U][F̃, U*] = diag(−q²f*f, −ff*), f = [F, β].
    """
    u = unitary_u()
    lhs = commutator_f(rep_of_matrix(u, rep)) @ commutator_f(rep_of_matrix(mat_star(u), rep))
    f = commutator_f(rep_of(HElement.generator("b"), rep))
    f_star = f.adjoint()
    upper = (f_star @ f).scale(-rep.q0 ** 2).matrix
    lower = (f @ f_star).scale(-1.0).matrix
    rhs = TruncOp(sparse.block_diag([upper, lower], format="csr"), rep, 2)
    return lhs, rhs


@dataclass
class PairingReport:
    """Отчёт о спаривании для JSON и табличного вывода."""

    u_descriptor: str
    n: Optional[int]
    k: int
    q0: float
    M: int
    N: int
    value: float
    error_bound: float

    @property
    def nearest_integer(self) -> int:
        return int(round(self.value))

    def to_dict(self) -> Dict[str, object]:
        return {
            "u_descriptor": self.u_descriptor,
            "n": self.n,
            "k": self.k,
            "q0": self.q0,
            "M": self.M,
            "N": self.N,
            "value": self.value,
            "error_bound": self.error_bound,
            "nearest_integer": self.nearest_integer,
        }


def truncation_error_bound(q0: float, M: int, blocks: int, degree: int) -> float:
    """Оценка хвоста Σ_{m>M}: слагаемые следа затухают как q₀^{2m}."""
    return blocks * (degree + 1) * q0 ** (2 * (M + 1)) / (1.0 - q0 ** 2)


def pairing_report(descriptor: str, k: int, q0: float, M: int, n: Optional[int] = None) -> PairingReport:
    """
    Спаривание для U^n или V с автоматическим выбором окна по n.

    Args:
        descriptor: "U^n" (n целое, допускается "U") или "V"
        k: индекс формулы следа
        q0: значение q в (0, 1)
        M: отсечка по m
        n: заряд; для "U^n" обязателен

    Returns:
        PairingReport
    """
    if descriptor == "V":
        rep = TruncRep(q0, M, required_window(k, 1))
        value = v_pairing(k, rep)
        return PairingReport("V", None, k, q0, M, rep.N, value, truncation_error_bound(q0, M, 1, 1))
    if n is None:
        raise ValueError(f"Для {descriptor} требуется степень n")
    u = unitary_power(n)
    degree = max(_matrix_degree(u), 1)
    rep = TruncRep(q0, M, required_window(k, degree))
    value = odd_pairing(u, k, rep)
    logger.info(f"⟨[U^{n}], ch_odd⟩ при k={k}, q₀={q0}, M={M}: {value:.12g}")
    return PairingReport(f"U^{n}", n, k, q0, M, rep.N, value, truncation_error_bound(q0, M, 2, degree))


# Классическая проверка: степень отображения S³ → SU(2)

_PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
_QUATERNION_UNITS = 1j * _PAULI


def _quaternion(x: np.ndarray) -> np.ndarray:
    """x₀I + iΣxⱼσⱼ для массива точек формы (..., 4)."""
    eye = np.eye(2, dtype=complex)
    return x[..., 0, None, None] * eye + np.einsum("...j,jab->...ab", x[..., 1:], _QUATERNION_UNITS)


def transition_function(n: int, x) -> np.ndarray:
    """θ^(n)(x) = (x₀ + iΣxⱼσⱼ)^n ∈ SU(2) для точки x ∈ S³."""
    x = np.asarray(x, dtype=float)
    radius = float(np.dot(x, x))
    if abs(radius - 1.0) > 1e-12:
        raise NotOnSphereError(f"|x|² = {radius!r} ≠ 1")
    g = _quaternion(x)
    if n < 0:
        g = g.conj().T
    return np.linalg.matrix_power(g, abs(n))


def _power_and_derivative(g: np.ndarray, dg: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """g^n и ∂(g^n) = Σ g^j (∂g) g^{n−1−j} поточечно."""
    power = np.broadcast_to(np.eye(2, dtype=complex), g.shape).copy()
    derivative = np.zeros_like(g)
    for _ in range(n):
        derivative = derivative @ g + power @ dg
        power = power @ g
    return power, derivative


def _sphere_grid(resolution: int):
    """Середины ячеек сетки (χ, θ, φ) ∈ (0, π) × (0, π) × (0, 2π) с осью x₁."""
    h = math.pi / resolution
    chi = (np.arange(resolution) + 0.5) * h
    theta = (np.arange(resolution) + 0.5) * h
    phi = (np.arange(2 * resolution) + 0.5) * h
    return np.meshgrid(chi, theta, phi, indexing="ij"), h ** 3


def winding_degree(n: int, resolution: int = Config.DEFAULT_RESOLUTION) -> float:
    """
    Степень отображения x ↦ θ^(n)(x) через (1/24π²)∫ tr((g⁻¹dg)³).

    Args:
        n: показатель степени
        resolution: число узлов по χ и θ (по φ вдвое больше)

    Returns:
        float: приближение к n; ошибка квадратуры средних точек O(resolution⁻²)
    """
    if resolution < MIN_RESOLUTION:
        raise ResolutionTooSmallError(f"resolution={resolution} < {MIN_RESOLUTION}")
    started = time.perf_counter()
    (chi, theta, phi), cell = _sphere_grid(resolution)
    sc, cc, st, ct, sp, cp = np.sin(chi), np.cos(chi), np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    zero = np.zeros_like(chi)
    point = np.stack([sc * st * sp, cc, sc * ct, sc * st * cp], axis=-1)
    tangents = (
        np.stack([cc * st * sp, -sc, cc * ct, cc * st * cp], axis=-1),
        np.stack([sc * ct * sp, zero, -sc * st, sc * ct * cp], axis=-1),
        np.stack([sc * st * cp, zero, zero, -sc * st * sp], axis=-1),
    )
    g = _quaternion(point)
    derivatives = [_quaternion(t) for t in tangents]
    if n < 0:
        g = np.conj(np.swapaxes(g, -1, -2))
        derivatives = [np.conj(np.swapaxes(d, -1, -2)) for d in derivatives]
    forms = []
    for dg in derivatives:
        power, dpower = _power_and_derivative(g, dg, abs(n))
        forms.append(np.conj(np.swapaxes(power, -1, -2)) @ dpower)
    a_chi, a_theta, a_phi = forms
    density = 3.0 * np.trace(a_chi @ (a_theta @ a_phi - a_phi @ a_theta), axis1=-2, axis2=-1)
    # карта (χ, θ, φ) обращает стандартную ориентацию S³
    integral = -math.fsum(np.real(density).ravel()) * cell
    degree = integral / (24.0 * math.pi ** 2)
    logger.debug(f"winding_degree(n={n}, R={resolution}) = {degree!r} за {time.perf_counter() - started:.2f} с")
    return degree
