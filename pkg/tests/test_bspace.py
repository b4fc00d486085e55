import cmath
from fractions import Fraction

import numpy as np
import pytest

from bspace import (
    B_RING,
    BPoly,
    ContinuityError,
    NotOnSphereError,
    OutOfRangeError,
    b_eval,
    b_mul,
    b_star,
    classical_fiber,
    corner_matrix,
    glue_point,
    in_fiber_product,
    instanton_idempotent,
    lift_alpha,
    lift_beta,
    make_lifts,
    restrict,
    specialize,
    specialize_matrix,
    verify,
)
from config import Config
from qalgebra import (
    ALPHA,
    BETA,
    BETA_STAR,
    H_RING,
    BudgetExceededError,
    HElement,
    eval_q,
    h_mul,
    random_element,
    unitary_power,
    unitary_u,
)
from ringmat import RingMatrix, identity, mat_mul, mat_star, mat_sub

HALF = Fraction(1, 2)


def _evaluate(matrix: RingMatrix, t0) -> RingMatrix:
    return RingMatrix(H_RING, [[b_eval(x, t0) for x in row] for row in matrix.rows])


def _random_bpoly(rng):
    # непрерывность в ½ достигается сдвигом правого куска на константу
    left = [random_element(rng, max_degree=2, max_terms=2) for _ in range(rng.randint(1, 2))]
    right = [random_element(rng, max_degree=2, max_terms=2) for _ in range(rng.randint(1, 2))]
    gap = b_eval(BPoly(left, left), HALF) - b_eval(BPoly(right, right), HALF)
    right[0] = right[0] + gap
    return BPoly(left, right)


def test_lift_endpoints():
    assert b_eval(lift_alpha(), 0) == ALPHA
    assert b_eval(lift_alpha(), 1) == 1
    assert b_eval(lift_beta(), Fraction(3, 4)) == h_mul(HElement.scalar(HALF), BETA)
    for t0 in (Fraction(0), Fraction(1, 7), Fraction(1, 3), HALF):
        assert b_eval(lift_alpha(), t0) == ALPHA


def test_continuity_is_enforced():
    with pytest.raises(ContinuityError):
        BPoly((ALPHA,), (BETA,))
    BPoly((ALPHA,), (ALPHA,))


def test_eval_out_of_range():
    with pytest.raises(OutOfRangeError):
        b_eval(lift_alpha(), Fraction(3, 2))
    with pytest.raises(OutOfRangeError):
        b_eval(lift_alpha(), -1)


def test_product_commutes_with_evaluation(rng):
    for _ in range(10):
        x, y = _random_bpoly(rng), _random_bpoly(rng)
        product = b_mul(x, y)
        for _ in range(20):
            t0 = Fraction(rng.randint(0, 60), 60)
            assert b_eval(product, t0) == b_eval(x, t0) * b_eval(y, t0)


def test_one_is_multiplicative_unit(rng):
    x = _random_bpoly(rng)
    assert b_mul(BPoly.one(), x) == x
    assert b_mul(x, BPoly.one()) == x


def test_restrictions_and_glue_point():
    a = lift_alpha()
    assert restrict(a, 0) == (ALPHA,)
    assert len(restrict(a, 1)) == 2
    assert glue_point(a) == ALPHA
    with pytest.raises(ValueError):
        restrict(a, 2)


def test_fiber_product_membership():
    assert not in_fiber_product(lift_alpha())
    assert in_fiber_product(BPoly.scalar(3))
    assert all(in_fiber_product(x) for _, _, x in instanton_idempotent(1).entries())


def test_star_of_lifts():
    assert b_eval(b_star(lift_beta()), Fraction(3, 4)) == h_mul(HElement.scalar(HALF), BETA_STAR)


def test_make_lifts_trivial_charge():
    c0, d0 = make_lifts(0)
    assert c0 == identity(B_RING, 2)
    assert d0 == identity(B_RING, 2)


def test_make_lifts_reproduce_unitary_on_left_piece():
    c1, _ = make_lifts(1)
    assert _evaluate(c1, HALF) == unitary_u()
    c2, d2 = make_lifts(2)
    for t0 in (Fraction(0), Fraction(1, 4), HALF):
        assert _evaluate(c2, t0) == unitary_power(2)
        assert _evaluate(d2, t0) == unitary_power(-2)
        assert mat_mul(_evaluate(d2, t0), _evaluate(c2, t0)) == identity(H_RING, 2)
    assert _evaluate(c2, 1) == identity(H_RING, 2)
    assert _evaluate(d2, 1) == identity(H_RING, 2)


def test_zero_charge_is_constant_corner():
    assert instanton_idempotent(0) == corner_matrix()


@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
def test_idempotent_exactly(n):
    p = instanton_idempotent(n)
    assert mat_mul(p, p) == p


@pytest.mark.slow
@pytest.mark.parametrize("n", [-3, 3])
def test_idempotent_exactly_charge_three(n):
    p = instanton_idempotent(n)
    assert mat_mul(p, p) == p


@pytest.mark.parametrize("n", [-2, -1, 1, 2])
def test_left_piece_and_endpoints_are_corner(n):
    p = instanton_idempotent(n)
    corner = _evaluate(corner_matrix(), 0)
    for t0 in (Fraction(0), Fraction(1, 5), HALF, Fraction(1)):
        assert _evaluate(p, t0) == corner
    assert all(len(x.left) <= 1 for _, _, x in p.entries())


def test_negative_charge_uses_swapped_formula():
    c, d = make_lifts(1)
    p = instanton_idempotent(-1)
    two = RingMatrix(B_RING, [[BPoly.scalar(2), BPoly.zero()], [BPoly.zero(), BPoly.scalar(2)]])
    # левый верхний блок: d(2 − cd)c
    upper_left = mat_mul(mat_mul(d, two - mat_mul(c, d)), c)
    assert [[p[i, j] for j in range(2)] for i in range(2)] == [list(row) for row in upper_left.rows]


def test_verify_trivial_corner():
    certificate = verify(corner_matrix())
    assert all(check.passed for check in certificate.checks.values())
    assert certificate.passed


def test_verify_charge_one():
    certificate = verify(instanton_idempotent(1), n=1)
    assert certificate.checks["idempotent"].passed
    assert certificate.checks["idempotent"].residual_terms == 0
    assert certificate.checks["boundary_scalar"].passed
    assert certificate.checks["left_piece_constant"].passed
    assert not certificate.checks["star_invariant"].passed
    assert certificate.checks["star_invariant"].residual_terms > 0
    assert certificate.passed


def test_star_residual_lives_on_right_piece():
    p = instanton_idempotent(1)
    gap = mat_star(p) - p
    assert all(not x.left for _, _, x in gap.entries())
    assert any(x.right for _, _, x in gap.entries())


def test_products_do_not_commute_with_specialization():
    # множители перестановки q^e не подставляются в уже специализированные элементы
    half = Fraction(1, 2)
    assert eval_q(h_mul(BETA, ALPHA), half) == h_mul(HElement.scalar(2), ALPHA * BETA)
    assert h_mul(eval_q(BETA, half), eval_q(ALPHA, half)) != eval_q(h_mul(BETA, ALPHA), half)


@pytest.mark.parametrize("q0", [Fraction(1, 2), Fraction(3, 7), Fraction(-2), Fraction(1)])
@pytest.mark.parametrize("n", [-1, 1, 2])
def test_verify_at_rational_q(n, q0):
    certificate = verify(instanton_idempotent(n), q0, n=n)
    assert certificate.q_mode == str(q0)
    assert certificate.checks["idempotent"].passed
    assert certificate.checks["idempotent"].residual_terms == 0
    assert certificate.checks["boundary_scalar"].passed
    assert certificate.checks["left_piece_constant"].passed
    assert certificate.passed


def test_rational_star_residual_is_specialized_generic_residual():
    p = instanton_idempotent(1)
    half = Fraction(1, 2)
    gap = specialize_matrix(mat_sub(mat_star(p), p), half)
    expected = sum(entry.term_count() for _, _, entry in gap.entries())
    certificate = verify(p, half, n=1)
    assert certificate.checks["star_invariant"].residual_terms == expected
    assert not certificate.checks["star_invariant"].passed


def test_rational_entries_are_printed_specialized():
    p = instanton_idempotent(1)
    half = Fraction(1, 2)
    entries = verify(p, half, n=1).entries
    assert entries == [specialize(x, half).to_text() for _, _, x in p.entries()]
    assert all("q" not in text for text in entries)


def test_budget_applies_to_cached_idempotent(monkeypatch):
    instanton_idempotent(1)
    monkeypatch.setattr(Config, "MAX_TERMS", 1)
    with pytest.raises(BudgetExceededError):
        instanton_idempotent(1)


def test_verify_detects_non_idempotent():
    two = RingMatrix(B_RING, [[BPoly.scalar(2)]])
    certificate = verify(two)
    assert not certificate.checks["idempotent"].passed
    assert not certificate.passed


def test_certificate_serialization():
    payload = verify(instanton_idempotent(0), n=0).to_dict()
    assert payload["schema_version"] == Config.SCHEMA_VERSION
    assert payload["checks"]["idempotent"] == {"pass": True, "residual_terms": 0}
    assert len(payload["entries"]) == 16
    assert payload["entries"][0] == "[0,1/2]: (1); [1/2,1]: (1)"
    assert list(payload["checks"]) == sorted(payload["checks"])


def test_parallel_verification_matches_serial(monkeypatch):
    serial = verify(instanton_idempotent(1), n=1).to_dict()
    monkeypatch.setattr(Config, "WORKERS", 2)
    assert verify(instanton_idempotent(1), n=1).to_dict() == serial


def _sphere_point(rng):
    v = np.array([rng.gauss(0, 1) for _ in range(4)])
    v /= np.linalg.norm(v)
    return complex(v[0], v[1]), complex(v[2], v[3])


def test_classical_fiber_corner_values(rng):
    alpha0, beta0 = _sphere_point(rng)
    corner = np.diag([1, 1, 0, 0]).astype(complex)
    assert np.allclose(classical_fiber(instanton_idempotent(0), Fraction(2, 3), alpha0, beta0), corner)
    assert np.allclose(classical_fiber(instanton_idempotent(1), Fraction(1, 4), alpha0, beta0), corner)


def test_classical_fiber_example_point():
    fiber = classical_fiber(instanton_idempotent(2), Fraction(3, 4), Fraction(3, 5), 0.8j)
    assert np.allclose(fiber @ fiber, fiber, atol=1e-10)
    assert np.trace(fiber).real == pytest.approx(2.0, abs=1e-10)
    eigenvalues = np.sort(np.linalg.eigvals(fiber).real)
    assert np.allclose(eigenvalues, [0, 0, 1, 1], atol=1e-8)


@pytest.mark.parametrize("samples", [20, pytest.param(100, marks=pytest.mark.slow)])
@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
def test_classical_fiber_is_rank_two(rng, n, samples):
    p = instanton_idempotent(n)
    for _ in range(samples):
        t0 = Fraction(rng.randint(0, 100), 100)
        fiber = classical_fiber(p, t0, *_sphere_point(rng))
        assert np.allclose(fiber @ fiber, fiber, atol=1e-10)
        assert abs(np.trace(fiber) - 2) < 1e-10
        eigenvalues = np.linalg.eigvals(fiber)
        assert all(min(abs(ev), abs(ev - 1)) < 1e-8 for ev in eigenvalues)


def test_classical_fiber_rejects_off_sphere_point():
    with pytest.raises(NotOnSphereError):
        classical_fiber(instanton_idempotent(1), HALF, 1.0, 0.5)
    with pytest.raises(NotOnSphereError):
        classical_fiber(instanton_idempotent(1), HALF, cmath.exp(0.3j) * 1.000001, 0)
