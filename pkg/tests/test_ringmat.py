from fractions import Fraction

import pytest

from qalgebra import H_RING, unitary_power, unitary_u
from ringmat import (
    COMPLEX,
    INTEGERS,
    RATIONALS,
    DimensionMismatchError,
    Ring,
    RingMatrix,
    StarUnavailableError,
    apply_hom,
    block,
    corner_projection,
    elementary_factors,
    free_module_block,
    identity,
    mat_mul,
    mat_pow,
    mat_star,
    milnor_block,
    milnor_block_via_lift,
    sub_block,
    whitehead_lift,
)


class PlainIntegers(Ring):
    """Кольцо без инволюции."""

    name = "Z-plain"

    def zero(self):
        return 0

    def one(self):
        return 1


def _random_matrix(rng, ring, size, bound=3):
    return RingMatrix(ring, [[rng.randint(-bound, bound) for _ in range(size)] for _ in range(size)])


def test_whitehead_lift_scalar_example():
    c = RingMatrix(INTEGERS, [[2]])
    d = RingMatrix(INTEGERS, [[0]])
    big_c, big_d = whitehead_lift(c, d)
    assert big_c == RingMatrix(INTEGERS, [[4, -1], [1, 0]])
    assert big_d == RingMatrix(INTEGERS, [[0, 1], [-1, 4]])
    assert big_c @ big_d == identity(INTEGERS, 2)


def test_elementary_factors_multiply_to_lift(rng):
    for size in (1, 2):
        c, d = _random_matrix(rng, INTEGERS, size), _random_matrix(rng, INTEGERS, size)
        upper, lower, upper_again, rotation = elementary_factors(c, d)
        assert upper @ lower @ upper_again @ rotation == whitehead_lift(c, d)[0]


@pytest.mark.parametrize("size", [2, 3])
@pytest.mark.parametrize("trials", [50, pytest.param(1000, marks=pytest.mark.slow)])
def test_milnor_invariants_on_random_integer_matrices(rng, size, trials):
    one = identity(INTEGERS, 2 * size)
    for _ in range(trials):
        c, d = _random_matrix(rng, INTEGERS, size), _random_matrix(rng, INTEGERS, size)
        big_c, big_d = whitehead_lift(c, d)
        assert big_c @ big_d == one
        assert big_d @ big_c == one
        q = milnor_block(c, d)
        assert q @ q == q
        assert q == milnor_block_via_lift(c, d)


def test_invertible_lift_gives_corner_block():
    c = RingMatrix(INTEGERS, [[1, 1], [0, 1]])
    d = RingMatrix(INTEGERS, [[1, -1], [0, 1]])
    assert milnor_block(c, d) == free_module_block(INTEGERS, 2)
    assert free_module_block(INTEGERS, 2) == corner_projection(INTEGERS, 2)


def test_milnor_block_over_quantum_group():
    u = unitary_u()
    assert milnor_block(u, mat_star(u)) == free_module_block(H_RING, 2)


def test_rational_and_complex_rings():
    x = RingMatrix(RATIONALS, [[Fraction(1, 2), 1], [0, Fraction(2, 3)]])
    assert mat_pow(x, 2)[0, 1] == Fraction(7, 6)
    z = RingMatrix(COMPLEX, [[1j, 2], [0, 1]])
    assert mat_star(z) == RingMatrix(COMPLEX, [[-1j, 0], [2, 1]])


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        mat_mul(identity(INTEGERS, 2), identity(INTEGERS, 3))
    with pytest.raises(DimensionMismatchError):
        RingMatrix(INTEGERS, [[1, 2]])
    with pytest.raises(DimensionMismatchError):
        mat_mul(identity(INTEGERS, 2), identity(H_RING, 2))
    with pytest.raises(DimensionMismatchError):
        sub_block(identity(INTEGERS, 3), 0, 0)


def test_star_unavailable():
    ring = PlainIntegers()
    with pytest.raises(StarUnavailableError):
        mat_star(identity(ring, 2))


def test_from_int_by_doubling():
    ring = PlainIntegers()
    assert ring.from_int(13) == 13
    assert ring.from_int(-6) == -6
    assert ring.from_int(0) == 0


def test_block_assembly_and_homomorphism(rng):
    parts = [_random_matrix(rng, INTEGERS, 2) for _ in range(4)]
    whole = block(*parts)
    assert [sub_block(whole, i, j) for i in (0, 1) for j in (0, 1)] == parts
    lifted = apply_hom(whole, Fraction, RATIONALS)
    assert lifted.ring is RATIONALS
    assert lifted == RingMatrix(RATIONALS, whole.rows)


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        mat_pow(identity(INTEGERS, 2), -1)


def test_unitary_power_matches_repeated_product():
    u = unitary_u()
    assert unitary_power(3) == u @ u @ u
