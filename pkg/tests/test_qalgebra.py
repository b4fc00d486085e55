from fractions import Fraction

import pytest

from config import Config
from qalgebra import (
    ALPHA,
    ALPHA_STAR,
    BETA,
    BETA_STAR,
    BudgetExceededError,
    EvaluationError,
    HElement,
    HTensor,
    PBWMonomial,
    QLaurent,
    antipode,
    coproduct,
    counit,
    eval_q,
    h_mul,
    h_star,
    hopf_axiom_residuals,
    is_scalar,
    normal_form,
    random_element,
    reduce_word,
    relation_residuals,
    unitarity_residual,
    unitary_power,
    unitary_u,
)
from ringmat import identity

Q = QLaurent.q_power(1)


def test_laurent_arithmetic():
    assert (Q + 1) * (Q - 1) == Q ** 2 - 1
    assert Q ** -1 * Q == 1
    assert QLaurent.q_power(-2, 3) ** -1 == QLaurent.q_power(2, Fraction(1, 3))


def test_laurent_negative_power_needs_single_term():
    with pytest.raises(EvaluationError):
        (Q + 1) ** -1


def test_laurent_evaluate_exact_and_float():
    x = QLaurent({-1: 2, 0: Fraction(3, 2), 2: -1})
    assert x.evaluate(Fraction(1, 2)) == Fraction(4) + Fraction(3, 2) - Fraction(1, 4)
    assert x.evaluate(0.5) == pytest.approx(5.25)
    with pytest.raises(EvaluationError):
        x.evaluate(0)


def test_laurent_text():
    x = QLaurent({-1: 2, 0: Fraction(3, 2), 2: -1})
    assert x.to_text() == "2*q^-1 + 3/2 - q^2"
    assert QLaurent().to_text() == "0"


def test_relation_kernel_is_zero():
    residuals = relation_residuals()
    assert residuals
    assert all(value.is_zero() for value in residuals.values()), residuals


def test_basic_products():
    assert BETA * ALPHA == h_mul(HElement.scalar(Q ** -1), ALPHA * BETA)
    assert ALPHA_STAR * ALPHA + BETA * BETA_STAR == 1
    assert ALPHA * ALPHA_STAR == 1 - Q ** 2 * BETA * BETA_STAR
    assert BETA_STAR * BETA == BETA * BETA_STAR


def test_normal_form_text():
    assert (BETA * ALPHA).to_text() == "q^-1*a*b"
    assert (BETA * ALPHA).to_text(unicode=True) == "q⁻¹·α·β"
    assert normal_form([(1, "Aa"), (1, "bB")]).to_text() == "1"
    assert HElement.zero().to_text() == "0"


def test_alpha_powers_collapse():
    # α²α*² = (1 − q²γ)(1 − q⁴γ), γ = ββ*
    gamma = BETA * BETA_STAR
    expected = (1 - Q ** 2 * gamma) * (1 - Q ** 4 * gamma)
    assert ALPHA ** 2 * ALPHA_STAR ** 2 == expected


def test_products_agree_with_rewriting(rng):
    for _ in range(200):
        word = [rng.choice("aAbB") for _ in range(rng.randint(0, 6))]
        assert reduce_word([(1, word)]) == normal_form([(1, word)]), word


def test_monomial_product_against_rewriting():
    for left in [(2, 1, 0), (-1, 0, 2), (3, 0, 1), (-2, 1, 1)]:
        for right in [(-3, 1, 0), (2, 0, 1), (-1, 2, 0), (1, 1, 1)]:
            word = _word(left) + _word(right)
            product = h_mul(HElement.monomial(left), HElement.monomial(right))
            assert product == reduce_word([(1, word)]), (left, right)


def _word(mono):
    k, b, c = mono
    return ("a" * k if k >= 0 else "A" * -k) + "b" * b + "B" * c


@pytest.mark.parametrize("trials", [100, pytest.param(1000, marks=pytest.mark.slow)])
def test_associativity_on_random_triples(rng, trials):
    for _ in range(trials):
        x, y, z = (random_element(rng) for _ in range(3))
        assert (x * y) * z == x * (y * z)


def test_star_is_involutive_antihomomorphism(rng):
    for _ in range(100):
        x, y = random_element(rng), random_element(rng)
        assert h_star(h_star(x)) == x
        assert h_star(x * y) == h_star(y) * h_star(x)


def test_star_of_monomial():
    # (α²β)* = β*α*² = q²α*²β*
    assert h_star(HElement.monomial((2, 1, 0))) == HElement.monomial((-2, 0, 1), Q ** 2)
    assert h_star(ALPHA) == ALPHA_STAR
    assert h_star(BETA) == BETA_STAR


def test_hopf_axioms_on_generators():
    residuals = hopf_axiom_residuals()
    assert len(residuals) == 32
    assert not any(residuals.values()), {k: v for k, v in residuals.items() if v}


def test_coproduct_of_alpha():
    expected = HTensor.pure(ALPHA, ALPHA) - HTensor.pure(BETA_STAR, BETA) * Q
    assert coproduct(ALPHA) == expected


def test_antipode_and_counit_on_generators():
    assert antipode(ALPHA) == ALPHA_STAR
    assert antipode(BETA) == -(Q * BETA)
    assert antipode(BETA_STAR) == -(Q ** -1 * BETA_STAR)
    assert counit(ALPHA) == 1
    assert counit(BETA_STAR) == 0


def test_coproduct_is_multiplicative(rng):
    for _ in range(20):
        x, y = random_element(rng, max_degree=2, max_terms=2), random_element(rng, max_degree=2, max_terms=2)
        assert coproduct(x * y) == coproduct(x) * coproduct(y)


def test_antipode_is_antihomomorphism(rng):
    for _ in range(30):
        x, y = random_element(rng, max_degree=2), random_element(rng, max_degree=2)
        assert antipode(x * y) == antipode(y) * antipode(x)


def test_eval_q_and_scalars():
    x = Q * ALPHA + Q ** -1
    assert eval_q(x, Fraction(1, 2)) == HElement({PBWMonomial(1, 0, 0): Fraction(1, 2), (0, 0, 0): 2})
    with pytest.raises(EvaluationError):
        eval_q(x, 0)
    assert is_scalar(HElement.scalar(Q)) == Q
    assert is_scalar(HElement.zero()) == 0
    assert is_scalar(ALPHA) is None


def test_budget_guard(monkeypatch):
    monkeypatch.setattr(Config, "MAX_TERMS", 3)
    x = ALPHA + BETA + BETA_STAR
    with pytest.raises(BudgetExceededError) as info:
        x * (ALPHA_STAR + BETA)
    assert info.value.attempted > 3


def test_unitary_u():
    assert unitarity_residual(unitary_u()) == 0
    u2 = unitary_power(2)
    assert u2 @ unitary_power(-2) == identity(u2.ring, 2)
    assert unitary_power(0) == identity(u2.ring, 2)


def test_budget_counts_normal_form_not_term_pairs(monkeypatch):
    # четыре пары мономов, но в нормальной форме три монома
    expected = ALPHA ** 2 + (Q ** -1 - 1) * (ALPHA * BETA) - BETA ** 2
    monkeypatch.setattr(Config, "MAX_TERMS", 3)
    assert (ALPHA + BETA) * (ALPHA - BETA) == expected


def test_tensor_budget_counts_result(monkeypatch):
    monkeypatch.setattr(Config, "MAX_TERMS", 1)
    one = HTensor.pure(HElement.one(), HElement.one())
    assert one * one == one
    with pytest.raises(BudgetExceededError):
        coproduct(ALPHA) * coproduct(BETA)
