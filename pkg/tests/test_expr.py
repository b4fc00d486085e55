from fractions import Fraction

import pytest

from qalgebra import EvaluationError
from utils.expr import (
    ATOM_START,
    MAX_DEPTH,
    ExprSyntaxError,
    Num,
    Power,
    Product,
    Sum,
    Sym,
    evaluate,
    normal_form_text,
    parse,
    to_source,
)


@pytest.mark.parametrize("src, expected", [
    ("a b - q b a", "0"),
    ("A a + b B", "1"),
    ("a A", "1 - q^2*b*B"),
    ("b a", "q^-1*a*b"),
    ("q^-1 b a", "q^-2*a*b"),
    ("B b - b*B", "0"),
    ("(q + 1)(q - 1)", "(-1 + q^2)"),
    ("2/4 a", "1/2*a"),
])
def test_normal_form_text(src, expected):
    assert normal_form_text(src) == expected


def test_unicode_output():
    assert normal_form_text("b a", unicode=True) == "q⁻¹·α·β"


def test_unbalanced_parenthesis():
    with pytest.raises(ExprSyntaxError) as info:
        parse("(")
    assert (info.value.line, info.value.column) == (1, 2)
    assert info.value.expected == ATOM_START
    assert info.value.found == "конец ввода"


def test_error_position_on_second_line():
    with pytest.raises(ExprSyntaxError) as info:
        parse("a +\n)")
    assert (info.value.line, info.value.column) == (2, 1)


def test_unknown_character():
    with pytest.raises(ExprSyntaxError) as info:
        parse("a % b")
    assert info.value.column == 3


def test_exponent_must_be_integer():
    with pytest.raises(ExprSyntaxError) as info:
        parse("a^1/2")
    assert info.value.expected == {"целое"}


def test_negative_power_of_non_scalar():
    with pytest.raises(EvaluationError):
        evaluate(parse("a^-1"))


def test_parse_shapes():
    assert parse("a b") == Product((Sym("a"), Sym("b")))
    assert parse("-a") == Sum((("-", Sym("a")),))
    assert parse("+a") == Sym("a")
    assert parse("q^-2") == Power(Sym("q"), -2)
    assert parse("(1/2)^3") == Power(Num(Fraction(1, 2)), 3)


def test_spans_are_ignored_in_comparison():
    assert parse("a  *  b") == parse("a*b")
    assert parse("a  *  b").span != parse("a*b").span


def _random_tree(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.3:
            return Num(Fraction(rng.randint(0, 9), rng.randint(1, 4)))
        return Sym(rng.choice("aAbBq"))
    kind = rng.choice(("power", "product", "sum"))
    if kind == "power":
        return Power(_random_tree(rng, depth - 1), rng.randint(-3, 3))
    if kind == "product":
        return Product(tuple(_random_tree(rng, depth - 1) for _ in range(rng.randint(2, 3))))
    items = [(rng.choice("+-"), _random_tree(rng, depth - 1)) for _ in range(rng.randint(1, 3))]
    if len(items) == 1:
        items[0] = ("-", items[0][1])
    return Sum(tuple(items))


def test_print_parse_round_trip(rng):
    for _ in range(500):
        tree = _random_tree(rng)
        assert parse(to_source(tree)) == tree, to_source(tree)


def test_to_source_parenthesizes():
    tree = Product((Sum((("+", Sym("a")), ("-", Sym("b")))), Sym("B")))
    assert to_source(tree) == "(a - b)*B"
    assert to_source(Power(Power(Sym("a"), 2), 3)) == "(a^2)^3"
    assert to_source(Sum((("-", Sym("a")), ("+", Num(Fraction(1, 2)))))) == "-a + 1/2"


@pytest.mark.parametrize("src, column", [("a²", 2), ("b ٣", 3), ("1/0 a", 1), ("a + 2/00", 5)])
def test_bad_numbers_are_syntax_errors(src, column):
    with pytest.raises(ExprSyntaxError) as info:
        parse(src)
    assert (info.value.line, info.value.column) == (1, column)


def test_nesting_depth_is_limited():
    assert parse("(" * MAX_DEPTH + "a" + ")" * MAX_DEPTH) == Sym("a")
    with pytest.raises(ExprSyntaxError) as info:
        parse("(" * 5000 + "a" + ")" * 5000)
    assert info.value.column == MAX_DEPTH + 1
