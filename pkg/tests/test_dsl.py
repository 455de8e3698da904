import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import corpus
from ppbass.errors import ParseError, RingLiteralError, UnknownVariable
from ppbass.exactalg import ZZ, IntegersMod, Mat, Poly, PolynomialsOverPrimeField, PrimeField
from ppbass.cli.dsl import (
    format_formula,
    parse_coefficient,
    parse_formula,
    parse_template,
    tokenize,
    variable_names,
)
from ppbass.ppcalc import (
    PpFormula,
    annihilator,
    cypr_formula,
    divisibility,
    equivalent,
)


def test_tokenizer_tolerates_whitespace():
    assert [t.text for t in tokenize("  x = 2*y  ")][:5] == ["x", "=", "2", "*", "y"]


def test_divisibility_literal():
    assert parse_formula("exists y (x = 2*y)", ZZ) == divisibility([[2]])


def test_cypr_shaped_literal():
    phi = parse_formula("exists y (x = 2*y ; 4*y = 0)", ZZ)
    assert equivalent(phi, cypr_formula([2], 4))


def test_top_literal():
    phi = parse_formula("x = x", ZZ)
    assert phi.arity == 1 and phi.num_equations == 0
    assert equivalent(phi, PpFormula.top(ZZ))


def test_equation_without_exists_and_wrapping():
    assert equivalent(parse_formula("(2*x = 0)", ZZ), annihilator(2))
    assert equivalent(parse_formula("2*x = 0", ZZ), annihilator(2))


def test_moving_terms_between_sides():
    a = parse_formula("exists y (x - 2*y = 0)", ZZ)
    b = parse_formula("exists y (0 = 2*y - x)", ZZ)
    assert equivalent(a, b) and equivalent(a, divisibility([[2]]))


def test_free_variable_order_is_natural():
    phi = parse_formula("x10 = x2", ZZ)
    assert phi.arity == 2
    # columns are (x2, x10); B collects left minus right
    assert phi.B.rows[0] == (-1, 1)


def test_explicit_variable_list():
    phi = parse_formula("x1 = 0", ZZ, ["x1", "x2"])
    assert phi.arity == 2
    with pytest.raises(UnknownVariable):
        parse_formula("z = 0", ZZ, ["x1"])


def test_field_and_polynomial_literals():
    F = PrimeField(7)
    assert parse_formula("exists y (x = p:3*y)", F) == divisibility([[3]], F)
    R = PolynomialsOverPrimeField(2)
    x = Poly.monomial(1, 2)
    phi = parse_formula("exists y (x = [x^2+1]*y)", R)
    assert phi == divisibility([[x * x + Poly.const(1, 2)]], R)


def test_ring_literal_errors():
    with pytest.raises(RingLiteralError):
        parse_formula("exists y (x = p:2*y)", ZZ)
    with pytest.raises(RingLiteralError):
        parse_formula("exists y (x = [x+1]*y)", ZZ)


@pytest.mark.parametrize(
    "text",
    ["exists y (x = 2*)", "exists (x = y)", "x = ", "exists y y (x = y)", "x = 1", "x == y", "exists y (x = y"],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text, ZZ)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_formula("exists y (x = 2*)", ZZ)
    assert info.value.position == 16


def test_templates():
    stage, arity = parse_template("exists y (x = pow(2,i)*y ; pow(2,i+1)*y = 0)", ZZ)
    assert arity == 1
    assert equivalent(stage(3), cypr_formula([8], 16))


def test_coefficients():
    assert parse_coefficient("pow(2, i+1)", ZZ, 4) == 32
    assert parse_coefficient("-3", IntegersMod(5)) == 2
    with pytest.raises(ParseError):
        parse_coefficient("i", ZZ)


def test_printer_output():
    assert format_formula(divisibility([[2]])) == "exists y (x = 2*y)"
    assert format_formula(PpFormula.top(ZZ)) == "x = x"
    assert variable_names("x", 2) == ["x1", "x2"]


def test_round_trip_on_the_corpus():
    for phi in corpus():
        text = format_formula(phi)
        back = parse_formula(text, phi.ring, variable_names("x", phi.arity))
        assert equivalent(back, phi), text


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([4, 6, 9]),
    st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=3),
)
def test_round_trip_property(n, rows):
    R = IntegersMod(n)
    phi = PpFormula(R, Mat.from_rows([r[:1] for r in rows]), Mat.from_rows([r[1:] for r in rows]))
    back = parse_formula(format_formula(phi), R, variable_names("x", 2))
    assert equivalent(back, phi)
