from fractions import Fraction

import pytest
import sympy as sp

from neurogeo.polyalg import (
    Activation,
    MultiPoly,
    PolyMap,
    monomials_of_degree,
    parse_poly,
    parse_scalar,
    scalar_to_str,
    to_mod,
    to_sympy,
)

x, y = MultiPoly.variables(2)


def test_difference_of_squares():
    assert (x + y) * (x - y) == x**2 - y**2


def test_zero_terms_are_dropped():
    p = MultiPoly(2, {(1, 0): 1, (0, 1): 0})
    assert p.terms == {(1, 0): 1}
    assert (x - x).is_zero() and not (x - x)


def test_fraction_coefficients_normalize_to_int():
    p = MultiPoly(1, {(1,): Fraction(4, 2)})
    assert type(p.coefficient((1,))) is int


def test_constructor_validation():
    with pytest.raises(ValueError):
        MultiPoly(2, {(1,): 1})
    with pytest.raises(ValueError):
        MultiPoly(1, {(-1,): 1})
    with pytest.raises(IndexError):
        MultiPoly.variable(2, 2)


def test_degree_and_components():
    p = x**3 + 2 * x * y + 5
    assert p.degree() == 3
    assert p.degrees() == {0, 2, 3}
    assert p.homogeneous_component(2) == 2 * x * y
    assert p.truncate(2) == 2 * x * y + 5


def test_evaluate_exact():
    p = x**2 * y - Fraction(1, 3) * y
    assert p.evaluate([2, Fraction(3, 2)]) == Fraction(11, 2)


def test_partial_and_gradient():
    p = x**3 * y + y**2
    assert p.partial(0) == 3 * x**2 * y
    assert p.gradient() == [3 * x**2 * y, x**3 + 2 * y]


def test_substitute_and_compose():
    p = x * y + x
    assert p.substitute({1: 2}) == 3 * x
    t = MultiPoly.variable(0, 1)
    assert p.compose([t**2, t]) == t**3 + t**2


def test_lift_reindexes():
    t = MultiPoly.variable(0, 1)
    assert (t**2).lift(3, [2]) == MultiPoly.variable(2, 3) ** 2


def test_modular_arithmetic():
    p = (x + 3).reduce_mod(7)
    assert p * p == (x**2 + 6 * x + 2).reduce_mod(7)
    assert to_mod(Fraction(1, 2), 7) == 4
    with pytest.raises(ValueError):
        p.reduce_mod(11)


def test_text_round_trip_through_parser():
    p = 6 * x * y**2 - Fraction(1, 2) * x
    text = p.to_text(["a", "b"])
    assert text == "6/1*a*b^2 + -1/2*a"
    assert parse_poly(text, ["a", "b"]) == p


def test_json_round_trip():
    p = x**2 - Fraction(2, 3) * y + 1
    assert MultiPoly.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        MultiPoly.from_json([])


def test_parse_against_sympy():
    p = parse_poly("(a + 2*b)^3 - a*b/4", ["a", "b"])
    a, b = sp.symbols("a b")
    assert sp.expand(to_sympy(p, [a, b]) - ((a + 2 * b) ** 3 - a * b / 4)) == 0


def test_scalars():
    assert parse_scalar("3/6") == Fraction(1, 2)
    assert parse_scalar("4") == 4
    assert scalar_to_str(Fraction(-1, 2)) == "-1/2"
    assert scalar_to_str(3) == "3/1"


def test_monomials_of_degree_counts():
    assert len(monomials_of_degree(3, 2)) == 6
    assert all(sum(m) == 4 for m in monomials_of_degree(2, 4))


def test_truncated_multiplication():
    p = (x + y + 1) ** 3
    assert p.mul(p, max_degree=2) == (p * p).truncate(2)


class TestActivation:
    def test_evaluate_and_compose(self):
        s = Activation((0, 1, 1))
        assert s(3) == 12
        assert s(x + 1) == (x + 1) ** 2 + x + 1

    def test_derivative(self):
        s = Activation((1, 0, 0, 2))
        assert s.derivative_coeffs() == (0, 0, 6)
        assert s.derivative_compose(x) == 6 * x**2

    def test_support_and_monomial(self):
        assert Activation.monomial(3).support == (3,)
        assert Activation.from_exponents([2, 5]).coeffs == (0, 0, 1, 0, 0, 1)
        assert Activation((0, 1)).vanishes_at_zero()

    def test_rejects_constant(self):
        with pytest.raises(ValueError):
            Activation((1,))
        with pytest.raises(ValueError):
            Activation((0, 1, 0))


def test_polymap_requires_common_nvars():
    with pytest.raises(ValueError):
        PolyMap([x, MultiPoly.variable(0, 1)])
    assert PolyMap([x, y]).evaluate([1, 2]) == (1, 2)
