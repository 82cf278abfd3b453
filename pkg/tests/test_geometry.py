"""Ranks here were computed independently with the sympy oracle and frozen."""
import random
from fractions import Fraction

import pytest
import sympy as sp

import oracle
from neurogeo import fixtures as fx
from neurogeo.geometry import (
    ImplicitizationError,
    cnn_kernel_check,
    critical_parameters,
    generic_rank,
    implicitize,
    implicitize_network,
    jacobian,
    jacobian_at,
    param_derivatives,
    singular_locus_membership,
    singular_points,
    tangent_excess_test,
)
from neurogeo.netparam import MlpSpec, SubnetMlpSpec, load_config
from neurogeo.polyalg import Activation, MultiPoly, parse_poly

D1 = load_config(fx.D1_CONFIG)
D2 = load_config(fx.D2_CONFIG)


def test_symbolic_jacobian_matches_reference():
    J = jacobian(D1)
    ref = [[parse_poly(e, fx.D1_WEIGHT_NAMES) for e in row] for row in fx.D1_JACOBIAN]
    assert J == ref


@pytest.mark.parametrize("spec", [D1, D2, MlpSpec((2, 3, 2), Activation((1, 2, 0, -1)))],
                         ids=["d1", "d2", "mlp232"])
def test_backprop_jacobian_matches_symbolic(spec):
    J = jacobian(spec)
    w = spec.random_weights(random.Random(4))
    flat = w.flat()
    assert jacobian_at(spec, w) == [[e.evaluate(flat) for e in row] for row in J]


def test_param_derivatives_length():
    assert len(param_derivatives(D1, D1.random_weights(random.Random(0)))) == 6


def test_jacobian_at_zero_weights():
    w = D1.weights_from_flat([0] * 6)
    assert all(v == 0 for row in jacobian_at(D1, w) for v in row)


def test_modular_jacobian_reduces_rational():
    p = 1000003
    w = D1.weights_from_flat([Fraction(1, 2), 2, -1, 3, Fraction(5, 7), 1])
    exact = jacobian_at(D1, w)
    assert jacobian_at(D1, w, modulus=p) == [[int(Fraction(v).numerator * pow(Fraction(v).denominator, -1, p) % p)
                                              for v in row] for row in exact]


# frozen values: sympy rank of the coefficient Jacobian at a random rational point
@pytest.mark.parametrize("widths,coeffs,expected", [
    ((2, 2, 1), (0, 0, 1, 1), 6),
    ((2, 2, 1), (0, 0, 1), 3),
    ((2, 2, 1), (0, 0, 0, 1), 4),
    ((2, 3, 1), (0, 1, -2, 3, 1, -1, 2, 1, 1), 9),
])
def test_generic_rank_frozen(widths, coeffs, expected):
    assert generic_rank(MlpSpec(widths, Activation(coeffs)), seed=0).rank == expected


def test_generic_rank_oracle_agrees_on_monomial_square():
    a, b, c, d, e, f = params = sp.symbols("a b c d e f")
    fn = lambda ps: oracle.mlp((2, 2, 1), [0, 0, 1], [[[ps[0], ps[1]], [ps[2], ps[3]]], [[ps[4], ps[5]]]])
    pt = dict(zip(params, [2, -3, 5, 7, -1, 4]))
    assert oracle.jacobian_rank(fn, params, pt) == 3


def test_generic_rank_d2_and_report():
    rep = generic_rank(D2, trials=2, seed=3)
    assert rep.rank == fx.D2_GENERIC_RANK
    assert rep.certified == "probabilistic" and rep.shape == (20, 5)
    js = rep.to_json()
    assert js["rank"] == 5 and len(js["primes"]) == 2


def test_generic_rank_is_deterministic():
    assert generic_rank(D1, seed=9).to_json() == generic_rank(D1, seed=9).to_json()


def test_generic_rank_single_prime_override():
    rep = generic_rank(D1, seed=0, primes=[1000003])
    assert rep.rank == 6 and rep.primes == [1000003]


def test_generic_rank_rejects_zero_trials():
    with pytest.raises(ValueError):
        generic_rank(D1, trials=0)


ONES8 = Activation((0,) + (1,) * 8)


def test_tangent_excess_span_frozen():
    # oracle: stacked rank over 12 distinct fiber samples is 3 + 12
    rep = tangent_excess_test(MlpSpec((2, 2, 1), ONES8), SubnetMlpSpec(((0,),)), fiber_samples=12, seed=0)
    assert rep.span_dim == 15 and rep.verdict == "singular"


def test_tangent_excess_hypotheses_reported():
    rep = tangent_excess_test(D1, SubnetMlpSpec(((0,),)), fiber_samples=4, seed=0)
    assert not rep.hypotheses["coefficients_ok"]
    assert rep.warnings


def test_d1_implicitization():
    surf = implicitize_network(D1, seed=1)
    assert surf.kernel_dim == 1 and surf.degree == 3
    F = fx.d1_hypersurface()
    assert surf.F == F or surf.F == -F
    assert surf.to_json(fx.D1_AMBIENT_NAMES)["verified"]


def test_implicitize_degree_cap_too_low():
    with pytest.raises(ImplicitizationError):
        implicitize_network(D1, degree_cap=2)


def test_implicitize_cubics():
    t = MultiPoly.variable(0, 1)
    xy = fx.CUBIC_NAMES
    assert implicitize([t**2, t**3]).F in (parse_poly("x^3 - y^2", xy), parse_poly("y^2 - x^3", xy))
    node = implicitize([t**2 - 1, t**3 - t]).F
    assert node in (parse_poly(fx.NODAL_CURVE, xy), -parse_poly(fx.NODAL_CURVE, xy))


def test_singular_locus_membership_on_cubics():
    F = parse_poly(fx.CUSP_CURVE, fx.CUBIC_NAMES)
    assert singular_locus_membership(F, (0, 0))
    assert not singular_locus_membership(F, (1, 1))


def test_singular_points_and_critical_parameters():
    t = MultiPoly.variable(0, 1)
    assert singular_points(parse_poly(fx.NODAL_CURVE, fx.CUBIC_NAMES)) == [(0, 0)]
    assert critical_parameters([t**2, t**3]) == [0]
    assert critical_parameters([t**2 - 1, t**3 - t]) == []
    with pytest.raises(ValueError):
        singular_points(MultiPoly.variable(0, 3))


def test_cnn_kernel_square_activation():
    spec = load_config({"type": "cnn", "filters": [1, 1], "strides": [1, 1], "dims": [1, 1, 1],
                        "activation": [0, 0, 1]})
    w = spec.weights_from_flat([3, 5])
    ker = cnn_kernel_check(spec, w)
    assert len(ker) == 1
    v = ker[0]
    assert v[0] * (-2 * 5) == v[1] * 3  # proportional to (w1, -2 w2)
    with pytest.raises(ValueError):
        cnn_kernel_check(spec, spec.weights_from_flat([0, 5]))
