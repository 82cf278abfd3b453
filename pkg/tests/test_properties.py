"""Invariants beyond the ring and padding suites (those live with the acceptance checks)."""
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from neurogeo import linalg
from neurogeo.critpoints import Dataset, QuadricLoss, dataset_to_quadric
from neurogeo.fibers import MonomialFiberElement, monomial_fiber_action, smith_normal_form
from neurogeo.netparam import CoeffVector, MlpSpec, embed
from neurogeo.polyalg import Activation, MultiPoly, parse_poly

PROPERTY = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
small = st.fractions(min_value=-4, max_value=4, max_denominator=3)
ints = st.integers(-20, 20)


@PROPERTY
@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(ints, min_size=c, max_size=c), min_size=r, max_size=r))))
def test_smith_form_invariants(A):
    res = smith_normal_form(A)
    assert res.verify()
    nz = [x for x in res.invariants if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert len(nz) == linalg.rank_rational(A)


@st.composite
def monomial_nets(draw):
    widths = draw(st.sampled_from([(2, 2, 1), (1, 3, 2), (2, 2, 2, 1)]))
    r = draw(st.integers(2, 3))
    spec = MlpSpec(widths, Activation.monomial(r))
    W = spec.weights_from_flat([draw(small) for _ in range(spec.num_params)])
    perms, diags = [], []
    for w in widths[1:-1]:
        perms.append(draw(st.permutations(range(w))))
        diags.append([draw(small.filter(bool)) for _ in range(w)])
    return spec, W, MonomialFiberElement(perms, diags), r


@PROPERTY
@given(monomial_nets())
def test_monomial_fiber_action_keeps_function(case):
    spec, W, elt, r = case
    moved = monomial_fiber_action(W, elt, r)
    assert embed(spec.forward(moved), spec.basis()) == embed(spec.forward(W), spec.basis())
    assert monomial_fiber_action(moved, elt.inverse(), r) == W


@PROPERTY
@given(st.lists(st.tuples(small, small), min_size=1, max_size=4), st.lists(small, min_size=2, max_size=2))
def test_dataset_quadric_equals_squared_error(pairs, c):
    spec = MlpSpec((1, 1, 1), Activation((0, 1, 1)))
    data = Dataset([((x,), (y,)) for x, y in pairs])
    q = dataset_to_quadric(data, spec.basis())
    assert q.value(c) == data.squared_error(CoeffVector(spec.basis(), tuple(c)))


@PROPERTY
@given(st.lists(small, min_size=7, max_size=7), st.lists(small, min_size=7, max_size=7))
def test_standard_quadric_is_squared_distance(u, c):
    spec = MlpSpec((2, 2, 1), Activation((0, 0, 1, 1)))
    q = QuadricLoss.standard(spec.basis(), u)
    assert q.value(c) == sum((Fraction(a) - Fraction(b)) ** 2 for a, b in zip(c, u))
    assert q.residual(u) == [0] * 7


@PROPERTY
@given(st.dictionaries(st.tuples(*[st.integers(0, 3)] * 2), small, max_size=6))
def test_text_round_trip(terms):
    p = MultiPoly(2, terms)
    assert parse_poly(p.to_text(["a", "b"]), ["a", "b"]) == p
    assert MultiPoly.from_json(p.to_json(), nvars=2) == p
