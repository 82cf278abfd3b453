import random
from fractions import Fraction

import pytest
import sympy as sp
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from neurogeo import fixtures as fx
from neurogeo.fibers import (
    MonomialFiberElement,
    SparseActivationSpec,
    chain_spec,
    degree_bound,
    expansion_slots,
    fiber_scaling_count,
    monomial_fiber_action,
    parity_report,
    rigidity_hypotheses,
    scaling_exponent_matrix,
    scaling_rigidity_check,
    smith_normal_form,
    sparse_decomposition_check,
)
from neurogeo.netparam import MlpSpec, embed, load_config
from neurogeo.polyalg import Activation


def test_degree_bound_shallow():
    assert degree_bound((2, 2, 1)) == 576


@pytest.mark.parametrize("seed", range(30))
def test_snf_invariants_match_sympy(seed):
    rng = random.Random(seed)
    r, c = rng.randint(1, 4), rng.randint(1, 4)
    A = [[rng.randint(-12, 12) for _ in range(c)] for _ in range(r)]
    res = smith_normal_form(A)
    assert res.verify()
    ref = sympy_snf(sp.Matrix(A), domain=sp.ZZ)
    diag = [abs(ref[i, i]) for i in range(min(r, c))]
    assert sorted(x for x in res.invariants if x) == sorted(x for x in diag if x)


def test_snf_zero_matrix():
    res = smith_normal_form([[0, 0], [0, 0]])
    assert res.invariants == [0, 0] and res.verify()


def test_exponent_matrix_layout():
    assert scaling_exponent_matrix([2, 3, 30]) == [[3, 1], [2, 1]]
    assert scaling_exponent_matrix([2, 5]) == [[1]]


def test_fiber_counts():
    assert fiber_scaling_count([2, 3, 30]).count == 1
    assert fiber_scaling_count([2, 4, 100]).count == 2
    assert fiber_scaling_count(SparseActivationSpec((2, 5, 26))).count == 3  # det [[5, 1], [2, 1]]
    with pytest.raises(ValueError):
        fiber_scaling_count([2])


def test_parity_report():
    assert parity_report([2, 4, 100])["opposite_pair_exists"] is False
    assert parity_report([2, 3])["opposite_pair_exists"] is True


def test_sparse_spec_validation():
    with pytest.raises(ValueError):
        SparseActivationSpec((1, 3))
    with pytest.raises(ValueError):
        SparseActivationSpec((2, 4), depth=3)  # 4 does not exceed 2^2
    assert SparseActivationSpec((2, 5, 26)).component_degrees() == [4, 25, 676]


def test_expansion_slots():
    assert expansion_slots(2, 4) == 15 ** 2


def test_sparse_decomposition_rejects_mismatched_activation():
    s = SparseActivationSpec((2, 3))
    with pytest.raises(ValueError):
        sparse_decomposition_check(MlpSpec((2, 2, 1), Activation((0, 0, 1, 2))), s)


def _random_element(rng, widths):
    perms, diags = [], []
    for w in widths[1:-1]:
        p = list(range(w))
        rng.shuffle(p)
        perms.append(p)
        diags.append([Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2])) for _ in range(w)])
    return MonomialFiberElement(perms, diags)


@pytest.mark.parametrize("seed", range(5))
def test_monomial_fiber_preserves_function(seed):
    rng = random.Random(seed)
    r = rng.choice([2, 3])
    spec = MlpSpec((2, 3, 2, 1), Activation.monomial(r))
    W = spec.random_weights(rng)
    elt = _random_element(rng, spec.widths)
    W2 = monomial_fiber_action(W, elt, r)
    assert embed(spec.forward(W2), spec.basis()) == embed(spec.forward(W), spec.basis())
    assert monomial_fiber_action(W2, elt.inverse(), r) == W


def test_monomial_fiber_identity():
    spec = MlpSpec((2, 2, 1), Activation.monomial(2))
    W = spec.random_weights(random.Random(0))
    assert monomial_fiber_action(W, MonomialFiberElement.identity(spec.widths), 2) == W
    with pytest.raises(ValueError):
        MonomialFiberElement(((0, 0),), ((1, 1),))


def test_rigidity_on_chain():
    spec = chain_spec(Activation((0, 1, 1, 1)), depth=2)
    w = spec.weights_from_flat([2, 3])
    assert not scaling_rigidity_check(spec, w, [2, Fraction(1, 2)]).equal
    assert scaling_rigidity_check(spec, w, [1, 1]).equal


def test_rigidity_hypotheses_flag_violations():
    d2 = load_config(fx.D2_CONFIG)  # quadratic activation: degree too low
    w = d2.random_weights(random.Random(0))
    assert rigidity_hypotheses(d2, w)
    rep = scaling_rigidity_check(d2, w, [2, 1])
    assert not rep.hypotheses_ok and not rep.equal
    with pytest.raises(ValueError):
        scaling_rigidity_check(d2, w, [0, 1])
