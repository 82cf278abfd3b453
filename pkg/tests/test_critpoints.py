import random
from fractions import Fraction

import pytest
import sympy as sp

from neurogeo import fixtures as fx
from neurogeo.critpoints import (
    Dataset,
    MissingCenterError,
    QuadricLoss,
    cnn_fiber_witness,
    cnn_singularity_classify,
    critical_witness,
    dataset_to_quadric,
    exposedness_dimension,
    gradient_of_loss,
    random_proper_cnn_families,
)
from neurogeo.netparam import CoeffVector, MlpSpec, SubnetCnnSpec, SubnetMlpSpec, embed_symbolic, load_config
from neurogeo import linalg
from neurogeo.geometry import jacobian
from neurogeo.polyalg import Activation, parse_poly, to_sympy

D1 = load_config(fx.D1_CONFIG)
D2 = load_config(fx.D2_CONFIG)


def test_gradient_matches_scalar_differentiation():
    syms = sp.symbols("a b c d e f")
    coeffs = [to_sympy(p, syms) for p in embed_symbolic(D1.forward(D1.symbolic_weights()), D1.basis())]
    u = [1, -2, 3, Fraction(1, 2), 0, 4, -1]
    L = sum((c - ui) ** 2 for c, ui in zip(coeffs, u))
    pt = [2, -1, 3, 1, Fraction(1, 3), -2]
    expected = [sp.diff(L, s).subs(dict(zip(syms, pt))) for s in syms]
    got = gradient_of_loss(D1, D1.weights_from_flat(pt), QuadricLoss.standard(D1.basis(), u))
    assert [sp.Rational(str(g)) for g in got] == expected


def test_quadric_from_dataset():
    spec = MlpSpec((1, 1, 1), Activation((0, 1, 1)))  # basis (x^2, x)
    data = Dataset([((1,), (2,)), ((2,), (3,))])
    q = dataset_to_quadric(data, spec.basis())
    assert q.gram == [[17, 9], [9, 5]]
    for c in ([1, 0], [Fraction(1, 2), 3]):
        assert q.value(c) == data.squared_error(CoeffVector(spec.basis(), tuple(c)))
    assert q.residual(q.center.coords) == [0, 0]


def test_degenerate_quadric_has_no_center():
    spec = MlpSpec((1, 1, 1), Activation((0, 1, 1)))
    q = dataset_to_quadric(Dataset([((1,), (2,))]), spec.basis())
    assert q.degenerate
    with pytest.raises(MissingCenterError):
        gradient_of_loss(spec, spec.random_weights(random.Random(0)), q)


def test_with_gram_center():
    u = CoeffVector(D1.basis(), (1, 2, 3, 4, 5, 6, 7))
    G = [[2 if i == j else 0 for j in range(7)] for i in range(7)]
    q = QuadricLoss.with_gram(D1.basis(), G, u)
    assert q.value(u.coords) == 0 and q.residual(u.coords) == [0] * 7


def test_critical_witness_repeated_rows():
    spec = MlpSpec((2, 2, 1), Activation((1, 0, 1, 1)))
    W = spec.weights_from_flat([1, 2, 1, 2, 3, 0])
    wit = critical_witness(spec, W, seed=0)
    assert wit.gradient_zero and wit.u != wit.phi


def test_exposedness_modes_on_d1():
    strict = exposedness_dimension(D1, SubnetMlpSpec(((1,),), "strict"))
    assert strict.verdict == "exposed" and (strict.family_dim, strict.normal_dim) == (3, 4)
    plain = exposedness_dimension(D1, SubnetMlpSpec(((1,),)))
    assert plain.verdict == "inconclusive"
    whole = exposedness_dimension(D1, None)
    assert (whole.family_dim, whole.normal_dim, whole.verdict) == (6, 1, "exposed")
    js = strict.to_json()
    assert {"verdict", "familyDim", "normalDim", "ambientDim", "upperBound"} <= set(js)
    with pytest.raises(ValueError):
        exposedness_dimension(D1, None, normal="other")


def test_subnet_minor_symbolic():
    J = [[e.substitute({5: 0}) for e in row] for row in jacobian(D1)]
    minor = linalg.det_poly([[J[i][j] for j in fx.D1_SUBNET_COLUMNS] for i in range(3)])
    assert minor == parse_poly(fx.D1_MINOR, fx.D1_WEIGHT_NAMES)


def test_cnn_classification_and_witness():
    cls = cnn_singularity_classify(D2, SubnetCnnSpec((2, -1)))
    assert cls.singular and cls.profile.integral and cls.profile.terminal_zero
    assert not cnn_singularity_classify(D2, SubnetCnnSpec((1, 0))).singular
    w = D2.random_weights(random.Random(2))
    wit = cnn_fiber_witness(D2, w, SubnetCnnSpec((2, -1)))
    assert wit.equal
    with pytest.raises(ValueError):
        cnn_fiber_witness(D2, w, SubnetCnnSpec((1, 0)))


def test_random_proper_families_are_seeded():
    a = random_proper_cnn_families(D2, 4, seed=1)
    assert a == random_proper_cnn_families(D2, 4, seed=1)
    assert all(f.is_proper() for f in a)
