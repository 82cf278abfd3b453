import json
import random
from fractions import Fraction

import pytest
import sympy as sp

import oracle
from neurogeo import fixtures as fx
from neurogeo.netparam import (
    AmbientBasis,
    CnnSpec,
    ConfigError,
    MlpSpec,
    SubnetCnnSpec,
    SubnetMlpSpec,
    apply_cnn_subnetwork,
    apply_subnetwork,
    attainable_degrees,
    embed,
    embed_symbolic,
    family_map,
    load_config,
    load_subnet,
    load_weights,
    shift_subnetwork_weights,
    spec_to_config,
    tilde_profile,
)
from neurogeo.polyalg import Activation, to_sympy


def _compare_with_oracle(spec, outs, x):
    cm = oracle.coefficient_map(outs, x)
    coeffs = embed_symbolic(spec.forward(spec.symbolic_weights()), spec.basis())
    syms = sp.symbols(" ".join(spec.param_names()))
    mine = {k: to_sympy(c, syms) for k, c in zip(spec.basis().monomials, coeffs)}
    for k, v in cm.items():
        assert sp.expand(mine[k] - v) == 0
    assert all(v == 0 for k, v in mine.items() if k not in cm)


def test_mlp_expansion_matches_oracle():
    spec = MlpSpec((2, 2, 1), Activation((1, 0, 2, 1)))
    syms = sp.symbols(" ".join(spec.param_names()))
    mats = [[list(syms[0:2]), list(syms[2:4])], [list(syms[4:6])]]
    outs, x = oracle.mlp((2, 2, 1), [1, 0, 2, 1], mats)
    _compare_with_oracle(spec, outs, x)


def test_cnn_expansion_matches_oracle():
    spec = load_config(fx.D2_CONFIG)
    a, b, c, d, e = sp.symbols(" ".join(spec.param_names()))
    outs, x = oracle.cnn((2, 1), [0, 1, 1], [[a, b, c], [d, e]], 5)
    _compare_with_oracle(spec, outs, x)


def test_d1_basis():
    spec = load_config(fx.D1_CONFIG)
    assert spec.basis().labels() == list(fx.D1_BASIS_LABELS)
    assert spec.num_params == 6


def test_d2_dimensions():
    spec = load_config(fx.D2_CONFIG)
    assert len(spec.basis()) == fx.D2_AMBIENT_DIM
    assert spec.num_params == 5


def test_cnn_dims_must_be_consistent():
    with pytest.raises((ConfigError, ValueError)):
        CnnSpec((3, 2), (2, 1), (6, 2, 1), Activation((0, 1, 1)))


def test_attainable_degrees():
    assert attainable_degrees(Activation((0, 0, 1, 1)), 1) == (2, 3)
    assert attainable_degrees(Activation((1, 1)), 1) == (0, 1)
    assert attainable_degrees(Activation.monomial(2), 2) == (4,)


def test_full_basis_size():
    assert len(AmbientBasis.full(2, 1, 2)) == 6


def test_embed_is_evaluation_compatible():
    spec = MlpSpec((2, 3, 2), Activation((1, -1, 2)))
    w = spec.random_weights(random.Random(0))
    f = spec.forward(w)
    v = embed(f, spec.basis())
    assert v.evaluate([2, Fraction(-1, 3)]) == f.evaluate([2, Fraction(-1, 3)])


def test_subnetwork_zeroes_outgoing_columns():
    spec = load_config(fx.D1_CONFIG)
    w = spec.weights_from_flat([1, 2, 3, 4, 5, 6])
    plain = apply_subnetwork(w, SubnetMlpSpec(((1,),)), spec)
    assert plain.flat() == [1, 2, 3, 4, 5, 0]
    strict = apply_subnetwork(w, SubnetMlpSpec(((1,),), "strict"), spec)
    assert strict.flat() == [1, 2, 0, 0, 5, 0]
    rows = apply_subnetwork(w, SubnetMlpSpec(((1,),), "repeatedRows", ({1: 0},)), spec)
    assert rows.flat() == [1, 2, 1, 2, 5, 0]


def test_family_map_marks_fixed_weights():
    spec = load_config(fx.D1_CONFIG)
    fm = family_map(spec, SubnetMlpSpec(((1,),), "strict"))
    assert [q is None for q in fm] == [False, False, True, True, False, True]


def test_subnet_validation():
    spec = load_config(fx.D1_CONFIG)
    with pytest.raises(ConfigError):
        load_subnet(spec, {"index_sets": [[2]]})
    with pytest.raises(ConfigError):
        load_subnet(spec, {"index_sets": [[1]], "mode": "bogus"})
    with pytest.raises(ConfigError):
        load_subnet(spec, {"index_sets": [[1]], "mode": "repeatedRows"})
    assert load_subnet(spec, None) is None and load_subnet(spec, "{}") is None
    assert load_subnet(spec, '{"index_sets": [[1]]}') == SubnetMlpSpec(((1,),))


def test_cnn_subnet_zeroes_padded_entries():
    spec = load_config(fx.D2_CONFIG)
    w = spec.weights_from_flat([1, 2, 3, 4, 5])
    assert apply_cnn_subnetwork(w, SubnetCnnSpec((2, -1))).flat() == [0, 0, 3, 4, 0]
    assert load_subnet(spec, {"paddings": [2, -1]}) == SubnetCnnSpec((2, -1))


@pytest.mark.parametrize("row", fx.D2_TILDE_TABLE, ids=lambda r: str(r[1]))
def test_tilde_profile_table(row):
    spec = load_config(fx.D2_CONFIG)
    prof = tilde_profile(spec, SubnetCnnSpec(row[1]))
    assert prof[0] == 0 and prof[1:] == row[2]


def test_shift_preserves_function():
    spec = load_config(fx.D2_CONFIG)
    w = apply_cnn_subnetwork(spec.random_weights(random.Random(1)), SubnetCnnSpec((2, -1)))
    shifted = shift_subnetwork_weights(spec, w, SubnetCnnSpec((2, -1)))
    assert shifted != w
    assert embed(spec.forward(shifted), spec.basis()) == embed(spec.forward(w), spec.basis())


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config('{"type": "mlp"}')
    with pytest.raises(ConfigError):
        load_config("{not json")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    with pytest.raises(ConfigError):
        load_config({"type": "rnn", "activation": [0, 1]})


def test_config_round_trip(tmp_path):
    for cfg in (fx.D1_CONFIG, fx.D2_CONFIG):
        spec = load_config(cfg)
        path = tmp_path / "c.json"
        path.write_text(json.dumps(spec_to_config(spec)))
        assert load_config(path) == spec


def test_load_weights():
    spec = load_config(fx.D1_CONFIG)
    w = load_weights(spec, '[[["1/2", "1"], ["0", "2"]], [["3", "-1"]]]')
    assert w.flat() == [Fraction(1, 2), 1, 0, 2, 3, -1]
