import json

import pytest

from neurogeo import fixtures as fx
from neurogeo.cli import main
from neurogeo.reproduce import reproduce

D1 = json.dumps(fx.D1_CONFIG)
D2 = json.dumps(fx.D2_CONFIG)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_dim_d1(capsys):
    code, rep, _ = run(capsys, "dim", "--config", D1)
    assert code == 0
    assert rep["schema"] == "neurogeo/1" and rep["command"] == "dim"
    r = rep["result"]
    assert r["rank"]["rank"] == 6 and r["degreeBound"] == "576" and r["boundMet"] is False


def test_dim_monomial_notes_scaling_fibers(capsys):
    cfg = json.dumps({"type": "mlp", "widths": [2, 2, 1], "activation": [0, 0, 1]})
    code, rep, _ = run(capsys, "dim", "--config", cfg)
    assert code == 0 and rep["result"]["rank"]["rank"] == 3 and rep["result"]["notes"]


def test_output_is_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert main(["dim", "--config", D2, "--seed", "4", "--out", str(path)]) == 0
        outs.append(path.read_text())
    assert outs[0] == outs[1]


def test_singular_mlp_and_cnn(capsys):
    cfg = json.dumps({"type": "mlp", "widths": [2, 2, 1], "activation": [0] + [1] * 8})
    code, rep, _ = run(capsys, "singular", "--config", cfg, "--subnet", '{"index_sets": [[1]]}')
    assert code == 0 and rep["result"]["singular"] is True
    code, rep, _ = run(capsys, "singular", "--config", D2, "--subnet", '{"paddings": [2, -1]}')
    assert code == 0 and rep["result"]["verdict"] == "singular" and rep["result"]["witness"]["equal"]


def test_exposed_d1_count(capsys):
    code, rep, _ = run(capsys, "exposed", "--config", D1, "--family", '{"index_sets": [[1]]}',
                       "--normal", "family", "--columns", "0,1,4")
    r = rep["result"]
    assert code == 0 and (r["familyDim"], r["normalDim"], r["totalDim"]) == (3, 4, 7)


def test_exposed_inconclusive_exit_code(capsys):
    code, rep, _ = run(capsys, "exposed", "--config", D1, "--family", '{"index_sets": [[1]]}')
    assert code == 4 and rep["result"]["verdict"] == "inconclusive"


@pytest.mark.parametrize("which", ["D1", "D2", "cubics", "mlp", "cnn"])
def test_reproduce_targets(capsys, which):
    code, rep, _ = run(capsys, "reproduce", which)
    assert code == 0 and rep["result"]["allMatch"]


def test_reproduce_mismatch_exit_code(capsys):
    code, rep, _ = run(capsys, "reproduce", "cubics", "--degree-cap", "2")
    assert code == 3 and not rep["result"]["allMatch"]


def test_config_error_exit_code(capsys):
    code, rep, err = run(capsys, "dim", "--config", '{"type": "mlp"}')
    assert code == 2 and rep is None and "error" in json.loads(err)
    code, _, _ = run(capsys, "dim")
    assert code == 2


def test_fibers_command(capsys):
    code, rep, _ = run(capsys, "fibers", "--betas", "2,4,100")
    assert code == 0 and rep["result"]["scalingCount"]["count"] == 2
    cfg = json.dumps({"type": "mlp", "widths": [2, 2, 1], "activation": [0, 0, 1, 1]})
    code, rep, _ = run(capsys, "fibers", "--config", cfg)
    assert rep["result"]["decomposition"]["ok"]
    code, rep, _ = run(capsys, "fibers", "--config", D2, "--scalings", "2,1")
    assert rep["result"]["rigidity"]["equal"] is False


def test_reproduce_api_unknown_target():
    with pytest.raises(ValueError):
        reproduce("D9")
