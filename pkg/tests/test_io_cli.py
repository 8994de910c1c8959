import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tubedesign import INF, Design, Model
from tubedesign.cli import main
from tubedesign.io import DesignFileError, dump_design, parse_design, parse_design_text

UNIFORM = {
    "domain": "fourier",
    "model": {"kind": "fourier", "n": 3},
    "atoms": [{"x": -1 / 3, "w": 1 / 3}, {"x": 0, "w": 1 / 3}, {"x": 1 / 3, "w": 1 / 3}],
}


def _write(tmp_path, doc, name="design.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


def test_parse_uniform(tmp_path):
    model, design = parse_design(_write(tmp_path, UNIFORM))
    assert model == Model.fourier(3)
    assert len(design) == 3 and design.weights == (1 / 3,) * 3


def test_infinity_atoms():
    doc = {"domain": "real", "model": {"kind": "polynomial", "n": 3, "variance": [1, 0, 0, 1]},
           "atoms": [{"x": 0, "w": 1}, {"x": "-inf", "w": 1}]}
    _, design = parse_design_text(json.dumps(doc)).model, parse_design_text(json.dumps(doc)).design
    assert design.points[1] is INF


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d["atoms"][0].update(w=-1), "atoms[0]"),
        (lambda d: d["atoms"][1].update(x=-1 / 3), "atoms"),
        (lambda d: d.update(domain="sphere"), "domain"),
        (lambda d: d["model"].update(n=1), "model.n"),
        (lambda d: d["model"].update(kind="polynomial"), "domain"),
        (lambda d: d["atoms"][0].update(x="inf"), "atoms[0]"),
        (lambda d: d.update(extra=1), "unknown"),
        (lambda d: d["atoms"][0].pop("w"), "atoms[0]"),
    ],
)
def test_schema_errors(mutate, field):
    doc = json.loads(json.dumps(UNIFORM))
    mutate(doc)
    with pytest.raises(DesignFileError, match=field.replace("[", r"\[").replace("]", r"\]")):
        parse_design_text(json.dumps(doc))


def test_malformed_json_reports_position():
    with pytest.raises(DesignFileError, match=r"<string>:3:5"):
        parse_design_text('{\n  "domain": "real",\n    ]\n}')


points = st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=6, unique=True)


@given(points, st.data())
def test_round_trip(xs, data):
    ws = data.draw(st.lists(st.floats(1e-6, 1e3), min_size=len(xs), max_size=len(xs)))
    with_inf = data.draw(st.booleans())
    pts = list(xs) + ([INF] if with_inf else [])
    ws = list(ws) + ([0.5] if with_inf else [])
    design = Design(tuple(pts), tuple(ws))
    model = Model.polynomial(3, (1.0, 0.25, -0.5, 2.0))
    doc = parse_design_text(dump_design(model, design, mobius=(1, 2, 3, 4)))
    assert doc.model == model and doc.design == design and tuple(doc.mobius) == (1, 2, 3, 4)


# -- CLI ---------------------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_volume_moments(capsys):
    code, out, _ = run(capsys, "volume", "--moments", "1,0,0.3333333,0,1")
    assert code == 0
    assert json.loads(out)["volume"] == pytest.approx(10.2604, abs=1e-4)


def test_cli_volume_design(tmp_path, capsys):
    code, out, _ = run(capsys, "volume", "--design", str(_write(tmp_path, UNIFORM)))
    assert code == 0 and json.loads(out)["volume"] == pytest.approx(10.260398641, abs=1e-8)


def test_cli_malformed_design(tmp_path, capsys):
    code, _, err = run(capsys, "volume", "--design", str(_write(tmp_path, '{"domain": "real",\n')))
    assert code == 2 and ":2:1:" in err


def test_cli_validation_exit_code(capsys):
    assert run(capsys, "volume")[0] == 2
    assert run(capsys, "volume", "--moments", "1,0,0,0,1")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--v", "0.2", "--reps", "1000"])  # --alphas is required
    assert info.value.code == 2


def test_cli_numerical_exit_code(capsys):
    # a point on the cone boundary numerically: canonical representation fails
    code, _, err = run(capsys, "reduce", "--moments", "1,0,1e-13,0,1")
    assert code in (2, 3)
    code, _, err = run(capsys, "reduce", "--moments", "2,1,1,1,1.0000000000001")
    assert code == 3 and "numerical failure" in err


def test_cli_scan_lenv(tmp_path, capsys):
    out = tmp_path / "fig2.csv"
    assert run(capsys, "scan", "--kind", "lenv", "--from", "0.02", "--to", "0.98", "--steps", "48",
               "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "v,len,lower_bound" and len(lines) == 50
    first = lines[1].split(",")
    assert first[0] == "0.02" and first[2] != ""
    assert lines[-1].split(",")[2] == ""
    assert len(first[1].replace(".", "").lstrip("0")) <= 12


def test_cli_scan_mixing(capsys):
    code, out, _ = run(capsys, "scan", "--kind", "mixing", "--steps", "10")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "c,volume" and len(rows) == 12


def test_cli_doptimal_and_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "doptimal", "--n", "3", "--domain", "real")
    assert code == 0
    doc = parse_design_text(out)
    np.testing.assert_allclose(doc.design.points, [-np.sqrt(3), 0, np.sqrt(3)])
    # the emitted design re-parses to an identical value and re-emits the same text
    assert dump_design(doc.model, doc.design) == out.strip()


def test_cli_tvoptimal(capsys):
    code, out, _ = run(capsys, "tvoptimal", "--domain", "fourier", "--q", "2")
    assert code == 0
    assert parse_design_text(out).design.weights[1] == pytest.approx(16 / 354)
    code, out, _ = run(capsys, "tvoptimal", "--domain", "real", "--variance", "1,2,3,5", "--free", "2,1,-1,1")
    assert code == 0


def test_cli_reduce(capsys):
    code, out, _ = run(capsys, "reduce", "--moments", "0.375,0,0.125,0,0.375")
    rep = json.loads(out)
    assert code == 0 and rep["v"] == pytest.approx(1 / 3) and rep["scale"] == pytest.approx(3 / 8)


def test_cli_transform(tmp_path, capsys):
    doc = {"domain": "real", "model": {"kind": "polynomial", "n": 3},
           "atoms": [{"x": -1.7320508075688772, "w": 1 / 3}, {"x": 0, "w": 1 / 3},
                     {"x": 1.7320508075688772, "w": 1 / 3}], "mobius": [2, 0, 0, 1]}
    code, out, _ = run(capsys, "transform", "--design", str(_write(tmp_path, doc)))
    assert code == 0
    new = parse_design_text(out)
    np.testing.assert_allclose(new.design.points, [-2 * np.sqrt(3), 0, 2 * np.sqrt(3)])
    path = _write(tmp_path, out, "moved.json")
    v1 = json.loads(run(capsys, "volume", "--design", str(path))[1])["volume"]
    assert v1 == pytest.approx(10.260398641, abs=1e-8)
    del doc["mobius"]
    assert run(capsys, "transform", "--design", str(_write(tmp_path, doc, "plain.json")))[0] == 2


@pytest.mark.parametrize("method", ["tube", "naiman", "beta"])
def test_cli_threshold(method, capsys):
    code, out, _ = run(capsys, "threshold", "--volume", "10.260", "--alpha", "0.05", "--method", method)
    assert code == 0
    c = json.loads(out)["threshold"]
    if method == "tube":
        assert c == pytest.approx(2.6405, abs=5e-4)
    if method == "beta":
        assert 0 < c < 1


def test_cli_threshold_infeasible(capsys):
    code, out, err = run(capsys, "threshold", "--volume", "1", "--alpha", "0.5")
    assert code == 0 and json.loads(out)["threshold"] == 0 and "warning" in err


def test_cli_simulate_prints_seed_and_replays(capsys):
    code, out, err = run(capsys, "simulate", "--v", "0.25", "--reps", "2000", "--alphas", "0.1,0.05")
    assert code == 0
    seed = int(err.split("seed:")[1].split()[0])
    first = json.loads(out)
    code, out, _ = run(capsys, "simulate", "--v", "0.25", "--reps", "2000", "--alphas", "0.1,0.05",
                       "--seed", str(seed))
    assert json.loads(out) == first


def test_cli_table1_small(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, err = run(capsys, "table1", "--reps", "1000", "--seed", "5", "--out", str(out))
    assert code == 0 and "seed: 5" in err
    lines = out.read_text().splitlines()
    assert lines[0] == "v,volume,w_0.1,w_0.05,tube_0.1,tube_0.05"
    assert len(lines) == 7


def test_cli_hessian_check(capsys):
    code, out, _ = run(capsys, "hessian-check", "--n", "3")
    rep = json.loads(out)
    assert code == 0 and rep["null_dim"] == 3 and rep["orbit_dim"] == 3


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "tubedesign", "volume", "--moments", "1,0,1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["volume"] == pytest.approx(2 * np.pi)
