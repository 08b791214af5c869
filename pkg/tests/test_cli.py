import csv
import io
import json
import pathlib

import pytest

from imcergo.cli import main

MODELS = pathlib.Path(__file__).resolve().parents[1] / "models"


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_classify_example1(capsys):
    code, out, _ = run_cli(capsys, "classify", MODELS / "example1.json")
    assert code == 0
    report = json.loads(out)
    assert report["weakly_ergodic"] is True
    assert report["ergodic"] is False
    assert report["tcr"] is False and report["tca"] is True
    assert report["witness"] == {"period": 2}
    assert report["classes"] == [["a", "b"]]
    assert report["top_class"] == ["a", "b"]
    assert report["closed"] == [True]


def test_classify_example2(capsys):
    code, out, _ = run_cli(capsys, "classify", MODELS / "example2.json")
    assert code == 0
    report = json.loads(out)
    assert report["ergodic"] is True and report["weakly_ergodic"] is True
    assert report["witness"] is None


def test_classify_two_absorbing(capsys):
    code, out, _ = run_cli(capsys, "classify", MODELS / "two_absorbing.json")
    assert code == 0
    report = json.loads(out)
    assert report["ergodic"] is False and report["weakly_ergodic"] is False
    assert report["top_class"] is None
    assert report["witness"] == {"reason": "no top class"}


def test_classify_confining_witness(capsys, tmp_path):
    mpath = tmp_path / "trap.json"
    mpath.write_text(json.dumps({
        "states": ["a", "b"],
        "rows": {
            "a": {"type": "vertices", "pmfs": [[1, 0]]},
            "b": {"type": "vertices", "pmfs": [[1, 0], [0, 1]]},
        },
    }))
    code, out, _ = run_cli(capsys, "classify", mpath)
    assert code == 0
    report = json.loads(out)
    assert report["tca"] is False and report["tcr"] is True
    assert report["witness"] == {"confining_set": ["b"]}


def test_classify_emit_dot(capsys, tmp_path):
    dot_path = tmp_path / "graph.dot"
    code, _, _ = run_cli(capsys, "classify", MODELS / "example1.json", "--emit-dot", dot_path)
    assert code == 0
    text = dot_path.read_text()
    assert '"a" -> "b";' in text


def test_limits_example2(capsys):
    code, out, _ = run_cli(capsys, "limits", MODELS / "example2.json", "--f", "a=0,b=1")
    assert code == 0
    report = json.loads(out)
    assert report["limit_upper"] == 1.0
    assert report["limit_avg_upper"] == 0.5
    assert report["per_class_limits"] == {"a,b": 0.5}


def test_limits_example1_upper_absent(capsys):
    code, out, _ = run_cli(capsys, "limits", MODELS / "example1.json", "--f", "a=0,b=1")
    assert code == 0
    report = json.loads(out)
    assert "limit_upper" not in report
    assert report["limit_avg_upper"] == 0.5


def test_limits_constant_gamble(capsys):
    code, out, _ = run_cli(capsys, "limits", MODELS / "example2.json", "--f", "a=2.5,b=2.5")
    assert code == 0
    report = json.loads(out)
    assert report["limit_upper"] == 2.5
    assert report["limit_lower"] == 2.5
    assert report["limit_avg_upper"] == 2.5
    assert report["limit_avg_lower"] == 2.5


def test_limits_gamble_file(capsys, tmp_path):
    gpath = tmp_path / "g.json"
    gpath.write_text('{"f": {"a": 0, "b": 1}}')
    code, out, _ = run_cli(capsys, "limits", MODELS / "example2.json", "--gamble", gpath)
    assert code == 0
    assert json.loads(out)["limit_upper"] == 1.0


def test_trace_example2(capsys):
    code, out, _ = run_cli(capsys, "trace", MODELS / "example2.json", "--f", "a=0,b=1", "--k", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    by_kb = {(r["k"], r["state"]): r for r in rows}
    assert float(by_kb[("1", "b")]["m_bar_upper"]) == 1.0
    assert float(by_kb[("2", "b")]["m_bar_upper"]) == 0.5
    assert float(by_kb[("3", "b")]["m_bar_upper"]) == pytest.approx(2 / 3, abs=1e-11)


def test_trace_k1_is_f(capsys):
    code, out, _ = run_cli(capsys, "trace", MODELS / "example2.json", "--f", "a=0.25,b=-1", "--k", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["m_bar_upper"]) for r in rows] == [0.25, -1.0]
    assert [float(r["m_bar_lower"]) for r in rows] == [0.25, -1.0]


def test_trace_example1_oscillation(capsys):
    code, out, _ = run_cli(capsys, "trace", MODELS / "example1.json", "--f", "a=0,b=1", "--k", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    u_a = [float(r["u_k_upper"]) for r in rows if r["state"] == "a"]
    m_a = [float(r["m_bar_upper"]) for r in rows if r["state"] == "a"]
    assert u_a == [0.0, 1.0, 0.0, 1.0]
    assert m_a == pytest.approx([0.0, 0.5, 1 / 3, 0.5], abs=1e-11)


def test_trace_matches_average_recursion_exactly(capsys, example2, op2):
    from imcergo import Gamble, average_recursion

    code, out, _ = run_cli(capsys, "trace", MODELS / "example2.json", "--f", "a=-0.75,b=2", "--k", "7")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    f = Gamble.from_dict(example2.states, {"a": -0.75, "b": 2})
    for k in range(1, 8):
        rec = average_recursion(op2, f, k)
        for x, lab in enumerate(example2.states.labels):
            cell = next(r for r in rows if r["k"] == str(k) and r["state"] == lab)
            assert cell["m_bar_upper"] == f"{rec.m_bar.values[x]:.12g}"


def test_oracle_example2_vertexized(capsys):
    code, out, _ = run_cli(
        capsys, "oracle", MODELS / "example2_vertexized.json",
        "--f", "a=0,b=1", "--k", "3", "--x", "b",
    )
    assert code == 0
    report = json.loads(out)
    assert report["ci_bruteforce"] == pytest.approx(2 / 3, abs=1e-11)
    assert report["recursion_value"] == pytest.approx(2 / 3, abs=1e-11)
    assert report["agree"] is True


def test_oracle_k1(capsys):
    code, out, _ = run_cli(
        capsys, "oracle", MODELS / "example2_vertexized.json",
        "--f", "a=0.3,b=0.9", "--k", "1", "--x", "a",
    )
    assert code == 0
    report = json.loads(out)
    assert report["ci_bruteforce"] == 0.3
    assert report["recursion_value"] == 0.3
    assert report["ri_vertex_max"] == 0.3


def test_determinism_byte_identical(capsys):
    _, out1, _ = run_cli(capsys, "oracle", MODELS / "example2_vertexized.json",
                         "--f", "a=0,b=1", "--k", "4", "--seed", "9")
    _, out2, _ = run_cli(capsys, "oracle", MODELS / "example2_vertexized.json",
                         "--f", "a=0,b=1", "--k", "4", "--seed", "9")
    assert out1 == out2
    _, t1, _ = run_cli(capsys, "trace", MODELS / "example1.json", "--f", "a=0,b=1", "--k", "6")
    _, t2, _ = run_cli(capsys, "trace", MODELS / "example1.json", "--f", "a=0,b=1", "--k", "6")
    assert t1 == t2


def test_exit_code_missing_file(capsys):
    code, _, err = run_cli(capsys, "classify", MODELS / "does_not_exist.json")
    assert code == 2
    assert "error" in err


def test_exit_code_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{this is not json")
    code, _, err = run_cli(capsys, "classify", bad)
    assert code == 2


def test_exit_code_incoherent_model(capsys, tmp_path):
    bad = tmp_path / "incoherent.json"
    bad.write_text(json.dumps({
        "states": ["a", "b"],
        "rows": {
            "a": {"type": "intervals", "lower": [0, 0], "upper": [0.4, 0.5]},
            "b": {"type": "vertices", "pmfs": [[1, 0]]},
        },
    }))
    code, _, err = run_cli(capsys, "classify", bad)
    assert code == 2


def test_exit_code_no_convergence(capsys):
    code, _, err = run_cli(
        capsys, "limits", MODELS / "example2.json", "--f", "a=0,b=1", "--iter-cap", "1"
    )
    assert code == 4
    assert "residual" in err


def test_exit_code_cap_exceeded(capsys):
    code, _, err = run_cli(
        capsys, "oracle", MODELS / "example2_vertexized.json",
        "--f", "a=0,b=1", "--k", "6", "--oracle-cap", "4",
    )
    assert code == 5


def test_unknown_state_label(capsys):
    code, _, err = run_cli(
        capsys, "oracle", MODELS / "example2_vertexized.json",
        "--f", "a=0,b=1", "--k", "2", "--x", "zz",
    )
    assert code == 2
