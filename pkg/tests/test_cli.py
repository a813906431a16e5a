import json
import sys

import pytest

from qtbs.cli import main

from conftest import FIXTURES


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_table(capsys):
    code, out, err = run(capsys, "solve", FIXTURES / "fat_tree.json")
    assert code == 0
    assert "2.500" in out and "5.000" in out
    assert err == ""


def test_solve_json_schema(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "fat_tree.json",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert doc["command"] == "solve"
    assert doc["network"] == {"links": 6, "flows": 12}
    assert doc["rates"]["f1"] == pytest.approx(5.0)
    assert 0 < doc["jain_index"] <= 1


def test_solve_dot_single_link(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "single_link.json",
                       "--format", "dot")
    assert code == 0
    assert out.count("->") == 1
    assert '"l1" [shape=box' in out
    assert 'fillcolor=gray' in out

    code, out2, _ = run(capsys, "solve", FIXTURES / "single_link.json",
                        "--format", "dot", "--backward-edges")
    assert out2.count("->") == 2
    assert "style=dashed" in out2


def test_export_matches_solve_dot(capsys):
    _, a, _ = run(capsys, "solve", FIXTURES / "b4.json", "--format", "dot")
    _, b, _ = run(capsys, "export", FIXTURES / "b4.json")
    assert a == b


def test_grad_table_lists_biggest_first(capsys):
    code, out, _ = run(capsys, "grad", FIXTURES / "shaping.json",
                       "--target", "f4", "--direction", "down")
    assert code == 0
    flows_section = out.split("flow gradients:")[1].split("link gradients:")[0]
    first = flows_section.strip().splitlines()[0].split()
    assert first[0] == "f7"
    assert float(first[1]) == pytest.approx(-2.0)
    assert "gradient bound" in out


def test_grad_zero_for_idle_spine(capsys, tmp_path):
    doc = json.loads((FIXTURES / "fat_tree.json").read_text())
    for entry in doc["links"]:
        if entry["id"] in ("l5", "l6"):
            entry["capacity"] = 40.0
    f = tmp_path / "full.json"
    f.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "grad", f, "--target", "l5")
    assert code == 0
    assert "all gradients zero" in out


def test_grad_unknown_target_fails(capsys):
    code, _, err = run(capsys, "grad", FIXTURES / "fat_tree.json",
                       "--target", "nope")
    assert code == 1
    assert "error" in err


def test_route_b4(capsys):
    code, out, _ = run(capsys, "route", FIXTURES / "b4.json",
                       "--src", "DC4", "--dst", "DC11")
    assert code == 0
    assert "l16 -> l8 -> l19" in out
    assert "2.500" in out
    assert "l15 -> l10" in out
    assert "1.429" in out


def test_route_unreachable_fails(capsys, tmp_path):
    doc = {
        "routers": ["u1", "u2", "u3", "u4"],
        "links": [
            {"id": "l1", "capacity": 10.0, "src": "u1", "dst": "u2"},
            {"id": "l2", "capacity": 10.0, "src": "u3", "dst": "u4"},
        ],
        "flows": [{"id": "f1", "links": ["l1"]}],
    }
    f = tmp_path / "split.json"
    f.write_text(json.dumps(doc))
    code, _, err = run(capsys, "route", f, "--src", "u1", "--dst", "u4")
    assert code == 1
    assert "error" in err


def test_shape_plan(capsys):
    code, out, _ = run(capsys, "shape", FIXTURES / "shaping.json",
                       "--target", "f7", "--low-priority", "f1,f3,f4,f8",
                       "--floor", "1.25")
    assert code == 0
    assert "16.875" in out
    assert out.count("stage") == 3


def test_shape_empty_plan(capsys):
    code, out, _ = run(capsys, "shape", FIXTURES / "shaping.json",
                       "--target", "f7", "--low-priority", "f8")
    assert code == 0
    assert "empty plan" in out
    assert "10.250" in out


def test_shape_json_jain(capsys):
    code, out, _ = run(capsys, "shape", FIXTURES / "shaping.json",
                       "--target", "f7", "--low-priority", "f1,f3,f4,f8",
                       "--floor", "1.25", "--format", "json")
    doc = json.loads(out)
    assert doc["final_target_rate"] == pytest.approx(16.875)
    assert [a["flow"] for a in doc["actions"]] == ["f4", "f3", "f8"]
    assert 0 < doc["jain_index"] <= 1


def test_taper(capsys):
    code, out, _ = run(capsys, "taper", FIXTURES / "fat_tree.json",
                       "--scale-links", "l5,l6", "--lambda", "20", "--tau0", "1")
    assert code == 0
    assert "1.333333" in out
    assert "26.667" in out
    assert "3.333" in out


def test_eps_env_override(capsys, monkeypatch):
    # a huge tolerance glues the fat-tree tiers together: every link ties
    monkeypatch.setenv("QTBS_EPS", "10.0")
    code, out, _ = run(capsys, "solve", FIXTURES / "fat_tree.json",
                       "--format", "json")
    assert code == 0
    coarse = json.loads(out)
    monkeypatch.delenv("QTBS_EPS")
    _, out, _ = run(capsys, "solve", FIXTURES / "fat_tree.json",
                    "--format", "json")
    fine = json.loads(out)
    assert coarse["bottlenecks_of"] != fine["bottlenecks_of"]

    monkeypatch.setenv("QTBS_EPS", "bogus")
    code, _, err = run(capsys, "solve", FIXTURES / "fat_tree.json")
    assert code == 1 and "QTBS_EPS" in err


def test_invalid_file_fails(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"links":[{"id":"l1","capacity":-1}],"flows":[]}')
    code, out, err = run(capsys, "solve", bad)
    assert code == 1
    assert out == ""
    assert "capacity" in err


def test_outputs_deterministic(capsys):
    for fixture in sorted(FIXTURES.glob("*.json")):
        for fmt in ("json", "dot"):
            if fmt == "dot":
                args = ("solve", fixture, "--format", "dot", "--backward-edges")
            else:
                args = ("solve", fixture, "--format", "json")
            _, first, _ = run(capsys, *args)
            _, second, _ = run(capsys, *args)
            assert first == second, (fixture.name, fmt)
