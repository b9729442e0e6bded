import io
import json

import pytest

from realchip import to_json, example1, metric_to_json, unit_metric, validate
from realchip.cli import main


def run(capsys, argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(to_json(example1(4, 3, 0)))
    return str(path)


@pytest.fixture
def m_graph_file(tmp_path):
    path = tmp_path / "mg.json"
    path.write_text(to_json(example1(2, 3, 0)))
    return str(path)


@pytest.fixture
def metric_file(tmp_path, fixtures_dir):
    path = tmp_path / "m.json"
    path.write_text((fixtures_dir / "reflected_pair.json").read_text())
    return str(path)


# ---------------------------------------------------------------------------
# info


def test_info_reads_file(capsys, graph_file):
    code, out, err = run(capsys, ["info", graph_file])
    assert code == 0
    doc = json.loads(out)
    assert doc["invariants"]["genus"] == 4
    assert doc["invariants"]["s"] == 3
    assert doc["invariants"]["a"] == 0
    assert doc["bounds"]["ok"] is True


def test_info_reads_stdin(capsys, monkeypatch):
    text = to_json(example1(3, 0, 1))
    code, out, _ = run(capsys, ["info"], stdin=text, monkeypatch=monkeypatch)
    assert code == 0
    doc = json.loads(out)
    assert doc["invariants"]["s"] == 0
    assert doc["invariants"]["a"] == 1
    assert doc["invariants"]["genus"] % 2 == 1


def test_info_rejects_garbage(capsys, monkeypatch):
    code, out, _ = run(capsys, ["info"], stdin="{]",
                       monkeypatch=monkeypatch)
    assert code == 1
    assert json.loads(out)["error"] == "domain"


def test_info_missing_file(capsys):
    code, out, _ = run(capsys, ["info", "/does/not/exist.json"])
    assert code == 1
    assert json.loads(out)["error"] == "domain"


# ---------------------------------------------------------------------------
# gen piped into other commands


def test_gen_example1_pipes_into_info(capsys, monkeypatch):
    code, graph_text, _ = run(capsys, ["gen", "example1",
                                       "--g", "4", "--s", "3", "--a", "0"])
    assert code == 0
    code, out, _ = run(capsys, ["info"], stdin=graph_text,
                       monkeypatch=monkeypatch)
    assert code == 0
    doc = json.loads(out)
    assert (doc["invariants"]["genus"], doc["invariants"]["s"],
            doc["invariants"]["a"]) == (4, 3, 0)


def test_gen_example1_inadmissible(capsys):
    code, out, _ = run(capsys, ["gen", "example1",
                                "--g", "2", "--s", "2", "--a", "0"])
    assert code == 1
    assert json.loads(out)["error"] == "domain"


def test_gen_example2_from_cycle(capsys, monkeypatch):
    code, graph_text, _ = run(capsys, ["gen", "example2", "--base", "cycle:3"])
    assert code == 0
    code, out, _ = run(capsys, ["rank", "--divisor", '{"v": 1}', "--real"],
                       stdin=graph_text, monkeypatch=monkeypatch)
    assert code == 0
    doc = json.loads(out)
    assert doc == {"degree": 1, "real": True, "real_rank": 1}


def test_gen_example2_banana_base(capsys):
    code, out, _ = run(capsys, ["gen", "example2", "--base", "banana:2",
                                "--vertex", "u"])
    assert code == 0
    json.loads(out)


def test_gen_random_deterministic(capsys):
    argv = ["gen", "random", "--seed", "7", "--max-vertices", "6"]
    code1, out1, _ = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_gen_random_rejects_unknown_profile(capsys):
    code, _, err = run(capsys, ["gen", "random", "--profile", "zzz"])
    assert code == 1
    assert "error" in err


# ---------------------------------------------------------------------------
# rank and reduce


def test_rank_plain(capsys, graph_file):
    code, out, _ = run(capsys, ["rank", graph_file, "--divisor", '{"v1": 2}'])
    assert code == 0
    doc = json.loads(out)
    assert doc["degree"] == 2
    assert doc["real"] is False
    assert "rank" in doc and "reduced" in doc and "witness" in doc


def test_rank_divisor_from_file(capsys, graph_file, tmp_path):
    dpath = tmp_path / "d.json"
    dpath.write_text('{"v1": 2}')
    code, out, _ = run(capsys, ["rank", graph_file, "-D", f"@{dpath}"])
    assert code == 0
    assert json.loads(out)["degree"] == 2


def test_rank_unknown_vertex(capsys, graph_file):
    code, out, _ = run(capsys, ["rank", graph_file, "--divisor", '{"zz": 1}'])
    assert code == 1
    assert json.loads(out)["error"] == "domain"


def test_rank_missing_divisor_flag(capsys, graph_file):
    code, _, err = run(capsys, ["rank", graph_file])
    assert code == 1
    assert "error" in err


def test_rank_budget_exceeded(capsys, graph_file):
    code, out, _ = run(capsys, ["rank", graph_file,
                                "--divisor", '{"v1": 30}', "--budget", "5"])
    assert code == 3
    assert json.loads(out)["error"] == "budget"


def test_reduce_on_m_graph(capsys, m_graph_file):
    code, out, _ = run(capsys, ["reduce", m_graph_file, "-D", '{"v1": 2}'])
    assert code == 0
    doc = json.loads(out)
    assert doc["totally_real"] is True
    assert "parity_signature" in doc


def test_reduce_rejects_non_m_graph(capsys, tmp_path):
    g = validate(["p", "q"], {"e": ("p", "q")}, {"p": "q", "q": "p"})
    path = tmp_path / "bridge.json"
    path.write_text(to_json(g))
    code, out, _ = run(capsys, ["reduce", str(path), "-D", "{}"])
    assert code == 1
    assert json.loads(out)["error"] == "domain"


# ---------------------------------------------------------------------------
# subdivision


def test_subdivide_pipes(capsys, graph_file, monkeypatch):
    code, out1, _ = run(capsys, ["subdivide", graph_file, "-d", "3"])
    assert code == 0
    code, out2, _ = run(capsys, ["info"], stdin=out1, monkeypatch=monkeypatch)
    assert code == 0
    doc = json.loads(out2)
    assert (doc["invariants"]["genus"], doc["invariants"]["s"],
            doc["invariants"]["a"]) == (4, 3, 0)


# ---------------------------------------------------------------------------
# metric commands


def test_metric_info(capsys, metric_file):
    code, out, _ = run(capsys, ["metric", "info", metric_file])
    assert code == 0
    doc = json.loads(out)
    assert doc["reflected_edges"] == ["e", "f"]
    assert doc["m_metric"] is True
    assert doc["strong_m_metric"] is True
    assert doc["total_length"] == "2"


def test_metric_model_multiplier(capsys, metric_file):
    code, out1, _ = run(capsys, ["metric", "model", metric_file])
    code2, out2, _ = run(capsys, ["metric", "model", metric_file,
                                  "--multiplier", "2"])
    assert code == code2 == 0
    assert json.loads(out1)["scale"] * 2 == json.loads(out2)["scale"]


def test_metric_rank(capsys, metric_file):
    d = json.dumps([[["edge", "e", "1/2"], 2]])
    code, out, _ = run(capsys, ["metric", "rank", metric_file, "-D", d])
    assert code == 0
    doc = json.loads(out)
    assert doc["degree"] == 2
    code, out, _ = run(capsys, ["metric", "rank", metric_file, "-D", d,
                                "--real"])
    assert code == 0
    assert json.loads(out)["real"] is True


def test_metric_equivalent_self(capsys, metric_file):
    d = json.dumps([[["vertex", "p"], 1]])
    code, out, _ = run(capsys, ["metric", "equivalent", metric_file,
                                "-D", d, "-E", d])
    assert code == 0
    doc = json.loads(out)
    assert doc["equivalent"] is True
    assert doc["witness"] is not None


def test_metric_equivalent_false(capsys, tmp_path):
    g = validate(["a", "b"], {"e": ("a", "b"), "f": ("a", "b")})
    path = tmp_path / "circle.json"
    path.write_text(metric_to_json(unit_metric(g)))
    code, out, _ = run(capsys, ["metric", "equivalent", str(path),
                                "-D", json.dumps([[["vertex", "a"], 1]]),
                                "-E", json.dumps([[["vertex", "b"], 1]])])
    assert code == 0
    doc = json.loads(out)
    assert doc["equivalent"] is False
    assert doc["witness"] is None


def test_metric_reduce(capsys, metric_file):
    d = json.dumps([[["edge", "e", "1/3"], 1], [["edge", "e", "2/3"], 1]])
    code, out, _ = run(capsys, ["metric", "reduce", metric_file, "-D", d])
    assert code == 0
    doc = json.loads(out)
    assert doc["totally_real"] is True


def test_metric_g12(capsys, metric_file):
    code, out, _ = run(capsys, ["metric", "g12", metric_file])
    assert code == 0
    assert json.loads(out)["degree"] == 2


def test_metric_g12_rejects_weak(capsys, tmp_path):
    g = validate(["a", "b"], {"e": ("a", "b"), "f": ("a", "b")})
    path = tmp_path / "circle.json"
    path.write_text(metric_to_json(unit_metric(g)))
    code, out, _ = run(capsys, ["metric", "g12", str(path)])
    assert code == 1
    assert json.loads(out)["error"] == "domain"


def test_metric_json_normalizes(capsys, metric_file):
    code, out1, _ = run(capsys, ["metric", "json", metric_file])
    assert code == 0
    code, out2, _ = run(capsys, ["metric", "json", metric_file])
    assert out1 == out2
    doc = json.loads(out1)
    kinds = {e["id"]: e.get("kind") for e in doc["edges"]}
    assert kinds == {"e": "reflected", "f": "reflected"}


# ---------------------------------------------------------------------------
# fuzzing


def test_fuzz_small_run_passes(capsys):
    code, out, _ = run(capsys, ["fuzz", "--seed", "3", "--trials", "10",
                                "--properties", "invariants,roundtrip"])
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    assert doc["violation"] is None
    assert doc["checked"] > 0


def test_fuzz_reports_violation(capsys):
    code, out, _ = run(capsys, ["fuzz", "--seed", "1", "--trials", "3",
                                "--properties", "_always_violated"])
    assert code == 2
    doc = json.loads(out)
    assert doc["ok"] is False
    assert doc["violation"]["property"] == "_always_violated"
    assert "graph" in doc["violation"]


def test_fuzz_unknown_property(capsys):
    code, out, _ = run(capsys, ["fuzz", "--properties", "bogus"])
    assert code == 1
    assert json.loads(out)["error"] == "domain"


# ---------------------------------------------------------------------------
# output stability


def test_reruns_are_byte_identical(capsys, graph_file, m_graph_file,
                                   metric_file):
    commands = [
        ["info", graph_file],
        ["rank", graph_file, "-D", '{"v1": 2}'],
        ["reduce", m_graph_file, "-D", '{"v1": 2}'],
        ["metric", "info", metric_file],
        ["fuzz", "--seed", "5", "--trials", "5",
         "--properties", "invariants"],
    ]
    for argv in commands:
        _, out1, _ = run(capsys, argv)
        _, out2, _ = run(capsys, argv)
        assert out1 == out2, argv


def test_usage_error_without_command(capsys):
    code, _, err = run(capsys, [])
    assert code == 1
    assert "error" in err
