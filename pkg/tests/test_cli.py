import json

import pytest
from click.testing import CliRunner

from fpq.cli import cli, main

GRAPH = "a p b .\nb q c .\na r c .\n"
QUERY = "q(?x, ?y) :- (?x, (next::p)/(next::q), ?y), (?x, next::r, ?y)\n"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "g.nt").write_text(GRAPH)
    (tmp_path / "q.fpq").write_text(QUERY)
    (tmp_path / "r.csv").write_text("c1,c2\na,c\n")
    (tmp_path / "rels.json").write_text(
        '{"relations": [{"name": "R", "path": "r.csv"}]}'
    )
    return tmp_path


def test_query_tsv(runner, workspace):
    result = runner.invoke(
        cli,
        ["query", "--graph", str(workspace / "g.nt"),
         "--query", str(workspace / "q.fpq"), "--format", "tsv"],
    )
    assert result.exit_code == 0
    assert result.stdout.strip().splitlines() == ["x\ty", "a\tc"]


def test_query_json(runner, workspace):
    result = runner.invoke(
        cli,
        ["query", "--graph", str(workspace / "g.nt"),
         "--query", str(workspace / "q.fpq"), "--format", "json"],
    )
    assert result.exit_code == 0
    assert json.loads(result.stdout) == [{"x": "a", "y": "c"}]


def test_query_with_relations_and_time(runner, workspace):
    (workspace / "fq.fpq").write_text(
        "q(?x, ?y) :- (?x, next::p/next::q, ?y), R(?x, ?y)\n"
    )
    result = runner.invoke(
        cli,
        ["query", "--graph", str(workspace / "g.nt"),
         "--db", str(workspace / "rels.json"),
         "--query", str(workspace / "fq.fpq"), "--time"],
    )
    assert result.exit_code == 0
    assert "a\tc" in result.stdout
    assert "phase\ttime_ms\tsolutions" in result.stderr
    assert "Rel-DB" in result.stderr


def test_query_explain(runner, workspace):
    result = runner.invoke(
        cli,
        ["query", "--graph", str(workspace / "g.nt"),
         "--query", str(workspace / "q.fpq"), "--explain"],
    )
    assert result.exit_code == 0
    assert "rule 1:" in result.stderr
    assert "via" in result.stderr


def test_missing_file_is_a_user_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["query", "--graph", "/nonexistent.nt", "--query", "/also-missing.fpq"])
    assert exc.value.code == 1


def test_parse_error_is_a_user_error_with_a_span(tmp_path, capsys):
    (tmp_path / "g.nt").write_text(GRAPH)
    (tmp_path / "bad.fpq").write_text("q(?x ?y) :- (?x, next, ?y)")
    with pytest.raises(SystemExit) as exc:
        main(["query", "--graph", str(tmp_path / "g.nt"),
              "--query", str(tmp_path / "bad.fpq")])
    assert exc.value.code == 1
    err = capsys.readouterr().err
    assert "line 1" in err


def test_classify_command(runner, workspace):
    result = runner.invoke(cli, ["classify", "--query", str(workspace / "q.fpq")])
    assert result.exit_code == 0
    assert "operators: ∧" in result.stdout
    assert "star: absent" in result.stdout


def test_check_command(runner):
    result = runner.invoke(cli, ["check", "--cases", "25", "--seed", "7"])
    assert result.exit_code == 0
    assert result.stdout.strip() == "25/25 ok"


def test_gen_and_query_pipeline(runner, tmp_path):
    result = runner.invoke(
        cli,
        ["gen", "--out", str(tmp_path / "data"), "--points", "40",
         "--tuples", "50", "--seed", "11"],
    )
    assert result.exit_code == 0
    (tmp_path / "coords.fpq").write_text(
        "q(?x, ?y) :- (?x, next^-1::lon/next::lat, ?y)\n"
    )
    result = runner.invoke(
        cli,
        ["query", "--graph", str(tmp_path / "data" / "map.nt"),
         "--db", str(tmp_path / "data" / "relations.json"),
         "--query", str(tmp_path / "coords.fpq")],
    )
    assert result.exit_code == 0
    assert len(result.stdout.strip().splitlines()) == 41  # header + one per point


def test_bench_command_table_and_chart(runner, tmp_path):
    chart = tmp_path / "chart.csv"
    result = runner.invoke(
        cli,
        ["bench", "--sizes", "30,60", "--points", "24", "--seed", "13",
         "--chart", str(chart), "--quiet"],
    )
    assert result.exit_code == 0
    out = result.stdout
    for phase in ("RDF", "Rel-DB", "Joining", "Total"):
        assert phase in out
    for name in ("q1", "q2", "q3", "q4"):
        assert name in out
    lines = chart.read_text().strip().splitlines()
    assert lines[0] == "query,size,total_ms"
    assert len(lines) == 1 + 4 * 2


def test_bench_rejects_bad_sizes(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--sizes", "ten"])
    assert exc.value.code == 1


def test_thin_client_round_trip(runner, workspace, monkeypatch):
    """--server routes through the HTTP layer; transport is in-process ASGI."""
    import httpx
    from fastapi.testclient import TestClient

    from fpq.service import create_app

    app = create_app()

    def asgi_client(base_url, timeout):
        return TestClient(app, base_url=base_url)

    monkeypatch.setattr(httpx, "Client", asgi_client)
    result = runner.invoke(
        cli,
        ["query", "--graph", str(workspace / "g.nt"),
         "--db", str(workspace / "rels.json"),
         "--query", str(workspace / "q.fpq"),
         "--server", "http://fpq.test", "--time"],
    )
    assert result.exit_code == 0, result.output
    assert result.stdout.strip().splitlines() == ["x\ty", "a\tc"]
    assert "phase\ttime_ms\tsolutions" in result.stderr
    # the ephemeral dataset is cleaned up afterwards
    probe = TestClient(app, base_url="http://fpq.test")
    assert probe.get("/datasets").json() == []

    classify = runner.invoke(
        cli,
        ["classify", "--query", str(workspace / "q.fpq"),
         "--server", "http://fpq.test"],
    )
    assert classify.exit_code == 0
    assert "operators: ∧" in classify.stdout


def test_fpq_seed_env_override(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("FPQ_SEED", "77")
    r1 = runner.invoke(cli, ["gen", "--out", str(tmp_path / "a"), "--points", "10",
                             "--tuples", "5"])
    monkeypatch.setenv("FPQ_SEED", "78")
    r2 = runner.invoke(cli, ["gen", "--out", str(tmp_path / "b"), "--points", "10",
                             "--tuples", "5"])
    assert r1.exit_code == 0 and r2.exit_code == 0
    a = (tmp_path / "a" / "map.nt").read_text()
    b = (tmp_path / "b" / "map.nt").read_text()
    assert a != b
