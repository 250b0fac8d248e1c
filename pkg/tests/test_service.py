import threading

import pytest
from fastapi.testclient import TestClient

from fpq.service import create_app

GRAPH = "a p b .\nb q c .\na r c .\n"
EXAMPLE_QUERY = "q(?x,?y) :- (?x, (next::p)/(next::q), ?y), (?x, next::r, ?y)"


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def loaded(client):
    response = client.post(
        "/datasets",
        json={
            "name": "demo",
            "graph_text": GRAPH,
            "relations": [{"name": "R", "csv_text": "c1,c2\na,c\n"}],
        },
    )
    assert response.status_code == 201
    return client


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_dataset_lifecycle(loaded):
    info = loaded.get("/datasets/demo").json()
    assert info == {
        "name": "demo", "triples": 3, "adom_size": 6, "relations": {"R": 1}
    }
    assert [d["name"] for d in loaded.get("/datasets").json()] == ["demo"]
    assert loaded.delete("/datasets/demo").status_code == 204
    assert loaded.get("/datasets/demo").status_code == 404


def test_duplicate_dataset_conflicts(loaded):
    response = loaded.post(
        "/datasets", json={"name": "demo", "graph_text": "x y z ."}
    )
    assert response.status_code == 409


def test_dataset_needs_exactly_one_graph_source(client):
    response = client.post("/datasets", json={"name": "n"})
    assert response.status_code == 422


def test_server_side_paths(client, tmp_path):
    graph_path = tmp_path / "g.nt"
    graph_path.write_text(GRAPH)
    csv_path = tmp_path / "r.csv"
    csv_path.write_text("c1\nv\n")
    response = client.post(
        "/datasets",
        json={
            "name": "from-disk",
            "graph_path": str(graph_path),
            "relations": [{"name": "R", "csv_path": str(csv_path)}],
        },
    )
    assert response.status_code == 201
    assert response.json()["triples"] == 3


def test_query_endpoint(loaded):
    body = loaded.post(
        "/datasets/demo/query", json={"query": EXAMPLE_QUERY}
    ).json()
    assert body["variables"] == ["x", "y"]
    assert body["mappings"] == [{"x": "a", "y": "c"}]
    assert body["boolean"] is None


def test_timed_query_has_four_phases(loaded):
    body = loaded.post(
        "/datasets/demo/query", json={"query": EXAMPLE_QUERY, "timed": True}
    ).json()
    assert [row["phase"] for row in body["phases"]] == [
        "RDF", "Rel-DB", "Joining", "Total"
    ]


def test_explain_query(loaded):
    body = loaded.post(
        "/datasets/demo/query", json={"query": EXAMPLE_QUERY, "explain": True}
    ).json()
    assert "rule 1:" in body["plan"]


def test_boolean_query(loaded):
    body = loaded.post(
        "/datasets/demo/query", json={"query": "q(a, c) :- (a, next::r, c)"}
    ).json()
    assert body["boolean"] is True
    assert body["mappings"] == []


def test_federated_query(loaded):
    body = loaded.post(
        "/datasets/demo/query",
        json={"query": "q(?x,?y) :- (?x, next, ?y), R(?x, ?y)"},
    ).json()
    assert body["mappings"] == [{"x": "a", "y": "c"}]


def test_membership_endpoint(loaded):
    member = loaded.post(
        "/datasets/demo/membership",
        json={"query": EXAMPLE_QUERY, "bindings": {"x": "a", "y": "c"}},
    ).json()["member"]
    assert member is True
    stray = loaded.post(
        "/datasets/demo/membership",
        json={"query": EXAMPLE_QUERY, "bindings": {"x": "a", "y": "b"}},
    ).json()["member"]
    assert stray is False


def test_traces_endpoint(client):
    client.post("/datasets", json={"name": "t", "graph_text": "a b c .\na c b .\n"})
    body = client.post(
        "/datasets/t/traces", json={"nodes": ["a", "b", "c"]}
    ).json()
    assert ["edge::c", "node::a"] in body["traces"]
    assert ["next::c", "node^-1::a"] in body["traces"]


def test_eval_endpoints(client):
    nre = client.post(
        "/eval/nre", json={"graph_text": "a p b .", "expr": "next::p"}
    ).json()
    assert nre["pairs"] == [["a", "b"]]
    pp = client.post(
        "/eval/pp", json={"graph_text": "a q b .", "expr": "!p"}
    ).json()
    assert pp["pairs"] == [["a", "b"]]


def test_translate_endpoint(client):
    body = client.post("/translate/pp-to-nre", json={"path": "^p/q*"}).json()
    assert body["nre"] == "next^-1::p/next::q*"


def test_translate_rejects_negation(client):
    response = client.post("/translate/pp-to-nre", json={"path": "!p"})
    assert response.status_code == 400


def test_classify_endpoint(client):
    body = client.post("/classify", json={"query": EXAMPLE_QUERY}).json()
    assert body["operators"] == ["∧"]
    assert body["uses_star"] is False


def test_check_endpoint(client):
    body = client.post("/check", json={"cases": 20, "seed": 5}).json()
    assert body == {"cases": 20, "ok": True, "failures": []}


def test_parse_errors_are_bad_requests(loaded):
    response = loaded.post("/datasets/demo/query", json={"query": "q(?x"})
    assert response.status_code == 400
    assert "expected" in response.json()["detail"]


def test_unknown_dataset_is_404(client):
    response = client.post("/datasets/ghost/query", json={"query": EXAMPLE_QUERY})
    assert response.status_code == 404


def test_concurrent_queries_agree(loaded):
    results = []
    lock = threading.Lock()

    def worker():
        body = loaded.post(
            "/datasets/demo/query", json={"query": EXAMPLE_QUERY}
        ).json()
        with lock:
            results.append(body["mappings"])

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == results[0] for r in results)
