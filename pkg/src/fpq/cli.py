"""Command-line front end.

Commands run in-process against local files; `query` and `classify` can also
act as thin clients of a running service via --server.  Exit codes: 0 on
success, 1 on user error (missing files, parse or validation failures),
2 on internal error.
"""

from __future__ import annotations

import json
import os
import sys
import uuid
from pathlib import Path

import click

from .bench import format_table, format_tsv, run_benchmark, write_chart
from .datagen import DEFAULT_SEED, PAPER_SCALE_POINTS, write_benchmark_data
from .errors import FpqError
from .federation import (
    HeterogeneousDb,
    eval_query,
    eval_query_timed,
    explain_query,
    result_to_json,
    result_to_tsv,
)
from .graph import load_graph
from .oracle import OPERATOR_ORDER, classify_fragment, run_equivalence_check
from .parser import parse_query
from .relations import EMPTY_DATABASE, load_database


def _default_seed() -> int:
    return int(os.environ.get("FPQ_SEED", DEFAULT_SEED))


def _load_dataset(graph_path: str, manifest: str | None) -> HeterogeneousDb:
    graph = load_graph(graph_path)
    relations = load_database(manifest) if manifest else EMPTY_DATABASE
    return HeterogeneousDb(graph, relations)


@click.group()
def cli() -> None:
    """Federated path queries over an RDF graph joined with CSV relations."""


@cli.command("query")
@click.option("--graph", "graph_path", required=True, help="RDF graph file.")
@click.option("--db", "manifest", default=None, help="Relations manifest (JSON).")
@click.option("--query", "query_path", required=True, help="Query file.")
@click.option(
    "--format", "fmt", type=click.Choice(["tsv", "json"]), default="tsv",
    show_default=True,
)
@click.option("--time", "timed", is_flag=True, help="Print a phase report (stderr).")
@click.option("--explain", is_flag=True, help="Print the atom plan (stderr).")
@click.option("--server", default=None, help="Run against a service URL instead.")
def query_cmd(
    graph_path: str,
    manifest: str | None,
    query_path: str,
    fmt: str,
    timed: bool,
    explain: bool,
    server: str | None,
) -> None:
    """Evaluate a query file and print the result mappings."""
    query_text = Path(query_path).read_text(encoding="utf-8")
    if server:
        _remote_query(server, graph_path, manifest, query_text, fmt, timed, explain)
        return
    query = parse_query(query_text)
    dataset = _load_dataset(graph_path, manifest)
    report = None
    plan = None
    if timed:
        result, report = eval_query_timed(dataset, query)
    elif explain:
        result, plan = explain_query(dataset, query)
    else:
        result = eval_query(dataset, query)
    if explain and plan is None:
        _, plan = explain_query(dataset, query)
    if plan is not None:
        click.echo(plan, err=True)
    if fmt == "json":
        click.echo(result_to_json(query, result))
    else:
        click.echo(result_to_tsv(query, result))
    if report is not None:
        click.echo(report.to_tsv(), err=True)


def _remote_query(
    server: str,
    graph_path: str,
    manifest: str | None,
    query_text: str,
    fmt: str,
    timed: bool,
    explain: bool,
) -> None:
    import httpx

    relations = []
    if manifest:
        manifest_path = Path(manifest)
        spec = json.loads(manifest_path.read_text(encoding="utf-8"))
        for entry in spec.get("relations", []):
            csv_text = (manifest_path.parent / entry["path"]).read_text(
                encoding="utf-8"
            )
            relations.append({"name": entry["name"], "csv_text": csv_text})
    name = f"cli-{uuid.uuid4().hex[:12]}"
    payload = {
        "name": name,
        "graph_text": Path(graph_path).read_text(encoding="utf-8"),
        "relations": relations,
    }
    with httpx.Client(base_url=server, timeout=300.0) as client:
        response = client.post("/datasets", json=payload)
        if response.status_code >= 400:
            raise FpqError(f"server rejected dataset: {response.text}")
        try:
            response = client.post(
                f"/datasets/{name}/query",
                json={"query": query_text, "timed": timed, "explain": explain},
            )
            if response.status_code >= 400:
                raise FpqError(f"server rejected query: {response.text}")
            body = response.json()
        finally:
            client.delete(f"/datasets/{name}")
    if body.get("plan"):
        click.echo(body["plan"], err=True)
    if body.get("boolean") is not None:
        click.echo(json.dumps(body["boolean"]) if fmt == "json" else
                   ("true" if body["boolean"] else "false"))
    elif fmt == "json":
        click.echo(json.dumps(body["mappings"], indent=2))
    else:
        variables = body["variables"]
        lines = ["\t".join(variables)]
        lines += ["\t".join(m[v] for v in variables) for m in body["mappings"]]
        click.echo("\n".join(lines))
    if body.get("phases"):
        lines = ["phase\ttime_ms\tsolutions"]
        lines += [
            f"{row['phase']}\t{row['time_ms']}\t{row['solutions']}"
            for row in body["phases"]
        ]
        click.echo("\n".join(lines), err=True)


@cli.command("classify")
@click.option("--query", "query_path", required=True, help="Query file.")
@click.option("--server", default=None, help="Run against a service URL instead.")
def classify_cmd(query_path: str, server: str | None) -> None:
    """Print the operator flags of a query."""
    query_text = Path(query_path).read_text(encoding="utf-8")
    if server:
        import httpx

        with httpx.Client(base_url=server, timeout=60.0) as client:
            response = client.post("/classify", json={"query": query_text})
            if response.status_code >= 400:
                raise FpqError(f"server rejected query: {response.text}")
            body = response.json()
        operators, uses_star = body["operators"], body["uses_star"]
        fragment = body["fragment"]
    else:
        flags = classify_fragment(parse_query(query_text))
        operators = [op for op in OPERATOR_ORDER if op in flags.operators]
        uses_star = flags.uses_star
        fragment = flags.describe()
    click.echo(f"operators: {' '.join(operators) if operators else '(none)'}")
    click.echo(f"star: {'present' if uses_star else 'absent'}")
    click.echo(f"fragment: {fragment}")


@cli.command("check")
@click.option("--cases", default=100, show_default=True, help="Random instances.")
@click.option("--seed", default=None, type=int, help="Base seed (or $FPQ_SEED).")
def check_cmd(cases: int, seed: int | None) -> None:
    """Cross-check the engine against the brute-force oracle."""
    base = seed if seed is not None else _default_seed()
    failures = run_equivalence_check(cases, base)
    if failures:
        for failure in failures:
            click.echo(failure, err=True)
        click.echo(f"{cases - len(failures)}/{cases} ok", err=True)
        raise _InternalFailure("oracle cross-check found mismatches")
    click.echo(f"{cases}/{cases} ok")


@cli.command("gen")
@click.option("--out", "out_dir", required=True, help="Output directory.")
@click.option("--points", default=PAPER_SCALE_POINTS, show_default=True)
@click.option("--tuples", default=1000, show_default=True)
@click.option("--seed", default=None, type=int, help="Seed (or $FPQ_SEED).")
def gen_cmd(out_dir: str, points: int, tuples: int, seed: int | None) -> None:
    """Generate a map graph, order tables, and a relations manifest."""
    if points < 2:
        raise FpqError("--points must be at least 2")
    if tuples < 0:
        raise FpqError("--tuples must be non-negative")
    base = seed if seed is not None else _default_seed()
    paths = write_benchmark_data(out_dir, seed=base, n_points=points, n_tuples=tuples)
    for kind, path in paths.items():
        click.echo(f"{kind}: {path}")


@cli.command("bench")
@click.option(
    "--sizes", default="10000,100000,1000000", show_default=True,
    help="Comma-separated relational sizes.",
)
@click.option("--points", default=PAPER_SCALE_POINTS, show_default=True)
@click.option("--seed", default=None, type=int, help="Seed (or $FPQ_SEED).")
@click.option(
    "--format", "fmt", type=click.Choice(["table", "tsv"]), default="table",
    show_default=True,
)
@click.option("--chart", default=None, help="Write size→total-time CSV here.")
@click.option("--quiet", is_flag=True, help="Suppress progress messages.")
def bench_cmd(
    sizes: str, points: int, seed: int | None, fmt: str, chart: str | None,
    quiet: bool,
) -> None:
    """Run the bundled q1–q4 benchmark across relational sizes."""
    try:
        size_list = [int(s) for s in sizes.split(",") if s.strip()]
    except ValueError:
        raise FpqError(f"--sizes must be comma-separated integers, got {sizes!r}")
    if not size_list:
        raise FpqError("--sizes must name at least one size")
    if points < 2 or any(s < 0 for s in size_list):
        raise FpqError("--points must be at least 2 and sizes non-negative")
    base = seed if seed is not None else _default_seed()
    progress = None if quiet else (lambda msg: click.echo(msg, err=True))
    run = run_benchmark(size_list, n_points=points, seed=base, progress=progress)
    click.echo(format_table(run) if fmt == "table" else format_tsv(run))
    if chart:
        write_chart(run, chart)
        click.echo(f"chart data: {chart}", err=True)


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve_cmd(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("fpq.service:app", host=host, port=port)


class _InternalFailure(Exception):
    pass


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except (FpqError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except _InternalFailure as exc:
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(2)
    except SystemExit:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
