"""Benchmark harness: the four bundled federated queries over growing tables.

The report mirrors the four-phase layout (RDF / Rel-DB / Joining / Total,
each with Time and Solutions) per relational size, plus an optional
size -> total-time CSV for charting.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from .datagen import DEFAULT_SEED, PAPER_SCALE_POINTS, gen_map_graph, gen_orders
from .federation import HeterogeneousDb, PhaseReport, eval_query_timed
from .graph import parse_graph
from .model import Query
from .parser import parse_query
from .relations import RelDatabase, load_relation

BUNDLED_QUERY_NAMES = ("q1", "q2", "q3", "q4")


def bundled_query_text(name: str) -> str:
    return (
        resources.files("fpq").joinpath(f"data/queries/{name}.fpq").read_text("utf-8")
    )


def bundled_queries() -> list[Query]:
    return [parse_query(bundled_query_text(name)) for name in BUNDLED_QUERY_NAMES]


@dataclass(frozen=True)
class BenchCell:
    query: str
    size: int
    report: PhaseReport


@dataclass(frozen=True)
class BenchRun:
    sizes: tuple[int, ...]
    n_points: int
    seed: int
    cells: tuple[BenchCell, ...]

    def report_for(self, query: str, size: int) -> PhaseReport:
        for cell in self.cells:
            if cell.query == query and cell.size == size:
                return cell.report
        raise KeyError((query, size))


def run_benchmark(
    sizes: Sequence[int],
    n_points: int = PAPER_SCALE_POINTS,
    seed: int = DEFAULT_SEED,
    queries: Sequence[Query] | None = None,
    progress: Callable[[str], None] | None = None,
) -> BenchRun:
    """Generate data at each size and time every query, phase by phase."""

    def note(message: str) -> None:
        if progress is not None:
            progress(message)

    note(f"generating map graph ({n_points} points, seed {seed})")
    text, spec = gen_map_graph(seed, n_points)
    graph = parse_graph(text)
    note(f"map graph ready: {len(graph)} triples, |adom| = {len(graph.adom)}")
    if queries is None:
        queries = bundled_queries()
    cells: list[BenchCell] = []
    for size in sizes:
        note(f"generating relational data: {size} tuples per table")
        orders_buf, gps_buf = io.StringIO(), io.StringIO()
        gen_orders(seed, size, spec, orders_buf, gps_buf)
        db = RelDatabase(
            [
                load_relation("Orders", orders_buf.getvalue()),
                load_relation("GPS", gps_buf.getvalue()),
            ]
        )
        d = HeterogeneousDb(graph, db)
        for query in queries:
            _, report = eval_query_timed(d, query)
            note(
                f"  {query.name} @ {size}: total {report.total.time_ms} ms, "
                f"{report.total.solutions} solution(s)"
            )
            cells.append(BenchCell(query.name, size, report))
    return BenchRun(tuple(sizes), n_points, seed, tuple(cells))


_PHASES = ("RDF", "Rel-DB", "Joining", "Total")


def format_table(run: BenchRun) -> str:
    """Aligned text table: per query, four phase rows; per size, Time and
    Solutions columns."""
    queries = []
    for cell in run.cells:
        if cell.query not in queries:
            queries.append(cell.query)
    header1 = ["Query", "Phase"]
    header2 = ["", ""]
    for size in run.sizes:
        header1 += [f"{size:,} tuples", ""]
        header2 += ["Time", "Solutions"]
    rows: list[list[str]] = [header1, header2]
    for query in queries:
        for i, phase in enumerate(_PHASES):
            row = [query if i == 0 else "", phase]
            for size in run.sizes:
                report = run.report_for(query, size)
                name_to_point = dict(
                    (name, (ms, sols)) for name, ms, sols in report.rows()
                )
                ms, sols = name_to_point[phase]
                row += [f"{ms:,}", f"{sols:,}"]
            rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def format_tsv(run: BenchRun) -> str:
    lines = ["query\tphase\tsize\ttime_ms\tsolutions"]
    for cell in run.cells:
        for name, ms, sols in cell.report.rows():
            lines.append(f"{cell.query}\t{name}\t{cell.size}\t{ms}\t{sols}")
    return "\n".join(lines)


def chart_csv(run: BenchRun) -> str:
    """Per-query line chart data: size -> end-to-end time."""
    lines = ["query,size,total_ms"]
    for cell in run.cells:
        lines.append(f"{cell.query},{cell.size},{cell.report.total.time_ms}")
    return "\n".join(lines) + "\n"


def write_chart(run: BenchRun, path: str | Path) -> None:
    Path(path).write_text(chart_csv(run), encoding="utf-8")
