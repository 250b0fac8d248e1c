"""FastAPI service wrapping the query engine.

Datasets load once into an in-memory registry and serve any number of
queries; everything loaded is immutable, so concurrent reads are safe.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from ..errors import FpqError
from ..federation import (
    HeterogeneousDb,
    decide_membership,
    eval_query,
    eval_query_timed,
    explain_query,
)
from ..graph import load_graph, parse_graph, traces_of_path
from ..model import Mapping, nre_to_text
from ..nre import eval_nre
from ..oracle import OPERATOR_ORDER, classify_fragment, run_equivalence_check
from ..parser import parse_nre, parse_pp, parse_query
from ..pp import eval_pp, pp_to_nre
from ..relations import RelDatabase, load_relation, load_relation_file
from .schemas import (
    CheckRequest,
    CheckResponse,
    ClassifyRequest,
    ClassifyResponse,
    DatasetCreate,
    DatasetInfo,
    ExprEvalRequest,
    HealthResponse,
    MembershipRequest,
    MembershipResponse,
    PairsResponse,
    PhaseRow,
    QueryRequest,
    QueryResponse,
    TraceRequest,
    TraceResponse,
    TranslateRequest,
    TranslateResponse,
)

__all__ = ["create_app", "app"]


class _Registry:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._datasets: dict[str, HeterogeneousDb] = {}

    def add(self, name: str, dataset: HeterogeneousDb) -> None:
        with self._lock:
            if name in self._datasets:
                raise KeyError(name)
            self._datasets[name] = dataset

    def get(self, name: str) -> HeterogeneousDb:
        dataset = self._datasets.get(name)
        if dataset is None:
            raise HTTPException(status_code=404, detail=f"no dataset named {name!r}")
        return dataset

    def remove(self, name: str) -> None:
        with self._lock:
            if name not in self._datasets:
                raise HTTPException(
                    status_code=404, detail=f"no dataset named {name!r}"
                )
            del self._datasets[name]

    def items(self) -> list[tuple[str, HeterogeneousDb]]:
        return sorted(self._datasets.items())

    def __len__(self) -> int:
        return len(self._datasets)


def _info(name: str, dataset: HeterogeneousDb) -> DatasetInfo:
    return DatasetInfo(
        name=name,
        triples=len(dataset.graph),
        adom_size=len(dataset.graph.adom),
        relations={
            rel: len(dataset.relations.get(rel)) for rel in dataset.relations.names()
        },
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="fpq",
        description="Federated path queries over an RDF graph joined with relational tables.",
        version="0.1.0",
    )
    registry = _Registry()

    @app.exception_handler(FpqError)
    async def _fpq_error(request, exc: FpqError):  # noqa: ANN001 - FastAPI hook
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", datasets=len(registry))

    @app.post("/datasets", response_model=DatasetInfo, status_code=201)
    def create_dataset(spec: DatasetCreate) -> DatasetInfo:
        try:
            if spec.graph_text is not None:
                graph = parse_graph(spec.graph_text)
            else:
                graph = load_graph(spec.graph_path)
            relations = []
            for source in spec.relations:
                if source.csv_text is not None:
                    relations.append(load_relation(source.name, source.csv_text))
                else:
                    relations.append(
                        load_relation_file(source.name, source.csv_path)
                    )
        except OSError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        dataset = HeterogeneousDb(graph, RelDatabase(relations))
        try:
            registry.add(spec.name, dataset)
        except KeyError:
            raise HTTPException(
                status_code=409, detail=f"dataset {spec.name!r} already exists"
            ) from None
        return _info(spec.name, dataset)

    @app.get("/datasets", response_model=list[DatasetInfo])
    def list_datasets() -> list[DatasetInfo]:
        return [_info(name, ds) for name, ds in registry.items()]

    @app.get("/datasets/{name}", response_model=DatasetInfo)
    def get_dataset(name: str) -> DatasetInfo:
        return _info(name, registry.get(name))

    @app.delete("/datasets/{name}", status_code=204)
    def delete_dataset(name: str) -> None:
        registry.remove(name)

    @app.post("/datasets/{name}/query", response_model=QueryResponse)
    def run_query(name: str, request: QueryRequest) -> QueryResponse:
        dataset = registry.get(name)
        query = parse_query(request.query)
        phases = None
        plan = None
        if request.timed:
            result, report = eval_query_timed(dataset, query)
            phases = [
                PhaseRow(phase=n, time_ms=ms, solutions=sols)
                for n, ms, sols in report.rows()
            ]
        elif request.explain:
            result, plan = explain_query(dataset, query)
        else:
            result = eval_query(dataset, query)
        if request.explain and plan is None:
            _, plan = explain_query(dataset, query)
        variables = query.head_var_order()
        if query.is_boolean():
            return QueryResponse(
                variables=[], mappings=[], boolean=bool(result),
                phases=phases, plan=plan,
            )
        rows = sorted(tuple(m[v] for v in variables) for m in result)
        return QueryResponse(
            variables=variables,
            mappings=[dict(zip(variables, row)) for row in rows],
            boolean=None,
            phases=phases,
            plan=plan,
        )

    @app.post("/datasets/{name}/membership", response_model=MembershipResponse)
    def membership(name: str, request: MembershipRequest) -> MembershipResponse:
        dataset = registry.get(name)
        query = parse_query(request.query)
        member = decide_membership(dataset, query, Mapping(request.bindings))
        return MembershipResponse(member=member)

    @app.post("/datasets/{name}/traces", response_model=TraceResponse)
    def traces(name: str, request: TraceRequest) -> TraceResponse:
        dataset = registry.get(name)
        found = traces_of_path(dataset.graph, request.nodes)
        rendered = sorted([str(label) for label in trace] for trace in found)
        return TraceResponse(traces=rendered)

    @app.post("/eval/nre", response_model=PairsResponse)
    def eval_nre_endpoint(request: ExprEvalRequest) -> PairsResponse:
        graph = parse_graph(request.graph_text)
        pairs = eval_nre(graph, parse_nre(request.expr))
        return PairsResponse(pairs=sorted([a, b] for a, b in pairs))

    @app.post("/eval/pp", response_model=PairsResponse)
    def eval_pp_endpoint(request: ExprEvalRequest) -> PairsResponse:
        graph = parse_graph(request.graph_text)
        pairs = eval_pp(graph, parse_pp(request.expr))
        return PairsResponse(pairs=sorted([a, b] for a, b in pairs))

    @app.post("/translate/pp-to-nre", response_model=TranslateResponse)
    def translate(request: TranslateRequest) -> TranslateResponse:
        return TranslateResponse(nre=nre_to_text(pp_to_nre(parse_pp(request.path))))

    @app.post("/classify", response_model=ClassifyResponse)
    def classify(request: ClassifyRequest) -> ClassifyResponse:
        flags = classify_fragment(parse_query(request.query))
        return ClassifyResponse(
            operators=[op for op in OPERATOR_ORDER if op in flags.operators],
            uses_star=flags.uses_star,
            fragment=flags.describe(),
        )

    @app.post("/check", response_model=CheckResponse)
    def check(request: CheckRequest) -> CheckResponse:
        failures = run_equivalence_check(request.cases, request.seed)
        return CheckResponse(
            cases=request.cases, ok=not failures, failures=failures
        )

    return app


app = create_app()
