"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class RelationSource(BaseModel):
    """One relation, supplied inline or as a server-side CSV path."""

    name: str
    csv_text: str | None = None
    csv_path: str | None = None

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "RelationSource":
        if (self.csv_text is None) == (self.csv_path is None):
            raise ValueError("provide exactly one of csv_text or csv_path")
        return self


class DatasetCreate(BaseModel):
    name: str = Field(min_length=1)
    graph_text: str | None = None
    graph_path: str | None = None
    relations: list[RelationSource] = []

    @model_validator(mode="after")
    def _exactly_one_graph(self) -> "DatasetCreate":
        if (self.graph_text is None) == (self.graph_path is None):
            raise ValueError("provide exactly one of graph_text or graph_path")
        return self


class DatasetInfo(BaseModel):
    name: str
    triples: int
    adom_size: int
    relations: dict[str, int]


class QueryRequest(BaseModel):
    query: str
    timed: bool = False
    explain: bool = False


class PhaseRow(BaseModel):
    phase: str
    time_ms: int
    solutions: int


class QueryResponse(BaseModel):
    variables: list[str]
    mappings: list[dict[str, str]]
    boolean: bool | None = None
    phases: list[PhaseRow] | None = None
    plan: str | None = None


class MembershipRequest(BaseModel):
    query: str
    bindings: dict[str, str]


class MembershipResponse(BaseModel):
    member: bool


class TraceRequest(BaseModel):
    nodes: list[str] = Field(min_length=1)


class TraceResponse(BaseModel):
    traces: list[list[str]]


class ExprEvalRequest(BaseModel):
    graph_text: str
    expr: str


class PairsResponse(BaseModel):
    pairs: list[list[str]]


class TranslateRequest(BaseModel):
    path: str


class TranslateResponse(BaseModel):
    nre: str


class ClassifyRequest(BaseModel):
    query: str


class ClassifyResponse(BaseModel):
    operators: list[str]
    uses_star: bool
    fragment: str


class CheckRequest(BaseModel):
    cases: int = Field(default=100, ge=1, le=20000)
    seed: int = 0


class CheckResponse(BaseModel):
    cases: int
    ok: bool
    failures: list[str]


class HealthResponse(BaseModel):
    status: str
    datasets: int
