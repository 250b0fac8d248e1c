from importlib import resources

import pytest

from fpq.federation import HeterogeneousDb
from fpq.graph import RdfGraph, parse_graph
from fpq.relations import EMPTY_DATABASE, RelDatabase, load_relation


@pytest.fixture
def example_g() -> RdfGraph:
    """Three-triple graph where next::p/next::q and next::r meet at (a, c)."""
    return parse_graph("a p b .\nb q c .\na r c .")


@pytest.fixture
def example_h() -> RdfGraph:
    """Variant of example_g whose r-edge ends at d instead of c."""
    return parse_graph("a p b .\nb q c .\na r d .")


@pytest.fixture
def trace_graph() -> RdfGraph:
    return parse_graph("a b c .\na c b .")


@pytest.fixture
def triangle_prdf() -> RdfGraph:
    return parse_graph("a p b .\nb p c .\na p c .")


@pytest.fixture(scope="session")
def table1_csv() -> str:
    return (
        resources.files("fpq").joinpath("data/orders_table1.csv").read_text("utf-8")
    )


@pytest.fixture
def table1_db(table1_csv) -> RelDatabase:
    return RelDatabase([load_relation("Orders", table1_csv)])


@pytest.fixture
def graph_only(example_g) -> HeterogeneousDb:
    return HeterogeneousDb(example_g, EMPTY_DATABASE)
