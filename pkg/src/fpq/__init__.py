"""Federated path queries: evaluate nested regular path queries and their
conjunctive, federated, and union extensions over an RDF graph joined with
relational tables."""

from .errors import (
    ArityMismatchError,
    DomainBoundExceededError,
    FpqError,
    GraphFormatError,
    NotAPathError,
    ParseError,
    QueryValidationError,
    RelationFormatError,
    SourceSpan,
    UnknownRelationError,
    UnsupportedConstructError,
)
from .federation import (
    HeterogeneousDb,
    PhasePoint,
    PhaseReport,
    decide_membership,
    eval_query,
    eval_query_timed,
    eval_rule,
    explain_query,
    result_to_json,
    result_to_tsv,
)
from .graph import (
    RdfGraph,
    TraceLabel,
    Triple,
    adom,
    is_path,
    load_graph,
    pair_labels,
    parse_graph,
    traces_of_path,
)
from .model import (
    Alt,
    Axis,
    AxisConst,
    AxisExpr,
    AxisNest,
    Concat,
    Const,
    EMPTY_MAPPING,
    Mapping,
    Nre,
    Pp,
    PpAlt,
    PpInv,
    PpIri,
    PpNegSet,
    PpOpt,
    PpPlus,
    PpSeq,
    PpStar,
    Query,
    RelAtom,
    Rule,
    Star,
    Term,
    TriplePattern,
    Var,
    compatible,
    join_mappings,
    nre_converse,
    nre_size,
    nre_to_text,
    pp_to_text,
    query_to_text,
    restrict_mappings,
    validate,
)
from .nre import NreEvaluator, eval_nre, eval_nre_directed, eval_triple_pattern
from .oracle import (
    FragmentFlags,
    SizeProfile,
    brute_eval_nre,
    brute_eval_query,
    classify_fragment,
    gen_random,
    induced_graph,
    is_strongly_acyclic,
    run_equivalence_check,
)
from .parser import parse_nre, parse_pp, parse_query
from .pp import eval_pp, pp_to_nre
from .relations import (
    RelDatabase,
    Relation,
    eval_atom,
    eval_conjunction,
    load_database,
    load_relation,
)

__version__ = "0.1.0"
