"""Compiler and reasoner front-end for knowledge bases over attribute-labelled
n-ary relations: parsing, canonicalization, fragment validation, translation
to a reified target language, tableau reasoning, and a bounded finite-model
oracle."""

from .model import (
    Bottom,
    ConceptAnd,
    ConceptAssertion,
    ConceptExpr,
    ConceptInclusion,
    ConceptName,
    ConceptNot,
    ConceptOr,
    DifferentIndividuals,
    ExistsAtLeast,
    ExistsAtMost,
    GlobalObj,
    KnowledgeBase,
    LocalObj,
    ModelError,
    ProjAtLeast,
    ProjAtMost,
    RelationAnd,
    RelationAssertion,
    RelationDecl,
    RelationDiff,
    RelationExpr,
    RelationInclusion,
    RelationName,
    RelationOr,
    SameIndividual,
    Select,
    Top,
    arity,
    compute_tau,
    desugar,
)
from .parser import SourceDiagnostic, parse_kb, parse_kb_or_raise
from .printer import serialize_kb
from .renaming import canonicalize, check_arity_preserving, close_renaming
from .projection_graph import build_signature, is_multitree, validate_dlrpm
from .macros import (
    MacroError,
    expand_equijoin,
    expand_external_uniqueness,
    expand_fd,
    expand_identification,
    expand_key,
)
from .encoder import EncodingContext, NotInFragment, encode, gamma_model
from .modelcheck import (
    Interpretation,
    bounded_sat,
    check_model,
    eval_concept,
    eval_relation,
)
from .reasoner import concept_satisfiable, entails, kb_satisfiable, relation_satisfiable
from .tableau import Budget, is_satisfiable
from .owl_export import export_owl

__version__ = "0.1.0"
