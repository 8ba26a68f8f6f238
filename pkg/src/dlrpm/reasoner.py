"""User-facing reasoning services: satisfiability and entailment.

Everything reduces to knowledge-base satisfiability: the pipeline is
canonicalize, fragment-check, encode, then run the completion-graph solver.
Query axioms become fresh-name witnesses added to the knowledge base; if the
additions push the projection signature out of the fragment the query is
refused rather than answered unsoundly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .encoder import NotInFragment, encode, gamma_model
from .model import (
    ConceptAnd,
    ConceptAssertion,
    ConceptExpr,
    ConceptInclusion,
    ConceptName,
    ConceptNot,
    ExistsAtLeast,
    KnowledgeBase,
    ModelError,
    RelationDiff,
    RelationExpr,
    RelationInclusion,
    TBoxAxiom,
    compute_tau,
)
from .modelcheck import (
    AlcqiInterpretation,
    Interpretation,
    NoModelUpTo,
    SatWitness,
    bounded_sat,
    check_alcqi_model,
)
from .projection_graph import ValidationReport, build_signature, validate_dlrpm
from .renaming import canonicalize
from .tableau import Budget, ResourceExceeded, Sat, Unsat, is_satisfiable

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"
ENTAILED = "entailed"
NOT_ENTAILED = "not-entailed"
OUTSIDE_FRAGMENT = "outside-fragment"


@dataclass(frozen=True)
class SatVerdict:
    status: str  # sat | unsat | unknown | outside-fragment
    witness: Optional[AlcqiInterpretation] = None
    detail: str = ""


@dataclass(frozen=True)
class EntailmentVerdict:
    status: str  # entailed | not-entailed | unknown | outside-fragment
    countermodel: Optional[Interpretation] = None
    detail: str = ""


def analyze(kb: KnowledgeBase):
    """Canonicalize and fragment-check; the shared front half of every service."""
    canonical = canonicalize(kb) if kb.renaming else kb
    graph = build_signature(canonical)
    report = validate_dlrpm(canonical, graph)
    return canonical, graph, report


def fresh_name(base: str, taken: set[str]) -> str:
    name = base
    k = 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def kb_satisfiable(
    kb: KnowledgeBase,
    budget: Budget = Budget(),
    witness_domain: int = 0,
) -> SatVerdict:
    """Knowledge-base satisfiability.

    Raises NotInFragment when the input fails the fragment conditions.  With
    `witness_domain` > 0, a satisfiable verdict without a direct finite model
    falls back to the bounded search for one.
    """
    canonical, graph, report = analyze(kb)
    if not report.ok:
        raise NotInFragment(report)
    akb = encode(canonical, graph, validate=False)
    result = is_satisfiable(akb, budget)
    match result:
        case Sat(model, _):
            witness = model
            if witness is None and witness_domain > 0:
                found = bounded_sat(canonical, witness_domain)
                if isinstance(found, SatWitness):
                    witness = gamma_model(found.interpretation, canonical, graph)
            return SatVerdict(SAT, witness=witness)
        case Unsat(clash, _):
            return SatVerdict(UNSAT, detail=clash)
    return SatVerdict(UNKNOWN, detail="budget exceeded")


def _with_query(
    kb: KnowledgeBase, concept: ConceptExpr
) -> tuple[KnowledgeBase, str, str]:
    """kb plus a fresh concept name forced nonempty and included in `concept`."""
    taken = (
        set(kb.concept_names)
        | set(kb.individuals)
        | {d.name for d in kb.relations}
        | set(kb.attributes)
    )
    cn = fresh_name("_q_cn", taken)
    ind = fresh_name("_q_ind", taken)
    aux = kb.replace(
        concept_names=kb.concept_names | {cn},
        individuals=kb.individuals | {ind},
        tbox=kb.tbox + (ConceptInclusion(ConceptName(cn), concept),),
        abox=kb.abox + (ConceptAssertion(cn, ind),),
    )
    return aux, cn, ind


def _query_satisfiable(
    kb: KnowledgeBase, concept: ConceptExpr, budget: Budget, witness_domain: int
) -> SatVerdict:
    base_report = analyze(kb)[2]
    if not base_report.ok:
        raise NotInFragment(base_report)
    aux, _, _ = _with_query(kb, concept)
    canonical, graph, report = analyze(aux)
    if not report.ok:
        return SatVerdict(OUTSIDE_FRAGMENT, detail="; ".join(report.messages()))
    akb = encode(canonical, graph, validate=False)
    result = is_satisfiable(akb, budget)
    match result:
        case Sat(model, _):
            return SatVerdict(SAT, witness=model)
        case Unsat(clash, _):
            return SatVerdict(UNSAT, detail=clash)
    return SatVerdict(UNKNOWN, detail="budget exceeded")


def concept_satisfiable(
    kb: KnowledgeBase,
    concept: ConceptExpr,
    budget: Budget = Budget(),
    witness_domain: int = 0,
) -> SatVerdict:
    """Is some model of the knowledge base giving the concept a member?"""
    return _query_satisfiable(kb, concept, budget, witness_domain)


def relation_satisfiable(
    kb: KnowledgeBase,
    rel: RelationExpr,
    budget: Budget = Budget(),
) -> SatVerdict:
    """Nonemptiness of a relation: some element is its least attribute's value."""
    tau = compute_tau(rel, kb.relation_map)
    if tau is None:
        raise ModelError("relation signature is undefined; satisfiability is trivial")
    attr = min(tau)
    return _query_satisfiable(kb, ExistsAtLeast(1, attr, rel), budget, 0)


def entails(
    kb: KnowledgeBase,
    axiom: TBoxAxiom,
    budget: Budget = Budget(),
    countermodel_domain: int = 0,
) -> EntailmentVerdict:
    """Does every model of the knowledge base satisfy the axiom?

    Concept inclusions are refuted by a witness of lhs-and-not-rhs; relation
    inclusions by a nonempty difference (union-compatible case) or a nonempty
    left side (incompatible signatures force the left side empty).
    """
    match axiom:
        case ConceptInclusion(lhs, rhs):
            query: ConceptExpr = ConceptAnd(lhs, ConceptNot(rhs))
            aux_for_counter = lambda: _with_query(kb, query)[0]
            verdict = _query_satisfiable(kb, query, budget, 0)
        case RelationInclusion(lhs, rhs):
            canonical = canonicalize(kb) if kb.renaming else kb
            canon_ax = canonicalize(
                kb.replace(tbox=kb.tbox + (axiom,), abox=())
            ).tbox[-1]
            lt = compute_tau(canon_ax.lhs, canonical.relation_map)
            rt = compute_tau(canon_ax.rhs, canonical.relation_map)
            if lt is not None and rt is not None and lt == rt:
                diff = RelationDiff(lhs, rhs)
                tau = compute_tau(lhs, kb.relation_map)
                query = ExistsAtLeast(1, min(tau), diff)
            else:
                tau = compute_tau(lhs, kb.relation_map)
                if tau is None:
                    return EntailmentVerdict(
                        ENTAILED, detail="left side has no defined signature"
                    )
                query = ExistsAtLeast(1, min(tau), lhs)
            aux_for_counter = lambda: _with_query(kb, query)[0]
            verdict = _query_satisfiable(kb, query, budget, 0)
        case _:
            raise ModelError("entailment queries take inclusion axioms")

    if verdict.status == UNSAT:
        return EntailmentVerdict(ENTAILED)
    if verdict.status == SAT:
        counter = None
        if countermodel_domain > 0:
            found = bounded_sat(canonicalize(aux_for_counter()), countermodel_domain)
            if isinstance(found, SatWitness):
                counter = found.interpretation
        return EntailmentVerdict(NOT_ENTAILED, countermodel=counter)
    if verdict.status == OUTSIDE_FRAGMENT:
        return EntailmentVerdict(OUTSIDE_FRAGMENT, detail=verdict.detail)
    return EntailmentVerdict(UNKNOWN, detail=verdict.detail)
