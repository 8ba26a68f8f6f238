"""Textual serialization of knowledge bases (`.dlrp` format).

Output is deterministic: declarations sorted by name, axioms in input order,
projection attribute lists sorted.  `parse_kb(serialize_kb(kb))` reproduces
`kb` exactly.
"""

from __future__ import annotations

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
    RelationDiff,
    RelationExpr,
    RelationInclusion,
    RelationName,
    RelationOr,
    SameIndividual,
    Select,
    Top,
)

# Precedence levels shared with the parser: or < and/minus < unary < atom.
_OR, _AND, _UNARY, _ATOM = 1, 2, 3, 4


def format_concept(concept: ConceptExpr, prec: int = 0) -> str:
    match concept:
        case ConceptName(name):
            return name
        case Top():
            return "top"
        case Bottom():
            return "bot"
        case ConceptNot(arg):
            s = f"not {format_concept(arg, _UNARY)}"
            return f"({s})" if prec > _UNARY else s
        case ConceptAnd(left, right):
            s = f"{format_concept(left, _AND)} and {format_concept(right, _UNARY)}"
            return f"({s})" if prec > _AND else s
        case ConceptOr(left, right):
            s = f"{format_concept(left, _OR)} or {format_concept(right, _AND)}"
            return f"({s})" if prec > _OR else s
        case ExistsAtLeast(q, attr, rel):
            head = "exists" if q == 1 else f"exists >= {q}"
            return f"{head} [{attr}] {format_relation(rel, _ATOM)}"
        case ExistsAtMost(q, attr, rel):
            return f"exists <= {q} [{attr}] {format_relation(rel, _ATOM)}"
        case GlobalObj(rel):
            return f"gobj {format_relation(rel, _ATOM)}"
        case LocalObj(rel_name):
            return f"lobj {rel_name}"
    raise ModelError(f"unknown concept expression: {concept!r}")


def format_relation(rel: RelationExpr, prec: int = 0) -> str:
    match rel:
        case RelationName(name):
            return name
        case RelationDiff(left, right):
            s = f"{format_relation(left, _AND)} minus {format_relation(right, _UNARY)}"
            return f"({s})" if prec > _AND else s
        case RelationAnd(left, right):
            s = f"{format_relation(left, _AND)} and {format_relation(right, _UNARY)}"
            return f"({s})" if prec > _AND else s
        case RelationOr(left, right):
            s = f"{format_relation(left, _OR)} or {format_relation(right, _AND)}"
            return f"({s})" if prec > _OR else s
        case Select(attr, concept, arg):
            return f"sigma [{attr}: {format_concept(concept)}] {format_relation(arg, _ATOM)}"
        case ProjAtLeast(q, attrs, arg):
            head = "proj" if q == 1 else f"proj >= {q}"
            return f"{head} [{','.join(attrs)}] {format_relation(arg, _ATOM)}"
        case ProjAtMost(q, attrs, arg):
            return f"proj <= {q} [{','.join(attrs)}] {format_relation(arg, _ATOM)}"
    raise ModelError(f"unknown relation expression: {rel!r}")


def serialize_kb(kb: KnowledgeBase) -> str:
    lines: list[str] = []
    for decl in kb.relations:  # already name-sorted
        lines.append(f"relation {decl.name}({','.join(decl.signature)}).")
    for name in sorted(kb.concept_names):
        lines.append(f"concept {name}.")
    for name in sorted(kb.individuals):
        lines.append(f"individual {name}.")
    for a, b in kb.renaming:
        lines.append(f"rename {a} <-> {b}.")
    for ax in kb.tbox:
        match ax:
            case ConceptInclusion(lhs, rhs):
                lines.append(f"tbox {format_concept(lhs)} [= {format_concept(rhs)}.")
            case RelationInclusion(lhs, rhs):
                lines.append(f"tbox {format_relation(lhs)} [= {format_relation(rhs)}.")
    for ax in kb.abox:
        match ax:
            case ConceptAssertion(concept, individual):
                lines.append(f"abox {concept}({individual}).")
            case RelationAssertion(relation, components):
                inner = ", ".join(f"{a}: {o}" for a, o in components)
                lines.append(f"abox {relation}({inner}).")
            case SameIndividual(a, b):
                lines.append(f"abox {a} = {b}.")
            case DifferentIndividuals(a, b):
                lines.append(f"abox {a} != {b}.")
    return "\n".join(lines) + ("\n" if lines else "")
