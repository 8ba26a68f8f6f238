"""OWL 2 functional-style serialization of encoded knowledge bases.

Line-oriented output with a stable ordering, so exports are diffable and
byte-reproducible.  Only the constructs the encoder emits are needed:
classes, object properties with inverses, Boolean operators, and qualified
cardinalities.
"""

from __future__ import annotations

import re

from .alcqi import (
    AAnd,
    ABottom,
    AName,
    ANot,
    AOr,
    ATop,
    AtLeast,
    AtMost,
    AlcqiConcept,
    AlcqiKb,
    Role,
)

DEFAULT_IRI = "urn:dlrpm:export"

_IRI_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.-]*:\S+\Z")
_FRAGMENT_SAFE = re.compile(r"[A-Za-z0-9_]")


class InvalidIri(ValueError):
    pass


def _check_iri(iri: str) -> str:
    if not _IRI_RE.match(iri):
        raise InvalidIri(f"not an absolute IRI: {iri!r}")
    return iri


def mangle(name: str) -> str:
    """Injective mapping of symbol names to IRI fragment characters.

    Names are identifier-shaped already; anything else is escaped as `_xNN`
    with the underscore itself doubled first, so distinct names never
    collide.
    """
    out = []
    for ch in name:
        if ch == "_":
            out.append("__")
        elif _FRAGMENT_SAFE.match(ch):
            out.append(ch)
        else:
            out.append(f"_x{ord(ch):02X}")
    return "".join(out)


def _cls(name: str, iri: str) -> str:
    return f"<{iri}#{mangle(name)}>"


def _obj(role: Role, iri: str) -> str:
    base = f"<{iri}#{mangle(role.name)}>"
    return f"ObjectInverseOf( {base} )" if role.inverted else base


def _ind(name: str, iri: str) -> str:
    return f"<{iri}#{mangle(name)}>"


def class_expression(concept: AlcqiConcept, iri: str) -> str:
    match concept:
        case AName(name):
            return _cls(name, iri)
        case ATop():
            return "owl:Thing"
        case ABottom():
            return "owl:Nothing"
        case ANot(arg):
            return f"ObjectComplementOf( {class_expression(arg, iri)} )"
        case AAnd(args):
            inner = " ".join(class_expression(a, iri) for a in args)
            return f"ObjectIntersectionOf( {inner} )"
        case AOr(args):
            inner = " ".join(class_expression(a, iri) for a in args)
            return f"ObjectUnionOf( {inner} )"
        case AtLeast(q, role, filler):
            if isinstance(filler, ATop):
                return f"ObjectMinCardinality( {q} {_obj(role, iri)} )"
            return (
                f"ObjectMinCardinality( {q} {_obj(role, iri)} "
                f"{class_expression(filler, iri)} )"
            )
        case AtMost(q, role, filler):
            if isinstance(filler, ATop):
                return f"ObjectMaxCardinality( {q} {_obj(role, iri)} )"
            return (
                f"ObjectMaxCardinality( {q} {_obj(role, iri)} "
                f"{class_expression(filler, iri)} )"
            )
    raise ValueError(f"unknown concept: {concept!r}")


def export_owl(kb: AlcqiKb, ontology_iri: str = DEFAULT_IRI) -> str:
    """Functional-style syntax document for the whole knowledge base."""
    iri = _check_iri(ontology_iri)
    lines = [
        "Prefix( owl: = <http://www.w3.org/2002/07/owl#> )",
        f"Ontology( <{iri}>",
    ]
    for name in sorted(kb.concept_names):
        lines.append(f"  Declaration( Class( {_cls(name, iri)} ) )")
    for name in sorted(kb.role_names):
        lines.append(f"  Declaration( ObjectProperty( <{iri}#{mangle(name)}> ) )")
    for name in sorted(kb.individuals):
        lines.append(f"  Declaration( NamedIndividual( {_ind(name, iri)} ) )")
    for lhs, rhs in kb.gcis:
        lines.append(
            f"  SubClassOf( {class_expression(lhs, iri)} {class_expression(rhs, iri)} )"
        )
    for concept, ind in kb.concept_assertions:
        lines.append(
            f"  ClassAssertion( {class_expression(concept, iri)} {_ind(ind, iri)} )"
        )
    for role, a, b in kb.role_assertions:
        lines.append(
            f"  ObjectPropertyAssertion( {_obj(role, iri)} {_ind(a, iri)} {_ind(b, iri)} )"
        )
    for a, b in kb.equalities:
        lines.append(f"  SameIndividual( {_ind(a, iri)} {_ind(b, iri)} )")
    for a, b in kb.inequalities:
        lines.append(f"  DifferentIndividuals( {_ind(a, iri)} {_ind(b, iri)} )")
    lines.append(")")
    return "\n".join(lines) + "\n"
