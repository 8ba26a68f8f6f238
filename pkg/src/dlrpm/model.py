"""Core data model: signatures, expressions, axioms, and knowledge bases.

Relations range over attribute-labelled tuples rather than positional ones,
so a relation signature is a set of attribute names and every expression
carries enough structure to recompute its signature bottom-up.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Optional, Union

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
# Attributes additionally admit positive integers so positional naming can be
# recovered through renaming axioms.
ATTR_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9_]*|[1-9][0-9]*)\Z")
# Machinery-generated names start with an underscore, which the surface
# syntax cannot produce, so they never collide with user names.
INTERNAL_RE = re.compile(r"_[A-Za-z0-9_]+\Z")

# Cardinality parameters are unbounded in principle; beyond this cap the
# validator emits a diagnostic instead of silently wrapping.
MAX_CARDINALITY = 2**31 - 1

# Reserved concept name used when desugaring `bot` (empty under every
# interpretation since it only occurs as `_bot and not _bot`).  Leading
# underscore keeps it outside the parseable identifier space.
BOTTOM_WITNESS = "_bot"


class ModelError(ValueError):
    """Raised when an expression or knowledge base violates a structural rule."""


def _check_attr(name: str) -> str:
    if not ATTR_RE.match(name):
        raise ModelError(f"invalid attribute name: {name!r}")
    return name


def _check_name(name: str, kind: str) -> str:
    if not NAME_RE.match(name) and not INTERNAL_RE.match(name):
        raise ModelError(f"invalid {kind} name: {name!r}")
    return name


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class RelationDecl:
    """A named relation with its ordered attribute signature (arity >= 2)."""

    name: str
    signature: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_name(self.name, "relation")
        for attr in self.signature:
            _check_attr(attr)
        if len(self.signature) < 2:
            raise ModelError(f"relation {self.name} must have arity >= 2")
        if len(set(self.signature)) != len(self.signature):
            raise ModelError(f"relation {self.name} repeats an attribute")

    @property
    def attr_set(self) -> frozenset[str]:
        return frozenset(self.signature)

    @property
    def arity(self) -> int:
        return len(self.signature)


# ---------------------------------------------------------------------------
# Concept and relation expressions


class ConceptExpr:
    """Base class for concept expressions."""

    __slots__ = ()


class RelationExpr:
    """Base class for relation expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class ConceptName(ConceptExpr):
    name: str

    def __post_init__(self) -> None:
        _check_name(self.name, "concept")


@dataclass(frozen=True)
class Top(ConceptExpr):
    pass


@dataclass(frozen=True)
class Bottom(ConceptExpr):
    pass


@dataclass(frozen=True)
class ConceptNot(ConceptExpr):
    arg: ConceptExpr


@dataclass(frozen=True)
class ConceptAnd(ConceptExpr):
    left: ConceptExpr
    right: ConceptExpr


@dataclass(frozen=True)
class ConceptOr(ConceptExpr):
    left: ConceptExpr
    right: ConceptExpr


@dataclass(frozen=True)
class ExistsAtLeast(ConceptExpr):
    """Elements that are the U-component of at least q tuples of the relation."""

    q: int
    attr: str
    rel: RelationExpr

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ModelError("cardinality must be >= 1")
        _check_attr(self.attr)


@dataclass(frozen=True)
class ExistsAtMost(ConceptExpr):
    """Derived form: elements with at most q tuples on the given attribute."""

    q: int
    attr: str
    rel: RelationExpr

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ModelError("cardinality must be >= 1")
        _check_attr(self.attr)


@dataclass(frozen=True)
class GlobalObj(ConceptExpr):
    """Global objectification: identifiers of tuples of an arbitrary relation."""

    rel: RelationExpr


@dataclass(frozen=True)
class LocalObj(ConceptExpr):
    """Local objectification; applies to relation names only."""

    rel_name: str

    def __post_init__(self) -> None:
        _check_name(self.rel_name, "relation")


@dataclass(frozen=True)
class RelationName(RelationExpr):
    name: str

    def __post_init__(self) -> None:
        _check_name(self.name, "relation")


@dataclass(frozen=True)
class RelationDiff(RelationExpr):
    left: RelationExpr
    right: RelationExpr


@dataclass(frozen=True)
class RelationAnd(RelationExpr):
    left: RelationExpr
    right: RelationExpr


@dataclass(frozen=True)
class RelationOr(RelationExpr):
    left: RelationExpr
    right: RelationExpr


@dataclass(frozen=True)
class Select(RelationExpr):
    """Selection: tuples whose attr-component belongs to the concept."""

    attr: str
    concept: ConceptExpr
    rel: RelationExpr

    def __post_init__(self) -> None:
        _check_attr(self.attr)


def _norm_proj_attrs(attrs) -> tuple[str, ...]:
    out = tuple(sorted(attrs))
    if len(out) < 2:
        raise ModelError("projection needs at least two attributes")
    if len(set(out)) != len(out):
        raise ModelError("projection attribute list repeats an attribute")
    for attr in out:
        _check_attr(attr)
    return out


@dataclass(frozen=True)
class ProjAtLeast(RelationExpr):
    """Tuples over `attrs` extended by at least q tuples of the relation."""

    q: int
    attrs: tuple[str, ...]
    rel: RelationExpr

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ModelError("cardinality must be >= 1")
        object.__setattr__(self, "attrs", _norm_proj_attrs(self.attrs))


@dataclass(frozen=True)
class ProjAtMost(RelationExpr):
    """Tuples over `attrs` extended by between 1 and q tuples of the relation."""

    q: int
    attrs: tuple[str, ...]
    rel: RelationExpr

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ModelError("cardinality must be >= 1")
        object.__setattr__(self, "attrs", _norm_proj_attrs(self.attrs))


# ---------------------------------------------------------------------------
# Axioms


@dataclass(frozen=True)
class ConceptInclusion:
    lhs: ConceptExpr
    rhs: ConceptExpr


@dataclass(frozen=True)
class RelationInclusion:
    lhs: RelationExpr
    rhs: RelationExpr


@dataclass(frozen=True)
class ConceptAssertion:
    concept: str
    individual: str


@dataclass(frozen=True)
class RelationAssertion:
    """Ground tuple membership; components are stored sorted by attribute."""

    relation: str
    components: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        comps = tuple(sorted(self.components))
        attrs = [a for a, _ in comps]
        if len(set(attrs)) != len(attrs):
            raise ModelError("tuple assigns an attribute twice")
        if len(comps) < 1:
            raise ModelError("empty tuple assertion")
        object.__setattr__(self, "components", comps)

    @property
    def attr_set(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.components)


@dataclass(frozen=True)
class SameIndividual:
    left: str
    right: str


@dataclass(frozen=True)
class DifferentIndividuals:
    left: str
    right: str


TBoxAxiom = Union[ConceptInclusion, RelationInclusion]
ABoxAxiom = Union[ConceptAssertion, RelationAssertion, SameIndividual, DifferentIndividuals]
Axiom = Union[TBoxAxiom, ABoxAxiom]


# ---------------------------------------------------------------------------
# Knowledge base


@dataclass(frozen=True)
class KnowledgeBase:
    """Immutable container for declarations, TBox, ABox, and renaming pairs.

    Relations are normalised to name order so structural equality is
    independent of declaration order; axiom order is preserved.
    """

    relations: tuple[RelationDecl, ...] = ()
    concept_names: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()
    tbox: tuple[TBoxAxiom, ...] = ()
    abox: tuple[ABoxAxiom, ...] = ()
    renaming: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        rels = tuple(sorted(self.relations, key=lambda d: d.name))
        names = [d.name for d in rels]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ModelError(f"duplicate relation declaration: {', '.join(dup)}")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "concept_names", frozenset(self.concept_names))
        object.__setattr__(self, "individuals", frozenset(self.individuals))
        object.__setattr__(self, "tbox", tuple(self.tbox))
        object.__setattr__(self, "abox", tuple(self.abox))
        object.__setattr__(self, "renaming", tuple((a, b) for a, b in self.renaming))

    @cached_property
    def relation_map(self) -> Mapping[str, RelationDecl]:
        return {d.name: d for d in self.relations}

    @cached_property
    def attributes(self) -> frozenset[str]:
        """The attribute universe: every attribute mentioned anywhere."""
        out: set[str] = set()
        for decl in self.relations:
            out.update(decl.signature)
        for a, b in self.renaming:
            out.add(a)
            out.add(b)
        for ax in self.tbox:
            for rel in iter_axiom_relations(ax):
                out.update(_expr_attrs(rel))
        for ax in self.abox:
            if isinstance(ax, RelationAssertion):
                out.update(ax.attr_set)
        return frozenset(out)

    def replace(self, **kw) -> "KnowledgeBase":
        data = {
            "relations": self.relations,
            "concept_names": self.concept_names,
            "individuals": self.individuals,
            "tbox": self.tbox,
            "abox": self.abox,
            "renaming": self.renaming,
        }
        data.update(kw)
        return KnowledgeBase(**data)


# ---------------------------------------------------------------------------
# Signature computation (tau)


def compute_tau(
    rel: RelationExpr, decls: Mapping[str, RelationDecl]
) -> Optional[frozenset[str]]:
    """Signature of a relation expression, or None where undefined.

    Undefined is a value rather than an exception so a validator can report
    every ill-formed subexpression in a single pass.
    """
    match rel:
        case RelationName(name):
            if name not in decls:
                raise ModelError(f"relation {name} is not declared")
            return decls[name].attr_set
        case RelationDiff(left, _right):
            return compute_tau(left, decls)
        case RelationAnd(left, right) | RelationOr(left, right):
            lt = compute_tau(left, decls)
            rt = compute_tau(right, decls)
            if lt is None or rt is None or lt != rt:
                return None
            return lt
        case Select(attr, _concept, arg):
            t = compute_tau(arg, decls)
            if t is None or attr not in t:
                return None
            return t
        case ProjAtLeast(_q, attrs, arg) | ProjAtMost(_q, attrs, arg):
            t = compute_tau(arg, decls)
            sub = frozenset(attrs)
            if t is None or not sub < t:
                return None
            return sub
    raise ModelError(f"unknown relation expression: {rel!r}")


def arity(rel: RelationExpr, decls: Mapping[str, RelationDecl]) -> Optional[int]:
    t = compute_tau(rel, decls)
    return None if t is None else len(t)


# ---------------------------------------------------------------------------
# Desugaring


def desugar(concept: ConceptExpr) -> ConceptExpr:
    """Rewrite derived constructors to the primitive ones.

    or -> not/and, top/bot -> witness contradiction, at-most -> negated
    at-least.  Idempotent; recurses into selection concepts inside relation
    arguments.
    """
    match concept:
        case ConceptName():
            return concept
        case Top():
            return ConceptNot(desugar(Bottom()))
        case Bottom():
            w = ConceptName(BOTTOM_WITNESS)
            return ConceptAnd(w, ConceptNot(w))
        case ConceptNot(arg):
            return ConceptNot(desugar(arg))
        case ConceptAnd(left, right):
            return ConceptAnd(desugar(left), desugar(right))
        case ConceptOr(left, right):
            return ConceptNot(ConceptAnd(ConceptNot(desugar(left)), ConceptNot(desugar(right))))
        case ExistsAtLeast(q, attr, rel):
            return ExistsAtLeast(q, attr, desugar_relation(rel))
        case ExistsAtMost(q, attr, rel):
            return ConceptNot(ExistsAtLeast(q + 1, attr, desugar_relation(rel)))
        case GlobalObj(rel):
            return GlobalObj(desugar_relation(rel))
        case LocalObj():
            return concept
    raise ModelError(f"unknown concept expression: {concept!r}")


def desugar_relation(rel: RelationExpr) -> RelationExpr:
    match rel:
        case RelationName():
            return rel
        case RelationDiff(left, right):
            return RelationDiff(desugar_relation(left), desugar_relation(right))
        case RelationAnd(left, right):
            return RelationAnd(desugar_relation(left), desugar_relation(right))
        case RelationOr(left, right):
            return RelationOr(desugar_relation(left), desugar_relation(right))
        case Select(attr, concept, arg):
            return Select(attr, desugar(concept), desugar_relation(arg))
        case ProjAtLeast(q, attrs, arg):
            return ProjAtLeast(q, attrs, desugar_relation(arg))
        case ProjAtMost(q, attrs, arg):
            return ProjAtMost(q, attrs, desugar_relation(arg))
    raise ModelError(f"unknown relation expression: {rel!r}")


def desugar_axiom(ax: Axiom) -> Axiom:
    match ax:
        case ConceptInclusion(lhs, rhs):
            return ConceptInclusion(desugar(lhs), desugar(rhs))
        case RelationInclusion(lhs, rhs):
            return RelationInclusion(desugar_relation(lhs), desugar_relation(rhs))
    return ax


# ---------------------------------------------------------------------------
# Expression walkers


def iter_subconcepts(concept: ConceptExpr) -> Iterator[ConceptExpr]:
    """All concept subexpressions, including nested inside relations."""
    yield concept
    match concept:
        case ConceptNot(arg):
            yield from iter_subconcepts(arg)
        case ConceptAnd(left, right) | ConceptOr(left, right):
            yield from iter_subconcepts(left)
            yield from iter_subconcepts(right)
        case ExistsAtLeast(_, _, rel) | ExistsAtMost(_, _, rel) | GlobalObj(rel):
            for sub in iter_subrelations(rel):
                if isinstance(sub, Select):
                    yield from iter_subconcepts(sub.concept)


def iter_subrelations(rel: RelationExpr) -> Iterator[RelationExpr]:
    """All relation subexpressions, including nested inside concepts."""
    yield rel
    match rel:
        case RelationDiff(left, right) | RelationAnd(left, right) | RelationOr(left, right):
            yield from iter_subrelations(left)
            yield from iter_subrelations(right)
        case Select(_, concept, arg):
            for sub in iter_subconcepts(concept):
                yield from _relations_in_concept(sub)
            yield from iter_subrelations(arg)
        case ProjAtLeast(_, _, arg) | ProjAtMost(_, _, arg):
            yield from iter_subrelations(arg)


def _relations_in_concept(concept: ConceptExpr) -> Iterator[RelationExpr]:
    match concept:
        case ExistsAtLeast(_, _, rel) | ExistsAtMost(_, _, rel) | GlobalObj(rel):
            yield from iter_subrelations(rel)


def iter_axiom_relations(ax: Axiom) -> Iterator[RelationExpr]:
    match ax:
        case ConceptInclusion(lhs, rhs):
            for c in (lhs, rhs):
                for sub in iter_subconcepts(c):
                    yield from _relations_in_concept(sub)
        case RelationInclusion(lhs, rhs):
            yield from iter_subrelations(lhs)
            yield from iter_subrelations(rhs)


def iter_axiom_concepts(ax: Axiom) -> Iterator[ConceptExpr]:
    match ax:
        case ConceptInclusion(lhs, rhs):
            yield from iter_subconcepts(lhs)
            yield from iter_subconcepts(rhs)
        case RelationInclusion(lhs, rhs):
            for r in (lhs, rhs):
                for sub in iter_subrelations(r):
                    if isinstance(sub, Select):
                        yield from iter_subconcepts(sub.concept)


def _expr_attrs(rel: RelationExpr) -> set[str]:
    out: set[str] = set()
    for sub in iter_subrelations(rel):
        match sub:
            case Select(attr, _, _):
                out.add(attr)
            case ProjAtLeast(_, attrs, _) | ProjAtMost(_, attrs, _):
                out.update(attrs)
    return out


def concept_attrs_used(ax: Axiom) -> set[str]:
    out: set[str] = set()
    for c in iter_axiom_concepts(ax):
        match c:
            case ExistsAtLeast(_, attr, _) | ExistsAtMost(_, attr, _):
                out.add(attr)
    for r in iter_axiom_relations(ax):
        out.update(_expr_attrs(r))
    return out


# ---------------------------------------------------------------------------
# Well-formedness

def well_formedness_errors(kb: KnowledgeBase) -> list[str]:
    """Structural problems that make a knowledge base unusable downstream.

    ABox tuples whose attribute set differs from the relation signature are
    deliberately not errors: they are legal input that downstream reasoning
    treats as unsatisfiable.
    """
    errors: list[str] = []
    decls = kb.relation_map

    reserved = {BOTTOM_WITNESS}
    rel_names = set(decls)
    clashes = (
        (rel_names & kb.concept_names, "relation and concept"),
        (rel_names & kb.individuals, "relation and individual"),
        (kb.concept_names & kb.individuals, "concept and individual"),
        (kb.attributes & rel_names, "attribute and relation"),
        (kb.attributes & kb.concept_names, "attribute and concept"),
        (kb.attributes & kb.individuals, "attribute and individual"),
    )
    for overlap, what in clashes:
        for name in sorted(overlap - reserved):
            errors.append(f"name {name!r} used as both {what}")

    def check_rel(rel: RelationExpr, where: str) -> None:
        # Incompatible intersections/unions are merely empty (reported as
        # warnings elsewhere); selection and projection over attributes the
        # operand does not have are structural mistakes.
        for sub in iter_subrelations(rel):
            if isinstance(sub, RelationName) and sub.name not in decls:
                errors.append(f"{where}: relation {sub.name} is not declared")
        try:
            for sub in iter_subrelations(rel):
                match sub:
                    case Select(attr, _, arg):
                        t = compute_tau(arg, decls)
                        if t is not None and attr not in t:
                            errors.append(
                                f"{where}: selection attribute {attr} not in the operand signature"
                            )
                    case ProjAtLeast(_, attrs, arg) | ProjAtMost(_, attrs, arg):
                        t = compute_tau(arg, decls)
                        if t is not None and not frozenset(attrs) < t:
                            errors.append(
                                f"{where}: projection attributes are not a proper subset of the operand signature"
                            )
        except ModelError:
            pass  # undeclared name already reported

    def check_card(q: int, where: str) -> None:
        if q > MAX_CARDINALITY:
            errors.append(f"{where}: cardinality {q} exceeds supported maximum")

    for i, ax in enumerate(kb.tbox):
        where = f"tbox axiom {i + 1}"
        for rel in iter_axiom_relations(ax):
            match rel:
                case ProjAtLeast(q, _, _) | ProjAtMost(q, _, _):
                    check_card(q, where)
                case RelationName(name) if name not in decls:
                    errors.append(f"{where}: relation {name} is not declared")
        for c in iter_axiom_concepts(ax):
            match c:
                case ExistsAtLeast(q, attr, rel) | ExistsAtMost(q, attr, rel):
                    check_card(q, where)
                    try:
                        t = compute_tau(rel, decls)
                        if t is not None and attr not in t:
                            errors.append(
                                f"{where}: attribute {attr} not in the signature of the quantified relation"
                            )
                    except ModelError:
                        pass
                case ConceptName(name) if name not in kb.concept_names and name != BOTTOM_WITNESS:
                    errors.append(f"{where}: concept {name} is not registered")
                case LocalObj(rel_name) if rel_name not in decls:
                    errors.append(f"{where}: relation {rel_name} is not declared")
        match ax:
            case RelationInclusion(lhs, rhs):
                check_rel(lhs, where)
                check_rel(rhs, where)
            case ConceptInclusion():
                for rel in iter_axiom_relations(ax):
                    check_rel(rel, where)

    for i, ax in enumerate(kb.abox):
        where = f"abox axiom {i + 1}"
        match ax:
            case ConceptAssertion(concept, individual):
                if concept not in kb.concept_names:
                    errors.append(f"{where}: concept {concept} is not registered")
                if individual not in kb.individuals:
                    errors.append(f"{where}: individual {individual} is not registered")
            case RelationAssertion(relation, components):
                if relation not in decls:
                    errors.append(f"{where}: relation {relation} is not declared")
                for _, ind in components:
                    if ind not in kb.individuals:
                        errors.append(f"{where}: individual {ind} is not registered")
            case SameIndividual(a, b) | DifferentIndividuals(a, b):
                for ind in (a, b):
                    if ind not in kb.individuals:
                        errors.append(f"{where}: individual {ind} is not registered")

    return sorted(set(errors))
