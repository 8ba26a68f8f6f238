"""Renaming schemas: equivalence closure, arity preservation, canonical rewrite.

A renaming schema identifies attributes across relations.  Rewriting every
attribute occurrence to a canonical class representative removes the schema
from play entirely, so everything downstream works on canonical names only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import (
    ConceptAnd,
    ConceptExpr,
    ConceptInclusion,
    ConceptName,
    ConceptNot,
    ConceptOr,
    Bottom,
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
    ConceptAssertion,
    Select,
    Top,
)


class UnionFind:
    """Disjoint sets over hashable items; unmentioned items are singletons."""

    def __init__(self) -> None:
        self._parent: dict[str, str] = {}

    def find(self, item: str) -> str:
        parent = self._parent
        if item not in parent:
            return item
        root = item
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(item, item) != item:
            parent[item], item = root, parent[item]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # Deterministic orientation keeps closure output stable.
            lo, hi = sorted((ra, rb))
            self._parent[hi] = lo
            self._parent.setdefault(lo, lo)

    def classes(self, universe: Iterable[str]) -> list[frozenset[str]]:
        byroot: dict[str, set[str]] = {}
        for item in set(universe) | set(self._parent):
            byroot.setdefault(self.find(item), set()).add(item)
        return sorted((frozenset(v) for v in byroot.values()), key=min)


def close_renaming(
    pairs: Sequence[tuple[str, str]], universe: Iterable[str] = ()
) -> list[frozenset[str]]:
    """Partition of the attribute universe induced by the renaming pairs."""
    uf = UnionFind()
    for a, b in pairs:
        uf.union(a, b)
    return uf.classes(universe)


@dataclass(frozen=True)
class ArityViolation:
    """An equivalence class that merges two attributes of one signature."""

    attrs: frozenset[str]
    relation: str

    def __str__(self) -> str:
        merged = ", ".join(sorted(self.attrs))
        return f"renaming merges attributes {{{merged}}} of relation {self.relation}"


def check_arity_preserving(
    partition: Sequence[frozenset[str]], decls: Iterable[RelationDecl]
) -> list[ArityViolation]:
    """Every violation of the rule that a class never hits one signature twice."""
    out = []
    for decl in decls:
        sig = decl.attr_set
        for cls in partition:
            if len(cls & sig) > 1:
                out.append(ArityViolation(cls, decl.name))
    return out


def representative_map(partition: Sequence[frozenset[str]]) -> dict[str, str]:
    """Attribute -> canonical representative (least class member)."""
    out: dict[str, str] = {}
    for cls in partition:
        rep = min(cls)
        for attr in cls:
            out[attr] = rep
    return out


def canonicalize(kb: KnowledgeBase) -> KnowledgeBase:
    """Rewrite every attribute occurrence to its class representative.

    The returned knowledge base carries an empty renaming schema; applying
    canonicalize twice is a no-op.
    """
    partition = close_renaming(kb.renaming, kb.attributes)
    violations = check_arity_preserving(partition, kb.relations)
    if violations:
        raise ModelError("; ".join(str(v) for v in violations))
    rep = representative_map(partition)

    def r(attr: str) -> str:
        return rep.get(attr, attr)

    def rw_rel(rel: RelationExpr) -> RelationExpr:
        match rel:
            case RelationName():
                return rel
            case RelationDiff(a, b):
                return RelationDiff(rw_rel(a), rw_rel(b))
            case RelationAnd(a, b):
                return RelationAnd(rw_rel(a), rw_rel(b))
            case RelationOr(a, b):
                return RelationOr(rw_rel(a), rw_rel(b))
            case Select(attr, concept, arg):
                return Select(r(attr), rw_con(concept), rw_rel(arg))
            case ProjAtLeast(q, attrs, arg):
                return ProjAtLeast(q, tuple(r(a) for a in attrs), rw_rel(arg))
            case ProjAtMost(q, attrs, arg):
                return ProjAtMost(q, tuple(r(a) for a in attrs), rw_rel(arg))
        raise ModelError(f"unknown relation expression: {rel!r}")

    def rw_con(concept: ConceptExpr) -> ConceptExpr:
        match concept:
            case ConceptName() | Top() | Bottom() | LocalObj():
                return concept
            case ConceptNot(arg):
                return ConceptNot(rw_con(arg))
            case ConceptAnd(a, b):
                return ConceptAnd(rw_con(a), rw_con(b))
            case ConceptOr(a, b):
                return ConceptOr(rw_con(a), rw_con(b))
            case ExistsAtLeast(q, attr, arg):
                return ExistsAtLeast(q, r(attr), rw_rel(arg))
            case ExistsAtMost(q, attr, arg):
                return ExistsAtMost(q, r(attr), rw_rel(arg))
            case GlobalObj(arg):
                return GlobalObj(rw_rel(arg))
        raise ModelError(f"unknown concept expression: {concept!r}")

    relations = tuple(
        RelationDecl(d.name, tuple(r(a) for a in d.signature)) for d in kb.relations
    )
    tbox = []
    for ax in kb.tbox:
        match ax:
            case ConceptInclusion(lhs, rhs):
                tbox.append(ConceptInclusion(rw_con(lhs), rw_con(rhs)))
            case RelationInclusion(lhs, rhs):
                tbox.append(RelationInclusion(rw_rel(lhs), rw_rel(rhs)))
    abox = []
    for ax in kb.abox:
        match ax:
            case RelationAssertion(relation, components):
                abox.append(
                    RelationAssertion(relation, tuple((r(a), o) for a, o in components))
                )
            case _:
                abox.append(ax)
    return kb.replace(relations=relations, tbox=tuple(tbox), abox=tuple(abox), renaming=())
