"""Seeded random knowledge-base generator for agreement testing.

Produces small knowledge bases inside the decidable fragment: at most two
relations of arity two or three, a handful of axioms built from every
constructor, and a couple of ground assertions.
"""

from __future__ import annotations

import random

from dlrpm.model import (
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
    compute_tau,
)
from dlrpm.projection_graph import build_signature, validate_dlrpm
from dlrpm.renaming import canonicalize
from dlrpm.model import well_formedness_errors

CONCEPTS = ["P", "Q"]
INDIVIDUALS = ["a", "b"]


def _random_relation(rng: random.Random, decls: list[RelationDecl], depth: int) -> RelationExpr:
    decl = rng.choice(decls)
    base: RelationExpr = RelationName(decl.name)
    if depth <= 0:
        return base
    pick = rng.random()
    if pick < 0.45:
        return base
    if pick < 0.6:
        other = rng.choice(decls)
        sub: RelationExpr = RelationName(other.name)
        op = rng.choice([RelationDiff, RelationAnd, RelationOr])
        return op(base, sub)
    if pick < 0.8:
        attr = rng.choice(decl.signature)
        return Select(attr, _random_concept(rng, decls, depth - 1), base)
    if decl.arity > 2:
        attrs = tuple(rng.sample(decl.signature, 2))
        q = rng.choice([1, 1, 2])
        op = rng.choice([ProjAtLeast, ProjAtMost])
        return op(q, attrs, base)
    return base


def _random_concept(rng: random.Random, decls: list[RelationDecl], depth: int) -> ConceptExpr:
    if depth <= 0:
        return ConceptName(rng.choice(CONCEPTS))
    pick = rng.random()
    if pick < 0.25:
        return ConceptName(rng.choice(CONCEPTS))
    if pick < 0.32:
        return rng.choice([Top(), Bottom()])
    if pick < 0.45:
        return ConceptNot(_random_concept(rng, decls, depth - 1))
    if pick < 0.6:
        op = rng.choice([ConceptAnd, ConceptOr])
        return op(
            _random_concept(rng, decls, depth - 1),
            _random_concept(rng, decls, depth - 1),
        )
    if pick < 0.8:
        rel = _random_relation(rng, decls, depth - 1)
        decl_attrs = sorted(compute_tau(rel, {d.name: d for d in decls}) or set())
        if not decl_attrs:
            return ConceptName(rng.choice(CONCEPTS))
        attr = rng.choice(decl_attrs)
        q = rng.choice([1, 1, 2])
        op = rng.choice([ExistsAtLeast, ExistsAtMost])
        return op(q, attr, rel)
    if pick < 0.9:
        return GlobalObj(_random_relation(rng, decls, depth - 1))
    return LocalObj(rng.choice(decls).name)


def random_kb(seed: int) -> KnowledgeBase:
    """A well-formed, fragment-valid knowledge base derived from the seed."""
    rng = random.Random(seed)
    while True:
        kb = _attempt(rng)
        if kb is None:
            continue
        if well_formedness_errors(kb):
            continue
        canonical = canonicalize(kb)
        if validate_dlrpm(canonical, build_signature(canonical)).ok:
            return kb


def _attempt(rng: random.Random) -> KnowledgeBase | None:
    n_rel = rng.choice([1, 2, 2])
    decls: list[RelationDecl] = []
    pool = ["A", "B", "C", "D", "E"]
    for i in range(n_rel):
        arity = rng.choice([2, 2, 3])
        attrs = tuple(rng.sample(pool, arity))
        decls.append(RelationDecl(f"R{i + 1}", attrs))
    decl_map = {d.name: d for d in decls}

    tbox = []
    for _ in range(rng.randint(1, 6)):
        if rng.random() < 0.7:
            tbox.append(
                ConceptInclusion(
                    _random_concept(rng, decls, 2), _random_concept(rng, decls, 2)
                )
            )
        else:
            lhs = _random_relation(rng, decls, 1)
            rhs = _random_relation(rng, decls, 1)
            lt = compute_tau(lhs, decl_map)
            rt = compute_tau(rhs, decl_map)
            if lt is None or rt is None:
                continue
            tbox.append(RelationInclusion(lhs, rhs))

    abox = []
    for _ in range(rng.randint(0, 2)):
        kind = rng.random()
        if kind < 0.5 and decls:
            decl = rng.choice(decls)
            comps = tuple((a, rng.choice(INDIVIDUALS)) for a in decl.signature)
            abox.append(RelationAssertion(decl.name, comps))
        elif kind < 0.8:
            abox.append(ConceptAssertion(rng.choice(CONCEPTS), rng.choice(INDIVIDUALS)))
        elif kind < 0.9:
            abox.append(SameIndividual(*rng.sample(INDIVIDUALS, 2)))
        else:
            abox.append(DifferentIndividuals(*rng.sample(INDIVIDUALS, 2)))

    try:
        return KnowledgeBase(
            relations=tuple(decls),
            concept_names=frozenset(CONCEPTS),
            individuals=frozenset(INDIVIDUALS),
            tbox=tuple(tbox),
            abox=tuple(abox),
        )
    except Exception:
        return None
