"""Database-constraint macros expanded into core axioms.

Functional dependencies, keys, equijoins, external uniqueness, and
identification constraints are all definable syntactically; expansion happens
before any reasoning, so downstream modules never see macro forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .model import (
    ConceptAnd,
    ConceptExpr,
    ConceptInclusion,
    ExistsAtLeast,
    ExistsAtMost,
    ProjAtLeast,
    ProjAtMost,
    RelationDecl,
    RelationExpr,
    RelationInclusion,
    RelationName,
    Select,
    TBoxAxiom,
    compute_tau,
)


class MacroError(ValueError):
    """Raised when a macro is instantiated outside its preconditions."""


@dataclass
class Expansion:
    """Everything a macro contributes to the enclosing knowledge base."""

    tbox: list[TBoxAxiom] = field(default_factory=list)
    decls: list[RelationDecl] = field(default_factory=list)
    renaming: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _tau(rel: RelationExpr, decls: Mapping[str, RelationDecl]) -> frozenset[str]:
    t = compute_tau(rel, decls)
    if t is None:
        raise MacroError("macro operand has an undefined signature")
    return t


def expand_fd(
    rel: RelationExpr,
    lhs: Sequence[str],
    rhs: str,
    decls: Mapping[str, RelationDecl],
) -> Expansion:
    """Functional dependency: values of `lhs` determine the value of `rhs`.

    Emitted as an inclusion between projections; a single-attribute left-hand
    side is not projectable and uses the equivalent attribute-cardinality
    form instead.
    """
    tau = _tau(rel, decls)
    missing = (set(lhs) | {rhs}) - tau
    if missing:
        raise MacroError(
            f"attributes not in the relation signature: {', '.join(sorted(missing))}"
        )
    if rhs in lhs:
        raise MacroError(f"dependent attribute {rhs} also occurs on the left-hand side")
    if not lhs:
        raise MacroError("functional dependency needs at least one determining attribute")

    both = sorted(set(lhs) | {rhs})
    inner = rel if set(both) == tau else ProjAtLeast(1, tuple(both), rel)
    if len(lhs) == 1:
        attr = lhs[0]
        ax: TBoxAxiom = ConceptInclusion(
            ExistsAtLeast(1, attr, rel), ExistsAtMost(1, attr, inner)
        )
    else:
        attrs = tuple(sorted(lhs))
        ax = RelationInclusion(ProjAtLeast(1, attrs, rel), ProjAtMost(1, attrs, inner))
    return Expansion(tbox=[ax])


def expand_key(
    rel: RelationExpr,
    keys: Sequence[str],
    decls: Mapping[str, RelationDecl],
) -> Expansion:
    """Key constraint: the key attributes identify tuples uniquely."""
    tau = _tau(rel, decls)
    missing = set(keys) - tau
    if missing:
        raise MacroError(
            f"attributes not in the relation signature: {', '.join(sorted(missing))}"
        )
    if not keys:
        raise MacroError("key needs at least one attribute")
    if set(keys) == tau:
        raise MacroError(
            "key over the full signature is not expressible (projection must be proper)"
        )
    if len(keys) == 1:
        # Projections need two attributes; a one-attribute key is stated as a
        # cardinality bound on that attribute instead.
        attr = keys[0]
        ax: TBoxAxiom = ConceptInclusion(
            ExistsAtLeast(1, attr, rel), ExistsAtMost(1, attr, rel)
        )
        return Expansion(
            tbox=[ax],
            warnings=[
                f"single-attribute key on {attr} rewritten to an attribute-cardinality axiom"
            ],
        )
    attrs = tuple(sorted(keys))
    ax = RelationInclusion(ProjAtLeast(1, attrs, rel), ProjAtMost(1, attrs, rel))
    return Expansion(tbox=[ax])


def expand_equijoin(
    name: str,
    left: RelationExpr,
    left_attr: str,
    right: RelationExpr,
    right_attr: str,
    decls: Mapping[str, RelationDecl],
) -> Expansion:
    """Equijoin of two signature-disjoint relations on one attribute pair.

    Declares the join relation, emits the two defining equivalences (as four
    inclusions), and identifies the joined attributes through a renaming
    pair.  The right-hand projection only becomes well-formed once the
    renaming is applied.
    """
    t1 = _tau(left, decls)
    t2 = _tau(right, decls)
    if t1 & t2:
        raise MacroError(
            f"operand signatures overlap on: {', '.join(sorted(t1 & t2))}"
        )
    if left_attr not in t1:
        raise MacroError(f"attribute {left_attr} not in the left operand signature")
    if right_attr not in t2:
        raise MacroError(f"attribute {right_attr} not in the right operand signature")
    if name in decls:
        raise MacroError(f"join relation name {name} is already declared")

    signature = tuple(sorted((t1 | t2) - {right_attr}))
    join_decl = RelationDecl(name, signature)
    join = RelationName(name)
    joint = ConceptAnd(
        ExistsAtLeast(1, left_attr, left), ExistsAtLeast(1, right_attr, right)
    )
    left_proj = ProjAtLeast(1, tuple(sorted(t1)), join)
    right_proj = ProjAtLeast(1, tuple(sorted(t2)), join)
    left_sel = Select(left_attr, joint, left)
    right_sel = Select(right_attr, joint, right)
    axioms: list[TBoxAxiom] = [
        RelationInclusion(left_proj, left_sel),
        RelationInclusion(left_sel, left_proj),
        RelationInclusion(right_proj, right_sel),
        RelationInclusion(right_sel, right_proj),
    ]
    return Expansion(
        tbox=axioms, decls=[join_decl], renaming=[(left_attr, right_attr)]
    )


def expand_external_uniqueness(
    name: str,
    operands: Sequence[tuple[str, RelationExpr]],
    decls: Mapping[str, RelationDecl],
) -> Expansion:
    """External uniqueness: the chained join determines the joined attribute.

    `operands` pairs each relation with its join attribute.  The join of all
    operands is declared (via cascaded equijoins) and the joined attribute is
    made functionally dependent on all other attributes of the join.
    """
    if not operands:
        raise MacroError("external uniqueness needs at least one operand")
    first_attr, first_rel = operands[0]
    if len(operands) == 1:
        tau = _tau(first_rel, decls)
        if first_attr not in tau:
            raise MacroError(f"attribute {first_attr} not in the operand signature")
        lhs = sorted(tau - {first_attr})
        return expand_fd(first_rel, lhs, first_attr, decls)

    out = Expansion()
    working = dict(decls)
    acc: RelationExpr = first_rel
    acc_attr = first_attr
    for i, (attr, rel) in enumerate(operands[1:], start=2):
        join_name = name if i == len(operands) else f"{name}_j{i}"
        while join_name in working:
            join_name += "_"
        step = expand_equijoin(join_name, acc, acc_attr, rel, attr, working)
        out.tbox.extend(step.tbox)
        out.decls.extend(step.decls)
        out.renaming.extend(step.renaming)
        for decl in step.decls:
            working[decl.name] = decl
        acc = RelationName(join_name)

    final = out.decls[-1]
    fd_lhs = sorted(set(final.signature) - {acc_attr})
    fd = expand_fd(acc, fd_lhs, acc_attr, working)
    out.tbox.extend(fd.tbox)
    out.warnings.extend(fd.warnings)
    return out


def expand_identification(
    name: str,
    concept: ConceptExpr,
    operands: Sequence[tuple[str, str, RelationExpr]],
    decls: Mapping[str, RelationDecl],
) -> Expansion:
    """Identification: external uniqueness restricted to members of a concept.

    Each operand is (join attribute, selected attribute, relation); the
    relation is filtered to tuples whose selected component lies in the
    concept before joining.
    """
    if not operands:
        raise MacroError("identification needs at least one operand")
    wrapped = [
        (join_attr, Select(sel_attr, concept, rel))
        for join_attr, sel_attr, rel in operands
    ]
    return expand_external_uniqueness(name, wrapped, decls)
