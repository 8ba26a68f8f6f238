"""Translation of validated knowledge bases into the target language.

Every node of the projection signature graph becomes a reification level:
relations are encoded as concepts of tuple identifiers connected by
functional roles along the graph's edges.  Attribute access then follows the
unique graph path, and cardinalities ride on the role adjacent to the
identifier (paths longer than one step only ever carry cardinality one in
the validated fragment).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

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
    make_and,
)
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
    compute_tau,
)
from .modelcheck import (
    AlcqiInterpretation,
    Interpretation,
    Tup,
    mk_tuple,
    tuple_attrs,
    tuple_project,
)
from .projection_graph import (
    AttrSet,
    ProjectionSignatureGraph,
    ValidationReport,
    build_signature,
    validate_dlrpm,
)
from .renaming import canonicalize


class NotInFragment(ValueError):
    """The knowledge base fails the fragment conditions; encoding is undefined."""

    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(report.messages()))
        self.report = report


class EncodingError(RuntimeError):
    """Internal invariant violation (must be unreachable after validation)."""


def _esc(name: str) -> str:
    # Underscore-doubling keeps joined names decodable, hence injective.
    return name.replace("_", "_u")


def _node_key(node: AttrSet) -> str:
    return "__".join(_esc(a) for a in sorted(node))


@dataclass
class EncodingContext:
    """Name tables and graph queries shared by the translation functions."""

    kb: KnowledgeBase
    graph: ProjectionSignatureGraph

    def __post_init__(self) -> None:
        self._taken = set(self.kb.concept_names) | set(self.kb.individuals)
        self._tuples: dict[Tup, str] = {}
        self._tuple_concepts: dict[Tup, str] = {}
        decls = self.kb.relation_map
        for ax in self.kb.abox:
            if isinstance(ax, RelationAssertion):
                t = mk_tuple(ax.components)
                # Mismatched assertions are not reified; they only flag the
                # whole translation as unsatisfiable.
                if tuple_attrs(t) != decls[ax.relation].attr_set:
                    continue
                if t not in self._tuples:
                    k = len(self._tuples) + 1
                    self._tuples[t] = f"_tup_{ax.relation}_{k}"
                    self._tuple_concepts[t] = self._fresh(f"Qt_{k}")

    def _fresh(self, base: str) -> str:
        name = base
        while name in self._taken:
            name = "g" + name
        return name

    @cached_property
    def decls(self):
        return self.kb.relation_map

    def node_role(self, node: AttrSet) -> Role:
        return Role(f"Q__{_node_key(node)}")

    def proj_concept(self, rel_name: str, node: AttrSet) -> AName:
        return AName(self._fresh(f"A_{_esc(rel_name)}__{_node_key(node)}"))

    def rel_concept(self, rel_name: str) -> AName:
        """Shortcut for the whole-signature reification concept."""
        return self.proj_concept(rel_name, self.decls[rel_name].attr_set)

    def lobj_concept(self, rel_name: str) -> AName:
        return AName(self._fresh(f"Al_{_esc(rel_name)}"))

    def lobj_role(self, rel_name: str) -> Role:
        return Role(f"QR_{_esc(rel_name)}")

    def ind_concept(self, individual: str) -> AName:
        return AName(self._fresh(f"Qo_{_esc(individual)}"))

    def dominated(self, rel_name: str) -> list[AttrSet]:
        nodes = self.graph.dominated(self.decls[rel_name].attr_set)
        return sorted(nodes, key=lambda n: (len(n), tuple(sorted(n))), reverse=True)

    def path_roles(self, src: AttrSet, dst: AttrSet) -> list[Role]:
        """Forward role chain along the unique path, one role per node entered."""
        return [self.node_role(n) for n in self.graph.path(src, dst)]

    @property
    def abox_tuples(self) -> dict[Tup, str]:
        return self._tuples

    def xi(self, t: Tup) -> str:
        """Tuple-to-individual map; a singleton tuple is its own component."""
        if len(t) == 1:
            return t[0][1]
        try:
            return self._tuples[t]
        except KeyError:
            k = len(self._tuples) + 1
            self._tuples[t] = f"_tup__{k}"
            return self._tuples[t]

    def tuple_concept(self, t: Tup) -> AName:
        return AName(self._tuple_concepts[t])


def _chain_card(card: str, q: int, roles: Sequence[Role], filler: AlcqiConcept) -> AlcqiConcept:
    """Cardinality over a role chain: plain existentials outside, the bound on
    the innermost step."""
    if not roles:
        raise EncodingError("empty role chain")
    if len(roles) == 1:
        return AtLeast(q, roles[0], filler) if card == ">=" else AtMost(q, roles[0], filler)
    return AtLeast(1, roles[0], _chain_card(card, q, roles[1:], filler))


def _chain_all(roles: Sequence[Role], filler: AlcqiConcept) -> AlcqiConcept:
    """Universal restriction over a role chain (nested value restrictions)."""
    out = filler
    for role in reversed(roles):
        out = AtMost(0, role, ANot(out) if not isinstance(out, ANot) else out.arg)
    return out


def _inverse_chain(roles: Sequence[Role]) -> list[Role]:
    return [r.inverse for r in reversed(roles)]


def dagger_concept(ctx: EncodingContext, concept: ConceptExpr) -> AlcqiConcept:
    match concept:
        case ConceptName(name):
            return AName(name)
        case Top():
            return ATop()
        case Bottom():
            return ABottom()
        case ConceptNot(arg):
            return ANot(dagger_concept(ctx, arg))
        case ConceptAnd(left, right):
            return AAnd((dagger_concept(ctx, left), dagger_concept(ctx, right)))
        case ConceptOr(left, right):
            return AOr((dagger_concept(ctx, left), dagger_concept(ctx, right)))
        case ExistsAtLeast(q, attr, rel):
            return _dagger_exists(ctx, q, attr, rel)
        case ExistsAtMost(q, attr, rel):
            return ANot(_dagger_exists(ctx, q + 1, attr, rel))
        case GlobalObj(rel):
            return dagger_relation(ctx, rel)
        case LocalObj(rel_name):
            return ctx.lobj_concept(rel_name)
    raise EncodingError(f"unknown concept expression: {concept!r}")


def _dagger_exists(ctx: EncodingContext, q: int, attr: str, rel: RelationExpr) -> AlcqiConcept:
    tau = compute_tau(rel, ctx.decls)
    if tau is None:
        return ABottom()
    roles = ctx.path_roles(tau, frozenset({attr}))
    if not roles:
        return ABottom()
    chain = _inverse_chain(roles)
    if q > 1 and len(chain) > 1:
        raise EncodingError(
            f"cardinality {q} over a path of length {len(chain)}; "
            "validation should have rejected this"
        )
    return _chain_card(">=", q, chain, dagger_relation(ctx, rel))


def dagger_relation(ctx: EncodingContext, rel: RelationExpr) -> AlcqiConcept:
    decls = ctx.decls
    match rel:
        case RelationName(name):
            return ctx.rel_concept(name)
        case RelationDiff(left, right):
            return AAnd((dagger_relation(ctx, left), ANot(dagger_relation(ctx, right))))
        case RelationAnd(left, right):
            return AAnd((dagger_relation(ctx, left), dagger_relation(ctx, right)))
        case RelationOr(left, right):
            lt = compute_tau(left, decls)
            rt = compute_tau(right, decls)
            if lt is None or rt is None or lt != rt:
                return ABottom()
            return AOr((dagger_relation(ctx, left), dagger_relation(ctx, right)))
        case Select(attr, concept, arg):
            tau = compute_tau(arg, decls)
            if tau is None:
                return ABottom()
            roles = ctx.path_roles(tau, frozenset({attr}))
            if not roles:
                return ABottom()
            return AAnd(
                (
                    dagger_relation(ctx, arg),
                    _chain_all(roles, dagger_concept(ctx, concept)),
                )
            )
        case ProjAtLeast(q, attrs, arg) | ProjAtMost(q, attrs, arg):
            tau = compute_tau(arg, decls)
            if tau is None:
                return ABottom()
            roles = ctx.path_roles(tau, frozenset(attrs))
            if not roles:
                return ABottom()
            chain = _inverse_chain(roles)
            card = ">=" if isinstance(rel, ProjAtLeast) else "<="
            if q > 1 and len(chain) > 1:
                raise EncodingError(
                    f"cardinality {q} over a path of length {len(chain)}; "
                    "validation should have rejected this"
                )
            body = dagger_relation(ctx, arg)
            # Existence conjunct plus the bound itself; identical for the
            # at-least-one case, where one copy suffices.
            return make_and(
                (
                    _chain_card(">=", 1, chain, body),
                    _chain_card(card, q, chain, body),
                )
            )
    raise EncodingError(f"unknown relation expression: {rel!r}")


# ---------------------------------------------------------------------------
# Knowledge-base level translation


def gamma_tbox(ctx: EncodingContext) -> list[tuple[AlcqiConcept, AlcqiConcept]]:
    gcis: list[tuple[AlcqiConcept, AlcqiConcept]] = []
    rels = [d.name for d in ctx.kb.relations]

    # Reified projections of different signatures never share identifiers.
    for rn1 in rels:
        for ti in ctx.dominated(rn1):
            if len(ti) < 2:
                continue
            for rn2 in rels:
                for tj in ctx.dominated(rn2):
                    if len(tj) < 2 or ti == tj:
                        continue
                    gcis.append(
                        (ctx.proj_concept(rn1, ti), ANot(ctx.proj_concept(rn2, tj)))
                    )

    # Reification axioms: every identifier projects one step down the graph,
    # and each step role is functional (once per role).
    functional_seen: set[str] = set()
    functional: list[tuple[AlcqiConcept, AlcqiConcept]] = []
    for rn in rels:
        for ti in ctx.dominated(rn):
            for tj in ctx.graph.children(ti):
                role = ctx.node_role(tj)
                gcis.append(
                    (
                        ctx.proj_concept(rn, ti),
                        AtLeast(1, role, ctx.proj_concept(rn, tj)),
                    )
                )
                if role.name not in functional_seen:
                    functional_seen.add(role.name)
                    functional.append((AtLeast(2, role, ATop()), ABottom()))
    gcis.extend(functional)

    # Local objectification: a bijection between tuple identifiers and
    # relation-local identifiers.
    for rn in rels:
        a = ctx.rel_concept(rn)
        al = ctx.lobj_concept(rn)
        role = ctx.lobj_role(rn)
        gcis.append((a, AtLeast(1, role, al)))
        gcis.append((AtLeast(2, role, ATop()), ABottom()))
        gcis.append((al, AtLeast(1, role.inverse, a)))
        gcis.append((AtLeast(2, role.inverse, ATop()), ABottom()))

    for ax in ctx.kb.tbox:
        match ax:
            case ConceptInclusion(lhs, rhs):
                gcis.append((dagger_concept(ctx, lhs), dagger_concept(ctx, rhs)))
            case RelationInclusion(lhs, rhs):
                gcis.append((dagger_relation(ctx, lhs), dagger_relation(ctx, rhs)))
    return gcis


@dataclass
class GammaAbox:
    gcis: list[tuple[AlcqiConcept, AlcqiConcept]] = field(default_factory=list)
    concept_assertions: list[tuple[AlcqiConcept, str]] = field(default_factory=list)
    role_assertions: list[tuple[Role, str, str]] = field(default_factory=list)
    equalities: list[tuple[str, str]] = field(default_factory=list)
    inequalities: list[tuple[str, str]] = field(default_factory=list)


def gamma_abox(ctx: EncodingContext) -> GammaAbox:
    out = GammaAbox()
    kb = ctx.kb
    decls = ctx.decls

    mismatch = False
    for ax in kb.abox:
        match ax:
            case ConceptAssertion(concept, individual):
                out.concept_assertions.append((AName(concept), individual))
            case SameIndividual(a, b):
                out.equalities.append((a, b))
            case DifferentIndividuals(a, b):
                out.inequalities.append((a, b))
            case RelationAssertion(relation, components):
                t = mk_tuple(components)
                if tuple_attrs(t) != decls[relation].attr_set:
                    mismatch = True
                    continue
                for ti in ctx.dominated(relation):
                    proj = tuple_project(t, ti)
                    out.concept_assertions.append(
                        (ctx.proj_concept(relation, ti), ctx.xi(proj))
                    )
                    for tj in ctx.graph.children(ti):
                        out.role_assertions.append(
                            (
                                ctx.node_role(tj),
                                ctx.xi(proj),
                                ctx.xi(tuple_project(t, tj)),
                            )
                        )
    if mismatch:
        out.gcis.append((ATop(), ABottom()))

    for o in sorted(kb.individuals):
        out.concept_assertions.append((ctx.ind_concept(o), o))

    # Uniqueness of tuple identifiers for asserted tuples: from the first
    # component there is at most one chain back to an identifier matching the
    # remaining components.
    for t in list(ctx._tuple_concepts):
        attrs = sorted(tuple_attrs(t))
        node = tuple_attrs(t)
        values = dict(t)
        first, rest = attrs[0], attrs[1:]
        out.concept_assertions.append((ctx.tuple_concept(t), values[first]))
        filler = make_and(
            tuple(
                _chain_card(
                    ">=",
                    1,
                    ctx.path_roles(node, frozenset({u})),
                    ctx.ind_concept(values[u]),
                )
                for u in rest
            )
        )
        up_chain = _inverse_chain(ctx.path_roles(node, frozenset({first})))
        out.gcis.append((ctx.tuple_concept(t), _chain_card("<=", 1, up_chain, filler)))
    return out


def _collect_names(
    concepts: list[AlcqiConcept],
) -> tuple[set[str], set[str]]:
    names: set[str] = set()
    roles: set[str] = set()
    stack = list(concepts)
    while stack:
        c = stack.pop()
        match c:
            case AName(name):
                names.add(name)
            case ANot(arg):
                stack.append(arg)
            case AAnd(args) | AOr(args):
                stack.extend(args)
            case AtLeast(_, role, filler) | AtMost(_, role, filler):
                roles.add(role.name)
                stack.append(filler)
    return names, roles


def encode(
    kb: KnowledgeBase,
    graph: Optional[ProjectionSignatureGraph] = None,
    validate: bool = True,
) -> AlcqiKb:
    """Full translation; the input is canonicalized and fragment-checked."""
    if kb.renaming:
        kb = canonicalize(kb)
    graph = graph or build_signature(kb)
    if validate:
        report = validate_dlrpm(kb, graph)
        if not report.ok:
            raise NotInFragment(report)

    ctx = EncodingContext(kb, graph)
    gcis = gamma_tbox(ctx)
    abox = gamma_abox(ctx)

    all_concepts = [c for gci in gcis for c in gci]
    all_concepts.extend(c for gci in abox.gcis for c in gci)
    all_concepts.extend(c for c, _ in abox.concept_assertions)
    names, roles = _collect_names(all_concepts)
    roles.update(r.name for r, _, _ in abox.role_assertions)
    individuals = set(kb.individuals)
    individuals.update(i for _, i in abox.concept_assertions)
    individuals.update(x for _, a, b in abox.role_assertions for x in (a, b))

    return AlcqiKb(
        concept_names=frozenset(names),
        role_names=frozenset(roles),
        individuals=frozenset(individuals),
        gcis=tuple(gcis) + tuple(abox.gcis),
        concept_assertions=tuple(abox.concept_assertions),
        role_assertions=tuple(abox.role_assertions),
        equalities=tuple(abox.equalities),
        inequalities=tuple(abox.inequalities),
    )


# ---------------------------------------------------------------------------
# Canonical target-language model of an encoded knowledge base


def gamma_model(
    interp: Interpretation, kb: KnowledgeBase, graph: Optional[ProjectionSignatureGraph] = None
) -> AlcqiInterpretation:
    """Build the reified finite model corresponding to a source model.

    Identifier elements are the objectification values the interpretation
    already carries, so the domain stays unchanged.  Useful both as an
    independent check of the translation and as a witness when the tableau
    cannot hand back a finite structure directly.
    """
    if kb.renaming:
        kb = canonicalize(kb)
    graph = graph or build_signature(kb)
    ctx = EncodingContext(kb, graph)
    gamma_abox(ctx)  # replay the deterministic tuple-individual naming

    concepts: dict[str, set[str]] = {}
    roles: dict[str, set[tuple[str, str]]] = {}
    individuals: dict[str, str] = dict(interp.individuals)

    for name, ext in interp.concepts.items():
        concepts.setdefault(name, set()).update(ext)

    def gid(t: Tup) -> str:
        return interp.global_id(t)

    for decl in kb.relations:
        rn = decl.name
        ext = interp.relations.get(rn, frozenset())
        for ti in ctx.dominated(rn):
            cname = ctx.proj_concept(rn, ti).name
            concepts.setdefault(cname, set())
            for t in ext:
                concepts[cname].add(gid(tuple_project(t, ti)))
            for tj in ctx.graph.children(ti):
                rname = ctx.node_role(tj).name
                roles.setdefault(rname, set())
                for t in ext:
                    roles[rname].add(
                        (gid(tuple_project(t, ti)), gid(tuple_project(t, tj)))
                    )
        lname = ctx.lobj_concept(rn).name
        qname = ctx.lobj_role(rn).name
        concepts.setdefault(lname, set())
        roles.setdefault(qname, set())
        for t in ext:
            lid = interp.local_id(rn, t)
            concepts[lname].add(lid)
            roles[qname].add((gid(t), lid))

    for o in kb.individuals:
        concepts.setdefault(ctx.ind_concept(o).name, set()).add(interp.individuals[o])

    for t, fresh in ctx._tuples.items():
        interpreted = mk_tuple((a, interp.individuals[o]) for a, o in t)
        individuals[fresh] = gid(interpreted)
        if t in ctx._tuple_concepts:
            first = sorted(tuple_attrs(t))[0]
            concepts.setdefault(ctx.tuple_concept(t).name, set()).add(
                interp.individuals[dict(t)[first]]
            )

    return AlcqiInterpretation(
        domain=interp.domain,
        concepts={k: frozenset(v) for k, v in concepts.items()},
        roles={k: frozenset(v) for k, v in roles.items()},
        individuals=individuals,
    )
