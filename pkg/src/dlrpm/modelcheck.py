"""Finite-interpretation evaluation and a bounded brute-force satisfiability
oracle.

Interpretations carry partial objectification maps: the global map and the
per-relation local maps are stored only on tuples realized in some relation
extension (plus their projections), and injectivity is required on that
support.  Singleton tuples objectify to their own component.
"""

from __future__ import annotations

import itertools
import re
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

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
    iter_axiom_concepts,
)
from .projection_graph import projection_sets

# A labelled tuple: attribute/element pairs sorted by attribute.
Tup = tuple[tuple[str, str], ...]


class EvalError(ValueError):
    """Evaluation over an interpretation hit missing or inconsistent data."""


def mk_tuple(pairs: Iterable[tuple[str, str]]) -> Tup:
    out = tuple(sorted(pairs))
    attrs = [a for a, _ in out]
    if len(set(attrs)) != len(attrs):
        raise EvalError("labelled tuple assigns an attribute twice")
    return out


def tuple_attrs(t: Tup) -> frozenset[str]:
    return frozenset(a for a, _ in t)


def tuple_project(t: Tup, attrs: Iterable[str]) -> Tup:
    keep = set(attrs)
    return tuple((a, v) for a, v in t if a in keep)


@dataclass(frozen=True)
class Interpretation:
    """A finite structure: domain, extensions, individuals, objectification."""

    domain: tuple[str, ...]
    concepts: Mapping[str, frozenset[str]] = field(default_factory=dict)
    relations: Mapping[str, frozenset[Tup]] = field(default_factory=dict)
    individuals: Mapping[str, str] = field(default_factory=dict)
    gobj: Mapping[Tup, str] = field(default_factory=dict)
    lobj: Mapping[str, Mapping[Tup, str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        dom = set(self.domain)
        if not dom:
            raise EvalError("domain must be nonempty")
        values = list(self.gobj.values())
        if len(set(values)) != len(values):
            raise EvalError("global objectification must be injective")
        if not set(values) <= dom:
            raise EvalError("global objectification maps outside the domain")
        for rel, mapping in self.lobj.items():
            vals = list(mapping.values())
            if len(set(vals)) != len(vals):
                raise EvalError(f"local objectification for {rel} must be injective")

    def global_id(self, t: Tup) -> str:
        if len(t) == 1:
            return t[0][1]
        try:
            return self.gobj[t]
        except KeyError:
            raise EvalError(f"global objectification undefined for tuple {t!r}") from None

    def local_id(self, rel: str, t: Tup) -> str:
        try:
            return self.lobj[rel][t]
        except KeyError:
            raise EvalError(
                f"local objectification for {rel} undefined for tuple {t!r}"
            ) from None


# ---------------------------------------------------------------------------
# Evaluation of expressions


def eval_concept(
    interp: Interpretation, concept: ConceptExpr, kb: KnowledgeBase
) -> frozenset[str]:
    domain = frozenset(interp.domain)
    match concept:
        case ConceptName(name):
            return frozenset(interp.concepts.get(name, frozenset()))
        case Top():
            return domain
        case Bottom():
            return frozenset()
        case ConceptNot(arg):
            return domain - eval_concept(interp, arg, kb)
        case ConceptAnd(left, right):
            return eval_concept(interp, left, kb) & eval_concept(interp, right, kb)
        case ConceptOr(left, right):
            return eval_concept(interp, left, kb) | eval_concept(interp, right, kb)
        case ExistsAtLeast(q, attr, rel):
            counts = _attr_counts(interp, rel, attr, kb)
            return frozenset(d for d, n in counts.items() if n >= q)
        case ExistsAtMost(q, attr, rel):
            counts = _attr_counts(interp, rel, attr, kb)
            return frozenset(d for d in domain if counts.get(d, 0) <= q)
        case GlobalObj(rel):
            ext = eval_relation(interp, rel, kb)
            return frozenset(interp.global_id(t) for t in ext)
        case LocalObj(rel_name):
            ext = interp.relations.get(rel_name, frozenset())
            return frozenset(interp.local_id(rel_name, t) for t in ext)
    raise EvalError(f"unknown concept expression: {concept!r}")


def _attr_counts(
    interp: Interpretation, rel: RelationExpr, attr: str, kb: KnowledgeBase
) -> dict[str, int]:
    counts: dict[str, int] = {}
    for t in eval_relation(interp, rel, kb):
        for a, v in t:
            if a == attr:
                counts[v] = counts.get(v, 0) + 1
    return counts


def eval_relation(
    interp: Interpretation, rel: RelationExpr, kb: KnowledgeBase
) -> frozenset[Tup]:
    decls = kb.relation_map
    match rel:
        case RelationName(name):
            return frozenset(interp.relations.get(name, frozenset()))
        case RelationDiff(left, right):
            return eval_relation(interp, left, kb) - eval_relation(interp, right, kb)
        case RelationAnd(left, right):
            return eval_relation(interp, left, kb) & eval_relation(interp, right, kb)
        case RelationOr(left, right):
            lt = compute_tau(left, decls)
            rt = compute_tau(right, decls)
            if lt is None or rt is None or lt != rt:
                return frozenset()
            return eval_relation(interp, left, kb) | eval_relation(interp, right, kb)
        case Select(attr, concept, arg):
            tau = compute_tau(arg, decls)
            if tau is None or attr not in tau:
                return frozenset()
            members = eval_concept(interp, concept, kb)
            return frozenset(
                t
                for t in eval_relation(interp, arg, kb)
                if dict(t)[attr] in members
            )
        case ProjAtLeast(q, attrs, arg) | ProjAtMost(q, attrs, arg):
            tau = compute_tau(arg, decls)
            if tau is None or not frozenset(attrs) < tau:
                return frozenset()
            counts: dict[Tup, int] = {}
            for t in eval_relation(interp, arg, kb):
                p = tuple_project(t, attrs)
                counts[p] = counts.get(p, 0) + 1
            if isinstance(rel, ProjAtLeast):
                keep = {p for p, n in counts.items() if n >= rel.q}
            else:
                keep = {p for p, n in counts.items() if 1 <= n <= rel.q}
            return frozenset(keep)
    raise EvalError(f"unknown relation expression: {rel!r}")


# ---------------------------------------------------------------------------
# Axiom satisfaction


def check_model(interp: Interpretation, kb: KnowledgeBase) -> list[str]:
    """Violated axioms of a canonicalized knowledge base, as messages."""
    from .printer import format_concept, format_relation

    violations: list[str] = []
    for i, ax in enumerate(kb.tbox):
        match ax:
            case ConceptInclusion(lhs, rhs):
                if not eval_concept(interp, lhs, kb) <= eval_concept(interp, rhs, kb):
                    violations.append(
                        f"tbox axiom {i + 1}: {format_concept(lhs)} [= {format_concept(rhs)}"
                    )
            case RelationInclusion(lhs, rhs):
                if not eval_relation(interp, lhs, kb) <= eval_relation(interp, rhs, kb):
                    violations.append(
                        f"tbox axiom {i + 1}: {format_relation(lhs)} [= {format_relation(rhs)}"
                    )
    for i, ax in enumerate(kb.abox):
        match ax:
            case ConceptAssertion(concept, individual):
                d = interp.individuals.get(individual)
                if d is None or d not in interp.concepts.get(concept, frozenset()):
                    violations.append(f"abox axiom {i + 1}: {concept}({individual})")
            case RelationAssertion(relation, components):
                try:
                    t = mk_tuple(
                        (a, _ind(interp, o)) for a, o in components
                    )
                except EvalError:
                    violations.append(f"abox axiom {i + 1}: unmapped individual")
                    continue
                if t not in interp.relations.get(relation, frozenset()):
                    violations.append(f"abox axiom {i + 1}: {relation}(...) tuple missing")
            case SameIndividual(a, b):
                try:
                    if _ind(interp, a) != _ind(interp, b):
                        violations.append(f"abox axiom {i + 1}: {a} = {b}")
                except EvalError:
                    violations.append(f"abox axiom {i + 1}: unmapped individual")
            case DifferentIndividuals(a, b):
                try:
                    if _ind(interp, a) == _ind(interp, b):
                        violations.append(f"abox axiom {i + 1}: {a} != {b}")
                except EvalError:
                    violations.append(f"abox axiom {i + 1}: unmapped individual")
    return violations


def _ind(interp: Interpretation, name: str) -> str:
    try:
        return interp.individuals[name]
    except KeyError:
        raise EvalError(f"individual {name} has no interpretation") from None


# ---------------------------------------------------------------------------
# Bounded satisfiability search


@dataclass(frozen=True)
class SatWitness:
    interpretation: Interpretation
    examined: int


@dataclass(frozen=True)
class NoModelUpTo:
    bound: int
    examined: int


@dataclass(frozen=True)
class OracleResourceExceeded:
    examined: int
    elapsed: float


BoundedSatResult = "SatWitness | NoModelUpTo | OracleResourceExceeded"


def _iter_subsets_by_size(
    space: Sequence[Tup], forced: frozenset[Tup], cap: int
) -> Iterator[frozenset[Tup]]:
    extras = [t for t in space if t not in forced]
    max_extra = max(0, cap - len(forced))
    for k in range(0, max_extra + 1):
        for combo in itertools.combinations(extras, k):
            yield forced | frozenset(combo)


def _extension_vectors(
    spaces: list[Sequence[Tup]], forced: list[frozenset[Tup]], cap: int
) -> Iterator[tuple[frozenset[Tup], ...]]:
    """All per-relation extensions with |ext| <= cap, ordered by total size."""
    per_rel: list[dict[int, list[frozenset[Tup]]]] = []
    for space, f in zip(spaces, forced):
        by_size: dict[int, list[frozenset[Tup]]] = {}
        for ext in _iter_subsets_by_size(space, f, cap):
            by_size.setdefault(len(ext), []).append(ext)
        per_rel.append(by_size)
    if not per_rel:
        yield ()
        return
    max_total = cap * len(per_rel)
    for total in range(0, max_total + 1):
        for sizes in _size_partitions(total, len(per_rel), cap):
            pools = [per_rel[i].get(sizes[i], []) for i in range(len(per_rel))]
            if any(not p for p in pools):
                continue
            yield from itertools.product(*pools)


def _size_partitions(total: int, parts: int, cap: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if 0 <= total <= cap:
            yield (total,)
        return
    for first in range(0, min(total, cap) + 1):
        for rest in _size_partitions(total - first, parts - 1, cap):
            yield (first,) + rest


def _concept_extensions(
    names: Sequence[str], domain: Sequence[str], required: Mapping[str, frozenset[str]]
) -> Iterator[dict[str, frozenset[str]]]:
    """All concept extension maps, smallest first, honouring required members."""
    pools: list[list[frozenset[str]]] = []
    for name in names:
        need = required.get(name, frozenset())
        rest = [d for d in domain if d not in need]
        pool = [
            need | frozenset(c)
            for k in range(0, len(rest) + 1)
            for c in itertools.combinations(rest, k)
        ]
        pools.append(pool)
    for combo in itertools.product(*pools):
        yield dict(zip(names, combo))


def _injective_maps(
    keys: Sequence[Tup], domain: Sequence[str], enumerate_all: bool
) -> Iterator[dict[Tup, str]]:
    if len(keys) > len(domain):
        return
    if not enumerate_all:
        yield dict(zip(keys, domain))
        return
    for images in itertools.permutations(domain, len(keys)):
        yield dict(zip(keys, images))


def bounded_sat(
    kb: KnowledgeBase,
    max_domain: int,
    max_structures: int = 500_000,
    max_seconds: float = 60.0,
) -> "SatWitness | NoModelUpTo | OracleResourceExceeded":
    """Exhaustive search for a model with at most `max_domain` elements.

    Only structures whose objectification support fits injectively into the
    domain are considered (see the module docstring).  Domain sizes ascend
    and extensions grow smallest-first, so reported witnesses are minimal.
    A negative answer is only returned when the search space was exhausted;
    running out of budget yields OracleResourceExceeded.
    """
    from .renaming import canonicalize

    if kb.renaming:
        kb = canonicalize(kb)
    decls = kb.relation_map

    # A relation assertion whose attribute set differs from the declared
    # signature can never be satisfied, at any domain size.
    for ax in kb.abox:
        if isinstance(ax, RelationAssertion):
            if ax.attr_set != decls[ax.relation].attr_set:
                return NoModelUpTo(max_domain, 0)

    concept_names = sorted(
        kb.concept_names
        | {
            c.name
            for a in kb.tbox
            for c in iter_axiom_concepts(a)
            if isinstance(c, ConceptName)
        }
    )
    individuals = sorted(kb.individuals)
    rel_names = [d.name for d in kb.relations]
    uses_gobj = any(
        isinstance(c, GlobalObj) for a in kb.tbox for c in iter_axiom_concepts(a)
    )
    lobj_targets = sorted(
        {
            c.rel_name
            for a in kb.tbox
            for c in iter_axiom_concepts(a)
            if isinstance(c, LocalObj)
        }
    )
    # Objectification support covers projections onto every non-singleton
    # node the signature graph can name (projection sets and sub-signatures).
    proj_sets = projection_sets(kb) | {d.attr_set for d in kb.relations}

    start = time.monotonic()
    examined = 0
    work = 0

    def over_budget() -> bool:
        return (
            examined >= max_structures
            or work >= 4 * max_structures
            or time.monotonic() - start > max_seconds
        )

    for m in range(1, max_domain + 1):
        domain = tuple(f"e{i}" for i in range(1, m + 1))
        spaces = [
            sorted(
                mk_tuple(zip(decls[rn].signature, values))
                for values in itertools.product(domain, repeat=decls[rn].arity)
            )
            for rn in rel_names
        ]
        for ind_values in itertools.product(domain, repeat=len(individuals)):
            ind_map = dict(zip(individuals, ind_values))
            forced: list[frozenset[Tup]] = [frozenset() for _ in rel_names]
            required_concepts: dict[str, set[str]] = {}
            ok = True
            for ax in kb.abox:
                match ax:
                    case RelationAssertion(relation, components):
                        t = mk_tuple((a, ind_map[o]) for a, o in components)
                        forced[rel_names.index(relation)] |= {t}
                    case ConceptAssertion(concept, individual):
                        required_concepts.setdefault(concept, set()).add(
                            ind_map[individual]
                        )
                    case SameIndividual(a, b):
                        ok = ok and ind_map[a] == ind_map[b]
                    case DifferentIndividuals(a, b):
                        ok = ok and ind_map[a] != ind_map[b]
            if not ok or any(len(f) > m for f in forced):
                continue
            required = {k: frozenset(v) for k, v in required_concepts.items()}
            for exts in _extension_vectors(spaces, forced, m):
                work += 1
                if over_budget():
                    return OracleResourceExceeded(examined, time.monotonic() - start)
                relations = dict(zip(rel_names, exts))
                realized = sorted(set().union(*exts)) if exts else []
                support = set(realized)
                for t in realized:
                    ta = tuple_attrs(t)
                    for ps in proj_sets:
                        if ps < ta:
                            support.add(tuple_project(t, ps))
                big_support = sorted(t for t in support if len(t) > 1)
                if len(big_support) > m:
                    continue
                lobj_ok = True
                lobj_fixed: dict[str, dict[Tup, str]] = {}
                lobj_enumerated: list[str] = []
                for rn in rel_names:
                    ext = sorted(relations[rn])
                    if len(ext) > m:
                        lobj_ok = False
                        break
                    if rn in lobj_targets:
                        lobj_enumerated.append(rn)
                    else:
                        lobj_fixed[rn] = dict(zip(ext, domain))
                if not lobj_ok:
                    continue
                for conc in _concept_extensions(concept_names, domain, required):
                    for gmap in _injective_maps(big_support, domain, uses_gobj):
                        lobj_pools = [
                            list(
                                _injective_maps(sorted(relations[rn]), domain, True)
                            )
                            for rn in lobj_enumerated
                        ]
                        for lchoice in itertools.product(*lobj_pools):
                            if over_budget():
                                return OracleResourceExceeded(
                                    examined, time.monotonic() - start
                                )
                            examined += 1
                            lobj = dict(lobj_fixed)
                            lobj.update(dict(zip(lobj_enumerated, lchoice)))
                            interp = Interpretation(
                                domain=domain,
                                concepts=conc,
                                relations=relations,
                                individuals=ind_map,
                                gobj=gmap,
                                lobj=lobj,
                            )
                            if not check_model(interp, kb):
                                return SatWitness(interp, examined)
    return NoModelUpTo(max_domain, examined)


# ---------------------------------------------------------------------------
# Finite structures for the target language


@dataclass(frozen=True)
class AlcqiInterpretation:
    domain: tuple[str, ...]
    concepts: Mapping[str, frozenset[str]] = field(default_factory=dict)
    roles: Mapping[str, frozenset[tuple[str, str]]] = field(default_factory=dict)
    individuals: Mapping[str, str] = field(default_factory=dict)

    def role_pairs(self, role: Role) -> frozenset[tuple[str, str]]:
        pairs = self.roles.get(role.name, frozenset())
        if role.inverted:
            return frozenset((b, a) for a, b in pairs)
        return pairs


def eval_alcqi_concept(
    interp: AlcqiInterpretation, concept: AlcqiConcept
) -> frozenset[str]:
    domain = frozenset(interp.domain)
    match concept:
        case AName(name):
            return frozenset(interp.concepts.get(name, frozenset()))
        case ATop():
            return domain
        case ABottom():
            return frozenset()
        case ANot(arg):
            return domain - eval_alcqi_concept(interp, arg)
        case AAnd(args):
            out = domain
            for a in args:
                out &= eval_alcqi_concept(interp, a)
            return out
        case AOr(args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= eval_alcqi_concept(interp, a)
            return out
        case AtLeast(q, role, filler):
            members = eval_alcqi_concept(interp, filler)
            pairs = interp.role_pairs(role)
            return frozenset(
                d
                for d in domain
                if sum(1 for a, b in pairs if a == d and b in members) >= q
            )
        case AtMost(q, role, filler):
            members = eval_alcqi_concept(interp, filler)
            pairs = interp.role_pairs(role)
            return frozenset(
                d
                for d in domain
                if sum(1 for a, b in pairs if a == d and b in members) <= q
            )
    raise EvalError(f"unknown concept: {concept!r}")


def check_alcqi_model(interp: AlcqiInterpretation, kb: AlcqiKb) -> list[str]:
    from .alcqi import format_alcqi_concept

    violations: list[str] = []
    for i, (lhs, rhs) in enumerate(kb.gcis):
        if not eval_alcqi_concept(interp, lhs) <= eval_alcqi_concept(interp, rhs):
            violations.append(
                f"gci {i + 1}: {format_alcqi_concept(lhs)} [= {format_alcqi_concept(rhs)}"
            )
    for concept, ind in kb.concept_assertions:
        d = interp.individuals.get(ind)
        if d is None or d not in eval_alcqi_concept(interp, concept):
            violations.append(f"assertion {format_alcqi_concept(concept)}({ind})")
    for role, a, b in kb.role_assertions:
        da, db = interp.individuals.get(a), interp.individuals.get(b)
        if da is None or db is None or (da, db) not in interp.role_pairs(role):
            violations.append(f"role assertion {role}({a},{b})")
    for a, b in kb.equalities:
        if interp.individuals.get(a) != interp.individuals.get(b):
            violations.append(f"equality {a} = {b}")
    for a, b in kb.inequalities:
        if interp.individuals.get(a) == interp.individuals.get(b):
            violations.append(f"inequality {a} != {b}")
    return violations


# ---------------------------------------------------------------------------
# Text format


def format_interpretation(interp: Interpretation) -> str:
    lines = ["domain {" + ",".join(interp.domain) + "}."]
    for name in sorted(interp.individuals):
        lines.append(f"ind {name} = {interp.individuals[name]}.")
    for name in sorted(interp.concepts):
        members = ",".join(sorted(interp.concepts[name]))
        lines.append(f"{name} = {{{members}}}.")
    for name in sorted(interp.relations):
        tuples = sorted(interp.relations[name])
        inner = ", ".join(_fmt_tuple(t) for t in tuples)
        lines.append(f"{name} = {{ {inner} }}.")
    for t in sorted(interp.gobj):
        lines.append(f"gobj {_fmt_tuple(t)} = {interp.gobj[t]}.")
    for name in sorted(interp.lobj):
        for t in sorted(interp.lobj[name]):
            lines.append(f"lobj {name} {_fmt_tuple(t)} = {interp.lobj[name][t]}.")
    return "\n".join(lines) + "\n"


def _fmt_tuple(t: Tup) -> str:
    return "(" + ",".join(f"{a}:{v}" for a, v in t) + ")"


def format_alcqi_interpretation(interp: AlcqiInterpretation) -> str:
    lines = ["domain {" + ",".join(interp.domain) + "}."]
    for name in sorted(interp.individuals):
        lines.append(f"ind {name} = {interp.individuals[name]}.")
    for name in sorted(interp.concepts):
        members = ",".join(sorted(interp.concepts[name]))
        lines.append(f"concept {name} = {{{members}}}.")
    for name in sorted(interp.roles):
        pairs = ", ".join(f"({a},{b})" for a, b in sorted(interp.roles[name]))
        lines.append(f"role {name} = {{ {pairs} }}.")
    return "\n".join(lines) + "\n"


_TUPLE_RE = re.compile(r"\(([^()]*)\)")


def parse_interpretation(text: str, kb: KnowledgeBase) -> Interpretation:
    """Parse the textual interpretation format (the writer's inverse)."""
    decls = kb.relation_map
    domain: tuple[str, ...] = ()
    concepts: dict[str, frozenset[str]] = {}
    relations: dict[str, frozenset[Tup]] = {}
    individuals: dict[str, str] = {}
    gobj: dict[Tup, str] = {}
    lobj: dict[str, dict[Tup, str]] = {}

    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    for raw in body.split("."):
        stmt = raw.strip()
        if not stmt:
            continue
        if stmt.startswith("domain"):
            domain = tuple(_braced_items(stmt))
        elif stmt.startswith("ind "):
            _, rest = stmt.split(None, 1)
            name, value = (s.strip() for s in rest.split("="))
            individuals[name] = value
        elif stmt.startswith("gobj"):
            m = _TUPLE_RE.search(stmt)
            if not m:
                raise EvalError(f"malformed gobj statement: {stmt!r}")
            value = stmt.split("=")[-1].strip()
            gobj[_parse_tuple(m.group(1))] = value
        elif stmt.startswith("lobj"):
            parts = stmt.split(None, 2)
            rel = parts[1]
            m = _TUPLE_RE.search(parts[2])
            if not m:
                raise EvalError(f"malformed lobj statement: {stmt!r}")
            value = stmt.split("=")[-1].strip()
            lobj.setdefault(rel, {})[_parse_tuple(m.group(1))] = value
        else:
            name = stmt.split("=")[0].strip()
            if name in decls:
                tuples = frozenset(
                    _parse_tuple(m.group(1)) for m in _TUPLE_RE.finditer(stmt)
                )
                relations[name] = tuples
            else:
                concepts[name] = frozenset(_braced_items(stmt))
    return Interpretation(
        domain=domain,
        concepts=concepts,
        relations=relations,
        individuals=individuals,
        gobj=gobj,
        lobj={k: dict(v) for k, v in lobj.items()},
    )


def _braced_items(stmt: str) -> list[str]:
    inner = stmt[stmt.index("{") + 1 : stmt.rindex("}")]
    return [s.strip() for s in inner.split(",") if s.strip()]


def _parse_tuple(inner: str) -> Tup:
    pairs = []
    for part in inner.split(","):
        attr, value = part.split(":")
        pairs.append((attr.strip(), value.strip()))
    return mk_tuple(pairs)
