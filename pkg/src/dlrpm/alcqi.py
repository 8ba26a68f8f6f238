"""Target language for the reasoner: Boolean-complete concepts with qualified
number restrictions and inverse roles, plus negation normal form and TBox
internalization."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Union


@dataclass(frozen=True)
class Role:
    """A role name or its inverse; inversion is involutive."""

    name: str
    inverted: bool = False

    @property
    def inverse(self) -> "Role":
        return Role(self.name, not self.inverted)

    def __str__(self) -> str:
        return f"(inv {self.name})" if self.inverted else self.name


class AlcqiConcept:
    __slots__ = ()


@dataclass(frozen=True)
class AName(AlcqiConcept):
    name: str


@dataclass(frozen=True)
class ATop(AlcqiConcept):
    pass


@dataclass(frozen=True)
class ABottom(AlcqiConcept):
    pass


@dataclass(frozen=True)
class ANot(AlcqiConcept):
    arg: AlcqiConcept


@dataclass(frozen=True)
class AAnd(AlcqiConcept):
    args: tuple[AlcqiConcept, ...]

    def __post_init__(self) -> None:
        if len(self.args) < 2:
            raise ValueError("conjunction needs at least two arguments")


@dataclass(frozen=True)
class AOr(AlcqiConcept):
    args: tuple[AlcqiConcept, ...]

    def __post_init__(self) -> None:
        if len(self.args) < 2:
            raise ValueError("disjunction needs at least two arguments")


@dataclass(frozen=True)
class AtLeast(AlcqiConcept):
    q: int
    role: Role
    filler: AlcqiConcept

    def __post_init__(self) -> None:
        if self.q < 0:
            raise ValueError("cardinality must be >= 0")


@dataclass(frozen=True)
class AtMost(AlcqiConcept):
    q: int
    role: Role
    filler: AlcqiConcept

    def __post_init__(self) -> None:
        if self.q < 0:
            raise ValueError("cardinality must be >= 0")


def make_and(args: Iterable[AlcqiConcept]) -> AlcqiConcept:
    """Conjunction with unit laws, duplicate removal, and flattening."""
    items: list[AlcqiConcept] = []
    for a in args:
        flat = a.args if isinstance(a, AAnd) else (a,)
        for b in flat:
            if isinstance(b, ABottom):
                return ABottom()
            if not isinstance(b, ATop) and b not in items:
                items.append(b)
    if not items:
        return ATop()
    if len(items) == 1:
        return items[0]
    return AAnd(tuple(items))


def make_or(args: Iterable[AlcqiConcept]) -> AlcqiConcept:
    """Disjunction with unit laws, duplicate removal, and flattening."""
    items: list[AlcqiConcept] = []
    for a in args:
        flat = a.args if isinstance(a, AOr) else (a,)
        for b in flat:
            if isinstance(b, ATop):
                return ATop()
            if not isinstance(b, ABottom) and b not in items:
                items.append(b)
    for item in items:
        if isinstance(item, ANot) and item.arg in items:
            return ATop()
    if not items:
        return ABottom()
    if len(items) == 1:
        return items[0]
    return AOr(tuple(items))


def some(role: Role, filler: AlcqiConcept) -> AlcqiConcept:
    return AtLeast(1, role, filler)


def every(role: Role, filler: AlcqiConcept) -> AlcqiConcept:
    """Universal restriction in canonical at-most form: forall r.C == <=0 r.not C."""
    return AtMost(0, role, _negate(filler))


def _negate(c: AlcqiConcept) -> AlcqiConcept:
    return c.arg if isinstance(c, ANot) else ANot(c)


def nnf(concept: AlcqiConcept) -> AlcqiConcept:
    """Negation normal form; negation ends up on concept names only."""
    match concept:
        case AName() | ATop() | ABottom():
            return concept
        case AAnd(args):
            return make_and(nnf(a) for a in args)
        case AOr(args):
            return make_or(nnf(a) for a in args)
        case AtLeast(q, role, filler):
            return AtLeast(q, role, nnf(filler))
        case AtMost(q, role, filler):
            return AtMost(q, role, nnf(filler))
        case ANot(arg):
            match arg:
                case AName():
                    return concept
                case ATop():
                    return ABottom()
                case ABottom():
                    return ATop()
                case ANot(inner):
                    return nnf(inner)
                case AAnd(args):
                    return make_or(nnf(ANot(a)) for a in args)
                case AOr(args):
                    return make_and(nnf(ANot(a)) for a in args)
                case AtLeast(q, role, filler):
                    if q == 0:
                        return ABottom()
                    return AtMost(q - 1, role, nnf(filler))
                case AtMost(q, role, filler):
                    return AtLeast(q + 1, role, nnf(filler))
    raise ValueError(f"unknown concept: {concept!r}")


@dataclass(frozen=True)
class AlcqiKb:
    """General concept inclusions plus an assertional part."""

    concept_names: frozenset[str] = frozenset()
    role_names: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()
    gcis: tuple[tuple[AlcqiConcept, AlcqiConcept], ...] = ()
    concept_assertions: tuple[tuple[AlcqiConcept, str], ...] = ()
    role_assertions: tuple[tuple[Role, str, str], ...] = ()
    equalities: tuple[tuple[str, str], ...] = ()
    inequalities: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        undeclared_roles = {
            r.name for r, _, _ in self.role_assertions
        } - set(self.role_names)
        if undeclared_roles:
            raise ValueError(
                f"role assertions use undeclared roles: {', '.join(sorted(undeclared_roles))}"
            )
        undeclared_inds = {
            i
            for _, i in self.concept_assertions
        } | {x for _, a, b in self.role_assertions for x in (a, b)}
        undeclared_inds |= {x for a, b in self.equalities for x in (a, b)}
        undeclared_inds |= {x for a, b in self.inequalities for x in (a, b)}
        undeclared_inds -= set(self.individuals)
        if undeclared_inds:
            raise ValueError(
                f"assertions use undeclared individuals: {', '.join(sorted(undeclared_inds))}"
            )

    @cached_property
    def all_roles(self) -> tuple[Role, ...]:
        return tuple(Role(n) for n in sorted(self.role_names))


def internalize(kb: AlcqiKb) -> tuple[AlcqiConcept, AlcqiKb]:
    """Fold every inclusion into one constraint concept that must hold at
    every element; returns it with the inclusion-free remainder of the KB."""
    meta = make_and(
        tuple(nnf(make_or((_negate(lhs), rhs))) for lhs, rhs in kb.gcis)
    )
    rest = AlcqiKb(
        concept_names=kb.concept_names,
        role_names=kb.role_names,
        individuals=kb.individuals,
        gcis=(),
        concept_assertions=kb.concept_assertions,
        role_assertions=kb.role_assertions,
        equalities=kb.equalities,
        inequalities=kb.inequalities,
    )
    return nnf(meta), rest


# ---------------------------------------------------------------------------
# Serialization (prefix notation, one axiom per line)


def format_alcqi_concept(concept: AlcqiConcept) -> str:
    match concept:
        case AName(name):
            return name
        case ATop():
            return "top"
        case ABottom():
            return "bot"
        case ANot(arg):
            return f"(not {format_alcqi_concept(arg)})"
        case AAnd(args):
            return "(and " + " ".join(format_alcqi_concept(a) for a in args) + ")"
        case AOr(args):
            return "(or " + " ".join(format_alcqi_concept(a) for a in args) + ")"
        case AtLeast(q, role, filler):
            if q == 1:
                return f"(some {role} {format_alcqi_concept(filler)})"
            return f"(atleast {q} {role} {format_alcqi_concept(filler)})"
        case AtMost(q, role, filler):
            if q == 0:
                # Canonical universal restriction reads better in all-form.
                return f"(all {role} {format_alcqi_concept(_negate(filler))})"
            return f"(atmost {q} {role} {format_alcqi_concept(filler)})"
    raise ValueError(f"unknown concept: {concept!r}")


def serialize_alcqi(kb: AlcqiKb) -> str:
    lines: list[str] = []
    for name in sorted(kb.concept_names):
        lines.append(f"concept {name}")
    for name in sorted(kb.role_names):
        lines.append(f"role {name}")
    for name in sorted(kb.individuals):
        lines.append(f"individual {name}")
    for lhs, rhs in kb.gcis:
        lines.append(f"(implies {format_alcqi_concept(lhs)} {format_alcqi_concept(rhs)})")
    for concept, ind in kb.concept_assertions:
        lines.append(f"(assert {format_alcqi_concept(concept)} {ind})")
    for role, a, b in kb.role_assertions:
        lines.append(f"(role-assert {role} {a} {b})")
    for a, b in kb.equalities:
        lines.append(f"(same {a} {b})")
    for a, b in kb.inequalities:
        lines.append(f"(different {a} {b})")
    return "\n".join(lines) + ("\n" if lines else "")
