"""Recursive-descent parser for the `.dlrp` knowledge-base format.

One statement per `.`-terminated clause; `#` starts a line comment.  Macro
statements (key, fd, equijoin, extuniq, ident) are expanded during parsing,
so the resulting knowledge base contains core axioms only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from . import macros
from .model import (
    ConceptAnd,
    ConceptAssertion,
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
    Select,
    Top,
    compute_tau,
    iter_axiom_relations,
    well_formedness_errors,
)
from .renaming import canonicalize

KEYWORDS = {
    "relation", "concept", "individual", "rename", "tbox", "abox",
    "key", "fd", "equijoin", "extuniq", "ident", "for",
    "not", "and", "or", "minus", "top", "bot",
    "exists", "gobj", "lobj", "sigma", "proj",
}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<name>[A-Za-z][A-Za-z0-9_]*)
      | (?P<int>[0-9]+)
      | (?P<sym>\[=|<->|<=|>=|->|!=|[()\[\],:.=/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class SourceDiagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str
    span: Optional[str] = None

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str  # "name" | "int" | "sym" | "eof"
    text: str
    line: int
    column: int


class ParseAbort(Exception):
    """Internal: statement cannot continue; recovery skips to the next '.'."""


def tokenize(text: str) -> tuple[list[Token], list[SourceDiagnostic]]:
    tokens: list[Token] = []
    diags: list[SourceDiagnostic] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            diags.append(
                SourceDiagnostic("error", line, col, f"unexpected character {text[pos]!r}")
            )
            pos += 1
            col += 1
            continue
        lexeme = m.group()
        if m.lastgroup == "name":
            tokens.append(Token("name", lexeme, line, col))
        elif m.lastgroup == "int":
            tokens.append(Token("int", lexeme, line, col))
        elif m.lastgroup == "sym":
            tokens.append(Token("sym", lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens, diags


Expr = Union[ConceptExpr, RelationExpr]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[SourceDiagnostic] = []
        self.relations: dict[str, RelationDecl] = {}
        self.concepts: set[str] = set()
        self.individuals: set[str] = set()
        self.renaming: list[tuple[str, str]] = []
        self.tbox: list = []
        self.abox: list = []

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str, what: str = "") -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            self.fail(f"expected {what or text!r}, found {tok.text!r}" if tok.text else
                      f"expected {what or text!r}, found end of input", tok)
        return self.next()

    def fail(self, message: str, tok: Optional[Token] = None) -> None:
        tok = tok or self.peek()
        self.diags.append(SourceDiagnostic("error", tok.line, tok.column, message))
        raise ParseAbort

    def warn(self, message: str, tok: Optional[Token] = None) -> None:
        tok = tok or self.peek()
        self.diags.append(SourceDiagnostic("warning", tok.line, tok.column, message))

    def name_token(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "name" or tok.text in KEYWORDS:
            self.fail(f"expected {what}, found {tok.text!r}", tok)
        return self.next().text

    def attr_token(self) -> str:
        tok = self.peek()
        if tok.kind == "int":
            if tok.text.startswith("0"):
                self.fail("positional attributes start at 1", tok)
            return self.next().text
        return self.name_token("attribute name")

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        left = self.parse_and()
        while self.at("or"):
            tok = self.next()
            right = self.parse_and()
            left = self.combine("or", left, right, tok)
        return left

    def parse_and(self) -> Expr:
        left = self.parse_unary()
        while self.at("and") or self.at("minus"):
            tok = self.next()
            right = self.parse_unary()
            left = self.combine(tok.text, left, right, tok)
        return left

    def combine(self, op: str, left: Expr, right: Expr, tok: Token) -> Expr:
        lc, rc = isinstance(left, ConceptExpr), isinstance(right, ConceptExpr)
        if op == "minus":
            if lc or rc:
                self.fail("'minus' applies to relations only", tok)
            return RelationDiff(left, right)
        if lc != rc:
            self.fail(f"'{op}' mixes a concept with a relation", tok)
        if lc:
            return (ConceptAnd if op == "and" else ConceptOr)(left, right)
        return (RelationAnd if op == "and" else RelationOr)(left, right)

    def parse_unary(self) -> Expr:
        if self.at("not"):
            tok = self.next()
            arg = self.parse_unary()
            if not isinstance(arg, ConceptExpr):
                self.fail("'not' applies to concepts only", tok)
            return ConceptNot(arg)
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if self.accept("("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if self.accept("top"):
            return Top()
        if self.accept("bot"):
            return Bottom()
        if self.at("exists"):
            return self.parse_exists()
        if self.accept("gobj"):
            return GlobalObj(self.relation_atom())
        if self.accept("lobj"):
            name_tok = self.peek()
            name = self.name_token("relation name")
            if name not in self.relations:
                self.fail(f"relation {name} is not declared", name_tok)
            return LocalObj(name)
        if self.at("sigma"):
            return self.parse_sigma()
        if self.at("proj"):
            return self.parse_proj()
        if tok.kind == "name" and tok.text not in KEYWORDS:
            name = self.next().text
            if name in self.relations:
                return RelationName(name)
            self.concepts.add(name)
            return ConceptName(name)
        self.fail(f"expected an expression, found {tok.text!r}" if tok.text else
                  "expected an expression, found end of input", tok)

    def relation_atom(self) -> RelationExpr:
        tok = self.peek()
        expr = self.parse_atom()
        if not isinstance(expr, RelationExpr):
            self.fail("expected a relation expression", tok)
        return expr

    def concept_arg(self) -> ConceptExpr:
        tok = self.peek()
        expr = self.parse_expr()
        if not isinstance(expr, ConceptExpr):
            self.fail("expected a concept expression", tok)
        return expr

    def parse_exists(self) -> ConceptExpr:
        self.expect("exists")
        op, q = ">=", 1
        if self.at(">=") or self.at("<="):
            op = self.next().text
            q = self.cardinality()
        self.expect("[")
        attr = self.attr_token()
        self.expect("]")
        rel = self.relation_atom()
        return ExistsAtLeast(q, attr, rel) if op == ">=" else ExistsAtMost(q, attr, rel)

    def parse_sigma(self) -> RelationExpr:
        self.expect("sigma")
        self.expect("[")
        attr = self.attr_token()
        self.expect(":")
        concept = self.concept_arg()
        self.expect("]")
        return Select(attr, concept, self.relation_atom())

    def parse_proj(self) -> RelationExpr:
        tok = self.expect("proj")
        op, q = ">=", 1
        if self.at(">=") or self.at("<="):
            op = self.next().text
            q = self.cardinality()
        attrs = self.attr_list_brackets()
        if len(attrs) < 2:
            self.fail("projection needs at least two attributes", tok)
        if len(set(attrs)) != len(attrs):
            self.fail("projection attribute list repeats an attribute", tok)
        rel = self.relation_atom()
        return ProjAtLeast(q, attrs, rel) if op == ">=" else ProjAtMost(q, attrs, rel)

    def cardinality(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            self.fail("expected a cardinality", tok)
        q = int(self.next().text)
        if q < 1:
            self.fail("cardinality must be >= 1", tok)
        return q

    def attr_list_brackets(self) -> tuple[str, ...]:
        self.expect("[")
        attrs = [self.attr_token()]
        while self.accept(","):
            attrs.append(self.attr_token())
        self.expect("]")
        return tuple(attrs)

    # -- statements ----------------------------------------------------------

    def parse_document(self) -> None:
        while self.peek().kind != "eof":
            try:
                self.parse_statement()
            except ParseAbort:
                while self.peek().kind != "eof" and not self.accept("."):
                    self.next()

    def parse_statement(self) -> None:
        tok = self.peek()
        handlers = {
            "relation": self.stmt_relation,
            "concept": self.stmt_concept,
            "individual": self.stmt_individual,
            "rename": self.stmt_rename,
            "tbox": self.stmt_tbox,
            "abox": self.stmt_abox,
            "key": self.stmt_key,
            "fd": self.stmt_fd,
            "equijoin": self.stmt_equijoin,
            "extuniq": self.stmt_extuniq,
            "ident": self.stmt_ident,
        }
        handler = handlers.get(tok.text)
        if handler is None:
            self.fail(f"expected a statement keyword, found {tok.text!r}", tok)
        self.next()
        handler()
        self.expect(".", "'.' at end of statement")

    def stmt_relation(self) -> None:
        tok = self.peek()
        name = self.name_token("relation name")
        if name in self.relations:
            self.fail(f"duplicate relation declaration: {name}", tok)
        self.expect("(")
        attrs = [self.attr_token()]
        while self.accept(","):
            attrs.append(self.attr_token())
        self.expect(")")
        try:
            self.relations[name] = RelationDecl(name, tuple(attrs))
        except ModelError as exc:
            self.fail(str(exc), tok)

    def stmt_concept(self) -> None:
        self.concepts.add(self.name_token("concept name"))

    def stmt_individual(self) -> None:
        self.individuals.add(self.name_token("individual name"))

    def stmt_rename(self) -> None:
        tok = self.peek()
        left = [self.attr_token()]
        while not self.at("<->"):
            left.append(self.attr_token())
        self.expect("<->")
        right = [self.attr_token()]
        while not self.at(".") and self.peek().kind != "eof":
            right.append(self.attr_token())
        if len(left) != len(right):
            self.fail(
                f"renaming groups differ in length ({len(left)} vs {len(right)})", tok
            )
        self.renaming.extend(zip(left, right))

    def stmt_tbox(self) -> None:
        tok = self.peek()
        lhs = self.parse_expr()
        self.expect("[=", "inclusion '[='")
        rhs = self.parse_expr()
        lc, rc = isinstance(lhs, ConceptExpr), isinstance(rhs, ConceptExpr)
        if lc != rc:
            self.fail("inclusion mixes a concept with a relation", tok)
        self.tbox.append(ConceptInclusion(lhs, rhs) if lc else RelationInclusion(lhs, rhs))

    def stmt_abox(self) -> None:
        tok = self.peek()
        name = self.name_token("name")
        if self.accept("="):
            other = self.register_individual()
            self.individuals.add(name)
            self.abox.append(SameIndividual(name, other))
            return
        if self.accept("!="):
            other = self.register_individual()
            self.individuals.add(name)
            self.abox.append(DifferentIndividuals(name, other))
            return
        self.expect("(")
        if name in self.relations:
            comps = [self.tuple_component()]
            while self.accept(","):
                comps.append(self.tuple_component())
            self.expect(")")
            decl = self.relations[name]
            if frozenset(a for a, _ in comps) != decl.attr_set:
                self.warn(
                    f"tuple attributes do not match the signature of {name}; "
                    "the assertion is unsatisfiable",
                    tok,
                )
            try:
                self.abox.append(RelationAssertion(name, tuple(comps)))
            except ModelError as exc:
                self.fail(str(exc), tok)
        else:
            self.concepts.add(name)
            ind = self.register_individual()
            self.expect(")")
            self.abox.append(ConceptAssertion(name, ind))

    def register_individual(self) -> str:
        name = self.name_token("individual name")
        self.individuals.add(name)
        return name

    def tuple_component(self) -> tuple[str, str]:
        attr = self.attr_token()
        self.expect(":")
        return attr, self.register_individual()

    # -- macro statements ------------------------------------------------------

    def add_expansion(self, exp: macros.Expansion, tok: Token) -> None:
        for decl in exp.decls:
            if decl.name in self.relations:
                self.fail(f"macro declares existing relation {decl.name}", tok)
            self.relations[decl.name] = decl
        self.tbox.extend(exp.tbox)
        self.renaming.extend(exp.renaming)
        for w in exp.warnings:
            self.warn(w, tok)

    def declared_relation(self) -> RelationExpr:
        tok = self.peek()
        name = self.name_token("relation name")
        if name not in self.relations:
            self.fail(f"relation {name} is not declared", tok)
        return RelationName(name)

    def stmt_key(self) -> None:
        tok = self.peek()
        rel = self.declared_relation()
        self.expect("(")
        attrs = [self.attr_token()]
        while self.accept(","):
            attrs.append(self.attr_token())
        self.expect(")")
        try:
            self.add_expansion(macros.expand_key(rel, attrs, self.relations), tok)
        except macros.MacroError as exc:
            self.fail(str(exc), tok)

    def stmt_fd(self) -> None:
        tok = self.peek()
        rel = self.declared_relation()
        self.expect(":")
        lhs = [self.attr_token()]
        while self.accept(","):
            lhs.append(self.attr_token())
        self.expect("->")
        rhs = self.attr_token()
        try:
            self.add_expansion(macros.expand_fd(rel, lhs, rhs, self.relations), tok)
        except macros.MacroError as exc:
            self.fail(str(exc), tok)

    def stmt_equijoin(self) -> None:
        tok = self.peek()
        name = self.name_token("relation name")
        self.expect("=")
        left = self.declared_relation()
        self.expect("[")
        left_attr = self.attr_token()
        self.expect("=")
        right_attr = self.attr_token()
        self.expect("]")
        right = self.declared_relation()
        try:
            self.add_expansion(
                macros.expand_equijoin(name, left, left_attr, right, right_attr, self.relations),
                tok,
            )
        except macros.MacroError as exc:
            self.fail(str(exc), tok)

    def stmt_extuniq(self) -> None:
        tok = self.peek()
        name = self.name_token("relation name")
        self.expect("=")
        operands = [self.extuniq_operand()]
        while self.accept(","):
            operands.append(self.extuniq_operand())
        try:
            self.add_expansion(
                macros.expand_external_uniqueness(name, operands, self.relations), tok
            )
        except macros.MacroError as exc:
            self.fail(str(exc), tok)

    def extuniq_operand(self) -> tuple[str, RelationExpr]:
        self.expect("[")
        attr = self.attr_token()
        self.expect("]")
        return attr, self.declared_relation()

    def stmt_ident(self) -> None:
        tok = self.peek()
        name = self.name_token("relation name")
        self.expect("for")
        concept = self.concept_arg()
        self.expect("=")
        operands = [self.ident_operand()]
        while self.accept(","):
            operands.append(self.ident_operand())
        try:
            self.add_expansion(
                macros.expand_identification(name, concept, operands, self.relations), tok
            )
        except macros.MacroError as exc:
            self.fail(str(exc), tok)

    def ident_operand(self) -> tuple[str, str, RelationExpr]:
        self.expect("[")
        join_attr = self.attr_token()
        self.expect("/")
        sel_attr = self.attr_token()
        self.expect("]")
        rel = self.declared_relation()
        return join_attr, sel_attr, rel


def _compat_warnings(kb: KnowledgeBase) -> list[str]:
    """Union-compatibility notes for expressions that are forced empty."""
    out: list[str] = []
    decls = kb.relation_map
    for i, ax in enumerate(kb.tbox):
        for rel in iter_axiom_relations(ax):
            if isinstance(rel, (RelationAnd, RelationOr)):
                lt = compute_tau(rel.left, decls)
                rt = compute_tau(rel.right, decls)
                if lt is not None and rt is not None and lt != rt:
                    op = "and" if isinstance(rel, RelationAnd) else "or"
                    out.append(
                        f"tbox axiom {i + 1}: operands of '{op}' are not union "
                        "compatible; the expression is empty"
                    )
        if isinstance(ax, RelationInclusion):
            lt = compute_tau(ax.lhs, decls)
            rt = compute_tau(ax.rhs, decls)
            if lt is not None and rt is not None and lt != rt:
                out.append(
                    f"tbox axiom {i + 1}: inclusion sides are not union compatible; "
                    "the axiom forces the left side empty"
                )
    return out


def parse_kb(text: str) -> tuple[Optional[KnowledgeBase], list[SourceDiagnostic]]:
    """Parse a `.dlrp` document.

    Returns the knowledge base and diagnostics; any error-severity diagnostic
    means no knowledge base is produced.
    """
    tokens, diags = tokenize(text)
    parser = _Parser(tokens)
    parser.diags.extend(diags)
    parser.parse_document()
    diags = parser.diags

    kb: Optional[KnowledgeBase] = None
    if not any(d.severity == "error" for d in diags):
        try:
            kb = KnowledgeBase(
                relations=tuple(parser.relations.values()),
                concept_names=frozenset(parser.concepts),
                individuals=frozenset(parser.individuals),
                tbox=tuple(parser.tbox),
                abox=tuple(parser.abox),
                renaming=tuple(parser.renaming),
            )
        except ModelError as exc:
            diags.append(SourceDiagnostic("error", 1, 1, str(exc)))

    if kb is not None:
        try:
            canonical = canonicalize(kb)
        except ModelError as exc:
            diags.append(SourceDiagnostic("error", 1, 1, str(exc)))
            return None, diags
        for msg in well_formedness_errors(canonical):
            diags.append(SourceDiagnostic("error", 1, 1, msg))
        for msg in _compat_warnings(canonical):
            diags.append(SourceDiagnostic("warning", 1, 1, msg))
        if any(d.severity == "error" for d in diags):
            kb = None

    return kb, diags


def parse_kb_or_raise(text: str) -> KnowledgeBase:
    """Convenience wrapper for programmatic use and tests."""
    kb, diags = parse_kb(text)
    if kb is None:
        raise ModelError("; ".join(str(d) for d in diags if d.severity == "error"))
    return kb
