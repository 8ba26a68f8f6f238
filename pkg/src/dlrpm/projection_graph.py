"""Projection signature graph: the Hasse diagram of every attribute set the
knowledge base projects on, plus the fragment membership test built on it.

The decidable fragment requires (1) the graph dominated by every node to be a
tree, and (2) cardinalities above 1 to sit directly above their target node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .model import (
    ExistsAtLeast,
    KnowledgeBase,
    ProjAtLeast,
    ProjAtMost,
    RelationExpr,
    desugar_axiom,
    iter_axiom_concepts,
    iter_axiom_relations,
    compute_tau,
)

AttrSet = frozenset[str]


def _node_key(node: AttrSet) -> tuple:
    return (-len(node), tuple(sorted(node)))


def node_label(node: AttrSet) -> str:
    return "{" + ",".join(sorted(node)) + "}"


@dataclass(frozen=True)
class ProjectionSignatureGraph:
    """Immutable Hasse diagram of the projection signature under strict superset."""

    nodes: tuple[AttrSet, ...]
    child_map: dict[AttrSet, tuple[AttrSet, ...]]

    @property
    def edges(self) -> list[tuple[AttrSet, AttrSet]]:
        return [(a, b) for a in self.nodes for b in self.child_map[a]]

    def children(self, node: AttrSet) -> tuple[AttrSet, ...]:
        return self.child_map.get(node, ())

    def dominated(self, root: AttrSet) -> set[AttrSet]:
        """All nodes reachable from `root`, including the root itself."""
        seen: set[AttrSet] = set()
        stack = [root]
        while stack:
            cur = stack.pop()
            if cur in seen or cur not in self.child_map:
                continue
            seen.add(cur)
            stack.extend(self.child_map[cur])
        return seen

    def path(self, src: AttrSet, dst: AttrSet) -> tuple[AttrSet, ...]:
        """The directed path from src to dst, excluding src and including dst.

        Empty when no path exists or when src is a subset of dst.  Unique
        whenever the graph is a multitree; otherwise the lexicographically
        first path is returned.
        """
        if src <= dst or src not in self.child_map or dst not in self.child_map:
            return ()
        best: Optional[tuple[AttrSet, ...]] = None

        def walk(cur: AttrSet, acc: list[AttrSet]) -> Optional[tuple[AttrSet, ...]]:
            if cur == dst:
                return tuple(acc)
            for child in self.child_map[cur]:
                if dst <= child:  # only descend where dst can still be reached
                    found = walk(child, acc + [child])
                    if found is not None:
                        return found
            return None

        best = walk(src, [])
        return best or ()

    def count_paths(self, src: AttrSet, dst: AttrSet) -> int:
        """Number of distinct directed paths; independent of the multitree check."""
        if src == dst:
            return 1
        memo: dict[AttrSet, int] = {}

        def count(cur: AttrSet) -> int:
            if cur == dst:
                return 1
            if cur in memo:
                return memo[cur]
            memo[cur] = sum(count(c) for c in self.child_map[cur])
            return memo[cur]

        return count(src) if src in self.child_map and dst in self.child_map else 0


@dataclass(frozen=True)
class MultitreeCounterexample:
    """Two distinct directed paths between one pair of nodes."""

    src: AttrSet
    dst: AttrSet
    first: tuple[AttrSet, ...]
    second: tuple[AttrSet, ...]

    def __str__(self) -> str:
        def fmt(path: tuple[AttrSet, ...]) -> str:
            return " -> ".join(node_label(n) for n in path)

        return (
            f"two paths from {node_label(self.src)} to {node_label(self.dst)}: "
            f"[{fmt(self.first)}] and [{fmt(self.second)}]"
        )


def projection_sets(kb: KnowledgeBase) -> set[AttrSet]:
    """Attribute sets named by projection constructs anywhere in the TBox."""
    out: set[AttrSet] = set()
    for ax in kb.tbox:
        for rel in iter_axiom_relations(ax):
            if isinstance(rel, (ProjAtLeast, ProjAtMost)):
                out.add(frozenset(rel.attrs))
    return out


def build_signature(kb: KnowledgeBase) -> ProjectionSignatureGraph:
    """Smallest node set closed under the three membership rules, with the
    covering relation of strict superset as edges.  Expects a canonicalized
    knowledge base (renaming classes collapsed)."""
    nodes: set[AttrSet] = set()
    for decl in kb.relations:
        nodes.add(decl.attr_set)
    for attr in kb.attributes:
        nodes.add(frozenset({attr}))
    nodes.update(projection_sets(kb))

    ordered = sorted(nodes, key=_node_key)
    child_map: dict[AttrSet, tuple[AttrSet, ...]] = {}
    for a in ordered:
        covered = []
        for b in ordered:
            if b < a and not any(b < c < a for c in nodes):
                covered.append(b)
        child_map[a] = tuple(sorted(covered, key=_node_key))
    return ProjectionSignatureGraph(nodes=tuple(ordered), child_map=child_map)


def is_multitree(
    graph: ProjectionSignatureGraph,
) -> tuple[bool, Optional[MultitreeCounterexample]]:
    """True iff every dominated subgraph is a tree (at most one path between
    any two nodes); otherwise a two-path counterexample."""
    for src in graph.nodes:
        for dst in graph.nodes:
            if src == dst:
                continue
            if graph.count_paths(src, dst) > 1:
                first, second = _two_paths(graph, src, dst)
                return False, MultitreeCounterexample(src, dst, first, second)
    return True, None


def _two_paths(
    graph: ProjectionSignatureGraph, src: AttrSet, dst: AttrSet
) -> tuple[tuple[AttrSet, ...], tuple[AttrSet, ...]]:
    found: list[tuple[AttrSet, ...]] = []

    def walk(cur: AttrSet, acc: list[AttrSet]) -> None:
        if len(found) >= 2:
            return
        if cur == dst:
            found.append(tuple(acc))
            return
        for child in graph.child_map[cur]:
            walk(child, acc + [child])

    walk(src, [src])
    return found[0], found[1]


@dataclass(frozen=True)
class PathLengthViolation:
    """A cardinality above 1 whose target sits more than one step away."""

    construct: str
    source: AttrSet
    target: AttrSet
    path_length: int

    def __str__(self) -> str:
        return (
            f"{self.construct}: path from {node_label(self.source)} to "
            f"{node_label(self.target)} has length {self.path_length}, expected 1"
        )


@dataclass
class ValidationReport:
    multitree_ok: bool
    counterexample: Optional[MultitreeCounterexample]
    path_violations: list[PathLengthViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.multitree_ok and not self.path_violations

    def messages(self) -> list[str]:
        out = []
        if not self.multitree_ok and self.counterexample is not None:
            out.append(f"not a multitree: {self.counterexample}")
        out.extend(str(v) for v in self.path_violations)
        return out


def validate_dlrpm(
    kb: KnowledgeBase, graph: Optional[ProjectionSignatureGraph] = None
) -> ValidationReport:
    """Check fragment membership of a canonicalized knowledge base.

    Cardinality occurrences are collected from desugared axioms, so bounded
    at-most constructs are subject to the check through their negated
    at-least form.
    """
    from .printer import format_concept, format_relation

    graph = graph or build_signature(kb)
    ok, counter = is_multitree(graph)
    report = ValidationReport(multitree_ok=ok, counterexample=counter)

    decls = kb.relation_map

    def target_path(rel: RelationExpr, target: AttrSet) -> Optional[int]:
        tau = compute_tau(rel, decls)
        if tau is None:
            return None
        p = graph.path(tau, target)
        return len(p) if p else None

    for ax in (desugar_axiom(a) for a in kb.tbox):
        for rel in iter_axiom_relations(ax):
            match rel:
                case ProjAtLeast(q, attrs, arg) | ProjAtMost(q, attrs, arg) if q > 1:
                    length = target_path(arg, frozenset(attrs))
                    if length is not None and length != 1:
                        tau = compute_tau(arg, decls)
                        report.path_violations.append(
                            PathLengthViolation(
                                format_relation(rel), tau, frozenset(attrs), length
                            )
                        )
        for con in iter_axiom_concepts(ax):
            match con:
                case ExistsAtLeast(q, attr, arg) if q > 1:
                    target = frozenset({attr})
                    length = target_path(arg, target)
                    if length is not None and length != 1:
                        tau = compute_tau(arg, decls)
                        report.path_violations.append(
                            PathLengthViolation(format_concept(con), tau, target, length)
                        )
    return report


def to_dot(graph: ProjectionSignatureGraph) -> str:
    """Deterministic DOT rendering; node label is the sorted attribute set."""
    lines = ["digraph projection_signature {"]
    for node in graph.nodes:
        lines.append(f'  "{node_label(node)}";')
    for a in graph.nodes:
        for b in graph.child_map[a]:
            lines.append(f'  "{node_label(a)}" -> "{node_label(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
