"""Satisfiability of the target language by completion graph.

Standard calculus for a Boolean-complete language with qualified number
restrictions and inverse roles over an assertional part: root nodes for
individuals, blockable tree nodes below them, pairwise blocking for
termination, merge-and-prune for at-most violations, and chronological
backtracking over the nondeterministic rules.  Inclusions with an atomic
left-hand side are lazily unfolded; the rest are internalized into one
constraint added to every node.

Conjunctions, unfoldings, universal propagation, and atom-level clash
detection happen eagerly as concepts and edges arrive; the remaining rules
are driven by per-node work queues, with one full sweep before a graph is
accepted as complete.
"""

from __future__ import annotations

import itertools
import sys
import time
from dataclasses import dataclass
from typing import Optional

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
    format_alcqi_concept,
    make_or,
    nnf,
)
from .modelcheck import AlcqiInterpretation


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 1_000_000
    max_seconds: float = 60.0


@dataclass(frozen=True)
class TableauStats:
    nodes_created: int
    branches: int
    elapsed: float


@dataclass(frozen=True)
class Sat:
    model: Optional[AlcqiInterpretation]
    stats: TableauStats


@dataclass(frozen=True)
class Unsat:
    clash: str
    stats: TableauStats


@dataclass(frozen=True)
class ResourceExceeded:
    stats: TableauStats


TableauResult = "Sat | Unsat | ResourceExceeded"

# Concepts are compared and indexed through their printed form; strings hash
# cheaply (cached by the runtime) where deep dataclasses do not.
_ckey_cache: dict[int, tuple[AlcqiConcept, str]] = {}


def _ckey(concept: AlcqiConcept) -> str:
    key = id(concept)
    hit = _ckey_cache.get(key)
    if hit is not None and hit[0] is concept:
        return hit[1]
    out = format_alcqi_concept(concept)
    _ckey_cache[key] = (concept, out)
    return out


_neg_cache: dict[int, tuple[AlcqiConcept, AlcqiConcept]] = {}


def _negate(concept: AlcqiConcept) -> AlcqiConcept:
    key = id(concept)
    hit = _neg_cache.get(key)
    if hit is not None and hit[0] is concept:
        return hit[1]
    out = nnf(concept.arg if isinstance(concept, ANot) else ANot(concept))
    _neg_cache[key] = (concept, out)
    return out


_RKey = tuple[str, bool]


def _rkey(role: Role) -> _RKey:
    return (role.name, role.inverted)


def _rinv(key: _RKey) -> _RKey:
    return (key[0], not key[1])


class _OutOfBudget(Exception):
    pass


class _Graph:
    """Mutable completion graph; cloned at branch points."""

    __slots__ = (
        "labels", "disj", "atleast", "atmost", "univ",
        "edges", "adj", "parent", "root", "names", "neq", "next_id", "alive",
        "clash", "q_atmost", "q_atleast", "q_disj", "atleast_parked", "version",
        "_blocked_cache",
    )

    def __init__(self) -> None:
        self.labels: dict[int, dict[str, AlcqiConcept]] = {}
        self.disj: dict[int, dict[str, AOr]] = {}
        self.atleast: dict[int, dict[str, AtLeast]] = {}
        self.atmost: dict[int, dict[str, AtMost]] = {}
        self.univ: dict[int, dict[str, AtMost]] = {}
        self.edges: dict[tuple[int, int], set[_RKey]] = {}
        self.adj: dict[int, set[int]] = {}
        self.parent: dict[int, Optional[int]] = {}
        self.root: dict[int, bool] = {}
        self.names: dict[int, set[str]] = {}
        self.neq: set[frozenset[int]] = set()
        self.alive: list[int] = []
        self.next_id = 0
        self.clash: Optional[str] = None
        # Work queues (insertion-ordered sets via dict keys).
        self.q_atmost: dict[int, None] = {}
        self.q_atleast: dict[int, None] = {}
        self.q_disj: dict[int, None] = {}
        self.atleast_parked: dict[int, int] = {}  # node -> version when parked
        self.version = 0
        self._blocked_cache: Optional[tuple[int, dict[int, bool], dict[int, int]]] = None

    def clone(self) -> "_Graph":
        g = _Graph.__new__(_Graph)
        g.labels = {k: dict(v) for k, v in self.labels.items()}
        g.disj = {k: dict(v) for k, v in self.disj.items()}
        g.atleast = {k: dict(v) for k, v in self.atleast.items()}
        g.atmost = {k: dict(v) for k, v in self.atmost.items()}
        g.univ = {k: dict(v) for k, v in self.univ.items()}
        g.edges = {k: set(v) for k, v in self.edges.items()}
        g.adj = {k: set(v) for k, v in self.adj.items()}
        g.parent = dict(self.parent)
        g.root = dict(self.root)
        g.names = {k: set(v) for k, v in self.names.items()}
        g.neq = set(self.neq)
        g.alive = list(self.alive)
        g.next_id = self.next_id
        g.clash = self.clash
        g.q_atmost = dict(self.q_atmost)
        g.q_atleast = dict(self.q_atleast)
        g.q_disj = dict(self.q_disj)
        g.atleast_parked = dict(self.atleast_parked)
        g.version = self.version
        g._blocked_cache = self._blocked_cache
        return g

    def new_node(self, is_root: bool, parent: Optional[int] = None) -> int:
        nid = self.next_id
        self.next_id += 1
        self.labels[nid] = {}
        self.disj[nid] = {}
        self.atleast[nid] = {}
        self.atmost[nid] = {}
        self.univ[nid] = {}
        self.adj[nid] = set()
        self.parent[nid] = parent
        self.root[nid] = is_root
        self.names[nid] = set()
        self.alive.append(nid)
        self.version += 1
        return nid

    def has(self, node: int, concept: AlcqiConcept) -> bool:
        return _ckey(concept) in self.labels[node]

    def roles_between(self, src: int, dst: int) -> set[_RKey]:
        out = set(self.edges.get((src, dst), ()))
        for k in self.edges.get((dst, src), ()):
            out.add(_rinv(k))
        return out

    def has_role(self, src: int, dst: int, key: _RKey) -> bool:
        fwd = self.edges.get((src, dst))
        if fwd and key in fwd:
            return True
        back = self.edges.get((dst, src))
        return bool(back) and _rinv(key) in back

    def neighbours(self, node: int, key: _RKey) -> list[int]:
        return sorted(y for y in self.adj[node] if self.has_role(node, y, key))

    def distinct(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.neq

    def tree_children(self, node: int) -> list[int]:
        return [c for c in self.adj[node] if self.parent.get(c) == node]

    def ancestors(self, node: int):
        cur = self.parent.get(node)
        while cur is not None:
            yield cur
            cur = self.parent.get(cur)

    # -- blocking ---------------------------------------------------------
    #
    # Anywhere pairwise blocking: a tree node is directly blocked by the
    # oldest unblocked tree node with the same (label, predecessor label,
    # connecting roles) configuration; descendants of blocked nodes are
    # blocked too.  Computed in one creation-order pass and cached per graph
    # version.

    def _blocking_map(self) -> tuple[dict[int, bool], dict[int, int]]:
        """Blocked status per node plus blocker of each directly blocked node."""
        cached = self._blocked_cache
        if cached is not None and cached[0] == self.version:
            return cached[1], cached[2]
        blocked: dict[int, bool] = {}
        blocker: dict[int, int] = {}
        reps: dict[tuple, int] = {}
        for node in self.alive:
            if self.root[node]:
                blocked[node] = False
                continue
            p = self.parent.get(node)
            if p is None or p not in self.labels:
                blocked[node] = False
                continue
            inherited = blocked.get(p, False)
            config = (
                frozenset(self.labels[node]),
                frozenset(self.labels[p]),
                frozenset(self.roles_between(p, node)),
            )
            direct = config in reps
            blocked[node] = inherited or direct
            if direct and not inherited:
                blocker[node] = reps[config]
            if not blocked[node] and config not in reps:
                reps[config] = node
        self._blocked_cache = (self.version, blocked, blocker)
        return blocked, blocker

    def blocked(self, node: int) -> bool:
        if self.root[node]:
            return False
        return self._blocking_map()[0].get(node, False)


class _Solver:
    def __init__(self, kb: AlcqiKb, budget: Budget, disjunction_last: bool = False):
        self.budget = budget
        self.start = time.monotonic()
        self.nodes_created = 0
        self.branches = 0
        self.disjunction_last = disjunction_last

        self.unfold: dict[str, list[AlcqiConcept]] = {}
        meta: list[AlcqiConcept] = []
        for lhs, rhs in kb.gcis:
            if isinstance(lhs, AName):
                self.unfold.setdefault(lhs.name, []).append(nnf(rhs))
            else:
                meta.append(nnf(make_or((_negate(lhs), rhs))))
        self.meta = meta
        self.kb = kb

    # -- mutation with eager consequences -----------------------------------

    def add_concept(self, g: _Graph, node: int, concept: AlcqiConcept) -> None:
        if isinstance(concept, ATop) or g.clash is not None:
            return
        key = _ckey(concept)
        label = g.labels[node]
        if key in label:
            return
        label[key] = concept
        g.version += 1
        if isinstance(concept, ABottom):
            g.clash = f"node {node}: bottom"
            return
        if isinstance(concept, ANot):
            if key[5:-1] in label:
                g.clash = f"node {node}: {key[5:-1]} and its negation"
                return
        elif f"(not {key})" in label:
            g.clash = f"node {node}: {key} and its negation"
            return

        if isinstance(concept, AName):
            for rhs in self.unfold.get(concept.name, ()):
                self.add_concept(g, node, rhs)
                if g.clash is not None:
                    return
        elif isinstance(concept, AAnd):
            for arg in concept.args:
                self.add_concept(g, node, arg)
                if g.clash is not None:
                    return
        elif isinstance(concept, AOr):
            g.disj[node][key] = concept
            g.q_disj[node] = None
        elif isinstance(concept, AtLeast):
            if concept.q >= 1:
                g.atleast[node][key] = concept
                g.q_atleast[node] = None
                g.atleast_parked.pop(node, None)
        elif isinstance(concept, AtMost):
            if concept.q == 0:
                g.univ[node][key] = concept
                propagated = _negate(concept.filler)
                rk = _rkey(concept.role)
                for y in g.neighbours(node, rk):
                    if isinstance(concept.filler, ATop):
                        g.clash = f"node {node}: successor forbidden by {key}"
                        return
                    self.add_concept(g, y, propagated)
                    if g.clash is not None:
                        return
            else:
                g.atmost[node][key] = concept
                g.q_atmost[node] = None
        # Membership changes can affect neighbours' counting constraints.
        for y in g.adj[node]:
            if g.atmost[y]:
                g.q_atmost[y] = None

    def add_edge(self, g: _Graph, src: int, dst: int, role: Role) -> None:
        key = _rkey(role)
        if key[1]:
            src, dst, key = dst, src, _rinv(key)
        g.edges.setdefault((src, dst), set()).add(key)
        g.adj[src].add(dst)
        g.adj[dst].add(src)
        g.version += 1
        for a, b in ((src, dst), (dst, src)):
            if g.atmost[a] or g.atleast[a]:
                g.q_atmost[a] = None
                g.q_atleast[a] = None
                g.atleast_parked.pop(a, None)
            for c in g.univ[a].values():
                rk = _rkey(c.role)
                if g.has_role(a, b, rk):
                    if isinstance(c.filler, ATop):
                        g.clash = f"node {a}: successor forbidden by {_ckey(c)}"
                        return
                    self.add_concept(g, b, _negate(c.filler))
                    if g.clash is not None:
                        return

    def init_node(self, g: _Graph, node: int) -> None:
        for m in self.meta:
            self.add_concept(g, node, m)
            if g.clash is not None:
                return

    # -- merging --------------------------------------------------------------

    def merge(self, g: _Graph, a: int, b: int) -> bool:
        """Merge one node into the other; False on an inequality clash.
        Roots absorb blockable nodes; among peers the earlier node survives."""
        if g.distinct(a, b):
            return False
        if g.root[b] and not g.root[a]:
            a, b = b, a
        elif g.root[a] == g.root[b] and b < a:
            a, b = b, a
        survivor, gone = a, b

        self._prune_subtree(g, gone, keep=survivor)
        gone_label = list(g.labels[gone].values())
        gone_adj = list(g.adj[gone])
        g.names[survivor] |= g.names[gone]
        for pair in list(g.neq):
            if gone in pair:
                other = next(iter(pair - {gone}))
                g.neq.discard(pair)
                if other != survivor:
                    g.neq.add(frozenset((other, survivor)))
        moved_edges = []
        for other in gone_adj:
            if other not in g.adj or other == survivor:
                continue
            moved_edges.extend(
                (other, k) for k in g.roles_between(gone, other)
            )
        self._drop(g, gone)
        for concept in gone_label:
            self.add_concept(g, survivor, concept)
            if g.clash is not None:
                return True
        for other, key in moved_edges:
            if other in g.labels and other in set(g.alive):
                self.add_edge(g, survivor, other, Role(*key))
                if g.clash is not None:
                    return True
        g.q_atmost[survivor] = None
        g.q_atleast[survivor] = None
        g.atleast_parked.pop(survivor, None)
        for y in g.adj[survivor]:
            g.q_atmost[y] = None
            g.q_atleast[y] = None
            g.atleast_parked.pop(y, None)
        return True

    def _prune_subtree(self, g: _Graph, node: int, keep: int) -> None:
        for child in list(g.tree_children(node)):
            if child == keep:
                continue
            self._prune_subtree(g, child, keep)
            self._drop(g, child)

    def _drop(self, g: _Graph, node: int) -> None:
        if node in g.alive:
            g.alive.remove(node)
        g.version += 1
        for other in list(g.adj[node]):
            g.adj[other].discard(node)
            g.edges.pop((node, other), None)
            g.edges.pop((other, node), None)
            # Dropped witnesses may leave counting constraints unsatisfied.
            g.q_atmost[other] = None
            g.q_atleast[other] = None
            g.atleast_parked.pop(other, None)
        g.adj.pop(node, None)
        g.labels.pop(node, None)
        g.disj.pop(node, None)
        g.atleast.pop(node, None)
        g.atmost.pop(node, None)
        g.univ.pop(node, None)
        g.q_atmost.pop(node, None)
        g.q_atleast.pop(node, None)
        g.q_disj.pop(node, None)
        g.atleast_parked.pop(node, None)

    # -- rule bodies ------------------------------------------------------------

    @staticmethod
    def _in_filler(g: _Graph, node: int, filler: AlcqiConcept) -> bool:
        return isinstance(filler, ATop) or g.has(node, filler)

    def _filler_undecided(self, g: _Graph, node: int, filler: AlcqiConcept) -> bool:
        if isinstance(filler, ATop):
            return False
        return not g.has(node, filler) and not g.has(node, _negate(filler))

    @staticmethod
    def _has_distinct(g: _Graph, members: list[int], q: int) -> bool:
        if len(members) < q:
            return False
        if q == 1:
            return True
        for combo in itertools.combinations(members, q):
            if all(g.distinct(a, b) for a, b in itertools.combinations(combo, 2)):
                return True
        return False

    def atmost_state(self, g: _Graph, node: int):
        """First actionable at-most constraint at `node`:
        ('clash'|'choose'|'merge', constraint, data) or None."""
        for c in g.atmost[node].values():
            rk = _rkey(c.role)
            nbrs = g.neighbours(node, rk)
            if not nbrs:
                continue
            undecided = [y for y in nbrs if self._filler_undecided(g, y, c.filler)]
            members = [y for y in nbrs if self._in_filler(g, y, c.filler)]
            if len(members) > c.q:
                if self._has_distinct(g, members, c.q + 1):
                    return (
                        "clash",
                        c,
                        f"node {node}: more than {c.q} distinct {c.role} "
                        f"successors in {_ckey(c.filler)}",
                    )
                pairs = [
                    (x, y)
                    for x, y in itertools.combinations(members, 2)
                    if not g.distinct(x, y)
                ]
                return ("merge", c, pairs)
            if undecided:
                return ("choose", c, undecided[0])
        return None

    def atleast_needed(self, g: _Graph, node: int) -> Optional[AtLeast]:
        for c in g.atleast[node].values():
            members = [
                y
                for y in g.neighbours(node, _rkey(c.role))
                if self._in_filler(g, y, c.filler)
            ]
            if not self._has_distinct(g, members, c.q):
                return c
        return None

    def _functional_extend(self, g: _Graph, node: int, c: AtLeast) -> bool:
        """Existential over a role that is functional at this node: extend the
        unique existing successor instead of creating and merging a witness."""
        if c.q != 1 or isinstance(c.filler, ATop):
            return False
        rk = _rkey(c.role)
        functional = any(
            m.q == 1 and isinstance(m.filler, ATop) and _rkey(m.role) == rk
            for m in g.atmost[node].values()
        )
        if not functional:
            return False
        nbrs = g.neighbours(node, rk)
        if len(nbrs) != 1:
            return False
        self.add_concept(g, nbrs[0], c.filler)
        return True

    def apply_atleast(self, g: _Graph, node: int, c: AtLeast) -> None:
        if self._functional_extend(g, node, c):
            return
        fresh: list[int] = []
        for _ in range(c.q):
            y = g.new_node(is_root=False, parent=node)
            self.nodes_created += 1
            self.add_edge(g, node, y, c.role)
            if g.clash is not None:
                return
            self.init_node(g, y)
            if g.clash is not None:
                return
            if not isinstance(c.filler, ATop):
                self.add_concept(g, y, c.filler)
                if g.clash is not None:
                    return
            fresh.append(y)
        for a, b in itertools.combinations(fresh, 2):
            g.neq.add(frozenset((a, b)))

    def open_disjunction(self, g: _Graph, node: int) -> Optional[AOr]:
        for c in g.disj[node].values():
            if not any(self._in_filler(g, node, a) for a in c.args):
                return c
        return None

    # -- search -----------------------------------------------------------------

    def over_budget(self) -> bool:
        return (
            self.nodes_created > self.budget.max_nodes
            or time.monotonic() - self.start > self.budget.max_seconds
        )

    def stats(self) -> TableauStats:
        return TableauStats(
            nodes_created=self.nodes_created,
            branches=self.branches,
            elapsed=time.monotonic() - self.start,
        )

    def setup(self) -> tuple[_Graph, dict[str, int]]:
        g = _Graph()
        rep: dict[str, str] = {}

        def find(x: str) -> str:
            while rep.get(x, x) != x:
                x = rep[x]
            return x

        for a, b in self.kb.equalities:
            ra, rb = find(a), find(b)
            if ra != rb:
                rep[max(ra, rb)] = min(ra, rb)

        node_of: dict[str, int] = {}
        for ind in sorted(self.kb.individuals):
            r = find(ind)
            if r not in node_of:
                node_of[r] = g.new_node(is_root=True)
                self.nodes_created += 1
                self.init_node(g, node_of[r])
            node_of[ind] = node_of[r]
            g.names[node_of[r]].add(ind)
        if not node_of:
            anon = g.new_node(is_root=True)
            self.nodes_created += 1
            self.init_node(g, anon)

        for concept, ind in self.kb.concept_assertions:
            if g.clash is None:
                self.add_concept(g, node_of[ind], nnf(concept))
        for role, a, b in self.kb.role_assertions:
            if g.clash is None:
                self.add_edge(g, node_of[a], node_of[b], role)
        for a, b in self.kb.inequalities:
            if node_of[a] == node_of[b]:
                g.clash = f"{a} and {b} asserted both equal and different"
            else:
                g.neq.add(frozenset((node_of[a], node_of[b])))
        return g, node_of

    def expand(self, g: _Graph) -> "tuple[bool, str | _Graph]":
        """Iterative depth-first search with chronological backtracking.

        The stack holds (pristine graph, remaining alternatives); each
        alternative is applied to a fresh clone when its turn comes.
        """
        stack: list[tuple[_Graph, list[tuple]]] = []
        last_clash = "unsatisfiable"

        def backtrack() -> Optional[_Graph]:
            while stack and not stack[-1][1]:
                stack.pop()
            if not stack:
                return None
            base, ops = stack[-1]
            branch = base.clone()
            self.branches += 1
            self._apply_op(branch, ops.pop(0))
            return branch

        while True:
            if self.over_budget():
                raise _OutOfBudget
            if g.clash is not None:
                last_clash = g.clash
                nxt = backtrack()
                if nxt is None:
                    return False, last_clash
                g = nxt
                continue

            action = self._next_action(g)
            if action is None:
                return True, g
            kind = action[0]
            if kind == "clash":
                last_clash = action[1]
                nxt = backtrack()
                if nxt is None:
                    return False, last_clash
                g = nxt
                continue
            if kind == "atleast":
                _, node, c = action
                self.apply_atleast(g, node, c)
                continue

            ops = self._alternatives(g, action)
            if not ops:
                last_clash = f"node {action[1]}: no open branch"
                nxt = backtrack()
                if nxt is None:
                    return False, last_clash
                g = nxt
                continue
            if len(ops) == 1:
                self._apply_op(g, ops[0])
                continue
            stack.append((g, ops[1:]))
            branch = g.clone()
            self.branches += 1
            self._apply_op(branch, ops[0])
            g = branch

    def _alternatives(self, g: _Graph, action) -> list[tuple]:
        kind = action[0]
        if kind == "merge":
            _, node, c, pairs = action
            return [("merge", a, b) for a, b in pairs]
        if kind == "choose":
            _, node, c, y = action
            return [("add", y, _negate(c.filler)), ("add", y, c.filler)]
        _, node, c = action  # disjunction
        return [
            ("add", node, a)
            for a in sorted(c.args, key=self._branch_key)
            if not g.has(node, _negate(a))  # complement present: instant clash
        ]

    def _apply_op(self, g: _Graph, op: tuple) -> None:
        if op[0] == "merge":
            self.merge(g, op[1], op[2])
        else:
            self.add_concept(g, op[1], op[2])

    def _next_action(self, g: _Graph):
        """Pop work queues; fall back to a full sweep before completion."""
        while True:
            while g.q_atmost:
                node = next(iter(g.q_atmost))
                del g.q_atmost[node]
                if node not in g.labels or node not in g.adj:
                    continue
                state = self.atmost_state(g, node)
                if state is None:
                    continue
                what, c, data = state
                if what == "clash":
                    return ("clash", data)
                if what == "choose":
                    return ("choose", node, c, data)
                return ("merge", node, c, data)

            if g.q_disj and (self.disjunction_last is False):
                picked = self._pop_disjunction(g)
                if picked is not None:
                    return picked
                continue

            picked = self._pop_atleast(g)
            if picked is not None:
                return picked

            if g.q_disj:
                picked = self._pop_disjunction(g)
                if picked is not None:
                    return picked
                continue

            # Queues are empty: one authoritative sweep.  Parked generators
            # are re-examined if the graph changed since they were parked.
            refreshed = False
            for node, version in list(g.atleast_parked.items()):
                if version != g.version:
                    del g.atleast_parked[node]
                    g.q_atleast[node] = None
                    refreshed = True
            for node in g.alive:
                if self.atmost_state(g, node) is not None:
                    g.q_atmost[node] = None
                    refreshed = True
                if self.open_disjunction(g, node) is not None:
                    g.q_disj[node] = None
                    refreshed = True
                if node not in g.atleast_parked and self.atleast_needed(g, node):
                    g.q_atleast[node] = None
                    refreshed = True
            if not refreshed:
                return None

    def _pop_atleast(self, g: _Graph):
        while g.q_atleast:
            node = next(reversed(g.q_atleast))
            del g.q_atleast[node]
            if node not in g.labels:
                continue
            c = self.atleast_needed(g, node)
            if c is None:
                continue
            if g.blocked(node):
                g.atleast_parked[node] = g.version
                continue
            return ("atleast", node, c)
        return None

    def _pop_disjunction(self, g: _Graph):
        while g.q_disj:
            node = next(iter(g.q_disj))
            del g.q_disj[node]
            if node not in g.labels:
                continue
            c = self.open_disjunction(g, node)
            if c is not None:
                return ("disjunction", node, c)
        return None

    @staticmethod
    def _branch_key(concept: AlcqiConcept) -> tuple[int, str]:
        # Prefer branches that do not force new successors.
        key = _ckey(concept)
        return (key.count("(some ") + key.count("(atleast "), key)





def _model_from_graph(g: _Graph, kb: AlcqiKb) -> AlcqiInterpretation:
    """Finite structure read off a complete clash-free graph.

    Blocked nodes are dropped; the edge into a directly blocked node is
    redirected to its blocker (whose label is identical by the blocking
    condition).  On block-free graphs this is exactly the graph itself.
    The result is a candidate only: callers validate it before use, since
    the redirected structure can violate inverse counting bounds that only
    an infinite unravelling satisfies.
    """
    blocked_map, blocker = g._blocking_map()

    def rep(n: int) -> Optional[int]:
        if not blocked_map.get(n, False):
            return n
        if n in blocker:
            return blocker[n]
        return None  # indirectly blocked: not part of the model

    ids = [n for n in g.alive if not blocked_map.get(n, False)]
    elem = {n: f"n{n}" for n in ids}
    concepts: dict[str, set[str]] = {}
    for n in ids:
        for c in g.labels[n].values():
            if isinstance(c, AName):
                concepts.setdefault(c.name, set()).add(elem[n])
    roles: dict[str, set[tuple[str, str]]] = {}
    for (a, b), keys in g.edges.items():
        ra, rb = rep(a) if a in g.labels else None, rep(b) if b in g.labels else None
        if ra is None or rb is None or ra not in elem or rb not in elem:
            continue
        for name, inverted in keys:
            if inverted:
                roles.setdefault(name, set()).add((elem[rb], elem[ra]))
            else:
                roles.setdefault(name, set()).add((elem[ra], elem[rb]))
    individuals: dict[str, str] = {}
    for n in ids:
        for name in g.names[n]:
            individuals[name] = elem[n]
    return AlcqiInterpretation(
        domain=tuple(elem[n] for n in sorted(ids)),
        concepts={k: frozenset(v) for k, v in concepts.items()},
        roles={k: frozenset(v) for k, v in roles.items()},
        individuals=individuals,
    )


def is_satisfiable(
    kb: AlcqiKb,
    budget: Budget = Budget(),
    disjunction_last: bool = False,
) -> "Sat | Unsat | ResourceExceeded":
    """Decide satisfiability; Sat carries a finite model when the final graph
    is block-free (callers fall back to the bounded search otherwise)."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    solver = _Solver(kb, budget, disjunction_last)
    graph, _ = solver.setup()
    try:
        ok, result = solver.expand(graph)
    except _OutOfBudget:
        return ResourceExceeded(solver.stats())
    if ok:
        from .modelcheck import check_alcqi_model

        model = _model_from_graph(result, kb)
        if check_alcqi_model(model, kb):
            model = None  # redirected structure did not validate
        return Sat(model, solver.stats())
    return Unsat(result, solver.stats())
