import pytest

from dlrpm.model import KnowledgeBase, ModelError, RelationDecl
from dlrpm.parser import parse_kb_or_raise
from dlrpm.printer import serialize_kb
from dlrpm.renaming import (
    canonicalize,
    check_arity_preserving,
    close_renaming,
    representative_map,
)

EX1 = """
relation R1(W1,W2,W3,W4).
relation R2(V1,V2,V3,V4,V5).
rename W1 W2 W3 <-> V3 V4 V5.
tbox proj[W1,W2] R1 [= proj <= 1 [W1,W2] R1.
tbox proj[V3,V4] R2 [= proj <= 1 [V3,V4] (proj[V3,V4,V5] R2).
tbox proj[W1,W2,W3] R1 [= proj[V3,V4,V5] R2.
"""


class TestClosure:
    def test_grouped_pairs_close_to_expected_classes(self):
        universe = {"W1", "W2", "W3", "W4", "V1", "V2", "V3", "V4", "V5"}
        pairs = [("W1", "V3"), ("W2", "V4"), ("W3", "V5")]
        classes = close_renaming(pairs, universe)
        as_sets = {frozenset(c) for c in classes}
        assert frozenset({"W1", "V3"}) in as_sets
        assert frozenset({"W2", "V4"}) in as_sets
        assert frozenset({"W3", "V5"}) in as_sets
        singles = {frozenset({a}) for a in ("W4", "V1", "V2")}
        assert singles <= as_sets
        assert len(classes) == 6

    def test_empty_pairs_give_singletons(self):
        classes = close_renaming([], {"A", "B"})
        assert {frozenset(c) for c in classes} == {frozenset({"A"}), frozenset({"B"})}

    def test_transitive_closure(self):
        classes = close_renaming([("A", "B"), ("B", "C")], {"A", "B", "C"})
        assert {frozenset(c) for c in classes} == {frozenset({"A", "B", "C"})}


class TestArityPreservation:
    def test_example_schema_is_preserving(self):
        kb = parse_kb_or_raise(EX1)
        classes = close_renaming(kb.renaming, kb.attributes)
        assert check_arity_preserving(classes, kb.relations) == []

    def test_same_signature_merge_is_violation(self):
        decl = RelationDecl("R1", ("W1", "W2"))
        classes = close_renaming([("W1", "W2")], {"W1", "W2"})
        violations = check_arity_preserving(classes, [decl])
        assert len(violations) == 1
        assert violations[0].relation == "R1"
        assert violations[0].attrs == {"W1", "W2"}

    def test_transitively_induced_violation(self):
        decl = RelationDecl("S", ("A", "C"))
        classes = close_renaming([("A", "B"), ("B", "C")], {"A", "B", "C"})
        assert check_arity_preserving(classes, [decl])


class TestCanonicalize:
    def test_inclusion_sides_share_attributes_after_rewrite(self):
        from dlrpm.model import compute_tau

        kb = canonicalize(parse_kb_or_raise(EX1))
        third = kb.tbox[2]
        lt = compute_tau(third.lhs, kb.relation_map)
        rt = compute_tau(third.rhs, kb.relation_map)
        assert lt == rt == {"V3", "V4", "V5"}

    def test_empty_schema_is_identity(self):
        kb = parse_kb_or_raise("relation R(A,B). concept C. tbox C [= exists [A] R.")
        assert canonicalize(kb) == kb

    def test_idempotent(self):
        kb = parse_kb_or_raise(EX1)
        once = canonicalize(kb)
        assert canonicalize(once) == once

    def test_representative_is_least_name(self):
        rep = representative_map(close_renaming([("W1", "V3")], {"W1", "V3"}))
        assert rep["W1"] == "V3" and rep["V3"] == "V3"

    def test_violating_schema_raises(self):
        kb = parse_kb_or_raise("relation R(A,B).").replace(renaming=(("A", "B"),))
        with pytest.raises(ModelError):
            canonicalize(kb)

    def test_no_noncanonical_attribute_survives(self):
        kb = canonicalize(parse_kb_or_raise(EX1))
        assert kb.renaming == ()
        assert {"W1", "W2", "W3"} & kb.attributes == set()

    def test_output_serializes_deterministically(self):
        first = serialize_kb(canonicalize(parse_kb_or_raise(EX1)))
        second = serialize_kb(canonicalize(parse_kb_or_raise(EX1)))
        assert first == second


def test_canonicalization_preserves_model_satisfaction():
    """Relabelling tuple attributes by representatives preserves satisfaction."""
    from dlrpm.modelcheck import Interpretation, check_model, mk_tuple

    raw = parse_kb_or_raise(
        "relation R(A,B).\nrelation S(Z,Y).\nrename A B <-> Z Y.\ntbox R [= S.\n"
    )
    canonical = canonicalize(raw)
    t = mk_tuple([("A", "d1"), ("B", "d2")])
    model = Interpretation(
        domain=("d1", "d2"),
        relations={"R": frozenset({t}), "S": frozenset({t})},
    )
    assert check_model(model, canonical) == []
    bad = Interpretation(
        domain=("d1", "d2"),
        relations={"R": frozenset({t}), "S": frozenset()},
    )
    assert check_model(bad, canonical) != []
