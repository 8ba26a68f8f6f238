import itertools

from dlrpm.parser import parse_kb_or_raise
from dlrpm.projection_graph import (
    build_signature,
    is_multitree,
    node_label,
    to_dot,
    validate_dlrpm,
)
from dlrpm.renaming import canonicalize

EX1 = """
relation R1(W1,W2,W3,W4).
relation R2(V1,V2,V3,V4,V5).
rename W1 W2 W3 <-> V3 V4 V5.
tbox proj[W1,W2] R1 [= proj <= 1 [W1,W2] R1.
tbox proj[V3,V4] R2 [= proj <= 1 [V3,V4] (proj[V3,V4,V5] R2).
tbox proj[W1,W2,W3] R1 [= proj[V3,V4,V5] R2.
"""


def ex1_graph():
    return build_signature(canonicalize(parse_kb_or_raise(EX1)))


def fs(*attrs):
    return frozenset(attrs)


class TestBuild:
    def test_example_graph_nodes_and_edges(self):
        g = ex1_graph()
        assert len(g.nodes) == 10
        expected_edges = {
            (fs("V3", "V4", "V5", "W4"), fs("V3", "V4", "V5")),
            (fs("V3", "V4", "V5", "W4"), fs("W4")),
            (fs("V1", "V2", "V3", "V4", "V5"), fs("V3", "V4", "V5")),
            (fs("V1", "V2", "V3", "V4", "V5"), fs("V1")),
            (fs("V1", "V2", "V3", "V4", "V5"), fs("V2")),
            (fs("V3", "V4", "V5"), fs("V3", "V4")),
            (fs("V3", "V4", "V5"), fs("V5")),
            (fs("V3", "V4"), fs("V3")),
            (fs("V3", "V4"), fs("V4")),
        }
        assert set(g.edges) == expected_edges

    def test_single_binary_relation(self):
        g = build_signature(parse_kb_or_raise("relation S(A,B)."))
        assert set(g.nodes) == {fs("A", "B"), fs("A"), fs("B")}
        assert set(g.edges) == {(fs("A", "B"), fs("A")), (fs("A", "B"), fs("B"))}

    def test_nested_projection_chain(self):
        kb = parse_kb_or_raise(
            "relation R(A,B,C,D).\n"
            "tbox proj [A,B] (proj [A,B,C] R) [= proj [A,B] (proj [A,B,C] R).\n"
        )
        g = build_signature(kb)
        assert g.children(fs("A", "B", "C", "D")) == (fs("A", "B", "C"), fs("D"))
        assert fs("A", "B") in g.children(fs("A", "B", "C"))

    def test_monotone_under_added_axioms(self):
        base = parse_kb_or_raise("relation R(A,B,C,D).")
        bigger = parse_kb_or_raise(
            "relation R(A,B,C,D). tbox proj [A,B] R [= proj [A,B] R."
        )
        assert set(build_signature(base).nodes) <= set(build_signature(bigger).nodes)


class TestMultitree:
    def test_example_is_multitree(self):
        ok, counter = is_multitree(ex1_graph())
        assert ok and counter is None

    def test_single_relation_degenerate(self):
        g = build_signature(parse_kb_or_raise("relation S(A,B)."))
        assert is_multitree(g)[0]

    def test_shared_attribute_projections_break_it(self):
        kb = parse_kb_or_raise(
            "relation R(A,B,C,D).\n"
            "tbox proj [A,B] R [= proj [A,B] R.\n"
            "tbox proj [B,C] R [= proj [B,C] R.\n"
            "tbox proj [A,B,C] R [= proj [A,B,C] R.\n"
        )
        ok, counter = is_multitree(build_signature(kb))
        assert not ok
        assert counter.dst == fs("B")
        assert counter.src in {fs("A", "B", "C"), fs("A", "B", "C", "D")}
        assert counter.first != counter.second
        # the two routes diverge through the overlapping projections
        assert {fs("A", "B"), fs("B", "C")} <= set(counter.first) | set(counter.second)

    def test_agrees_with_bruteforce_path_enumeration(self):
        from genkb import random_kb

        def count_paths_brute(g, src, dst):
            if src == dst:
                return 1
            return sum(count_paths_brute(g, c, dst) for c in g.children(src))

        for seed in range(30):
            g = build_signature(canonicalize(random_kb(seed)))
            ok, _ = is_multitree(g)
            brute = all(
                count_paths_brute(g, a, b) <= 1
                for a, b in itertools.permutations(g.nodes, 2)
            )
            assert ok == brute


class TestPath:
    def test_full_descent_path(self):
        g = ex1_graph()
        path = g.path(fs("V1", "V2", "V3", "V4", "V5"), fs("V3"))
        assert path == (fs("V3", "V4", "V5"), fs("V3", "V4"), fs("V3"))

    def test_subset_gives_empty(self):
        g = ex1_graph()
        assert g.path(fs("V3"), fs("V3")) == ()
        assert g.path(fs("V3", "V4"), fs("V3", "V4", "V5")) == ()

    def test_unconnected_gives_empty(self):
        g = ex1_graph()
        assert g.path(fs("V3"), fs("W4")) == ()

    def test_children(self):
        g = ex1_graph()
        assert set(g.children(fs("V3", "V4"))) == {fs("V3"), fs("V4")}
        assert g.children(fs("V5")) == ()
        assert set(g.children(fs("V3", "V4", "V5", "W4"))) == {
            fs("V3", "V4", "V5"),
            fs("W4"),
        }

    def test_path_is_stable(self):
        g = ex1_graph()
        src, dst = fs("V1", "V2", "V3", "V4", "V5"), fs("V4")
        assert g.path(src, dst) == g.path(src, dst)


class TestValidate:
    def test_example_is_in_fragment(self):
        kb = canonicalize(parse_kb_or_raise(EX1))
        assert validate_dlrpm(kb).ok

    def test_plain_kb_with_large_cardinalities_is_in_fragment(self):
        kb = parse_kb_or_raise(
            "relation R(A,B).\nconcept C.\n"
            "tbox exists >= 5 [A] R [= C.\n"
            "tbox C [= exists <= 7 [B] R.\n"
        )
        assert validate_dlrpm(kb).ok

    def test_long_path_cardinality_violates_condition_two(self):
        kb = parse_kb_or_raise(
            "relation R(A,B,C,D).\nconcept C0.\n"
            "tbox proj [A,B] (proj [A,B,C] R) [= proj [A,B] (proj [A,B,C] R).\n"
            "tbox exists >= 2 [A] R [= C0.\n"
        )
        report = validate_dlrpm(kb)
        assert not report.ok
        assert report.multitree_ok
        assert report.path_violations
        assert report.path_violations[0].path_length == 3

    def test_desugared_at_most_is_checked(self):
        kb = parse_kb_or_raise(
            "relation R(A,B,C,D).\nconcept C0.\n"
            "tbox proj [A,B] (proj [A,B,C] R) [= proj [A,B] (proj [A,B,C] R).\n"
            "tbox C0 [= exists <= 1 [A] R.\n"
        )
        report = validate_dlrpm(kb)
        assert not report.ok and report.path_violations

    def test_equijoin_fixture_violates_multitree(self):
        from pathlib import Path

        text = (Path(__file__).parent / "fixtures" / "equijoin.dlrp").read_text()
        kb = canonicalize(parse_kb_or_raise(text))
        report = validate_dlrpm(kb)
        assert not report.multitree_ok
        assert "two paths" in str(report.counterexample)


def test_dot_output_is_deterministic_and_complete():
    g = ex1_graph()
    dot = to_dot(g)
    assert dot == to_dot(g)
    assert dot.count("->") == 9
    for node in g.nodes:
        assert f'"{node_label(node)}"' in dot
