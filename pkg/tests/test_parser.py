from pathlib import Path

import pytest

from dlrpm.model import (
    ConceptInclusion,
    ConceptName,
    ExistsAtLeast,
    KnowledgeBase,
    ProjAtLeast,
    ProjAtMost,
    RelationInclusion,
    RelationName,
    Select,
)
from dlrpm.parser import parse_kb, parse_kb_or_raise
from dlrpm.printer import serialize_kb

FIXTURES = Path(__file__).parent / "fixtures"

ALL_CONSTRUCTS = """
relation R(A,B,C).
relation S(A,B,C).
concept CN.
concept DN.
individual o1.
individual o2.
rename A <-> Z.
tbox CN [= not DN.
tbox CN and DN [= CN or DN.
tbox top [= not bot.
tbox exists [A] R [= exists >= 2 [B] R.
tbox exists <= 3 [C] R [= CN.
tbox gobj R [= gobj (R and S).
tbox lobj R [= lobj S.
tbox sigma [A: CN and DN] R [= R.
tbox R minus S [= R.
tbox proj [A,B] R [= proj >= 2 [A,B] R.
tbox proj <= 1 [A,B] R [= proj [A,B] R.
abox CN(o1).
abox R(A: o1, B: o2, C: o1).
abox o1 = o2.
abox o1 != o2.
"""


def test_relation_declaration_arity():
    kb = parse_kb_or_raise("relation Employee(firstname,lastname,dept,deptAddr).")
    assert kb.relations[0].arity == 4
    assert kb.relations[0].signature == ("firstname", "lastname", "dept", "deptAddr")


def test_empty_document_gives_empty_kb():
    kb, diags = parse_kb("")
    assert kb == KnowledgeBase()
    assert diags == []


def test_positional_attributes_via_renaming():
    kb = parse_kb_or_raise(
        "relation DrivesCar(driver, vehicle).\n"
        "rename driver vehicle <-> 1 2.\n"
        "concept Pilot. concept RacingCar.\n"
        "tbox Pilot [= exists[1] sigma[2: RacingCar] DrivesCar.\n"
    )
    axiom = kb.tbox[0]
    assert axiom == ConceptInclusion(
        ConceptName("Pilot"),
        ExistsAtLeast(1, "1", Select("2", ConceptName("RacingCar"), RelationName("DrivesCar"))),
    )
    assert set(kb.renaming) == {("driver", "1"), ("vehicle", "2")}


def test_error_yields_no_kb():
    kb, diags = parse_kb("relation R(A,B).\ntbox R [= .\nrelation S(C,D).")
    assert kb is None
    assert any(d.severity == "error" for d in diags)
    assert all(d.line >= 1 and d.column >= 1 for d in diags)


def test_error_positions_point_at_offender():
    _, diags = parse_kb("relation R(A).")
    err = next(d for d in diags if d.severity == "error")
    assert err.line == 1


def test_duplicate_relation_rejected():
    kb, diags = parse_kb("relation R(A,B). relation R(C,D).")
    assert kb is None
    assert any("duplicate" in d.message for d in diags)


def test_projection_duplicate_attribute_rejected():
    kb, diags = parse_kb("relation R(A,B,C). tbox proj[A,A] R [= R.")
    assert kb is None


def test_mismatched_tuple_is_warning_not_error():
    kb, diags = parse_kb("relation R(A,B).\nabox R(A: x).")
    assert kb is not None
    assert any(d.severity == "warning" and "unsatisfiable" in d.message for d in diags)


def test_union_compat_is_warning_only():
    kb, diags = parse_kb("relation R(A,B). relation S(C,D,E). tbox R [= R or S.")
    assert kb is not None
    warned = [d for d in diags if d.severity == "warning"]
    assert any("union compatible" in d.message for d in warned)


def test_selection_attribute_misuse_is_error():
    kb, diags = parse_kb("relation R(A,B). concept C. tbox exists [A] sigma [Z: C] R [= C.")
    assert kb is None
    assert any("selection attribute" in d.message for d in diags)


def test_precedence_not_and_or():
    kb = parse_kb_or_raise("concept A. concept B. concept C. tbox not A and B or C [= A.")
    from dlrpm.model import ConceptAnd, ConceptNot, ConceptOr

    lhs = kb.tbox[0].lhs
    assert lhs == ConceptOr(ConceptAnd(ConceptNot(ConceptName("A")), ConceptName("B")), ConceptName("C"))


def test_minus_is_left_associative():
    kb = parse_kb_or_raise("relation R(A,B). relation S(A,B). tbox R minus S minus R [= R.")
    from dlrpm.model import RelationDiff

    lhs = kb.tbox[0].lhs
    assert lhs == RelationDiff(RelationDiff(RelationName("R"), RelationName("S")), RelationName("R"))


def test_quantifier_argument_binds_tight():
    kb = parse_kb_or_raise(
        "relation R(A,B). concept C. tbox exists [A] R and C [= C."
    )
    from dlrpm.model import ConceptAnd

    lhs = kb.tbox[0].lhs
    assert isinstance(lhs, ConceptAnd)
    assert isinstance(lhs.left, ExistsAtLeast)


def test_comments_and_whitespace_ignored():
    kb = parse_kb_or_raise("# heading\nrelation R(A,B).  # trailing\n\n\nconcept C.")
    assert len(kb.relations) == 1


@pytest.mark.parametrize(
    "name",
    ["example1.dlrp", "pilot.dlrp", "lobj.dlrp", "mismatch.dlrp", "equijoin.dlrp", "extuniq.dlrp"],
)
def test_fixture_round_trip(name):
    kb = parse_kb_or_raise((FIXTURES / name).read_text())
    assert parse_kb_or_raise(serialize_kb(kb)) == kb


def test_constructor_coverage_round_trip():
    kb = parse_kb_or_raise(ALL_CONSTRUCTS)
    text = serialize_kb(kb)
    assert parse_kb_or_raise(text) == kb
    # serialization is a fixpoint
    assert serialize_kb(parse_kb_or_raise(text)) == text


def test_random_kbs_round_trip():
    from genkb import random_kb

    for seed in range(25):
        kb = random_kb(seed)
        assert parse_kb_or_raise(serialize_kb(kb)) == kb


def test_sugar_forms_parse_to_bounded_constructors():
    kb = parse_kb_or_raise("relation R(A,B,C). tbox proj [A,B] R [= proj <= 1 [A,B] R.")
    ax = kb.tbox[0]
    assert isinstance(ax, RelationInclusion)
    assert ax.lhs == ProjAtLeast(1, ("A", "B"), RelationName("R"))
    assert ax.rhs == ProjAtMost(1, ("A", "B"), RelationName("R"))
