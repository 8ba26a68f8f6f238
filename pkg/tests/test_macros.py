import pytest

from dlrpm.macros import (
    MacroError,
    expand_equijoin,
    expand_external_uniqueness,
    expand_fd,
    expand_identification,
    expand_key,
)
from dlrpm.model import (
    ConceptAnd,
    ConceptInclusion,
    ConceptName,
    ExistsAtLeast,
    ExistsAtMost,
    ProjAtLeast,
    ProjAtMost,
    RelationDecl,
    RelationInclusion,
    RelationName,
    Select,
)
from dlrpm.parser import parse_kb_or_raise
from dlrpm.printer import serialize_kb
from dlrpm.projection_graph import build_signature, validate_dlrpm
from dlrpm.renaming import canonicalize

R1 = RelationDecl("R1", ("W1", "W2", "W3", "W4"))
R2 = RelationDecl("R2", ("V1", "V2", "V3", "V4", "V5"))
EMPLOYEE = RelationDecl("Employee", ("firstname", "lastname", "dept", "deptAddr"))
DECLS = {"R1": R1, "R2": R2, "Employee": EMPLOYEE}

EX1_AXIOM_KEY = RelationInclusion(
    ProjAtLeast(1, ("W1", "W2"), RelationName("R1")),
    ProjAtMost(1, ("W1", "W2"), RelationName("R1")),
)
EX1_AXIOM_FD = RelationInclusion(
    ProjAtLeast(1, ("V3", "V4"), RelationName("R2")),
    ProjAtMost(1, ("V3", "V4"), ProjAtLeast(1, ("V3", "V4", "V5"), RelationName("R2"))),
)


class TestFd:
    def test_reproduces_functional_dependency_axiom(self):
        out = expand_fd(RelationName("R2"), ["V3", "V4"], "V5", DECLS)
        assert out.tbox == [EX1_AXIOM_FD]
        assert not out.decls and not out.renaming

    def test_covering_dependency_drops_inner_projection(self):
        out = expand_fd(RelationName("R1"), ["W1", "W2", "W3"], "W4", DECLS)
        ax = out.tbox[0]
        assert ax == RelationInclusion(
            ProjAtLeast(1, ("W1", "W2", "W3"), RelationName("R1")),
            ProjAtMost(1, ("W1", "W2", "W3"), RelationName("R1")),
        )

    def test_single_determinant_uses_attribute_cardinality_form(self):
        out = expand_fd(RelationName("Employee"), ["dept"], "deptAddr", DECLS)
        ax = out.tbox[0]
        assert ax == ConceptInclusion(
            ExistsAtLeast(1, "dept", RelationName("Employee")),
            ExistsAtMost(
                1,
                "dept",
                ProjAtLeast(1, ("dept", "deptAddr"), RelationName("Employee")),
            ),
        )

    def test_unknown_attribute_rejected(self):
        with pytest.raises(MacroError):
            expand_fd(RelationName("R1"), ["W1", "Z"], "W4", DECLS)

    def test_dependent_on_both_sides_rejected(self):
        with pytest.raises(MacroError):
            expand_fd(RelationName("R1"), ["W1"], "W1", DECLS)


class TestKey:
    def test_reproduces_key_axiom(self):
        out = expand_key(RelationName("R1"), ["W1", "W2"], DECLS)
        assert out.tbox == [EX1_AXIOM_KEY]

    def test_multi_attribute_employee_key(self):
        out = expand_key(RelationName("Employee"), ["firstname", "lastname"], DECLS)
        assert out.tbox == [
            RelationInclusion(
                ProjAtLeast(1, ("firstname", "lastname"), RelationName("Employee")),
                ProjAtMost(1, ("firstname", "lastname"), RelationName("Employee")),
            )
        ]

    def test_key_covering_signature_rejected(self):
        binary = {"S": RelationDecl("S", ("A", "B"))}
        with pytest.raises(MacroError):
            expand_key(RelationName("S"), ["A", "B"], binary)

    def test_single_attribute_key_rewritten_with_warning(self):
        out = expand_key(RelationName("R1"), ["W1"], DECLS)
        assert out.warnings
        assert out.tbox == [
            ConceptInclusion(
                ExistsAtLeast(1, "W1", RelationName("R1")),
                ExistsAtMost(1, "W1", RelationName("R1")),
            )
        ]


class TestEquijoin:
    def setup_method(self):
        self.decls = {
            "R1": RelationDecl("R1", ("U", "U1")),
            "R2": RelationDecl("R2", ("V", "V1")),
        }

    def test_expansion_shape(self):
        out = expand_equijoin(
            "R", RelationName("R1"), "U", RelationName("R2"), "V", self.decls
        )
        assert len(out.tbox) == 4  # two equivalences as four inclusions
        assert out.renaming == [("U", "V")]
        assert out.decls[0].name == "R"
        assert set(out.decls[0].signature) == {"U", "U1", "V1"}
        joint = ConceptAnd(
            ExistsAtLeast(1, "U", RelationName("R1")),
            ExistsAtLeast(1, "V", RelationName("R2")),
        )
        assert out.tbox[0] == RelationInclusion(
            ProjAtLeast(1, ("U", "U1"), RelationName("R")),
            Select("U", joint, RelationName("R1")),
        )
        assert out.tbox[1] == RelationInclusion(out.tbox[0].rhs, out.tbox[0].lhs)

    def test_join_arity_is_union_minus_joined(self):
        out = expand_equijoin(
            "R", RelationName("R1"), "U", RelationName("R2"), "V", self.decls
        )
        assert out.decls[0].arity == 3

    def test_overlapping_signatures_rejected(self):
        decls = {
            "R1": RelationDecl("R1", ("U", "X")),
            "R2": RelationDecl("R2", ("V", "X")),
        }
        with pytest.raises(MacroError):
            expand_equijoin("R", RelationName("R1"), "U", RelationName("R2"), "V", decls)

    def test_expansion_leaves_the_fragment(self):
        kb = parse_kb_or_raise(
            "relation R1(U,U1).\nrelation R2(V,V1).\nequijoin R = R1[U = V]R2.\n"
        )
        report = validate_dlrpm(canonicalize(kb))
        assert not report.multitree_ok


class TestExternalUniquenessAndIdentification:
    def test_two_relation_external_uniqueness(self):
        decls = {
            "R1": RelationDecl("R1", ("U1", "A")),
            "R2": RelationDecl("R2", ("U2", "B")),
        }
        out = expand_external_uniqueness(
            "R", [("U1", RelationName("R1")), ("U2", RelationName("R2"))], decls
        )
        assert [d.name for d in out.decls] == ["R"]
        assert out.renaming == [("U1", "U2")]
        assert len(out.tbox) == 5  # four join inclusions plus the dependency
        fd = out.tbox[-1]
        assert isinstance(fd, RelationInclusion)
        assert fd.lhs == ProjAtLeast(1, ("A", "B"), RelationName("R"))

    def test_expansion_violates_multitree(self):
        kb = parse_kb_or_raise(
            "relation R1(U1,A).\nrelation R2(U2,B).\nextuniq R = [U1] R1, [U2] R2.\n"
        )
        assert not validate_dlrpm(canonicalize(kb)).multitree_ok

    def test_single_operand_degenerates_to_dependency(self):
        decls = {"R1": RelationDecl("R1", ("U", "A", "B"))}
        out = expand_external_uniqueness("R", [("U", RelationName("R1"))], decls)
        assert not out.decls and not out.renaming
        assert out.tbox == [
            RelationInclusion(
                ProjAtLeast(1, ("A", "B"), RelationName("R1")),
                ProjAtMost(1, ("A", "B"), RelationName("R1")),
            )
        ]

    def test_identification_wraps_operands_in_selections(self):
        decls = {
            "R1": RelationDecl("R1", ("U1", "A", "S1")),
        }
        out = expand_identification(
            "R", ConceptName("C"), [("U1", "S1", RelationName("R1"))], decls
        )
        (axiom,) = out.tbox
        sel = Select("S1", ConceptName("C"), RelationName("R1"))
        assert axiom == RelationInclusion(
            ProjAtLeast(1, ("A", "S1"), sel), ProjAtMost(1, ("A", "S1"), sel)
        )


class TestStatementForms:
    def test_key_statement_matches_direct_expansion(self):
        kb = parse_kb_or_raise(
            "relation R1(W1,W2,W3,W4).\nkey R1(W1,W2).\n"
        )
        assert kb.tbox == (EX1_AXIOM_KEY,)

    def test_fd_statement_matches_direct_expansion(self):
        kb = parse_kb_or_raise(
            "relation R2(V1,V2,V3,V4,V5).\nfd R2: V3,V4 -> V5.\n"
        )
        assert kb.tbox == (EX1_AXIOM_FD,)

    def test_expansion_survives_serialization(self):
        kb = parse_kb_or_raise(
            "relation R1(U,U1).\nrelation R2(V,V1).\nequijoin R = R1[U = V]R2.\n"
        )
        assert parse_kb_or_raise(serialize_kb(kb)) == kb

    def test_ident_statement(self):
        kb = parse_kb_or_raise(
            "relation R1(U1,A,S1).\nconcept C.\nident R for C = [U1/S1] R1.\n"
        )
        assert len(kb.tbox) == 1


def test_dependency_forms_agree_with_set_semantics_on_small_models():
    """Both emitted dependency shapes (attribute-cardinality form for a single
    determinant, projection form otherwise) hold on exactly the
    interpretations where the dependency holds set-theoretically."""
    import itertools

    from dlrpm.modelcheck import Interpretation, check_model, mk_tuple
    from dlrpm.model import KnowledgeBase

    decl = RelationDecl("R", ("A", "B", "C"))
    exists_form = expand_fd(RelationName("R"), ["A"], "B", {"R": decl}).tbox[0]
    proj_form = expand_fd(RelationName("R"), ["A", "B"], "C", {"R": decl}).tbox[0]
    kb_exists = KnowledgeBase(relations=(decl,), tbox=(exists_form,))
    kb_proj = KnowledgeBase(relations=(decl,), tbox=(proj_form,))

    domain = ("d1", "d2")
    space = [
        mk_tuple(zip(("A", "B", "C"), values))
        for values in itertools.product(domain, repeat=3)
    ]
    for bits in range(2 ** len(space)):
        chosen = frozenset(space[i] for i in range(len(space)) if bits >> i & 1)
        interp = Interpretation(domain=domain, relations={"R": chosen})

        def determined(keys, dep):
            groups: dict = {}
            for t in chosen:
                d = dict(t)
                groups.setdefault(tuple(d[k] for k in keys), set()).add(d[dep])
            return all(len(v) <= 1 for v in groups.values())

        assert (not check_model(interp, kb_exists)) == determined(("A",), "B")
        assert (not check_model(interp, kb_proj)) == determined(("A", "B"), "C")
