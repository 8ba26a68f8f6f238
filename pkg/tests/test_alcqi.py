import itertools
import random

from hypothesis import given, strategies as st

from dlrpm.alcqi import (
    AAnd,
    ABottom,
    AName,
    ANot,
    AOr,
    ATop,
    AtLeast,
    AtMost,
    AlcqiKb,
    Role,
    every,
    format_alcqi_concept,
    internalize,
    make_and,
    make_or,
    nnf,
    serialize_alcqi,
    some,
)
from dlrpm.modelcheck import AlcqiInterpretation, eval_alcqi_concept

r = Role("r")
s = Role("s")


class TestRoles:
    def test_inverse_is_involutive(self):
        assert r.inverse.inverse == r
        assert r.inverse.name == "r" and r.inverse.inverted


class TestNnf:
    def test_de_morgan(self):
        out = nnf(ANot(AAnd((AName("A"), AName("B")))))
        assert out == AOr((ANot(AName("A")), ANot(AName("B"))))

    def test_at_least_duality(self):
        out = nnf(ANot(AtLeast(2, r, AName("A"))))
        assert out == AtMost(1, r, AName("A"))

    def test_at_most_duality(self):
        out = nnf(ANot(AtMost(2, r, AName("A"))))
        assert out == AtLeast(3, r, AName("A"))

    def test_negated_universal(self):
        out = nnf(ANot(every(r, AName("A"))))
        assert out == AtLeast(1, r, ANot(AName("A")))


def concepts():
    base = st.one_of(
        st.sampled_from(["A", "B"]).map(AName),
        st.just(ATop()),
        st.just(ABottom()),
    )

    def extend(children):
        roles = st.sampled_from([r, s, r.inverse])
        return st.one_of(
            st.builds(ANot, children),
            st.builds(lambda a, b: AAnd((a, b)), children, children),
            st.builds(lambda a, b: AOr((a, b)), children, children),
            st.builds(AtLeast, st.integers(0, 2), roles, children),
            st.builds(AtMost, st.integers(0, 2), roles, children),
        )

    return st.recursive(base, extend, max_leaves=6)


@given(concepts())
def test_nnf_idempotent(c):
    once = nnf(c)
    assert nnf(once) == once


@given(concepts())
def test_nnf_negation_only_on_names(c):
    def check(x):
        match x:
            case ANot(arg):
                assert isinstance(arg, AName)
            case AAnd(args) | AOr(args):
                for a in args:
                    check(a)
            case AtLeast(_, _, f) | AtMost(_, _, f):
                check(f)

    check(nnf(c))


def random_interpretation(rng: random.Random) -> AlcqiInterpretation:
    domain = tuple(f"d{i}" for i in range(rng.randint(1, 4)))
    concepts_ext = {
        n: frozenset(d for d in domain if rng.random() < 0.5) for n in ("A", "B")
    }
    roles_ext = {
        n: frozenset(
            p for p in itertools.product(domain, domain) if rng.random() < 0.4
        )
        for n in ("r", "s")
    }
    return AlcqiInterpretation(domain=domain, concepts=concepts_ext, roles=roles_ext)


def test_nnf_preserves_evaluation_on_small_structures():
    rng = random.Random(7)
    pool = [
        ANot(AAnd((AName("A"), AName("B")))),
        ANot(AtLeast(2, r, AName("A"))),
        ANot(AtMost(0, r.inverse, ANot(AName("B")))),
        ANot(AOr((some(r, AName("A")), every(s, AName("B"))))),
        AtMost(1, r, ANot(AOr((AName("A"), AName("B"))))),
        ANot(ANot(some(r, ATop()))),
    ]
    for _ in range(200):
        interp = random_interpretation(rng)
        for c in pool:
            assert eval_alcqi_concept(interp, c) == eval_alcqi_concept(interp, nnf(c))


class TestConstructors:
    def test_make_and_drops_units_and_duplicates(self):
        a = AName("A")
        assert make_and([a, ATop(), a]) == a
        assert make_and([a, ABottom()]) == ABottom()
        assert make_and([]) == ATop()

    def test_make_or_detects_complement(self):
        a = AName("A")
        assert make_or([a, ANot(a)]) == ATop()

    def test_flattening(self):
        a, b, c = AName("A"), AName("B"), AName("C")
        assert make_and([AAnd((a, b)), c]) == AAnd((a, b, c))


class TestInternalize:
    def test_empty_tbox_gives_top(self):
        meta, rest = internalize(AlcqiKb())
        assert meta == ATop()
        assert rest.gcis == ()

    def test_single_inclusion(self):
        kb = AlcqiKb(
            concept_names=frozenset({"A", "B"}),
            gcis=((AName("A"), AName("B")),),
        )
        meta, _ = internalize(kb)
        assert meta == AOr((ANot(AName("A")), AName("B")))

    def test_conjunct_per_axiom(self):
        kb = AlcqiKb(
            concept_names=frozenset({"A", "B", "C"}),
            gcis=(
                (AName("A"), AName("B")),
                (AName("B"), AName("C")),
                (AName("C"), AName("A")),
            ),
        )
        meta, _ = internalize(kb)
        assert isinstance(meta, AAnd)
        assert len(meta.args) == 3


class TestSerialization:
    def test_prefix_forms(self):
        assert format_alcqi_concept(some(r, AName("A"))) == "(some r A)"
        assert format_alcqi_concept(AtLeast(2, r.inverse, ATop())) == "(atleast 2 (inv r) top)"
        assert format_alcqi_concept(every(r, AName("A"))) == "(all r A)"

    def test_kb_serialization_is_stable(self):
        kb = AlcqiKb(
            concept_names=frozenset({"B", "A"}),
            role_names=frozenset({"r"}),
            individuals=frozenset({"a"}),
            gcis=((AName("A"), some(r, AName("B"))),),
            concept_assertions=((AName("A"), "a"),),
        )
        assert serialize_alcqi(kb) == serialize_alcqi(kb)
        assert "concept A" in serialize_alcqi(kb).splitlines()[0]


def test_undeclared_role_rejected():
    import pytest

    with pytest.raises(ValueError):
        AlcqiKb(
            individuals=frozenset({"a", "b"}),
            role_assertions=((r, "a", "b"),),
        )
