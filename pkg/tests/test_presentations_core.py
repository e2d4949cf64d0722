import pytest

from cayleyauto import fa
from cayleyauto.presentations import (
    FiniteGroupTable,
    GroupWord,
    Nilpotent2Spec,
    heisenberg,
    zn,
)
from cayleyauto.presentations.core import GraphAutomaticPresentation


def test_group_word_parse_and_str():
    w = GroupWord.parse("A C A^-1 C^-1 B^-1")
    assert w.letters == (
        ("A", 1), ("C", 1), ("A", -1), ("C", -1), ("B", -1)
    )
    assert str(w) == "A C A^-1 C^-1 B^-1"
    assert GroupWord.parse("a^3 b^-2").letters == (
        ("a", 1), ("a", 1), ("a", 1), ("b", -1), ("b", -1)
    )
    assert GroupWord.parse("").letters == ()


def test_group_word_inverse_and_product():
    w = GroupWord.parse("a b^-1")
    assert w.inverse().letters == (("b", 1), ("a", -1))
    assert (w * w.inverse()).letters == (
        ("a", 1), ("b", -1), ("b", 1), ("a", -1)
    )
    assert len(w) == 2
    assert list(w) == [("a", 1), ("b", -1)]


def test_group_word_rejects_bad_tokens():
    with pytest.raises(ValueError):
        GroupWord.parse("a^x")
    with pytest.raises(ValueError):
        GroupWord.parse("^2")
    with pytest.raises(ValueError):
        GroupWord([("a", 2)])


def test_finite_group_table_cyclic():
    t = FiniteGroupTable.cyclic(4)
    assert t.size == 4
    assert t.identity == 0
    assert t.mult(2, 3) == 1
    assert t.inverse[3] == 1


def test_finite_group_table_validation():
    with pytest.raises(ValueError):
        FiniteGroupTable.cyclic(0)
    with pytest.raises(ValueError):
        FiniteGroupTable(["e", "e"], [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        FiniteGroupTable(["e", "g"], [[0, 1]])
    with pytest.raises(ValueError):
        # no identity element
        FiniteGroupTable(["e", "g"], [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        # Z/5 with one entry changed: identity and inverses survive but
        # (1*1)*2 != 1*(1*2)
        FiniteGroupTable(
            [str(i) for i in range(5)],
            [
                [0, 1, 2, 3, 4],
                [1, 3, 3, 4, 0],
                [2, 3, 4, 0, 1],
                [3, 4, 0, 1, 2],
                [4, 0, 1, 2, 3],
            ],
        )


def test_nilpotent2_spec_validation():
    Nilpotent2Spec(3, 2, (None, None, None), {(0, 1): (0, 0, 1)})
    with pytest.raises(ValueError):
        Nilpotent2Spec(3, 0, (None,) * 3, {})
    with pytest.raises(ValueError):
        Nilpotent2Spec(3, 2, (None, None), {})
    with pytest.raises(ValueError):
        Nilpotent2Spec(3, 2, (None, 1, None), {})
    with pytest.raises(ValueError):
        # key out of the split range
        Nilpotent2Spec(3, 2, (None,) * 3, {(1, 2): (0, 0, 1)})
    with pytest.raises(ValueError):
        # commutator touching a non-central coordinate
        Nilpotent2Spec(3, 2, (None,) * 3, {(0, 1): (1, 0, 0)})
    # central torsion reduces coordinates mod the order
    spec = Nilpotent2Spec(3, 2, (None, None, 2), {(0, 1): (0, 0, 2)})
    assert spec.commutator(0, 1) == (0, 0, 0)


def test_presentation_validation():
    P = zn(1)
    with pytest.raises(ValueError):
        GraphAutomaticPresentation(
            P.base, P.domain, P.identity, {"e1": P.relation("e1")},
            left={"bogus": P.relation("e1")},
        )
    with pytest.raises(KeyError):
        P.relation("nope")


def test_presentation_relation_signs():
    P = zn(1)
    r = P.relation("e1", 1)
    rinv = P.relation("e1", -1)
    for (u,), (v,) in [(t[:1], t[1:]) for t in r.tuples(max_length=3)]:
        assert rinv.contains((v, u))


def test_presentation_json_round_trip():
    P = heisenberg()
    Q = GraphAutomaticPresentation.from_json(P.to_json())
    assert Q.generator_names == P.generator_names
    assert fa.language_equal(P.domain, Q.domain)
    assert Q.identity.indices == P.identity.indices
    for name in P.generators:
        assert fa.language_equal(
            P.relation(name).dfa, Q.relation(name).dfa
        )
    assert Q.is_biautomatic() == P.is_biautomatic()
    # serialization is stable
    assert Q.to_json() == P.to_json()


def test_presentation_save_load(tmp_path):
    P = zn(2)
    path = tmp_path / "zn2.json"
    P.save(path)
    Q = GraphAutomaticPresentation.load(path)
    assert fa.language_equal(P.domain, Q.domain)
    for name in P.generators:
        assert fa.language_equal(P.relation(name).dfa, Q.relation(name).dfa)
