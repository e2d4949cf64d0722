import random

import pytest
from hypothesis import given, settings, strategies as st

from cayleyauto import fa, fo, relations as rel
from cayleyauto.fa import Alphabet, Word

from helpers import check_formula_soundness, finite_structure

AB = Alphabet(["a", "b"])


def test_parse_precedence_and_shape():
    node = fo.parse_formula("! R(x,y) & S(x) | S(y) -> x = y")
    # ! binds tightest, then &, then |, then ->
    assert isinstance(node, fo.Implies)
    assert isinstance(node.left, fo.Or)
    assert isinstance(node.left.left, fo.And)
    assert isinstance(node.left.left.left, fo.Not)


def test_parse_right_associative_implication():
    node = fo.parse_formula("S(x) -> S(y) -> S(z)")
    assert isinstance(node, fo.Implies)
    assert isinstance(node.right, fo.Implies)


def test_parse_quantifiers_and_free_variables():
    node = fo.parse_formula("A x (E y (R(x,y) & S(z)))")
    assert fo.free_variables(node) == {"z"}


def test_parse_error_reports_position():
    with pytest.raises(fo.FormulaError):
        fo.parse_formula("R(x,")
    with pytest.raises(fo.FormulaError):
        fo.parse_formula("E x")
    with pytest.raises(fo.FormulaError):
        fo.parse_formula("R(x,y) &")


def test_decide_rejects_free_variables():
    struct, _, _ = finite_structure(random.Random(0), AB)
    with pytest.raises(fo.FormulaError):
        fo.decide(struct, "S(x)")


def test_compile_order_permutes_tracks():
    struct, words, tables = finite_structure(random.Random(1), AB)
    _, r1 = fo.compile(struct, "R(x,y)", ("x", "y"))
    _, r2 = fo.compile(struct, "R(x,y)", ("y", "x"))
    for u in words[:5]:
        for v in words[:5]:
            assert r1.contains((u, v)) == r2.contains((v, u))


def test_compile_unknown_relation():
    struct, _, _ = finite_structure(random.Random(2), AB)
    with pytest.raises(fo.FormulaError):
        fo.compile(struct, "T(x,y)")


def test_define_relation_extends_structure():
    struct, words, tables = finite_structure(random.Random(3), AB)
    s2 = fo.define_relation(struct, "Sym", "R(x,y) | R(y,x)", ("x", "y"))
    r = s2.relations["Sym"]
    for u in words:
        for v in words:
            expect = (u.indices, v.indices) in tables["R"] or (
                v.indices,
                u.indices,
            ) in tables["R"]
            assert r.contains((u, v)) == expect


def test_quantifiers_relativize_to_domain():
    # domain = words of length exactly 1; S holds of both of them
    a, b = Word(AB, (0,)), Word(AB, (1,))
    dom = rel.relation_language(rel.relation_from_tuples(AB, 1, [(a,), (b,)]))
    struct = fo.AutomaticStructure(
        dom, {"S": rel.relation_from_tuples(AB, 1, [(a,), (b,)])}
    )
    # true on the domain even though longer words are not in S
    assert fo.decide(struct, "A x (S(x))")
    assert fo.decide(struct, "E x (S(x))")


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_random_formulas_match_naive_model_checking(seed):
    rng = random.Random(seed)
    struct, words, tables = finite_structure(rng, AB, max_word_len=1)
    check_formula_soundness(rng, struct, words, tables, depth=3)


def test_sentence_examples():
    struct, words, tables = finite_structure(random.Random(5), AB)
    assert fo.decide(struct, "A x (x = x)")
    assert not fo.decide(struct, "E x (! (x = x))")
