import random

import pytest
from hypothesis import given, settings, strategies as st

from cayleyauto import fa
from cayleyauto.fa import Alphabet, Dfa, Nfa, Word

from helpers import all_words, language, random_nfa

AB = Alphabet(["a", "b"])


def seeded_nfa(seed):
    return random_nfa(random.Random(seed), AB)


def even_as():
    # even number of a's
    return Dfa(AB, 3, 0, frozenset({0}), {0: {0: 1, 1: 0}, 1: {0: 0, 1: 1}}, 2)


def test_accepts_on_simple_dfa():
    d = even_as()
    assert fa.accepts(d, Word.from_names(AB, []))
    assert not fa.accepts(d, Word.from_names(AB, ["a"]))
    assert fa.accepts(d, Word.from_names(AB, ["a", "b", "a"]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_determinize_preserves_language(seed):
    n = seeded_nfa(seed)
    d = fa.determinize(n)
    assert language(n, 4) == language(d, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_minimize_preserves_language(seed):
    n = seeded_nfa(seed)
    d = fa.minimize(fa.determinize(n))
    assert language(n, 4) == language(d, 4)
    assert fa.language_equal(n, d)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_minimize_is_minimal_fixed_point(seed):
    d = fa.minimize(fa.determinize(seeded_nfa(seed)))
    again = fa.minimize(d)
    assert again.n_states == d.n_states


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_complement_flips_membership(seed):
    d = fa.to_dfa(seeded_nfa(seed))
    c = fa.complement(d)
    lang = language(d, 3)
    for w in all_words(AB, 3):
        assert (w.indices in lang) != fa.accepts(c, w)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_boolean_operations(s1, s2):
    d1 = fa.to_dfa(seeded_nfa(s1))
    d2 = fa.to_dfa(seeded_nfa(s2))
    l1, l2 = language(d1, 3), language(d2, 3)
    assert language(fa.dfa_intersect(d1, d2), 3) == l1 & l2
    assert language(fa.dfa_union(d1, d2), 3) == l1 | l2
    assert language(fa.dfa_difference(d1, d2), 3) == l1 - l2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_subset_and_equality_agree_with_booleans(s1, s2):
    d1 = fa.to_dfa(seeded_nfa(s1))
    d2 = fa.to_dfa(seeded_nfa(s2))
    empty, _ = fa.is_empty(fa.dfa_difference(d1, d2))
    assert fa.is_subset(d1, d2) == empty
    assert fa.language_equal(d1, d2) == (
        fa.is_subset(d1, d2) and fa.is_subset(d2, d1)
    )


def test_is_empty_witness_is_shortest():
    n = seeded_nfa(5)
    empty, witness = fa.is_empty(n)
    lang = language(n, 6)
    if empty:
        assert witness is None
        assert not lang
    else:
        assert witness.indices in lang
        assert all(len(w) >= len(witness.indices) for w in lang)


def test_enumerate_words_is_length_lex():
    d = even_as()
    words = fa.enumerate_words(d, max_length=4)
    keys = [(len(w), w.indices) for w in words]
    assert keys == sorted(keys)
    assert {w.indices for w in words} == language(d, 4)


def test_enumerate_words_count_limit():
    d = even_as()
    words = fa.enumerate_words(d, count=3)
    assert len(words) == 3
    assert words[0].indices == ()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_reverse_language(seed):
    n = seeded_nfa(seed)
    r = fa.reverse(n)
    lang = language(n, 3)
    for w in all_words(AB, 3):
        assert (tuple(reversed(w.indices)) in lang) == fa.accepts(r, w)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_text_round_trip(seed):
    d = fa.to_dfa(seeded_nfa(seed))
    back = fa.from_text(fa.to_text(d), alphabet=AB)
    assert fa.language_equal(d, back)


def test_text_canonical_bytes():
    d1 = fa.to_dfa(seeded_nfa(17))
    d2 = fa.minimize(d1)
    assert fa.to_text(d1) == fa.to_text(d2)


def test_to_dot_mentions_all_states():
    d = even_as()
    dot = fa.to_dot(fa.minimize(d), name="even")
    assert dot.startswith("digraph even {")
    assert 'label="a"' in dot and dot.rstrip().endswith("}")


def test_alphabet_rejects_duplicates():
    with pytest.raises(ValueError):
        Alphabet(["a", "a"])


def test_word_from_names_round_trip():
    w = Word.from_names(AB, ["b", "a", "b"])
    assert w.names() == ("b", "a", "b")
    assert len(w) == 3


def test_dfa_without_sink_rejects_missing_row():
    d = Dfa(AB, 1, 0, frozenset({0}), {0: {0: 0}})
    with pytest.raises(ValueError):
        fa.accepts(d, Word.from_names(AB, ["b"]))


def test_nfa_rejects_bad_initial():
    with pytest.raises(ValueError):
        Nfa(AB, 2, {7}, frozenset(), {})
