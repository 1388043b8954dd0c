import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from lampwork.mealy import MealyAutomaton, NotInvertible, builtin
from lampwork.treeact import (BudgetExceeded, GroupWord, WordSyntaxError, act,
                              closure_is_trivial, compose, equal, free_reduce, is_trivial,
                              is_spherically_homogeneous, level_perm_oracle, minimize,
                              order_probe, parse_vertex, parse_word, section,
                              signed_state_transducer, transducer_is_trivial, word_transducer)

import oracles

G = builtin("paper_G")


def W(text):
    return parse_word(G, text)


words = st.lists(st.integers(0, 7), max_size=10).map(lambda s: GroupWord(G, tuple(s)))
vertices = st.lists(st.integers(0, 1), max_size=12).map(tuple)


# --- parsing -----------------------------------------------------------------------

def test_word_syntax():
    assert str(W("a b^-1 a")) == "a b^-1 a"
    assert str(W("a^3 b^-2")) == "a a a b^-1 b^-1"
    assert str(W("1")) == "1"
    assert W("") == GroupWord.identity(G)
    for bad in ["e", "a^x", "a^^2", "a*b"]:
        with pytest.raises(WordSyntaxError):
            W(bad)


def test_inverse_letters_need_invertible_automaton():
    aut = MealyAutomaton(2, ("k",), ((0, 0),), ((0, 0),))
    parse_word(aut, "k k")
    with pytest.raises(NotInvertible):
        parse_word(aut, "k^-1")


def test_vertex_syntax():
    assert parse_vertex("0110", 2) == (0, 1, 1, 0)
    assert parse_vertex("", 2) == ()
    with pytest.raises(WordSyntaxError):
        parse_vertex("012", 2)


def test_free_reduce():
    assert free_reduce((0, 1, 2, 4, 5, 3)) == ()
    assert free_reduce((0, 2, 3, 1, 0)) == (0,)


# --- action and sections ------------------------------------------------------------

def test_act_examples():
    assert act(W("a"), (0,) * 8) == (1, 1, 0, 0, 1, 1, 0, 0)
    assert act(GroupWord.identity(G), (1, 0, 1)) == (1, 0, 1)
    v = tuple(random.Random(1).randrange(2) for _ in range(12))
    assert act(W("a a^-1"), v) == v


def test_act_matches_hand_written_wreath():
    for text in ["a", "b^-1", "a b^-1 c d^-1", "d^-1 c a^2"]:
        perm = oracles.level_perm(oracles.parse_simple(text), 6)
        for v, img in perm.items():
            assert act(W(text), v) == img


def test_section_examples():
    assert section(W("a"), (0,)) == W("b")
    assert section(W("a"), (1,)) == W("d")
    assert section(W("d"), (0,)) == W("c")
    assert section(GroupWord.identity(G), (0, 1, 1)) == GroupWord.identity(G)
    assert section(W("a b^-1"), (0,)) == W("b d^-1")
    assert section(W("a b^-1"), (1,)) == W("d b^-1")


def test_level_perm_oracle():
    assert level_perm_oracle(W("a"), 1) == (1, 0)
    assert level_perm_oracle(W("c"), 1) == (0, 1)
    assert level_perm_oracle(W("a b^-1"), 1) == (0, 1)
    assert level_perm_oracle(W("a"), 0) == (0,)
    with pytest.raises(BudgetExceeded):
        level_perm_oracle(W("a"), 21)


@settings(max_examples=500)
@given(words, vertices, vertices)
def test_cocycle(g, v, w):
    assert act(g, v + w) == act(g, v) + act(section(g, v), w)


@settings(max_examples=300)
@given(words, words, vertices)
def test_left_to_right_homomorphism(g, h, v):
    assert act(g * h, v) == act(h, act(g, v))


@settings(max_examples=200)
@given(words, vertices)
def test_section_of_inverse(g, v):
    lhs = section(g.inverse(), v)
    rhs = section(g, act(g.inverse(), v)).inverse()
    u = tuple(random.Random(len(v)).randrange(2) for _ in range(8))
    assert act(lhs, u) == act(rhs, u)
    assert equal(lhs, rhs)


# --- word problem -------------------------------------------------------------------

def test_is_trivial_examples():
    assert is_trivial(W("a b^-1 a b^-1")).trivial
    res = is_trivial(W("a"))
    assert not res.trivial and res.witness == ()
    assert is_trivial(W("a b^-1 b a^-1")).trivial
    assert is_trivial(W("a b^-1 a^-1 b")).trivial is False


def test_equal_examples():
    assert equal(W("a b^-1"), W("d c^-1"))
    assert equal(W("a c^-1"), W("c a^-1"))
    assert not equal(W("a"), W("b"))


def test_klein_subgroup():
    x, z = W("a b^-1"), W("a d^-1")
    xz = x * z
    for g in (x, z, xz):
        assert is_trivial(g * g).trivial
        assert not is_trivial(g).trivial
    assert not equal(x, z) and not equal(x, xz) and not equal(z, xz)
    assert equal(xz, z * x)
    assert equal(xz, W("a c^-1"))


def test_witness_is_first_moved_vertex():
    # x fixes level 1 and swaps below vertex 0
    res = is_trivial(W("a b^-1"))
    assert res.witness == (0,)
    assert level_perm_oracle(W("a b^-1"), 2) != tuple(range(4))


def test_all_methods_agree_on_short_words():
    for n in range(4):
        for letters in product(range(8), repeat=n):
            g = GroupWord(G, letters)
            a = closure_is_trivial(g)
            b = transducer_is_trivial(g)
            c = is_trivial(g)
            assert (a.trivial, a.witness) == (b.trivial, b.witness) == (c.trivial, c.witness)


def test_oracle_agreement_length_four():
    # every word of length <= 4 against the brute-force level action
    ident6 = tuple(range(2 ** 6))
    for n in range(5):
        for letters in product(range(8), repeat=n):
            g = GroupWord(G, letters)
            res = is_trivial(g)
            if res.trivial:
                assert level_perm_oracle(g, 6) == ident6
            else:
                k = res.witness_level + 1
                assert level_perm_oracle(g, k) != tuple(range(2 ** k))
                if k > 1:
                    assert level_perm_oracle(g, k - 1) == tuple(range(2 ** (k - 1)))


@settings(max_examples=200)
@given(st.lists(st.integers(0, 7), max_size=7).map(lambda s: GroupWord(G, tuple(s))))
def test_witness_does_not_depend_on_method(g):
    a, b = closure_is_trivial(g), transducer_is_trivial(g)
    assert (a.trivial, a.witness) == (b.trivial, b.witness)


def test_long_trivial_words_are_decided():
    for k in range(1, 12):
        # commutator of two conjugates of x; the closure of this word explodes
        w = W(f"a^-{k} a b^-1 a^{k} a b^-1 a^-{k} b a^-1 a^{k} b a^-1")
        assert is_trivial(w).trivial


def test_closure_cap_is_an_error():
    w = W("a^-5 a b^-1 a^5 a b^-1 a^-5 b a^-1 a^5 b a^-1")
    with pytest.raises(BudgetExceeded) as exc:
        is_trivial(w, cap=50, method="closure")
    assert exc.value.cap == 50
    with pytest.raises(BudgetExceeded):
        is_trivial(W("a^12"), cap=1000, method="transducer")


def test_unknown_method():
    with pytest.raises(ValueError):
        is_trivial(W("a"), method="guess")


# --- transducers ---------------------------------------------------------------------

def test_minimal_transducers_of_generators():
    ta = signed_state_transducer(G, 0)
    assert ta.size == 4
    x = word_transducer(W("a b^-1"))
    # the sections of x cycle through y, z and back to x
    assert x.size == 3
    assert word_transducer(W("a b^-1 a b^-1")).is_identity()


def test_compose_then_minimize_is_canonical():
    t1 = minimize(compose(word_transducer(W("a")), word_transducer(W("b^-1"))))
    t2 = word_transducer(W("d c^-1"))
    assert t1 == t2


# --- spherical homogeneity and order -------------------------------------------------

def test_spherical_homogeneity():
    assert is_spherically_homogeneous(W("a b^-1"))
    assert is_spherically_homogeneous(W("a d^-1"))
    assert not is_spherically_homogeneous(W("a"))
    assert is_spherically_homogeneous(GroupWord.identity(G))
    assert is_spherically_homogeneous(W("a^-3 a b^-1 a^3"))


def test_order_probe():
    assert order_probe(W("a b^-1"), 8).order == 2
    assert order_probe(GroupWord.identity(G), 4).order == 1
    res = order_probe(W("a"), 64)
    assert res.exceeded and str(res) == "exceeds 64"
    # every power up to the bound carries a vertex it moves
    assert sorted(res.witnesses) == list(range(1, 65))
    for n in (1, 2, 7):
        v = res.witnesses[n]
        assert act(W("a") ** n, v) != v
    with pytest.raises(ValueError):
        order_probe(W("a"), 0)


def test_powers_of_a_first_move_level_two_adic():
    # a^n first moves a vertex on level 2^v, where 2^v is the largest power of 2 dividing n
    for n in range(1, 13):
        level = n & -n
        res = is_trivial(W("a") ** n)
        assert res.witness_level + 1 == level
        assert level_perm_oracle(W("a") ** n, level) != tuple(range(2 ** level))
        assert level_perm_oracle(W("a") ** n, level - 1) == tuple(range(2 ** (level - 1)))
