from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from powercircuit.higman import (
    RELATORS,
    CircuitBackend,
    HigmanSolver,
    HigmanStats,
    Interval,
    PreconditionViolated,
    TypeMismatch,
    higman_tower_word,
    interval_kind,
    tower_identity,
    weight,
    wp_higman,
)
from powercircuit.oracle import Pair, gen_trivial_word, wp_higman_reference
from powercircuit.words import Verdict, free_reduce, parse_higman

LETTERS = [(p, e) for p in (1, 2, 3, 4) for e in (1, -1)]


def load(*specs):
    be = CircuitBackend(strict=True)
    return be, be.load_triples(list(specs))


def test_mul_examples():
    be, (t,) = load((1, 3, -2, 1))
    assert be.pair(be.mul(be.identity(1), t)) == (Fraction(3, 4), -1)
    be, (a, b) = load((1, 1, 0, 0), (1, 1, 0, 0))
    ab = be.mul(a, b)
    assert ab.type == (1, 2) and be.pair(ab) == (2, 0)
    be, (a, b) = load((3, 1, 0, 1), (3, 1, -1, 0))
    # [4, -1, 1] is the pair (2, 0)
    assert be.pair(be.mul(a, b)) == (2, 0)


def test_mul_type_mismatch():
    be, (a, b) = load((1, 1, 0, 0), (2, 1, 0, 0))
    with pytest.raises(TypeMismatch):
        be.mul(a, b)


def test_swap_up_examples():
    be, (z, t, w) = load((1, 0, 0, 0), (1, 0, -1, 3), (4, 0, 0, 5))
    out = be.swap_up(z)
    assert out.type == (2, 3) and be.pair(out) == (0, 0)
    out = be.swap_up(t)
    assert out.type == (2, 3) and be.pair(out) == (2, 0) and not out.x and not out.k
    out = be.swap_up(w)
    assert out.type == (1, 2) and be.pair(out) == (5, 0)
    be, (bad,) = load((1, 1, 0, 0))
    with pytest.raises(PreconditionViolated):
        be.swap_up(bad)


def test_swap_down_examples():
    be, (z, three, neg) = load((2, 0, 0, 0), (2, 3, 0, 0), (2, -2, 0, 0))
    out = be.swap_down(z)
    assert out.type == (1, 2) and be.pair(out) == (0, 0)
    out = be.swap_down(three)
    assert out.type == (1, 2) and not out.u and not out.x and be.pair(out) == (0, 3)
    out = be.swap_down(neg)
    assert out.type == (1, 2) and not out.u and not out.k and be.pair(out) == (0, -2)
    be, (bad,) = load((2, 1, -1, 0))
    with pytest.raises(PreconditionViolated):
        be.swap_down(bad)


def test_split_examples():
    be, (pure, odd, good) = load((1, 0, -2, 1), (1, 3, -1, 2), (1, 4, -2, 1))
    g, h = be.split(pure)
    assert be.pair(g) == (0, 0) and be.pair(h) == (0, -1)
    assert be.split(odd) is None
    g, h = be.split(good)
    assert be.pair(g) == (1, 0) and not g.x and not g.k
    assert not h.u and be.pair(h) == (0, -1)


def test_split_high_type():
    be, (t, odd) = load((2, 4, -1, 2), (2, 1, 0, 1))
    g, h = be.split(t)
    # [0,-1,2][4 * 2^-2, 0, 0]
    assert not g.u and be.pair(g) == (0, 1)
    assert be.pair(h) == (1, 0)
    assert be.split(odd) is None


def test_weight_examples():
    be, ts = load((1, 0, 0, 0), (2, 0, 0, 0))
    assert weight(ts) == 0
    be, ts = load((1, 5, 0, 0))
    assert weight(ts) == 2


def test_weight_never_grows():
    be, ts = load(*[(p, e, 0, 0) for p, e in tower_identity(2, 3)])
    solver = HigmanSolver(be)
    w0 = weight(ts)
    verdict, _ = solver.solve(ts)
    assert verdict is Verdict.TRIVIAL
    assert be.weight_violations == 0
    assert w0 > 0


def test_membership_examples():
    be = CircuitBackend(strict=True)
    solver = HigmanSolver(be)
    res = solver.membership(Interval(0, []))
    assert res.inside and res.identity
    (a1,) = be.load_triples([(1, 1, 0, 0)])
    res = solver.membership(Interval(0, [a1]))
    assert res.inside and not res.identity
    (moved,) = solver.swapped(res.members)
    assert interval_kind(moved.p) == 1 and be.pair(moved) == (0, 1)
    (a2,) = be.load_triples([(1, 0, 0, 1)])
    res = solver.membership(Interval(0, [a2]))
    assert not res.inside


def test_verdict_examples():
    for rel in RELATORS:
        assert wp_higman(rel) is Verdict.TRIVIAL
    assert wp_higman(parse_higman("a2 a1 A2 a1^-2")) is Verdict.TRIVIAL
    assert wp_higman([(1, 1)]) is Verdict.NONTRIVIAL
    assert wp_higman([]) is Verdict.TRIVIAL


def test_tower_word_examples():
    for p in (1, 2, 3, 4):
        assert higman_tower_word(p, 0) == [(p, 1)]
        q = p % 4 + 1
        assert higman_tower_word(p, 1) == [(q, 1), (p, 1), (q, -1)]
        assert wp_higman(higman_tower_word(p, 1) + [(p, -2)]) is Verdict.TRIVIAL
        assert len(higman_tower_word(p, 4)) == 2 ** 5 - 1


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_tower_identity(p, n):
    st_ = HigmanStats()
    assert wp_higman(tower_identity(p, n), st_) is Verdict.TRIVIAL
    assert st_.membership_tests <= 2 * st_.triples
    if n <= 3:
        assert wp_higman_reference(tower_identity(p, n)) is Verdict.TRIVIAL


@pytest.mark.parametrize("n", range(6))
def test_tower_word_is_nontrivial(n):
    assert wp_higman(higman_tower_word(1, n)) is Verdict.NONTRIVIAL


def bs_pair(word, p):
    """Product in BS(1,2) with a_p = (1, 0) and a_{p+1} = (0, 1)."""
    acc = Pair(Fraction(0), 0)
    for q, e in word:
        g = Pair(Fraction(e), 0) if q == p else Pair(Fraction(0), e)
        acc = acc.mul(g)
    return acc


@given(st.sampled_from([1, 2, 3, 4]), st.lists(st.tuples(st.booleans(), st.sampled_from([1, -1, 2, -2])), max_size=12))
def test_two_generator_words_match_bs12(p, raw):
    q = p % 4 + 1
    word = free_reduce([(q if hi else p, e) for hi, e in raw])
    want = Verdict.TRIVIAL if bs_pair(word, p).is_identity else Verdict.NONTRIVIAL
    assert wp_higman(word) is want


@given(st.lists(st.sampled_from(LETTERS), max_size=10))
def test_agrees_with_reference(word):
    st_ = HigmanStats()
    assert wp_higman(word, st_) is wp_higman_reference(word)
    assert st_.membership_tests <= 2 * max(st_.triples, 1)


@given(st.integers(0, 10**6), st.integers(0, 80))
def test_constructed_trivial_words(seed, length):
    assert wp_higman(gen_trivial_word("higman", seed, length)) is Verdict.TRIVIAL


def test_garbage_collection_keeps_values():
    be = CircuitBackend(strict=True)
    a, b, c = be.load_triples([(1, 3, -2, 1), (1, 5, 0, 2), (1, 1, -1, 0)])
    ab = be.mul(a, b)
    del a, b
    removed = be.collect()
    assert removed > 0
    be.tree.check()
    pa, pb, pc = Pair(Fraction(3, 4), -1), Pair(Fraction(5), 2), Pair(Fraction(1, 2), -1)
    ab_pair = pa.mul(pb)
    assert be.pair(ab) == (ab_pair.r, ab_pair.m) == (Fraction(13, 4), 1)
    abc = ab_pair.mul(pc)
    assert be.pair(be.mul(ab, c)) == (abc.r, abc.m)
