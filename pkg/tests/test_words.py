import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosmash.algebra import Kind
from cosmash.catalog import cyclic, resolve, symmetric
from cosmash.errors import ParseError, UnboundLetter, UnsupportedOperation
from cosmash.words import (
    UNIT,
    Letter,
    Op,
    Unit,
    associator,
    cosmash_membership_group,
    cosmash_membership_loop,
    enumerate_cosmash_terms,
    eval_term,
    format_term,
    freeword_reduce,
    group_commutator,
    letters_of,
    loop_normalize,
    parse_term,
    zero_substitute,
)

XYZ = ("x", "y", "z")


def leaves(t):
    if isinstance(t, Op):
        return sum(leaves(a) for a in t.args)
    return 1


def ops(t):
    if isinstance(t, Op):
        return 1 + sum(ops(a) for a in t.args)
    return 0


def test_parse_examples():
    t = parse_term("(k1*l1)/(l1*k1)")
    assert leaves(t) == 4 and ops(t) == 3 and t.name == "rdiv"
    assert parse_term("1") is UNIT
    with pytest.raises(ParseError) as e:
        parse_term("(k1*l1")
    assert e.value.position == len("(k1*l1")


def test_parse_left_associative_and_inv():
    assert parse_term("k1*l1/m1") == Op("rdiv", (Op("mul", (Letter(0, 1), Letter(1, 1))), Letter(2, 1)))
    assert parse_term("inv(k1*l2)") == Op("inv", (Op("mul", (Letter(0, 1), Letter(1, 2))),))
    with pytest.raises(ParseError):
        parse_term("q1*k1")
    with pytest.raises(ParseError):
        parse_term("k1 2")


def test_eval_commutator_in_s3():
    S3 = symmetric(3)
    t = parse_term("k1*l1*inv(k1)*inv(l1)")
    k, l = S3.index("(123)"), S3.index("(12)")
    m, iv = S3.mul, S3.inv
    want = m[m[m[k, l], iv[k]], iv[l]]
    assert eval_term(t, S3, {Letter(0, 1): k, Letter(1, 1): l}) == want
    assert want != 0


def test_eval_associator_in_m8(M8):
    t = parse_term("((x1*y1)*z1)/(x1*(y1*z1))", XYZ)
    j, i = M8.index("j"), M8.index("i")
    assert M8.names[eval_term(t, M8, {(0, 1): j, (1, 1): j, (2, 1): i})] == "-1"


def test_eval_division_of_equal_values(M8):
    t = parse_term("(k1*l1)/(k1*(l1*1))")
    for a in range(8):
        assert eval_term(t, M8, {(0, 1): a, (1, 1): 0}) == 0


def test_eval_errors(M8):
    with pytest.raises(UnboundLetter):
        eval_term(parse_term("k1*l1"), M8, {(0, 1): 1})
    with pytest.raises(UnsupportedOperation):
        eval_term(parse_term("k1/l1"), symmetric(3), {(0, 1): 1, (1, 1): 1})
    with pytest.raises(UnsupportedOperation):
        eval_term(parse_term("inv(k1)"), M8, {(0, 1): 1})


def test_eval_broadcasts(M8):
    t = associator(Letter(0, 1), Letter(1, 1), Letter(2, 1))
    x, y, z = np.meshgrid(range(8), range(8), range(8), indexing="ij")
    grid = eval_term(t, M8, {(0, 1): x, (1, 1): y, (2, 1): z})
    assert grid[M8.index("j"), M8.index("j"), M8.index("i")] == M8.index("-1")
    assert grid.shape == (8, 8, 8)


def test_zero_substitute_examples():
    assert format_term(zero_substitute(parse_term("(k1*l1)"), 1)) == "k1*1"
    assert zero_substitute(UNIT, 0) is UNIT
    t = parse_term("((x1*y1)*z1)/(x1*(y1*z1))", XYZ)
    assert format_term(zero_substitute(t, 2), XYZ) == "((x1*y1)*1)/(x1*(y1*1))"


def test_freeword_examples():
    assert freeword_reduce([(0, 1), (0, -1)]).is_empty
    w = [(0, 1), (1, 1), (0, -1), (1, -1)]
    assert list(freeword_reduce(w)) == w
    Z3 = cyclic(3)
    assert list(freeword_reduce([(0, 1), (0, 2), (1, 1)], {0: Z3, 1: Z3})) == [(1, 1)]


def test_membership_examples():
    k, l, m = Letter(0, 1), Letter(1, 1), Letter(2, 1)
    assert cosmash_membership_group(group_commutator(k, l), 2)
    assert not cosmash_membership_group(k, 2)
    t = parse_term("k1*l1*inv(k1)*inv(l1)*m1*l1*k1*inv(l1)*inv(k1)*inv(m1)")
    assert cosmash_membership_group(t, 3)
    assert not cosmash_membership_group(group_commutator(k, l), 3)
    with pytest.raises(UnsupportedOperation):
        cosmash_membership_group(parse_term("k1/l1"), 2)


def test_membership_with_concrete_factors():
    Z2 = cyclic(2)
    k, l = Letter(0, 1), Letter(1, 1)
    t = Op("mul", (k, k))
    assert not cosmash_membership_group(t, 2)
    assert cosmash_membership_group(t, 2, [Z2, Z2], {k: 1, l: 1})
    Z3 = cyclic(3)
    assert not cosmash_membership_group(t, 2, [Z3, Z3], {k: 1, l: 1})
    t = Op("mul", (Op("mul", (k, l)), Op("mul", (k, l))))
    assert cosmash_membership_group(t, 2, [Z2, Z2], {k: 1, l: 1})
    assert not cosmash_membership_group(t, 2)


def test_loop_normalize_examples():
    assert loop_normalize(parse_term("x1\\(x1*y1)", XYZ)) == Letter(0, 1).__class__(1, 1)
    z = parse_term("((x1*y1)*1)/(x1*(y1*1))", XYZ)
    assert loop_normalize(z) is UNIT or isinstance(loop_normalize(z), Unit)
    jj = parse_term("x1*y1", XYZ)
    assert loop_normalize(jj) == jj


@pytest.mark.parametrize(
    "text,want",
    [("k1*1", "k1"), ("1*k1", "k1"), ("k1*(k1\\l1)", "l1"), ("(k1*l1)/l1", "k1"), ("(k1/l1)*l1", "k1"),
     ("k1\\k1", "1"), ("k1/k1", "1"), ("1\\k1", "k1"), ("k1/1", "k1")],
)
def test_each_rewrite_rule(text, want):
    assert format_term(loop_normalize(parse_term(text))) == want


def test_enumeration_examples():
    assert list(enumerate_cosmash_terms("group", 2, depth=0)) == [UNIT]
    k, l, m = Letter(0, 1), Letter(1, 1), Letter(2, 1)
    stream = list(enumerate_cosmash_terms("group", 2, depth=3))
    assert group_commutator(k, l) in stream or group_commutator(l, k) in stream
    loops = list(enumerate_cosmash_terms("loop", 3, depth=3))
    assert associator(k, l, m) in loops
    assert [t.depth for t in loops] == sorted(t.depth for t in loops)


@pytest.mark.parametrize("kind,n", [("group", 2), ("group", 3), ("loop", 2), ("loop", 3)])
def test_enumeration_members_only(kind, n):
    check = (lambda t: cosmash_membership_group(t, n)) if kind == "group" else (lambda t: cosmash_membership_loop(t, n))
    stream = list(enumerate_cosmash_terms(kind, n, depth=4))
    assert stream and all(check(t) for t in stream)
    assert all(t.depth <= 4 for t in stream)


# -------------------------------------------------------------- properties


def terms(kind, n_sorts=3, max_leaves=8):
    letter = st.builds(Letter, st.integers(0, n_sorts - 1), st.integers(1, 2))
    base = st.one_of(st.just(UNIT), letter)
    names = ["mul"] if kind == "group" else ["mul", "ldiv", "rdiv"]

    def extend(children):
        binary = st.builds(lambda n, a, b: Op(n, (a, b)), st.sampled_from(names), children, children)
        if kind == "group":
            return st.one_of(binary, st.builds(lambda a: Op("inv", (a,)), children))
        return binary

    return st.recursive(base, extend, max_leaves=max_leaves)


@given(st.one_of(terms("group"), terms("loop")))
def test_parse_print_roundtrip(t):
    assert parse_term(format_term(t)) == t


S3 = symmetric(3)
Z4 = cyclic(4)
FACTORS = {0: S3, 1: Z4}
syllable = st.one_of(
    st.tuples(st.just(0), st.integers(0, 5)),
    st.tuples(st.just(1), st.integers(0, 3)),
)
words = st.lists(syllable, max_size=12)


@given(words)
def test_freeword_idempotent(w):
    once = freeword_reduce(w, FACTORS)
    assert freeword_reduce(list(once), FACTORS) == once
    assert all(e != 0 for _, e in once)
    assert all(a[0] != b[0] for a, b in zip(once.syllables, once.syllables[1:]))


@given(words, words, words)
def test_freeword_concatenation_associative(a, b, c):
    r = lambda w: list(freeword_reduce(w, FACTORS))
    assert freeword_reduce(r(r(a) + r(b)) + r(c), FACTORS) == freeword_reduce(r(a) + r(r(b) + r(c)), FACTORS)
    assert freeword_reduce(r(a) + r(b), FACTORS) == freeword_reduce(a + b, FACTORS)


def test_freeword_matches_evaluation_in_product():
    # the free product maps onto S3 x Z4; reduction must not change the image
    rng = np.random.default_rng(5)
    for _ in range(200):
        w = [(int(f), int(rng.integers(0, 6 if f == 0 else 4))) for f in rng.integers(0, 2, size=10)]
        def image(ws):
            s, z = 0, 0
            for f, e in ws:
                if f == 0:
                    s = int(S3.mul[s, e])
                else:
                    z = (z + e) % 4
            return s, z
        assert image(w) == image(freeword_reduce(w, FACTORS))


GROUPS = ["S3", "Z4", "Q8", "D4"]


@pytest.mark.parametrize("n_sorts", [2, 3])
def test_group_membership_is_sound(n_sorts):
    stream = list(enumerate_cosmash_terms("group", n_sorts, letters_per_sort=1, depth=5))
    for name in GROUPS:
        X = resolve(name)
        for t in stream:
            for s in range(n_sorts):
                z = zero_substitute(t, s)
                rest = sorted({(a.sort, a.id) for a in letters_of(z)})
                for vals in itertools.product(range(X.order), repeat=len(rest)):
                    assert eval_term(z, X, dict(zip(rest, vals))) == 0


@settings(max_examples=150, deadline=None)
@given(terms("group", 2, 10))
def test_generic_membership_sound_for_random_terms(t):
    if not cosmash_membership_group(t, 2):
        return
    X = symmetric(3)
    for s in range(2):
        z = zero_substitute(t, s)
        rest = sorted({(a.sort, a.id) for a in letters_of(z)})
        for vals in itertools.product(range(6), repeat=len(rest)):
            assert eval_term(z, X, dict(zip(rest, vals))) == 0


@settings(max_examples=200, deadline=None)
@given(terms("loop", 3, 8))
def test_loop_rewriting_is_sound_on_m8(t):
    M8 = resolve("M8")
    nf = loop_normalize(t)
    lets = sorted({(a.sort, a.id) for a in letters_of(t) | letters_of(nf)})
    grids = np.meshgrid(*[np.arange(8)] * len(lets), indexing="ij") if lets else []
    asg = dict(zip(lets, grids))
    lhs = eval_term(t, M8, asg)
    rhs = eval_term(nf, M8, asg)
    assert np.array_equal(np.broadcast_to(lhs, np.shape(rhs) or np.shape(lhs)), np.broadcast_to(rhs, np.shape(lhs) or np.shape(rhs)))


def test_loop_stream_members_vanish_on_m8():
    M8 = resolve("M8")
    for t in enumerate_cosmash_terms("loop", 3, depth=4):
        for s in range(3):
            z = zero_substitute(t, s)
            lets = sorted({(a.sort, a.id) for a in letters_of(z)})
            grids = np.meshgrid(*[np.arange(8)] * len(lets), indexing="ij")
            assert (np.asarray(eval_term(z, M8, dict(zip(lets, grids)))) == 0).all()
