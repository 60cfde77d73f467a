import itertools

import numpy as np
import pytest

from cosmash.algebra import (
    Kind,
    Normality,
    congruence_generate,
    denormalize,
    direct_product,
    discrete,
    hom_check,
    hom_image_kernel,
    identity_hom,
    normal_closure,
    normal_subobjects,
    normalize,
    quotient,
    subobject_generate,
    total,
    trivial_subobject,
    validate_algebra,
    whole,
)
from cosmash.catalog import cyclic, resolve, trivial
from cosmash.errors import AxiomViolation, NonQuasigroup, NotHomomorphism, ShapeError

import oracles


def names(S):
    return set(S.names)


def test_m8_validates_as_loop(M8):
    assert M8.kind is Kind.LOOP and M8.order == 8
    assert not M8.is_associative


def test_z2_group():
    Z2 = validate_algebra("group", [[0, 1], [1, 0]])
    assert Z2.order == 2 and Z2.kind is Kind.GROUP
    assert Z2.inv.tolist() == [0, 1]


def test_repeated_row_entry_is_nonquasigroup():
    with pytest.raises(NonQuasigroup) as e:
        validate_algebra("loop", [[0, 1, 2], [1, 1, 0], [2, 0, 1]])
    assert e.value.line == "row" and e.value.index == 1


def test_nonassociative_group_rejected(M8):
    with pytest.raises(AxiomViolation) as e:
        validate_algebra("group", M8.mul)
    assert e.value.op == "mul"
    x, y, z = e.value.witness
    m = M8.mul
    assert m[m[x, y], z] != m[x, m[y, z]]


def test_unit_must_be_zero():
    with pytest.raises(AxiomViolation):
        validate_algebra("group", [[1, 0], [0, 1]])


def test_shape_errors():
    with pytest.raises(ShapeError):
        validate_algebra("group", [[0, 1]])
    with pytest.raises(ShapeError):
        validate_algebra("group", [[0, 5], [5, 0]])


def test_supplied_division_tables_checked(M8):
    ok = validate_algebra("loop", M8.mul, M8.names, ldiv=M8.ldiv, rdiv=M8.rdiv)
    assert ok == M8
    bad = np.array(M8.ldiv)
    bad[[2, 3]] = bad[[3, 2]]
    with pytest.raises(AxiomViolation):
        validate_algebra("loop", M8.mul, M8.names, ldiv=bad)


def test_derived_divisions_satisfy_identities(M8):
    n = M8.order
    x, y = np.meshgrid(range(n), range(n), indexing="ij")
    m, ld, rd = M8.mul, M8.ldiv, M8.rdiv
    assert (m[x, ld[x, y]] == y).all() and (ld[x, m[x, y]] == y).all()
    assert (m[rd[x, y], y] == x).all() and (rd[m[x, y], y] == x).all()


def test_sign_map_is_homomorphism(S3):
    sign = [0 if nm in ("e", "(123)", "(132)") else 1 for nm in S3.names]
    f = hom_check(S3, cyclic(2), sign)
    assert f.is_surjective
    assert hom_check(S3, S3, range(6)) == identity_hom(S3)
    with pytest.raises(NotHomomorphism):
        hom_check(S3, cyclic(2), [1] * 6)


def test_subobject_generate_examples(S3, M8):
    assert names(subobject_generate(S3, [S3.index("(123)")])) == {"e", "(123)", "(132)"}
    assert subobject_generate(S3, []).elements == (0,)
    assert names(subobject_generate(M8, [M8.index("j"), M8.index("-1")])) == {"1", "-1", "j", "-j"}


def test_congruence_generate_examples(S3, M8):
    th = congruence_generate(S3, [(0, S3.index("(123)"))])
    assert th.n_classes == 2
    assert set(S3.names[c] for c in th.classes()[0]) == {"e", "(123)", "(132)"}
    assert congruence_generate(S3, []) == discrete(S3)
    th = congruence_generate(M8, [(0, 1)])
    assert sorted(tuple(M8.names[x] for x in c) for c in th.classes()) == [
        ("1", "-1"), ("i", "-i"), ("j", "-j"), ("k", "-k")
    ]


def test_quotients(S3, A3, M8):
    Q, p = quotient(S3, denormalize(S3, A3))
    assert Q.order == 2 and Q.kind is Kind.GROUP
    assert hom_check(S3, Q, p.map) == p
    Q, _ = quotient(S3, discrete(S3))
    assert np.array_equal(Q.mul, S3.mul)
    Q, p = quotient(M8, congruence_generate(M8, [(0, 1)]))
    assert Q.order == 4 and Q.kind is Kind.LOOP
    validate_algebra("loop", Q.mul)


def test_normalize_examples(S3, A3):
    assert normalize(S3, denormalize(S3, A3)) == A3
    assert normalize(S3, total(S3)) == whole(S3)
    assert normalize(S3, discrete(S3)).is_trivial


def test_denormalize_examples(S3, A3, M8, A):
    sign = np.array([0 if nm in ("e", "(123)", "(132)") else 1 for nm in S3.names])
    assert denormalize(S3, A3).class_of.tolist() == [0 if s == 0 else int(np.argmax(sign)) for s in sign]
    assert denormalize(S3, trivial_subobject(S3)) == discrete(S3)
    th = denormalize(M8, A)
    assert th.n_classes == 2 and set(th.classes()[0]) == set(A.elements)


def test_normal_closure_examples(S3, M8):
    assert normal_closure(S3, [S3.index("(12)")]).is_whole
    assert normal_closure(S3, [0]).is_trivial
    assert names(normal_closure(M8, [M8.index("i")])) == {"1", "-1", "i", "-i"}
    assert not subobject_generate(M8, [M8.index("i")]).is_normal


def test_direct_products():
    V = direct_product(cyclic(2), cyclic(2))
    assert V.order == 4 and V.is_commutative and all(V.mul[x, x] == 0 for x in range(4))
    X = resolve("S3")
    P = direct_product(X, trivial())
    assert np.array_equal(P.mul, X.mul)
    assert oracles.isomorphic(direct_product(cyclic(2), cyclic(3)), cyclic(6))


def test_image_kernel(S3, A3):
    sign = [0 if nm in ("e", "(123)", "(132)") else 1 for nm in S3.names]
    f = hom_check(S3, cyclic(2), sign)
    im, ker = hom_image_kernel(f, whole(S3))
    assert im.is_whole and ker == A3 and ker.normality is Normality.NORMAL
    im, _ = hom_image_kernel(f, A3)
    assert im.is_trivial
    im, ker = hom_image_kernel(identity_hom(S3), A3)
    assert im == A3 and ker.is_trivial


SMALL = ["S3", "D4", "Q8", "Z2xZ4", "A4", "M8", "loop:V4", "Z6"]


@pytest.mark.parametrize("name", SMALL)
def test_normal_subobjects_match_oracle(name):
    X = resolve(name)
    if X.kind is Kind.GROUP:
        want = [set(s) for s in oracles.normal_subgroups(oracles.table(X))]
    else:
        want = [{x for x in range(X.order) if lab[x] == lab[0]} for lab in oracles.congruences(X)]
    got = [set(N.elements) for N in normal_subobjects(X)]
    assert sorted(map(sorted, got)) == sorted(map(sorted, want))


@pytest.mark.parametrize("name", ["S3", "D4", "Q8", "M8", "Z2xZ2xZ2"])
def test_normalisation_is_an_order_isomorphism(name):
    X = resolve(name)
    congs = oracles.congruences(X) if X.order <= 8 else None
    for N in normal_subobjects(X):
        assert normalize(X, denormalize(X, N)) == N
    for lab in congs:
        th = congruence_generate(X, [(x, lab[x]) for x in range(X.order)])
        assert th.class_of.tolist() == lab
        assert denormalize(X, normalize(X, th)) == th


@pytest.mark.parametrize("name", ["S3", "D4", "M8", "Q8"])
def test_roundtrip_is_closure_operator(name):
    X = resolve(name)
    subs = {subobject_generate(X, s).elements for r in range(3) for s in itertools.combinations(range(X.order), r)}
    subs = [subobject_generate(X, s) for s in subs]

    def cl(S):
        return normalize(X, denormalize(X, S))

    for S in subs:
        assert S <= cl(S) and cl(cl(S)) == cl(S)
        assert cl(S) == normal_closure(X, S.elements)
        for T in subs:
            if S <= T:
                assert cl(S) <= cl(T)


@pytest.mark.parametrize("name", ["S3", "D4", "Q8", "M8", "A4"])
def test_quotient_projection_has_kernel_n(name):
    X = resolve(name)
    for N in normal_subobjects(X):
        Q, p = quotient(X, denormalize(X, N))
        assert Q.order * N.order == X.order
        hom_check(X, Q, p.map)
        assert hom_image_kernel(p)[1] == N
