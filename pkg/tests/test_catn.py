import numpy as np
import pytest

import oracles as O
from semistrict import catn as C
from semistrict import corpus as K
from semistrict import fingrp as fg
from semistrict.errors import AxiomIII, NotAMorphism, TargetMismatch

Z2, Z3, Z4 = fg.cyclic_group(2), fg.cyclic_group(3), fg.cyclic_group(4)


def test_validate_catn_examples():
    P = C.pair_object(Z2)
    assert O.catn_verdict(O.table(P.total), P.d, P.t) is None
    C.validate_catn(P.total, P.d, P.t)
    C.validate_catn(Z2, [np.arange(2)], [np.arange(2)])
    S3 = fg.symmetric_group(3)
    with pytest.raises(AxiomIII) as ei:
        C.validate_catn(S3, [np.zeros(6, int)], [np.zeros(6, int)])
    assert ei.value.info["direction"] == 1
    a, b = ei.value.info["witness"]
    assert S3.mul[a, b] != S3.mul[b, a]


def test_face_examples():
    D = C.discrete_n(Z3, 2)
    for k in (1, 2):
        assert {C.face(D, k, i).order for i in range(4)} == {3}
    P = C.pair_object(Z2)
    assert [C.face(P, 1, i).order for i in range(3)] == [2, 4, 8]
    G = C.tensor(C.pair_object(Z2), C.discrete(fg.trivial_group()))
    for i in range(3):
        F = C.face(G, 2, i)
        assert F.n == 1 and F.order == 4 and np.array_equal(F.d[0], G.d[0])


def test_internal_category_examples():
    v = C.as_internal_category(C.pair_object(Z2), 1)
    assert v.objects.order == 2 and v.arrows.order == 4
    emb = v.arrows.total.embedding
    code = {tuple(r): i for i, r in enumerate(emb.tolist())}
    for x, y, z in np.ndindex(2, 2, 2):
        m = int(v.compose(np.array([code[(x, y)]]), np.array([code[(y, z)]]))[0])
        assert tuple(emb[m]) == (x, z)
    v = C.as_internal_category(C.one_object(Z3), 1)
    for x in range(3):
        for y in range(3):
            assert int(v.compose(np.array([x]), np.array([y]))[0]) == Z3.mul[x, y]
    v = C.as_internal_category(C.discrete(Z3), 1)
    ar = np.arange(3)
    assert np.array_equal(v.src.map, ar) and np.array_equal(v.tgt.map, ar)
    assert np.array_equal(v.compose(ar, ar), ar)


def test_round_trip_through_internal_category():
    for nm, G in (K.n1_objects() | K.n2_objects() | K.n3_objects()).items():
        for k in range(1, G.n + 1):
            H = C.from_internal_category(C.as_internal_category(G, k))
            w = C.internal_category_iso(G, H)
            assert w is not None and w.hom.is_isomorphism(), (nm, k)


def test_from_internal_category_discrete_and_kernel_pair():
    D = C.from_internal_category(C.as_internal_category(C.discrete(Z2), 1))
    assert D.is_discrete()
    f = fg.GroupHom(Z4, Z2, [0, 1, 0, 1])
    P, alpha = C.build_kernel_pair_object(f)
    assert P.order == 8 and alpha.hom.is_isomorphism()


def test_build_A_f_examples():
    Af, _ = C.build_A_f(fg.identity_hom(Z3))
    assert Af.order == 3 and np.array_equal(Af.d[0], np.arange(3)) and np.array_equal(Af.t[0], np.arange(3))
    from semistrict.simplicial import homotopy_cat1
    Af, _ = C.build_A_f(fg.trivial_hom(Z3, fg.trivial_group()))
    assert Af.order == 9
    assert [g.order for g in homotopy_cat1(Af)] == [1, 1]
    Af, _ = C.build_A_f(fg.GroupHom(Z4, Z2, [0, 1, 0, 1]))
    assert Af.order == 8


def test_kernel_pair_examples():
    P, _ = C.build_kernel_pair_object(fg.identity_hom(Z3))
    assert P.order == 3
    P, _ = C.build_kernel_pair_object(fg.trivial_hom(Z2, fg.trivial_group()))
    assert C.internal_category_iso(P, C.pair_object(Z2)) is not None


def test_catn_fibre_product_examples():
    pt = C.discrete(fg.trivial_group())
    A, B = C.pair_object(Z2), C.discrete(Z3)
    f = C.catn_map(A, pt, np.zeros(4, int))
    g = C.catn_map(B, pt, np.zeros(3, int))
    P, _, _ = C.catn_fibre_product(f, g)
    assert C.internal_category_iso(P, C.product(A, B)) is not None
    # the first-coordinate projection pair(Z2) → disc(Z2) is not a morphism
    # (it does not commute with t); over the totals the pullback has order 8
    A, D = C.pair_object(Z2), C.discrete(Z2)
    first = A.total.embedding[:, 0]
    with pytest.raises(NotAMorphism):
        C.catn_map(A, D, first)
    p = fg.GroupHom(A.total, Z2, first)
    assert fg.fibre_product(p, p)[0].order == O.fibre_product_order(first, first, 4, 4) == 8
    pt2 = C.pair_object(fg.trivial_group())
    f = C.catn_map(A, pt2, np.zeros(4, int))
    P, _, _ = C.catn_fibre_product(f, f)
    assert P.order == O.fibre_product_order([0] * 4, [0] * 4, 4, 4) == 16
    ide = C.identity_map(A)
    P, _, _ = C.catn_fibre_product(ide, ide)
    assert C.internal_category_iso(P, A) is not None
    with pytest.raises(TargetMismatch):
        C.catn_fibre_product(ide, C.identity_map(D))


def test_discrete_examples():
    D = C.discrete(Z2)
    assert D.n == 1 and np.array_equal(D.d[0], [0, 1]) and np.array_equal(D.t[0], [0, 1])
    DD = C.discrete(C.discrete(Z2))
    assert DD.n == 2 and DD.is_discrete()
    G = C.discrete(C.pair_object(Z2))
    for i in range(4):
        assert C.internal_category_iso(C.face(G, 2, i), C.pair_object(Z2)) is not None


def test_corpus_objects_validate():
    for nm, G in (K.n1_objects() | K.n2_objects() | K.n3_objects()).items():
        assert O.catn_verdict(O.table(G.total), G.d, G.t) is None, nm
