import numpy as np
import pytest

from semistrict import catn as C
from semistrict import corpus as K
from semistrict import fingrp as fg
from semistrict import hstruct as H
from semistrict.simplicial import is_weak_equivalence

Z2, Z3, Z4 = fg.cyclic_group(2), fg.cyclic_group(3), fg.cyclic_group(4)
V4 = fg.power_of_cyclic(2, 2)


def sc(G):
    return H.is_strongly_contractible(G) is not None


def test_discretization_examples():
    w = H.discretization(C.pair_object(Z2))
    assert w.P.order == 1 and len(w.N) == 2
    w = H.discretization(C.discrete(Z3))
    assert w.P.order == 3 and len(w.N) == 1
    assert np.array_equal(w.d.map[w.t.map], np.arange(3))
    assert H.projection_is_weak_equivalence(w)
    # π_1 ≠ 1: no discretization
    assert H.discretization(C.one_object(Z2)) is None


def test_strong_contractibility_examples():
    assert sc(C.pair_object(Z2)) and sc(C.discrete(Z3))
    assert not sc(C.one_object(Z2))
    assert not sc(K.running_example(2))
    cert = H.is_strongly_contractible(C.tensor(C.pair_object(Z2), C.pair_object(Z3)))
    assert cert is not None and cert.to_dict()["n"] == 2


def test_products_of_sc_are_sc():
    assert sc(C.product(C.pair_object(Z2), C.discrete(Z3)))
    assert sc(C.product(C.pair_object(Z3), C.pair_object(Z2)))


def test_faces_of_sc_are_sc():
    G = C.tensor(C.pair_object(Z2), C.pair_object(Z3))
    assert sc(G)
    for k in (1, 2):
        for i in range(4):
            assert sc(C.face(G, k, i)), (k, i)


def test_special_examples():
    G = K.running_example(2)
    r = H.is_special(G)
    assert not r and r.failed()
    for G in K.n1_objects().values():
        assert H.is_special(G).ok          # vacuous for n = 1


def test_one_special_is_special():
    for G in list(K.n2_objects().values()) + list(K.n3_objects().values()):
        assert H.is_special(G).ok == H.is_i_special(G, 1).ok


def test_dec_cover_examples():
    c = H.dec_cover(C.one_object(Z2))
    assert c.H0.order == 4 and sc(c.H0) and all(c.surjective.values())
    assert H.dec_cover(C.pair_object(Z2)).H0.order == 8
    c = H.iterated_dec_cover(K.running_example(2))
    assert c.H0.n == 2 and sc(c.H0)


def test_cofibrant_replace_is_weak_equivalence():
    G = K.running_example(2)
    X, alpha = H.cofibrant_replace(G, 1)
    assert X.order == 8 and alpha.source.same_as(X)
    assert is_weak_equivalence(alpha).ok


def test_specialize_examples():
    for nm, G in K.non_special_inputs().items():
        r = H.specialize(G)
        assert H.is_special(r.Sp).ok, nm
        assert is_weak_equivalence(r.alpha).ok, nm
    r = H.specialize(K.running_example(2))
    assert r.Sp.order == 8 and r.stages[0]["cover"] == "iterated-dec"


def test_nerve_of_special_is_levelwise_special():
    Sp = H.specialize(K.running_example(2)).Sp
    for k in (1, 2):
        for i in range(3):
            assert H.is_special(C.face(Sp, k, i)).ok


def test_section_naturality_is_needed():
    # pair(Z4) → pair(Z2) ← disc(V4): every object is SC but the section of
    # disc(V4) does not commute with the map, and the pullback is not SC
    A, Cc, B = C.pair_object(Z4), C.pair_object(Z2), C.discrete(V4)
    code = {tuple(r): i for i, r in enumerate(Cc.total.embedding.tolist())}
    f = C.catn_map(A, Cc, [code[(x % 2, y % 2)] for x, y in A.total.embedding.tolist()])
    g = C.catn_map(B, Cc, [code[(r[0], r[0])] for r in V4.embedding.tolist()])
    assert all(sc(X) for X in (A, B, Cc))
    assert H.sections_natural(f) and not H.sections_natural(g)
    P, _, _ = C.catn_fibre_product(f, g)
    assert P.order == 16 and not sc(P)


def test_sc_pullbacks_from_generator():
    for nm, f, g in K.random_sc_diagrams(count=5):
        assert H.sections_natural(f) and H.sections_natural(g)
        P, p1, p2 = C.catn_fibre_product(f, g)
        assert sc(P), nm
