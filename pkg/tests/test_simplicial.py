import numpy as np
import pytest

import oracles as O
from semistrict import catn as C
from semistrict import corpus as K
from semistrict import fingrp as fg
from semistrict import simplicial as S
from semistrict.errors import HypothesisViolated

Z2, Z3 = fg.cyclic_group(2), fg.cyclic_group(3)
PT = C.discrete(fg.trivial_group())


def orders(gs):
    return [g.order for g in gs]


def test_multinerve_levels():
    X = S.multinerve(C.discrete(Z2), K=3)
    assert [X.level(k).order for k in range(4)] == [2, 2, 2, 2]
    X = S.multinerve(C.pair_object(Z2), K=3)
    assert [X.level(k).order for k in range(4)] == [2, 4, 8, 16]
    # discrete in direction 2: constant along it
    X = S.multinerve(C.tensor(C.pair_object(Z2), C.discrete(fg.trivial_group())), K=2)
    for a in range(3):
        assert {X.level((a, b)).order for b in range(3)} == {2 ** (a + 1)}


def test_multinerve_satisfies_identities():
    for G in (C.pair_object(Z2), K.running_example(2)):
        S.check_msg_identities(S.multinerve(G, K=2))
    S.check_simplicial_identities(S.diagonal(C.pair_object(Z3)))


def test_segal_check():
    assert S.segal_check(S.multinerve(C.discrete(Z2)), 1, 2).ok
    assert S.segal_check(S.multinerve(C.pair_object(Z2)), 1, 3).ok
    r = S.segal_check(K.non_nerve_counterexample(), 1, 2)
    assert not r.ok and "not injective" in r.reason


def test_diagonal_levels():
    G = C.tensor(C.pair_object(Z2), C.discrete(fg.trivial_group()))
    D, X = S.diagonal(G), S.multinerve(G)
    for q in range(3):
        assert D.level(q).order == X.level((q, q)).order


def test_moore_homotopy_examples():
    assert orders(S.moore_homotopy(S.diagonal(C.pair_object(Z2)), 2)) == [1, 1, 1]
    assert orders(S.moore_homotopy(S.diagonal(C.one_object(Z2)), 2)) == [1, 2, 1]
    assert orders(S.moore_homotopy(S.constant_simplicial_group(Z3), 2)) == [3, 1, 1]
    assert orders(S.moore_homotopy(S.diagonal(S.group_nerve_msg(Z3)), 2)) == [1, 3, 1]
    G = C.tensor(C.one_object(Z2), C.discrete(fg.trivial_group()))
    assert orders(S.moore_homotopy(S.diagonal(G), 3)) == [1, 2, 1, 1]


def test_cat1_closed_forms_match_oracle():
    for nm, G in K.n1_objects().items():
        pi0, pi1 = S.homotopy_cat1(G)
        assert (pi0.order, pi1.order) == O.cat1_pi(O.table(G.total), G.d[0], G.t[0]), nm
        assert S.pi0_cat(G)[0].order == pi0.order
        assert orders(S.moore_homotopy(S.diagonal(G), 1)) == [pi0.order, pi1.order], nm


def test_pi0_of_fibre_product_over_discrete():
    A, B = C.discrete(Z2), C.pair_object(Z3)
    P, _, _ = C.catn_fibre_product(C.catn_map(A, PT, np.zeros(2, int)),
                                   C.catn_map(B, PT, np.zeros(9, int)))
    assert S.pi0_cat(P)[0].order == S.pi0_cat(A)[0].order * S.pi0_cat(B)[0].order == 2


def test_is_weak_equivalence_examples():
    P = C.pair_object(Z2)
    assert S.is_weak_equivalence(C.identity_map(P)).ok
    assert S.is_weak_equivalence(C.catn_map(P, PT, np.zeros(4, int))).ok
    r = S.is_weak_equivalence(C.catn_map(C.discrete(Z2), PT, np.zeros(2, int)))
    assert not r and r.failed_q == 0
    G = K.running_example(2)
    assert S.is_weak_equivalence(C.identity_map(G)).ok
    # composition: pair(Z2) → pair(1) → point
    P1 = C.pair_object(fg.trivial_group())
    f = C.catn_map(P, P1, np.zeros(4, int))
    g = C.catn_map(P1, PT, np.zeros(1, int))
    assert S.is_weak_equivalence(f).ok and S.is_weak_equivalence(g).ok
    assert S.is_weak_equivalence(C.catn_map(P, PT, g.hom.map[f.hom.map])).ok


def test_R_flatten_sizes():
    R = S.R_flatten(S.constant_simplicial_group(fg.trivial_group()), 3)
    assert [R.size(k) for k in range(4)] == [1, 1, 1, 1]
    R = S.R_flatten(S.constant_simplicial_group(Z2), 3)
    assert [R.size(k) for k in range(4)] == [1, 2, 4, 8]


def test_lemma_weak01():
    G = K.running_example(2)
    assert S.lemma_weak01_check(S.multinerve(G, K=2), S.multinerve(G, K=2), K=2)
    A = C.tensor(C.pair_object(Z2), C.discrete(fg.trivial_group()))
    B = C.tensor(C.one_object(Z2), C.discrete(fg.trivial_group()))
    with pytest.raises(HypothesisViolated):
        S.lemma_weak01_check(S.multinerve(A, K=2), S.multinerve(B, K=2), K=2)
