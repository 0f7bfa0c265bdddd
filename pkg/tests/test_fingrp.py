import itertools

import numpy as np
import pytest

import oracles as O
from semistrict import fingrp as fg
from semistrict.errors import NoInverse, NotAHomomorphism, NotAssociative


def Z(n):
    return fg.cyclic_group(n)


def test_validate_group_examples():
    assert fg.validate_group([[0, 1], [1, 0]]).order == 2
    with pytest.raises(NoInverse):
        fg.validate_group([[0, 1], [1, 1]])
    S3 = fg.symmetric_group(3)
    G = fg.validate_group(S3.mul)
    assert G.order == 6 and O.is_group(O.table(G))
    assert O.element_order_multiset(O.table(G)) == [1, 2, 2, 2, 3, 3]


def test_validate_group_rejects_non_associative():
    # a loop of order 5 with inverses but no associativity
    t = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    assert not O.is_group(t)
    with pytest.raises(NotAssociative):
        fg.validate_group(t)


def test_named_groups_are_groups():
    for G in (Z(1), Z(4), fg.symmetric_group(3), fg.dihedral_group(4), fg.quaternion_group(),
              fg.power_of_cyclic(2, 2), fg.alternating_group(4)):
        assert O.is_group(O.table(G))


def test_kernel_examples():
    assert fg.kernel(fg.identity_hom(Z(2))).order == 1
    h = fg.GroupHom(Z(4), Z(2), [0, 1, 0, 1])
    K = fg.kernel(h)
    assert sorted(K.embedding.tolist()) == [0, 2]          # enumerated preimage of 0
    assert fg.kernel(fg.trivial_hom(Z(2), Z(1))).order == 2


def test_fibre_product_examples():
    P, p1, p2 = fg.fibre_product(fg.identity_hom(Z(2)), fg.identity_hom(Z(2)))
    assert P.order == 2 and np.array_equal(p1.map, p2.map)
    t = fg.trivial_hom(Z(2), Z(1))
    assert fg.fibre_product(t, t)[0].order == 4
    f = fg.GroupHom(Z(4), Z(2), [0, 1, 0, 1])
    P, _, _ = fg.fibre_product(f, fg.identity_hom(Z(2)))
    assert sorted(map(tuple, P.embedding.tolist())) == [(0, 0), (1, 1), (2, 0), (3, 1)]
    assert P.order == O.fibre_product_order([0, 1, 0, 1], [0, 1], 4, 2)


def test_fibre_product_over_point_is_product():
    for A, B in itertools.product((Z(2), Z(3), fg.symmetric_group(3)), repeat=2):
        P, _, _ = fg.fibre_product(fg.trivial_hom(A, Z(1)), fg.trivial_hom(B, Z(1)))
        assert P.order == A.order * B.order


def test_quotient_by_normal_closure_examples():
    Q, p = fg.quotient_by_normal_closure(Z(4), [2])
    assert Q.order == 2
    Q, p = fg.quotient_by_normal_closure(Z(4), [])
    assert Q.order == 4 and np.array_equal(p.map, np.arange(4))
    S3 = fg.symmetric_group(3)
    c = int(np.flatnonzero(S3.element_orders == 3)[0])
    Q, p = fg.quotient_by_normal_closure(S3, [c])
    assert Q.order == 2
    # kernel is the smallest normal subgroup containing S
    ker = set(np.flatnonzero(p.map == 0).tolist())
    assert ker == set(np.flatnonzero(S3.element_orders != 2).tolist())   # A3
    assert p.is_surjective()


def test_find_homomorphic_section_examples():
    V4 = fg.direct_product(Z(2), Z(2))
    proj = fg.GroupHom(V4, Z(2), V4.embedding[:, 0])
    s = fg.find_homomorphic_section(proj)
    assert s is not None and np.array_equal(proj.map[s.map], np.arange(2))
    assert V4.embedding[s.map[1]].tolist() in ([1, 0], [1, 1])
    red = fg.GroupHom(Z(4), Z(2), [0, 1, 0, 1])
    assert fg.find_homomorphic_section(red) is None
    assert not O.count_homs_with_section(O.table(Z(4)), O.table(Z(2)), [0, 1, 0, 1])
    s = fg.find_homomorphic_section(fg.identity_hom(Z(3)))
    assert np.array_equal(s.map, np.arange(3))


def test_semidirect_product_examples():
    A, B = Z(3), Z(2)
    triv = np.array([np.arange(3), np.arange(3)])
    assert fg.are_isomorphic(fg.semidirect_product(A, B, triv), fg.direct_product(A, B)) is not None
    inv = np.array([np.arange(3), [0, 2, 1]])
    S = fg.semidirect_product(A, B, inv)
    assert O.is_group(O.table(S))
    assert fg.are_isomorphic(S, fg.symmetric_group(3)) is not None
    one = fg.semidirect_product(Z(1), B, np.zeros((2, 1), dtype=int))
    assert fg.are_isomorphic(one, B) is not None


def test_are_isomorphic_examples():
    V4 = fg.power_of_cyclic(2, 2)
    assert fg.are_isomorphic(V4, Z(4)) is None
    h = fg.are_isomorphic(Z(6), fg.direct_product(Z(2), Z(3)))
    assert h is not None and h.is_isomorphism()
    S3 = fg.symmetric_group(3)
    assert fg.are_isomorphic(S3, S3).is_isomorphism()


def test_homomorphisms_are_checked_exhaustively():
    with pytest.raises(NotAHomomorphism):
        fg.GroupHom(Z(3), Z(3), [0, 1, 1])
    h = fg.GroupHom(Z(6), Z(3), [x % 3 for x in range(6)])
    assert O.is_endo(O.table(Z(6)), list(range(6)))
    t6, t3 = O.table(Z(6)), O.table(Z(3))
    assert all(h.map[t6[a][b]] == t3[h.map[a]][h.map[b]] for a in range(6) for b in range(6))


def test_subgroup_embedding_is_a_homomorphism():
    D4 = fg.dihedral_group(4)
    H = fg.generated_subgroup(D4, [1])
    e = H.embedding
    assert len(set(e.tolist())) == H.order
    assert all(e[H.mul[a, b]] == D4.mul[e[a], e[b]] for a in range(H.order) for b in range(H.order))
