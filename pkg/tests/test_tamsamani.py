import numpy as np
import pytest

from semistrict import catn as C
from semistrict import corpus as K
from semistrict import fingrp as fg
from semistrict import globular as GL
from semistrict import hstruct as H
from semistrict import tamsamani as TM
from semistrict.simplicial import homotopy_cat1

Z2, Z3 = fg.cyclic_group(2), fg.cyclic_group(3)
ONE = fg.trivial_group()


@pytest.fixture(scope="module")
def phi2():
    return GL.globularize(H.specialize(K.running_example(2)).Sp)


def test_underlying_groupoid_examples():
    U = TM.underlying_groupoid(C.pair_object(Z2))
    assert (U.n_obj, U.n_arr, U.components()[1]) == (2, 4, 1)
    U = TM.underlying_groupoid(C.one_object(Z3))
    assert (U.n_obj, U.n_arr, U.components()[1]) == (1, 3, 1)
    U = TM.underlying_groupoid(C.discrete(Z3))
    assert U.is_discrete() and U.components()[1] == 3
    U.check()


@pytest.mark.parametrize("exhaustive", [False, True])
def test_groupoid_equivalence_examples(exhaustive):
    P, pt = TM.pair_groupoid(3), TM.discrete_groupoid(1)
    assert TM.groupoid_equivalence(TM.identity_functor(P), exhaustive)
    incl = TM.GroupoidFunctor(pt, P, np.array([0]), np.array([0]))
    assert TM.groupoid_equivalence(incl, exhaustive)
    collapse = TM.GroupoidFunctor(TM.one_object_groupoid(Z2), pt, np.array([0]), np.array([0, 0]))
    assert not TM.groupoid_equivalence(collapse, exhaustive)


def test_tau1_examples(phi2):
    g = TM.tau1(TM.constant_discrete_tower(3, 2))
    assert (g.n_obj, g.n_arr) == (3, 3)
    g = TM.tau1(TM.deloop(phi2))
    assert (g.n_obj, g.n_arr) == (1, 1)
    g = TM.tau1(TM.deloop(C.pair_object(Z2)))
    assert (g.n_obj, g.n_arr) == (1, 1)


def test_validate_tower_modes(phi2):
    T = TM.constant_discrete_tower(3, 2)
    assert TM.validate_tower(T, "T")["ok"]
    assert TM.validate_tower(T, "H")["failures"] == ["level 0 is not a point"]
    U = TM.UnderlyingTower(phi2.X)
    assert TM.validate_tower(U, "T")["ok"]
    rep = TM.validate_tower(U, "H")
    assert not rep["ok"] and all("Segal" in f for f in rep["failures"])
    P = TM.pair_groupoid(2)
    a2, a4 = np.arange(2), np.arange(4)
    bad = TM.TabulatedTower(2, 1, {(0,): P, (1,): P},
                            {(1, 0, (1,)): (a2, a4), (1, 1, (1,)): (a2, a4)},
                            {(1, 0, (0,)): (a2, a4)})
    assert TM.validate_tower(bad, "T")["failures"] == ["level 0 is not discrete"]


def test_deloop_examples(phi2):
    V = TM.deloop(phi2)
    assert V.n == 3 and TM.validate_tower(V, "H")["ok"]
    assert TM.validate_tower(TM.tabulate(V), "H")["ok"]
    assert TM.deloop_tau1_is_pi0(phi2, V) and TM.diag_nerve_equal(phi2)
    assert TM.deloop(C.one_object(Z2)).n == 2


def test_T_functor_examples(phi2):
    T = TM.T_functor(phi2)
    assert T.n == 1 and [g.order for g in homotopy_cat1(T)] == [1, 2]
    assert TM.tau1_equals_T(phi2)
    P = C.pair_object(Z2)
    assert C.internal_category_iso(TM.T_functor(GL.globularize(P)), P) is not None
    assert TM.tau1_equals_T(GL.globularize(P))


def test_n_equivalence_examples(phi2):
    F = TM.identity_tower_map(TM.deloop(phi2))
    assert TM.n_equivalence(F) and TM.n_equivalence_h(F)
    F = TM.entrywise_tower_map(TM.deloop(C.pair_object(Z2)), TM.deloop(C.pair_object(ONE)),
                               np.zeros(4, int))
    assert TM.n_equivalence(F) and TM.n_equivalence_h(F)
    F = TM.entrywise_tower_map(TM.deloop(C.one_object(Z2)), TM.deloop(C.one_object(ONE)),
                               np.zeros(2, int))
    assert not TM.n_equivalence(F) and not TM.n_equivalence_h(F)


def test_tau1_preserves_segal_product(phi2):
    assert TM.tau1_preserves_segal_product(TM.deloop(phi2))
    with pytest.raises(ValueError):
        TM.tau1_preserves_segal_product(TM.constant_discrete_tower(2, 2))


def test_equivalence_matches_nerve():
    for nm, f, _ in K.homs():
        A, _ = C.build_A_f(f)
        assert TM.equivalence_matches_nerve(C.identity_map(A)), nm
    pt = C.discrete(ONE)
    for G in (C.pair_object(Z2), C.one_object(Z2), C.discrete(Z3)):
        assert TM.equivalence_matches_nerve(C.catn_map(G, pt, np.zeros(G.order, int)))
