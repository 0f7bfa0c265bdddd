import numpy as np
import pytest

from semistrict import catn as C
from semistrict import corpus as K
from semistrict import fingrp as fg
from semistrict import globular as GL
from semistrict import hstruct as H
from semistrict.errors import NotSpecial
from semistrict.simplicial import Multinerve, SliceMSG, check_simplicial_identities, multinerve

Z2, Z3 = fg.cyclic_group(2), fg.cyclic_group(3)


def test_discrete_nerve_examples():
    D = GL.discrete_nerve(C.discrete_n(Z3, 2))
    assert [L.order for L in D.levels] == [3, 3, 3, 3] and not D.defects
    D = GL.discrete_nerve(C.tensor(C.pair_object(Z2), C.discrete(Z3)))
    assert [L.order for L in D.levels] == [6, 12, 24, 48]
    assert D.levels[0].is_discrete()
    check_simplicial_identities(D.simplicial_group())


def test_discrete_nerve_needs_special():
    with pytest.raises(NotSpecial):
        GL.discrete_nerve(K.running_example(2))
    with pytest.raises(NotSpecial):
        GL.globularize(K.running_example(2))


def test_globularize_is_identity_on_globular_objects():
    for nm, G in K.globular_fixtures().items():
        X, Y = GL.globularize(G).X, Multinerve(G)
        for q in range(3):
            p = (q,) * G.n
            assert X.level(p).same_elements(Y.level(p)), (nm, p)


def test_globularize_specialized_running_example():
    Sp = H.specialize(K.running_example(2)).Sp
    phi = GL.globularize(Sp)
    d = phi.to_dict()
    assert d["levels"] == {"0,0": 1, "0,1": 1, "1,0": 4, "1,1": 8}
    # the object part φ_0 is discrete (a constant simplicial group)
    assert GL.is_discrete_msg(SliceMSG(phi.X, 1, 0))
    assert not GL.is_discrete_msg(multinerve(Sp, 2))
    rep = GL.validate_weak_groupoid(phi)
    assert rep["n"] == 2 and len(rep["children"]) == 2


def test_b_preservation():
    Sp = H.specialize(K.running_example(2)).Sp
    b = GL.b_preservation_check(Sp)
    assert b.ok and b.R_equal and b.pi_equal and b.pis == [1, 2, 1]
    for nm, G in K.globular_fixtures().items():
        assert GL.b_preservation_check(G, K=G.n + 2).ok, nm


def test_globularize_map_t_naturality():
    G = K.globular_fixtures()["disc2_Z3"]
    A = GL.globularize(G)
    F = GL.globularize_map(C.identity_map(G), A, A)
    rows = A.X.level((1, 1)).elems
    assert np.array_equal(F((1, 1), rows), rows)
