"""Cat^1-groups, their internal categories and homotopy groups.

A cat^1-group is a group with two idempotent endomorphisms d, t satisfying
d t = t, t d = d and [ker d, ker t] = 1.  It is the same thing as a category
internal to groups, and its nerve is a simplicial group with π_0 and π_1.
"""

import numpy as np

from semistrict import catn as C
from semistrict import fingrp as fg
from semistrict.errors import AxiomIII
from semistrict.simplicial import homotopy_cat1, moore_homotopy, diagonal

Z2, Z3 = fg.cyclic_group(2), fg.cyclic_group(3)

# three basic shapes: discrete (only identities), one object, and the pair
# groupoid (codiscrete: exactly one arrow between any two objects)
for name, G in [("disc(Z3)", C.discrete(Z3)), ("one(Z3)", C.one_object(Z3)),
                ("pair(Z3)", C.pair_object(Z3))]:
    pi0, pi1 = homotopy_cat1(G)
    v = C.as_internal_category(G, 1)
    print(f"{name:10s} total {G.order:2d}  objects {v.objects.order}  arrows {v.arrows.order}"
          f"  π0 {pi0.order}  π1 {pi1.order}")

# the closed forms agree with the Moore complex of the nerve's diagonal
G = C.one_object(Z3)
print("Moore complex of one(Z3):", [g.order for g in moore_homotopy(diagonal(G), 2)])

# the interchange axiom has teeth: S3 with d = t = trivial fails it
S3 = fg.symmetric_group(3)
try:
    C.validate_catn(S3, [np.zeros(6, int)], [np.zeros(6, int)])
except AxiomIII as exc:
    print("S3 with trivial operators:", exc, exc.info)

# cat^2-groups: tensoring adds a direction
G = C.tensor(C.one_object(Z2), C.discrete(fg.trivial_group()))
print("one(Z2) ⊗ disc(1): n =", G.n, " π =", [g.order for g in moore_homotopy(diagonal(G), 2)])
