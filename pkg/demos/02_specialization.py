"""Replacing a cat^n-group by a special one.

Special means: the object faces that should be "discrete up to homotopy"
are strongly contractible — they carry a retraction onto a discrete object
that is compatible with everything.  The running example fails this; the
specialization functor fixes it through a cofibrant replacement built from
décalage covers, and the comparison map is a weak equivalence.
"""

from semistrict import catn as C
from semistrict import corpus as K
from semistrict import hstruct as H
from semistrict.simplicial import is_weak_equivalence

G = K.running_example(2)
r = H.is_special(G)
print(f"running example: order {G.order}, special: {r.ok}, failing faces: {r.failed()}")

# the object face has π_1 ≠ 1, so it has no discretization
F = C.face(G, 1, 0)
print("object face strongly contractible:", H.is_strongly_contractible(F) is not None)

# a décalage cover is strongly contractible and surjects levelwise
cv = H.builtin_cover(F)
print(f"cover: order {cv.H0.order}, kind {cv.kind}, surjective {cv.surjective}")

res = H.specialize(G)
print("Sp G:", res.to_dict())
print("Sp G special:", H.is_special(res.Sp).ok)
w = is_weak_equivalence(res.alpha)
print("α: Sp G → G weak equivalence:", w.ok, " π orders", [g.order for g in w.source_pi])
