"""The full pipeline: Cat^n(Gp) → Sp → D_n → V_n.

D_n makes the special object globular (its object levels become discrete),
without changing the classifying space.  V_n deloops the result into a
Tamsamani (n+1)-tower with a single object, whose τ_1 recovers π_0 of the
classifying space.  Each step is checked, not assumed.
"""

import os
import sys

from semistrict import corpus as K
from semistrict import globular as GL
from semistrict import hstruct as H
from semistrict import tamsamani as TM
from semistrict.cli import main
from semistrict.simplicial import homotopy_cat1

Sp = H.specialize(K.running_example(2)).Sp

phi = GL.globularize(Sp)
print("D_2 levels:", phi.to_dict()["levels"])
b = GL.b_preservation_check(Sp)
print("classifying space preserved:", b.ok, " π orders", b.pis)

T = TM.deloop(phi)
print("V_2 is an H-mode 3-tower:", TM.validate_tower(T, "H")["ok"])
print("τ_1 V_2 is a point:", TM.tau1(T).n_obj == 1)
print("diag N V φ = diag N φ:", TM.diag_nerve_equal(phi))

Tc = TM.T_functor(phi)
print("T φ as a cat^1-group: π =", [g.order for g in homotopy_cat1(Tc)],
      " τ_1 U φ = U T φ:", TM.tau1_equals_T(phi))

# the same, end to end, from the command line
print()
main(["pipeline", os.path.join(os.path.dirname(__file__), "..", "corpus", "n2", "running2.json")],
     stdout=sys.stdout)
