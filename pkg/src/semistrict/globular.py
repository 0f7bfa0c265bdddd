"""The discrete nerve, globularization D_n, the flattening j_n and the
B-preservation check.

D_n G is realized inside the multinerve of a special G.  For each
j = 0..n-2 we choose a subgroup W^(j) of V^(j) = ∩_{l>j} Im d_l that is a
complement of the relation subgroup N^(j) (generated by t_i(y) d_i(y)^-1 for
the direction-i cells y with i >= j+2), is closed under d_l, t_l for l <= j,
and contains W^(j-1).  W^(j) is the image of a section of V^(j) → V^(j)/N^(j),
so it represents the discrete replacement used by the discrete nerve in
direction j+1, and ρ^(j) = proj_W ∘ d_{j+1}..d_n is the corresponding d t.

Level p of j_n D_n G: if j = first index in 1..n-1 with p_j = 0 exists, the
entries lie in W^(j-1), otherwise in G.  Faces lowering p_a from 1 to 0
with a < j (a <= n-1) are followed by ρ^(a-1) entrywise; every other
operator is the plain nerve operator (degeneracies are the inclusions σ t).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fingrp as fg
from .catn import CatNGroup, CatNMap, discrete_n, face
from .errors import (HypothesisViolated, NotSpecial, PostconditionFailed,
                     SegalWeakEquivalenceFailed, SimplicialIdentityFailure)
from .fingrp import FiniteGroup, GroupHom
from .hstruct import DiscretizationWitness, discretization, is_special, is_strongly_contractible
from .simplicial import (Multinerve, R_flatten, SliceMSG, TabulatedSimplicialGroup,
                         TruncatedMultiSimplicialGroup, check_msg_identities,
                         check_simplicial_identities, diagonal, homotopy_data, homotopy_data_positive,
                         is_weak_equivalence, materialized_equal, pi_lists_isomorphic, segal_map)

IDX = np.int32


# --------------------------------------------------------------------------
# the discrete nerve (one step, abstract discrete level)
# --------------------------------------------------------------------------

@dataclass(eq=False)
class DiscreteNerve:
    """ds N G in direction 1, levels 0..K as cat^(n-1)-groups with face and
    degeneracy homomorphisms between their totals."""
    G: CatNGroup
    witness: DiscretizationWitness
    levels: list                   # CatNGroup per level
    faces: dict                    # (j, k) -> index array level k -> k-1
    degens: dict                   # (j, k) -> index array level k -> k+1
    defects: list = field(default_factory=list)

    def simplicial_group(self) -> TabulatedSimplicialGroup:
        return TabulatedSimplicialGroup([L.total for L in self.levels], self.faces, self.degens)


def _nerve_level_index(G: CatNGroup, k: int):
    """Level k >= 1 of the direction-1 nerve as a cat^(n-1)-group, plus a
    row lookup (rows are k-tuples of total indices)."""
    L = face(G, 1, k)
    rows = L.total.embedding.reshape(L.order, -1) if k >= 2 else np.arange(G.order)[:, None]
    lookup = {tuple(int(v) for v in r): i for i, r in enumerate(rows)}
    return L, rows, lookup


def discrete_nerve(G: CatNGroup, witness: DiscretizationWitness | None = None,
                   K: int = 3, check_special: bool = True) -> DiscreteNerve:
    """Level 0 the discrete replacement of G_0^(1), level k >= 1 the nerve
    level G_k; the bottom faces are d ∂_0, d ∂_1 and the bottom degeneracy
    σ_0 t.  Simplicial identities are verified; every level is checked
    special (levels of a cat^1-valued nerve need nothing)."""
    if check_special and not is_special(G).ok:
        raise NotSpecial("discrete nerve needs a special cat^n-group")
    F0 = face(G, 1, 0)
    w = witness or discretization(F0)
    if w is None:
        raise NotSpecial("object face has no discretization")
    T = G.total
    levels = [discrete_n(w.P, G.n - 1)]
    rows, looks = [None], [None]
    for k in range(1, K + 1):
        L, r, lk = _nerve_level_index(G, k)
        levels.append(L)
        rows.append(r)
        looks.append(lk)
    emb0 = F0.total.embedding
    pos0 = np.full(G.order, -1)
    pos0[emb0] = np.arange(len(emb0))
    faces, degens = {}, {}
    d1, t1 = G.dk(1), G.tk(1)
    # level 1 -> 0: d ∂_0 (target), d ∂_1 (source); level 0 -> 1: σ_0 t
    faces[(0, 1)] = w.d.map[pos0[t1]]
    faces[(1, 1)] = w.d.map[pos0[d1]]
    degens[(0, 0)] = emb0[w.t.map].astype(IDX)
    for k in range(2, K + 1):
        r = rows[k]
        for j in range(k + 1):
            if j == 0:
                out = r[:, 1:]
            elif j == k:
                out = r[:, :-1]
            else:
                comp = T.mul[T.mul[r[:, j - 1], T.inv[t1[r[:, j - 1]]]], r[:, j]]
                out = np.concatenate([r[:, :j - 1], comp[:, None], r[:, j + 1:]], axis=1)
            faces[(j, k)] = _lookup(looks[k - 1], out)
    for k in range(1, K):
        r = rows[k]
        for j in range(k + 1):
            ident = d1[r[:, j]] if j < k else t1[r[:, -1]]
            out = np.concatenate([r[:, :j], ident[:, None], r[:, j:]], axis=1)
            degens[(j, k)] = _lookup(looks[k + 1], out)
    dn = DiscreteNerve(G, w, levels, faces, degens)
    check_simplicial_identities(dn.simplicial_group(), K, defects=dn.defects)
    squeezed = not np.array_equal(emb0[w.t.map[w.d.map]], emb0)     # t d != id
    _vet_defects(dn.defects, squeezed, "discrete nerve")
    if check_special and G.n - 1 >= 2:
        for k, L in enumerate(levels):
            if not is_special(L).ok:
                raise NotSpecial(f"level {k} of the discrete nerve is not special")
    return dn


# Replacing level 0 by G_0^d breaks exactly two identities between levels 1
# and 2 whenever t d is not the identity on objects:
#   d_2 s_0 x = σ_0 ∂_1 x   but   s_0 d_1 x = σ_0 t d ∂_1 x,
#   d_0 s_1 x = σ_0 ∂_0 x   but   s_0 d_0 x = σ_0 t d ∂_0 x.
# Faces (hence Moore complexes, homotopy groups and Segal maps) and the
# operators among levels >= 1 are unaffected.
SQUEEZE_DEFECTS = frozenset({"d_2 s_0 at level 1", "d_0 s_1 at level 1"})


def _vet_defects(defects, squeezed: bool, what: str) -> None:
    bad = [d for d in defects if (d[-1] if isinstance(d, tuple) else d) not in SQUEEZE_DEFECTS]
    if bad:
        raise SimplicialIdentityFailure(f"{what}: {bad[0]}")
    if defects and not squeezed:
        raise SimplicialIdentityFailure(f"{what}: identities fail although t d = id")


def _lookup(table: dict, rows: np.ndarray) -> np.ndarray:
    return np.array([table[tuple(int(v) for v in r)] for r in rows], dtype=IDX)


# --------------------------------------------------------------------------
# coherent sections
# --------------------------------------------------------------------------

@dataclass(eq=False)
class GlobularData:
    G: CatNGroup
    V: list          # V^(j) elements
    N: list          # N^(j) elements
    W: list          # W^(j) elements
    rho: list        # ρ^(j) endomorphism arrays of the total


def _fixed_mask(G: CatNGroup, dirs) -> np.ndarray:
    ar = np.arange(G.order)
    m = np.ones(G.order, dtype=bool)
    for l in dirs:
        m &= G.dk(l) == ar
    return m


def _relations(G: CatNGroup, j: int) -> np.ndarray:
    T = G.total
    rels = [np.array([0])]
    for i in range(j + 2, G.n + 1):
        y = np.flatnonzero(_fixed_mask(G, [l for l in range(j + 1, G.n + 1) if l != i]))
        rels.append(T.mul[G.tk(i)[y], T.inv[G.dk(i)[y]]])
    return np.unique(np.concatenate(rels))


def _level_complement_ok(G: CatNGroup, j: int, Wmask: np.ndarray, rho: np.ndarray, top: int) -> bool:
    """At the nerve levels (p_1..p_j) ≤ top of the directions ≤ j, the
    tuples of W^(j)-entries form a complement of the level relation group
    and ρ^(j) applied entrywise is the projection onto them."""
    if j == 0:
        return True
    n = G.n
    X = Multinerve(G, top)
    Y = Multinerve(G, top, support=np.flatnonzero(Wmask))
    for head in itertools.product(range(top + 1), repeat=j):
        p = head + (0,) * (n - j)
        V = X.level(p)
        Wl = Y.level(p)
        rels = [V.elems[:1]]
        for i in range(j + 2, n + 1):
            q = list(p)
            q[i - 1] = 1
            cells = X.level(tuple(q))
            tgt = X.face(i, 0, tuple(q), cells.elems)
            src = X.face(i, 1, tuple(q), cells.elems)
            rels.append(V.mul(tgt, V.inv(src)))
        Vg = V.to_group()
        idx = V.index(np.concatenate(rels))
        Nl = fg.normal_closure(Vg, idx)
        if Wl.order * len(Nl) != V.order:
            return False
        img = rho[V.elems]
        if not Wl.contains(img).all() or not np.array_equal(rho[Wl.elems], Wl.elems):
            return False
        if np.any(rho[V.elems[Nl]] != 0):
            return False
    return True


def globular_data(G: CatNGroup, top: int = 2) -> GlobularData:
    """Choose the nested coherent sections W^(0) ⊆ .. ⊆ W^(n-2)."""
    n = G.n
    T = G.total
    Vs, Ns, Ws, rhos = [], [], [], []
    prevW = np.array([0])
    for j in range(0, n - 1):
        vmask = _fixed_mask(G, range(j + 1, n + 1))
        Vsub = fg.subgroup(T, np.flatnonzero(vmask), name=f"V{j}")
        pos = np.full(G.order, -1)
        pos[Vsub.embedding] = np.arange(Vsub.order)
        Nloc = fg.normal_closure(Vsub, pos[_relations(G, j)])
        Q, q = fg.quotient(Vsub, Nloc)
        D = np.arange(G.order)
        for l in range(j + 1, n + 1):
            D = G.dk(l)[D]
        prev_local = pos[prevW]
        if len(np.unique(q.map[prev_local])) != len(prev_local):
            raise PostconditionFailed(f"W^({j - 1}) meets the relations of stage {j}")
        forced = {int(q.map[v]): int(v) for v in prev_local}

        def candidates(g, forced=forced, Vsub=Vsub):
            if g in forced:
                return [forced[g]]
            return range(Vsub.order)

        def accept(s, j=j, Vsub=Vsub, forced=forced, q=q, pos=pos, D=D):
            Wel = Vsub.embedding[s.map]
            if not all(s.map[g] == v for g, v in forced.items()):
                return False
            m = np.zeros(G.order, dtype=bool)
            m[Wel] = True
            for l in range(1, j + 1):
                if not (m[G.dk(l)[Wel]].all() and m[G.tk(l)[Wel]].all()):
                    return False
            rho = Vsub.embedding[s.map[q.map[pos[D]]]]
            return _level_complement_ok(G, j, m, rho, top)

        s = fg.find_homomorphic_section(q, accept=accept, candidates=candidates)
        if s is None:
            raise PostconditionFailed(f"no coherent section at stage {j}")
        Wel = np.sort(Vsub.embedding[s.map])
        rho = Vsub.embedding[s.map[q.map[pos[D]]]].astype(IDX)
        Vs.append(Vsub.embedding.copy())
        Ns.append(Vsub.embedding[Nloc])
        Ws.append(Wel)
        rhos.append(rho)
        prevW = Wel
    return GlobularData(G, Vs, Ns, Ws, rhos)


# --------------------------------------------------------------------------
# j_n D_n G as a multi-simplicial group
# --------------------------------------------------------------------------

class GlobularMSG(Multinerve):
    def __init__(self, data: GlobularData, K: int | None = None):
        super().__init__(data.G, K)
        self.data = data
        self._masks = []
        for W in data.W:
            m = np.zeros(data.G.order, dtype=bool)
            m[W] = True
            self._masks.append(m)

    def j_of(self, p) -> int:
        """First direction in 1..n-1 with p_j = 0, or n if none."""
        for a in range(1, self.n):
            if p[a - 1] == 0:
                return a
        return self.n

    def _support(self, p):
        j = self.j_of(p)
        return self.support if j == self.n else self._masks[j - 1]

    def face(self, a, j, p, X):
        p = self._norm(p)
        out = super().face(a, j, p, X)
        if p[a - 1] == 1 and a < self.j_of(p):
            out = self.data.rho[a - 1][out].astype(out.dtype)
        return out


# --------------------------------------------------------------------------
# internal weak n-groupoids
# --------------------------------------------------------------------------

def is_discrete_msg(X: TruncatedMultiSimplicialGroup, top: int = 2) -> bool:
    """Constant: every level ≤ top is the image of level 0 under iterated
    degeneracies, bijectively."""
    base = X.level((0,) * X.n)
    for p in itertools.product(range(top + 1), repeat=X.n):
        rows = base.elems
        cur = [0] * X.n
        for a in range(1, X.n + 1):
            for _ in range(p[a - 1]):
                rows = X.degen(a, 0, tuple(cur), rows)
                cur[a - 1] += 1
        L = X.level(p)
        idx = L.find(rows)
        if (idx < 0).any() or L.order != base.order or len(np.unique(idx)) != L.order:
            return False
    return True


@dataclass(eq=False)
class InternalWeakNGroupoid:
    """An object of the n-th level: the multi-simplicial group X with
    φ_k = X(k, -).  For n = 1, X is the nerve of a groupoid in groups."""
    X: TruncatedMultiSimplicialGroup
    n: int
    report: dict = field(default_factory=dict)

    def phi(self, k: int):
        if self.n == 1:
            return self.X.level((k,))
        return InternalWeakNGroupoid(SliceMSG(self.X, 1, k), self.n - 1)

    def as_catn(self) -> CatNGroup:
        """For n = 1: total = level 1, d = s_0 d_1, t = s_0 d_0."""
        if self.n != 1:
            raise ValueError("only level-1 objects are cat^1-groups")
        X = self.X
        L1 = X.level((1,))
        H = L1.to_group(name="D1")
        s0 = lambda rows: X.degen(1, 0, (0,), rows)
        d = L1.index(s0(X.face(1, 1, (1,), L1.elems)))
        t = L1.index(s0(X.face(1, 0, (1,), L1.elems)))
        return CatNGroup(H, [d.astype(IDX)], [t.astype(IDX)], name="D1")

    def to_dict(self, top: int = 1) -> dict:
        out = {"n": self.n,
               "levels": {",".join(map(str, p)): self.X.level(p).order
                          for p in itertools.product(range(top + 1), repeat=self.X.n)}}
        if self.report:
            out["validation"] = self.report
        return out


def validate_weak_groupoid(phi: InternalWeakNGroupoid, segal_k=(2, 3), top: int = 2) -> dict:
    """φ_0 discrete and Segal maps φ_k → φ_1 ×_{φ_0} .. ×_{φ_0} φ_1 weak
    equivalences, recursively on φ_k for k = 0..top.  Raises
    SegalWeakEquivalenceFailed."""
    X, n = phi.X, phi.n
    report = {"n": n, "segal": [], "children": []}
    if n == 1:
        # groupoid nerve: the Segal maps are isomorphisms
        from .simplicial import segal_check
        for k in segal_k:
            if k <= X.K and not segal_check(X, 1, k, rest=[()]).ok:
                raise SegalWeakEquivalenceFailed(f"level-1 object is not a groupoid nerve (k={k})")
            report["segal"].append(k)
        return report
    if not is_discrete_msg(SliceMSG(X, 1, 0), top):
        raise SegalWeakEquivalenceFailed("φ_0 is not discrete")
    for k in segal_k:
        if k > X.K:
            continue
        eta = segal_map(X, 1, k)
        we = is_weak_equivalence(eta, max_q=n - 1, positive=True)
        if not we.ok:
            raise SegalWeakEquivalenceFailed(f"Segal map η_{k} fails on π_{we.failed_q}", k=k)
        report["segal"].append(k)
    for k in range(1, top + 1):
        report["children"].append(validate_weak_groupoid(phi.phi(k), segal_k, top))
    return report


def globularize(G: CatNGroup, K: int | None = None, validate: bool = True,
                segal_k=(2, 3), data: GlobularData | None = None) -> InternalWeakNGroupoid:
    """D_n G for a special G, realized as a multi-simplicial group and
    validated as an internal weak n-groupoid."""
    if G.n >= 2 and not is_special(G).ok:
        raise NotSpecial("globularize needs a special cat^n-group")
    K = G.n + 1 if K is None else K
    if G.n == 1:
        return InternalWeakNGroupoid(Multinerve(G, K), 1)
    data = data or globular_data(G)
    X = GlobularMSG(data, K)
    phi = InternalWeakNGroupoid(X, G.n)
    if validate:
        defects = []
        check_msg_identities(X, top=2, defects=defects)
        squeezed = any(not np.array_equal(r[Vj], Vj) for r, Vj in zip(data.rho, data.V))
        _vet_defects(defects, squeezed, "j_n D_n G")
        phi.report = validate_weak_groupoid(phi, segal_k)
        phi.report["identity_defects"] = sorted({f"direction {a}: {w}" for a, _, w in defects})
    return phi


def flatten_jn(phi: InternalWeakNGroupoid) -> TruncatedMultiSimplicialGroup:
    """j_n: the underlying n-fold simplicial group."""
    return phi.X


def globularize_map(f: CatNMap, A: InternalWeakNGroupoid, B: InternalWeakNGroupoid):
    """D_n f, defined when f carries the chosen sections into each other and
    commutes with the retractions (the t-naturality square); entrywise."""
    from .simplicial import MSGMap
    da, db = A.X.data, B.X.data
    m = f.hom.map
    for Wa, Wb, ra, rb in zip(da.W, db.W, da.rho, db.rho):
        if not np.isin(m[Wa], Wb).all() or not np.array_equal(m[ra], rb[m]):
            raise HypothesisViolated("f does not commute with the chosen sections")
    return MSGMap(A.X, B.X, lambda p, rows: m[rows].astype(rows.dtype))


# --------------------------------------------------------------------------
# B preservation
# --------------------------------------------------------------------------

@dataclass
class BPreservation:
    ok: bool
    R_equal: bool
    materialized_equal: bool | None
    pi_equal: bool              # positive-level homotopy of both diagonals
    pis: list
    raw_pi_equal: bool          # Moore homotopy of the raw diagonals (informational)


def b_preservation_check(G: CatNGroup, phi: InternalWeakNGroupoid | None = None,
                         K: int = 4) -> BPreservation:
    """R diag j_n D_n G = R diag N G (compared literally on generating data,
    and on the explicit canonical form when small) and π_q equality of the
    diagonals for q ≤ n."""
    phi = phi or globularize(G, K=max(K, G.n + 1))
    X = flatten_jn(phi)
    Y = Multinerve(G, X.K)
    Ra, Rb = R_flatten(X, K), R_flatten(Y, K)
    req = Ra == Rb
    meq = materialized_equal(Ra.materialize(), Rb.materialize())
    qmax = min(G.n, X.K - 1)
    pa = homotopy_data_positive(X, qmax).pis
    pb = homotopy_data(diagonal(Y), qmax).pis
    peq = pi_lists_isomorphic(pa, pb)
    raw = pi_lists_isomorphic(homotopy_data(diagonal(X), qmax).pis, pb)
    ok = bool(req and peq and meq is not False)
    return BPreservation(ok, bool(req), meq, peq, [q.order for q in pa], raw)
