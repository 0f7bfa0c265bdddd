"""Cat^n-groups as one group with n commuting operator pairs (d_i, t_i).

Directions are numbered 1..n.  In direction k the object group is Im d_k,
the source of an arrow x is d_k x, its target t_k x, identities are the
inclusion, and composition of x then y (t_k x = d_k y) is
m(x, y) = x · t_k(x)^-1 · y.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fingrp as fg
from .errors import (AxiomI, AxiomII, AxiomIII, BadDirection, CommutatorFailure,
                     NotAMorphism, OperatorNotEndo, ReflexiveGraphAxiomFailure,
                     TargetMismatch, check_feasible)
from .fingrp import FiniteGroup, GroupHom
from .vgroup import VGroup

IDX = np.int32


@dataclass(eq=False)
class CatNGroup:
    total: FiniteGroup
    d: list = field(default_factory=list)
    t: list = field(default_factory=list)
    name: str | None = None

    def __post_init__(self):
        self.d = [np.ascontiguousarray(x, dtype=IDX) for x in self.d]
        self.t = [np.ascontiguousarray(x, dtype=IDX) for x in self.t]

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def order(self) -> int:
        return self.total.order

    def __repr__(self):
        nm = f" {self.name}" if self.name else ""
        return f"<CatNGroup{nm} n={self.n} order={self.order}>"

    def dk(self, k: int) -> np.ndarray:
        return self.d[_dir(self, k)]

    def tk(self, k: int) -> np.ndarray:
        return self.t[_dir(self, k)]

    def compose(self, k: int, x, y):
        """m(x, y) = x t_k(x)^-1 y (vectorized, no composability check)."""
        G = self.total
        t = self.tk(k)
        return G.mul[G.mul[x, G.inv[t[x]]], y]

    def comp_inverse(self, k: int, z):
        """The composition inverse d_k(z) z^-1 t_k(z)."""
        G = self.total
        return G.mul[G.mul[self.dk(k)[z], G.inv[z]], self.tk(k)[z]]

    def is_discrete(self) -> bool:
        ar = np.arange(self.order)
        return all(np.array_equal(x, ar) for x in self.d + self.t)

    def is_discrete_in(self, k: int) -> bool:
        ar = np.arange(self.order)
        return np.array_equal(self.dk(k), ar) and np.array_equal(self.tk(k), ar)

    def objects_mask(self, k: int) -> np.ndarray:
        return self.dk(k) == np.arange(self.order)

    def same_as(self, other: "CatNGroup") -> bool:
        return (self.n == other.n and self.total.same_table(other.total)
                and all(np.array_equal(a, b) for a, b in zip(self.d + self.t, other.d + other.t)))


def _dir(G: CatNGroup, k: int) -> int:
    if not (1 <= k <= G.n):
        raise BadDirection(f"direction {k} not in 1..{G.n}", direction=k, n=G.n)
    return k - 1


@dataclass(eq=False)
class CatNMap:
    source: CatNGroup
    target: CatNGroup
    hom: GroupHom

    def __post_init__(self):
        if self.source.n != self.target.n:
            raise NotAMorphism("dimension mismatch")

    @property
    def map(self) -> np.ndarray:
        return self.hom.map

    def compose(self, other: "CatNMap") -> "CatNMap":
        """self ∘ other"""
        return CatNMap(other.source, self.target, self.hom.compose(other.hom))


def catn_map(source: CatNGroup, target: CatNGroup, m, check: bool = True) -> CatNMap:
    h = GroupHom(source.total, target.total, m, check=check)
    if check:
        w = map_violation(source, target, h.map)
        if w is not None:
            raise NotAMorphism(f"map does not commute with operators: {w}", witness=w)
    return CatNMap(source, target, h)


def map_violation(source: CatNGroup, target: CatNGroup, m: np.ndarray):
    if source.n != target.n:
        return "dimension mismatch"
    for i in range(source.n):
        for nm, a, b in (("d", source.d[i], target.d[i]), ("t", source.t[i], target.t[i])):
            bad = np.flatnonzero(m[a] != b[m])
            if len(bad):
                return {"operator": nm, "direction": i + 1, "element": int(bad[0])}
    return None


def identity_map(G: CatNGroup) -> CatNMap:
    return CatNMap(G, G, fg.identity_hom(G.total))


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def validate_catn(group, d, t, name: str | None = None) -> CatNGroup:
    """Validate the C^nG axioms exhaustively:
    (i) d_i t_i = t_i, t_i d_i = d_i; (ii) the four mixed commutations for
    i != j; (iii) [ker d_i, ker t_i] = 1."""
    G = group if isinstance(group, FiniteGroup) else fg.validate_group(group)
    d = [np.asarray(x) for x in d]
    t = [np.asarray(x) for x in t]
    if len(d) != len(t):
        raise OperatorNotEndo("d and t must have the same length")
    for nm, ops in (("d", d), ("t", t)):
        for i, op in enumerate(ops):
            if op.shape != (G.order,) or not np.issubdtype(op.dtype, np.integer):
                raise OperatorNotEndo(f"{nm}_{i + 1} has the wrong shape", operator=nm, direction=i + 1)
            bad = fg.hom_violation(G, G, op.astype(IDX))
            if bad is not None:
                raise OperatorNotEndo(f"{nm}_{i + 1} is not an endomorphism: {bad}",
                                      operator=nm, direction=i + 1, witness=bad)
    d = [x.astype(IDX) for x in d]
    t = [x.astype(IDX) for x in t]
    n = len(d)
    for i in range(n):
        bad = np.flatnonzero(d[i][t[i]] != t[i])
        if len(bad):
            raise AxiomI(f"d_{i + 1} t_{i + 1} != t_{i + 1}", direction=i + 1, element=int(bad[0]))
        bad = np.flatnonzero(t[i][d[i]] != d[i])
        if len(bad):
            raise AxiomI(f"t_{i + 1} d_{i + 1} != d_{i + 1}", direction=i + 1, element=int(bad[0]))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for (na, a), (nb, b) in ((("d", d[i]), ("d", d[j])), (("d", d[i]), ("t", t[j])),
                                     (("t", t[i]), ("d", d[j])), (("t", t[i]), ("t", t[j]))):
                bad = np.flatnonzero(a[b] != b[a])
                if len(bad):
                    raise AxiomII(f"{na}_{i + 1} and {nb}_{j + 1} do not commute",
                                  directions=[i + 1, j + 1], element=int(bad[0]))
    for i in range(n):
        w = fg.commutator_subgroup_trivial(G, np.flatnonzero(d[i] == 0), np.flatnonzero(t[i] == 0))
        if w is not None:
            raise AxiomIII(f"[ker d_{i + 1}, ker t_{i + 1}] != 1", direction=i + 1, witness=list(w))
    return CatNGroup(G, d, t, name=name)


def check_catn(G: CatNGroup) -> CatNGroup:
    """Re-validate an already constructed object (raises on failure)."""
    validate_catn(G.total, G.d, G.t)
    return G


# --------------------------------------------------------------------------
# restriction, re-indexing, products
# --------------------------------------------------------------------------

def restrict(G: CatNGroup, elements, drop: tuple[int, ...] = (), name=None) -> CatNGroup:
    """Sub-object on a subgroup closed under the kept operators, with the
    directions in ``drop`` removed.  The total's embedding records the
    inclusion."""
    H = fg.subgroup(G.total, elements, name=name)
    pos = np.full(G.order, -1, dtype=IDX)
    pos[H.embedding] = np.arange(H.order, dtype=IDX)
    keep = [i for i in range(G.n) if i + 1 not in drop]
    d, t = [], []
    for i in keep:
        a, b = pos[G.d[i][H.embedding]], pos[G.t[i][H.embedding]]
        if (a < 0).any() or (b < 0).any():
            raise ValueError("subgroup not closed under operators")
        d.append(a)
        t.append(b)
    return CatNGroup(H, d, t, name=name)


def drop_directions(G: CatNGroup, drop) -> CatNGroup:
    keep = [i for i in range(G.n) if i + 1 not in set(drop)]
    return CatNGroup(G.total, [G.d[i] for i in keep], [G.t[i] for i in keep], name=G.name)


def permute_directions(G: CatNGroup, order) -> CatNGroup:
    """New direction r is old direction order[r-1]."""
    return CatNGroup(G.total, [G.d[k - 1] for k in order], [G.t[k - 1] for k in order], name=G.name)


def product(A: CatNGroup, B: CatNGroup, name=None) -> CatNGroup:
    P = fg.direct_product(A.total, B.total)
    a, b = P.embedding[:, 0], P.embedding[:, 1]
    d = [A.d[i][a] * B.order + B.d[i][b] for i in range(A.n)]
    t = [A.t[i][a] * B.order + B.t[i][b] for i in range(A.n)]
    return CatNGroup(P, d, t, name=name or f"{A.name}x{B.name}")


def tensor(A: CatNGroup, B: CatNGroup, name=None) -> CatNGroup:
    """External product: directions of A followed by those of B, acting on
    the respective factor of A.total × B.total."""
    P = fg.direct_product(A.total, B.total)
    a, b = P.embedding[:, 0], P.embedding[:, 1]
    d = [A.d[i][a] * B.order + b for i in range(A.n)] + [a * B.order + B.d[i][b] for i in range(B.n)]
    t = [A.t[i][a] * B.order + b for i in range(A.n)] + [a * B.order + B.t[i][b] for i in range(B.n)]
    return CatNGroup(P, d, t, name=name or f"{A.name}(x){B.name}")


def from_group(H: FiniteGroup) -> CatNGroup:
    """A bare group as a cat^0-group."""
    return CatNGroup(H, [], [], name=H.name)


def discrete(K, name=None) -> CatNGroup:
    """Add a new last direction with d = t = id."""
    if isinstance(K, FiniteGroup):
        K = from_group(K)
    ar = np.arange(K.order, dtype=IDX)
    return CatNGroup(K.total, K.d + [ar], K.t + [ar], name=name or (f"disc({K.name})" if K.name else None))


def discrete_n(H: FiniteGroup, n: int) -> CatNGroup:
    G = from_group(H)
    for _ in range(n):
        G = discrete(G)
    G.name = f"disc{n}({H.name})" if H.name else None
    return G


def one_object(A: FiniteGroup, n: int = 1) -> CatNGroup:
    """Abelian A with all operators trivial (A as a one-object n-groupoid)."""
    z = np.zeros(A.order, dtype=IDX)
    return CatNGroup(A, [z] * n, [z] * n, name=f"one({A.name})")


def pair_object(H: FiniteGroup) -> CatNGroup:
    """H×H with d(x,y) = (x,x), t(x,y) = (y,y): the codiscrete groupoid on H."""
    P = fg.direct_product(H, H)
    a, b = P.embedding[:, 0], P.embedding[:, 1]
    return CatNGroup(P, [a * H.order + a], [b * H.order + b], name=f"pair({H.name})")


# --------------------------------------------------------------------------
# faces
# --------------------------------------------------------------------------

def nerve_tuples(G: CatNGroup, k: int, i: int) -> np.ndarray:
    """Sorted composable i-tuples (x_1..x_i), t_k x_j = d_k x_{j+1}."""
    d, t = G.dk(k), G.tk(k)
    by_src: dict[int, list[int]] = {}
    for x in range(G.order):
        by_src.setdefault(int(d[x]), []).append(x)
    rows = [[x] for x in range(G.order)]
    for _ in range(i - 1):
        check_feasible(len(rows) * max(len(v) for v in by_src.values()), "nerve tuples")
        rows = [r + [y] for r in rows for y in by_src.get(int(t[r[-1]]), ())]
    return np.array(sorted(rows), dtype=IDX).reshape(-1, i)


def face(G: CatNGroup, k: int, i: int) -> CatNGroup:
    """The cat^(n-1)-group G_i^(k): i = 0 objects (on Im d_k), i = 1 arrows
    (total with direction k removed), i >= 2 composable i-tuples, with the
    remaining operators acting entrywise."""
    _dir(G, k)
    if i < 0:
        raise BadDirection("level must be non-negative", level=i)
    if i == 0:
        return restrict(G, np.flatnonzero(G.objects_mask(k)), drop=(k,),
                        name=f"{G.name or 'G'}_0^({k})")
    if i == 1:
        out = drop_directions(G, (k,))
        out.name = f"{G.name or 'G'}_1^({k})"
        return out
    rows = nerve_tuples(G, k, i)
    V = VGroup(G.total, (i,), rows, presorted=True)
    T = V.to_group(name=f"{G.name or 'G'}_{i}^({k})")
    emb = T.embedding
    d, t = [], []
    for j in range(G.n):
        if j == k - 1:
            continue
        d.append(V.index(G.d[j][emb]).astype(IDX))
        t.append(V.index(G.t[j][emb]).astype(IDX))
    return CatNGroup(T, d, t, name=T.name)


# --------------------------------------------------------------------------
# internal categories
# --------------------------------------------------------------------------

@dataclass(eq=False)
class InternalCategoryView:
    k: int
    objects: CatNGroup
    arrows: CatNGroup
    src: GroupHom
    tgt: GroupHom
    ident: GroupHom

    def composable(self, x, y) -> np.ndarray:
        return self.tgt.map[x] == self.src.map[y]

    def compose(self, x, y):
        """m(x, y) = x (σ∂₁x)^-1 y."""
        A = self.arrows.total
        st = self.ident.map[self.tgt.map[x]]
        return A.mul[A.mul[x, A.inv[st]], y]

    def inverse(self, z):
        A = self.arrows.total
        return A.mul[A.mul[self.ident.map[self.src.map[z]], A.inv[z]], self.ident.map[self.tgt.map[z]]]

    def check(self) -> None:
        """Reflexive-graph identities, the commutator condition and the
        composition/inverse laws, exhaustively."""
        O, A = self.objects.total, self.arrows.total
        ar = np.arange(O.order)
        if not (np.array_equal(self.src.map[self.ident.map], ar)
                and np.array_equal(self.tgt.map[self.ident.map], ar)):
            raise ReflexiveGraphAxiomFailure("src∘ident or tgt∘ident is not the identity")
        for h in (self.src, self.tgt):
            bad = fg.hom_violation(A, O, h.map)
            if bad is not None:
                raise ReflexiveGraphAxiomFailure(f"structure map not a homomorphism: {bad}")
        if fg.hom_violation(O, A, self.ident.map) is not None:
            raise ReflexiveGraphAxiomFailure("identity map not a homomorphism")
        w = fg.commutator_subgroup_trivial(A, np.flatnonzero(self.src.map == 0),
                                           np.flatnonzero(self.tgt.map == 0))
        if w is not None:
            raise CommutatorFailure("[ker src, ker tgt] != 1", witness=list(w))
        z = np.arange(A.order)
        inv = self.inverse(z)
        if not (np.array_equal(self.src.map[inv], self.tgt.map)
                and np.array_equal(self.tgt.map[inv], self.src.map)
                and np.array_equal(self.compose(z, inv), self.ident.map[self.src.map])
                and np.array_equal(self.compose(inv, z), self.ident.map[self.tgt.map])):
            raise CommutatorFailure("composition inverse formula fails")


def as_internal_category(G: CatNGroup, k: int = 1) -> InternalCategoryView:
    """Direction-k reflexive graph: objects = face 0 on Im d_k, arrows = face 1."""
    obj = face(G, k, 0)
    arr = face(G, k, 1)
    emb = obj.total.embedding
    pos = np.full(G.order, -1, dtype=IDX)
    pos[emb] = np.arange(obj.order, dtype=IDX)
    src = GroupHom(arr.total, obj.total, pos[G.dk(k)], check=False)
    tgt = GroupHom(arr.total, obj.total, pos[G.tk(k)], check=False)
    ident = GroupHom(obj.total, arr.total, emb, check=False)
    return InternalCategoryView(k, obj, arr, src, tgt, ident)


def from_internal_category(view: InternalCategoryView, validate: bool = True) -> CatNGroup:
    """Reassemble a cat^n-group on the arrow total, inserting the pair
    (σ∂₀, σ∂₁) as direction view.k."""
    view.check()
    obj, arr = view.objects, view.arrows
    if obj.n != arr.n:
        raise ReflexiveGraphAxiomFailure("objects and arrows differ in dimension")
    for h in (view.src, view.tgt):
        if map_violation(arr, obj, h.map) is not None:
            raise ReflexiveGraphAxiomFailure("src/tgt do not commute with the other operators")
    if map_violation(obj, arr, view.ident.map) is not None:
        raise ReflexiveGraphAxiomFailure("identities do not commute with the other operators")
    dn = view.ident.map[view.src.map]
    tn = view.ident.map[view.tgt.map]
    k = view.k
    d = list(arr.d)
    t = list(arr.t)
    d.insert(k - 1, dn)
    t.insert(k - 1, tn)
    out = CatNGroup(arr.total, d, t)
    if validate:
        check_catn(out)
    return out


def internal_category_iso(G: CatNGroup, H: CatNGroup) -> CatNMap | None:
    """An isomorphism of cat^n-groups G → H (backtracking on totals,
    filtered by operator compatibility), or None."""
    if G.n != H.n or G.order != H.order:
        return None
    found = None

    def ok(s):
        return map_violation(G, H, s.map) is None

    # search among total isomorphisms by treating H as the quotient of itself
    gens = list(G.total.generators)
    cands = [[h for h in range(H.order) if H.total.element_orders[h] == G.total.element_orders[g]]
             for g in gens]
    chosen: list[int] = []

    def rec(i):
        nonlocal found
        if i == len(gens):
            val = fg.extend_from_generators(G.total, gens, chosen, H.total)
            if val is None or (val < 0).any() or len(np.unique(val)) != G.order:
                return False
            s = GroupHom(G.total, H.total, val, check=False)
            if ok(s):
                found = CatNMap(G, H, s)
                return True
            return False
        for c in cands[i]:
            chosen.append(c)
            val = fg.extend_from_generators(G.total, gens[: i + 1], chosen, H.total)
            if val is not None:
                dom = val >= 0
                if len(np.unique(val[dom])) == int(dom.sum()) and rec(i + 1):
                    return True
            chosen.pop()
        return False

    if not gens:
        return CatNMap(G, H, fg.trivial_hom(G.total, H.total))
    rec(0)
    return found


# --------------------------------------------------------------------------
# A_f and the kernel pair
# --------------------------------------------------------------------------

def _as_catn_map(f) -> CatNMap:
    if isinstance(f, CatNMap):
        return f
    if isinstance(f, GroupHom):
        return CatNMap(from_group(f.source), from_group(f.target), f)
    raise TypeError("expected CatNMap or GroupHom")


def build_A_f(f) -> tuple[CatNGroup, InternalCategoryView]:
    """Arrows ker f ⋊ A (A acting by conjugation), ∂₀(x,y) = y,
    ∂₁(x,y) = xy, σ(y) = (1,y); the new direction is direction 1."""
    f = _as_catn_map(f)
    A = f.source
    K = fg.kernel(f.hom)
    Ae = A.total
    kpos = np.full(Ae.order, -1, dtype=IDX)
    kpos[K.embedding] = np.arange(K.order, dtype=IDX)
    act = np.empty((Ae.order, K.order), dtype=IDX)
    for y in range(Ae.order):
        act[y] = kpos[Ae.mul[Ae.mul[y, K.embedding], Ae.inv[y]]]
    S = fg.semidirect_product(K, Ae, act, name=f"ker⋊{A.name or 'A'}")
    xi, yi = S.embedding[:, 0], S.embedding[:, 1]
    x = K.embedding[xi]
    src = GroupHom(S, Ae, yi, check=False)
    tgt = GroupHom(S, Ae, Ae.mul[x, yi], check=False)
    ident = GroupHom(Ae, S, np.arange(Ae.order, dtype=IDX), check=False)  # (1,y) has index y
    # remaining operators act componentwise
    d = [kpos[A.d[i][x]] * Ae.order + A.d[i][yi] for i in range(A.n)]
    t = [kpos[A.t[i][x]] * Ae.order + A.t[i][yi] for i in range(A.n)]
    arrows = CatNGroup(S, d, t)
    view = InternalCategoryView(1, A, arrows, src, tgt, ident)
    return from_internal_category(view), view


def build_kernel_pair_object(f) -> tuple[CatNGroup, CatNMap]:
    """A ×_f A ⇉ A with ∂₀(x,y) = x, ∂₁(x,y) = y, σ(x) = (x,x), together with
    the isomorphism α(x,y) = (y x^-1, x) onto A_f (checked pointwise)."""
    f = _as_catn_map(f)
    A = f.source
    Ae = A.total
    P, p1, p2 = fg.fibre_product(f.hom, f.hom, name=f"{A.name or 'A'}x_fA")
    a, b = P.embedding[:, 0], P.embedding[:, 1]
    code = {(int(u), int(v)): i for i, (u, v) in enumerate(P.embedding)}
    ident = GroupHom(Ae, P, np.array([code[(x, x)] for x in range(Ae.order)]), check=False)
    d = [np.array([code[(int(A.d[i][u]), int(A.d[i][v]))] for u, v in zip(a, b)]) for i in range(A.n)]
    t = [np.array([code[(int(A.t[i][u]), int(A.t[i][v]))] for u, v in zip(a, b)]) for i in range(A.n)]
    arrows = CatNGroup(P, d, t)
    view = InternalCategoryView(1, A, arrows, p1, p2, ident)
    Af_pair = from_internal_category(view)
    Af, _ = build_A_f(f)
    # α(x,y) = (y x^-1, x): index in A_f is kerpos(y x^-1)*|A| + x
    K = fg.kernel(f.hom)
    kpos = np.full(Ae.order, -1, dtype=IDX)
    kpos[K.embedding] = np.arange(K.order, dtype=IDX)
    alpha = kpos[Ae.mul[b, Ae.inv[a]]] * Ae.order + a
    m = catn_map(Af_pair, Af, alpha)
    if not m.hom.is_isomorphism():
        raise AssertionError("α is not bijective")
    return Af_pair, m


# --------------------------------------------------------------------------
# fibre products
# --------------------------------------------------------------------------

def catn_fibre_product(f: CatNMap, g: CatNMap):
    """Pullback of cat^n-groups; operators act componentwise."""
    if not (f.target is g.target or f.target.same_as(g.target)):
        raise TargetMismatch("maps must share their target")
    A, B = f.source, g.source
    P, p1, p2 = fg.fibre_product(f.hom, g.hom)
    a, b = P.embedding[:, 0], P.embedding[:, 1]
    code = np.full(A.order * B.order, -1, dtype=np.int64)
    code[a.astype(np.int64) * B.order + b] = np.arange(P.order)
    d = [code[A.d[i][a].astype(np.int64) * B.order + B.d[i][b]] for i in range(A.n)]
    t = [code[A.t[i][a].astype(np.int64) * B.order + B.t[i][b]] for i in range(A.n)]
    Pc = check_catn(CatNGroup(P, d, t, name="pullback"))
    return Pc, CatNMap(Pc, A, p1), CatNMap(Pc, B, p2)


def image_object(f: CatNMap) -> CatNGroup:
    return restrict(f.target, f.hom.image_elements())
