"""Strong contractibility, special and i-special cat^n-groups, covers, the
cofibrant replacement C_i and the specialization Sp = C_1 .. C_{n-1}.

The discrete replacement of a cat^n-group G is P = V / N where
V = ∩ Im d_i (level (0,..,0) of the multinerve) and N is the normal closure of
{t_k(y) d_k(y)^-1} over the cells y of every direction k.  The projection is
d(x) = q(d_1 .. d_n x) and the section is any homomorphic section of q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fingrp as fg
from .catn import (CatNGroup, CatNMap, catn_map, check_catn, discrete_n, drop_directions, face,
                   map_violation)
from .errors import (CoverVerificationFailed, NotAMorphism, PostconditionFailed,
                     StageSpecialityFailed, check_feasible)
from .fingrp import FiniteGroup, GroupHom
from .simplicial import Multinerve, homotopy_data, is_weak_equivalence, diagonal

IDX = np.int32


def catn_key(G: CatNGroup) -> tuple:
    return (G.total.key,) + tuple(x.tobytes() for x in G.d + G.t)


# --------------------------------------------------------------------------
# discretization
# --------------------------------------------------------------------------

@dataclass(eq=False)
class DiscretizationWitness:
    subject: CatNGroup
    P: FiniteGroup
    V: np.ndarray               # elements of level (0,..,0)
    N: np.ndarray               # relation subgroup (elements of V)
    d: GroupHom                 # total -> P
    t: GroupHom                 # P -> total
    q: GroupHom                 # V (as subgroup) -> P

    @property
    def target(self) -> CatNGroup:
        return discrete_n(self.P, self.subject.n)

    def d_map(self) -> CatNMap:
        return CatNMap(self.subject, self.target, self.d)

    def t_map(self) -> CatNMap:
        return CatNMap(self.target, self.subject, self.t)

    def to_dict(self) -> dict:
        return {"n": self.subject.n, "order": self.subject.order, "P_order": self.P.order,
                "section": [int(x) for x in self.t.map]}


def total_source(G: CatNGroup) -> np.ndarray:
    """D = d_1 .. d_n as an endomorphism array."""
    D = np.arange(G.order, dtype=IDX)
    for d in G.d:
        D = d[D]
    return D


def relation_elements(G: CatNGroup, directions=None) -> np.ndarray:
    """{t_k(y) d_k(y)^-1 : y a direction-k cell} for the given directions."""
    T = G.total
    ar = np.arange(G.order)
    directions = range(1, G.n + 1) if directions is None else directions
    rels = [np.array([0])]
    for k in directions:
        cell = np.ones(G.order, dtype=bool)
        for i in range(1, G.n + 1):
            if i != k:
                cell &= G.dk(i) == ar
        y = np.flatnonzero(cell)
        rels.append(T.mul[G.tk(k)[y], T.inv[G.dk(k)[y]]])
    return np.unique(np.concatenate(rels))


def discrete_replacement(G: CatNGroup):
    """(V, N, P, q) without the section or any homotopy check."""
    T = G.total
    ar = np.arange(G.order)
    vmask = np.ones(G.order, dtype=bool)
    for d in G.d:
        vmask &= d == ar
    Vsub = fg.subgroup(T, np.flatnonzero(vmask), name="V")
    pos = np.full(G.order, -1)
    pos[Vsub.embedding] = np.arange(Vsub.order)
    rel = pos[relation_elements(G)]
    if (rel < 0).any():
        raise AssertionError("relations outside level (0,..,0)")
    Nloc = fg.normal_closure(Vsub, rel)
    P, q = fg.quotient(Vsub, Nloc, name="P")
    return Vsub, Vsub.embedding[Nloc], P, q


def discretization(G: CatNGroup, check: bool = True) -> DiscretizationWitness | None:
    """The discrete replacement with projection and a homomorphic section,
    or None if no section exists or the projection is not a weak
    equivalence (π_0 of the diagonal must be P and π_1..π_n trivial)."""
    Vsub, N, P, q = discrete_replacement(G)
    s = fg.find_homomorphic_section(q)
    if s is None:
        return None
    D = total_source(G)
    pos = np.full(G.order, -1)
    pos[Vsub.embedding] = np.arange(Vsub.order)
    dmap = GroupHom(G.total, P, q.map[pos[D]], check=False)
    tmap = GroupHom(P, G.total, Vsub.embedding[s.map], check=False)
    w = DiscretizationWitness(G, P, Vsub.embedding.copy(), N, dmap, tmap, q)
    if not np.array_equal(dmap.map[tmap.map], np.arange(P.order)):
        raise AssertionError("d t != id")
    if check and not projection_is_weak_equivalence(w):
        return None
    return w


def projection_is_weak_equivalence(w: DiscretizationWitness) -> bool:
    G = w.subject
    if G.is_discrete():
        return True
    h = homotopy_data(diagonal(Multinerve(G, G.n + 1)), G.n)
    if any(p.order != 1 for p in h.pis[1:]):
        return False
    # π_0 = V / B_0; the projection induces π_0 → P, an iso iff B_0 = N
    B0 = np.sort(h.B[0].elems[:, 0].astype(np.int64))
    return np.array_equal(B0, np.sort(w.N.astype(np.int64)))


# --------------------------------------------------------------------------
# strong contractibility
# --------------------------------------------------------------------------

@dataclass(eq=False)
class SCCertificate:
    n: int
    order: int
    witness: DiscretizationWitness
    discrete: bool = False
    faces: dict = field(default_factory=dict)     # (k, i) -> SCCertificate

    def to_dict(self) -> dict:
        return {"n": self.n, "order": self.order, "discrete": self.discrete,
                "P_order": self.witness.P.order,
                "faces": {f"{k},{i}": c.to_dict() for (k, i), c in sorted(self.faces.items())}}


_SC_MEMO: dict = {}


def is_strongly_contractible(G: CatNGroup) -> SCCertificate | None:
    """Recursive certificate: a discretization witness for G and, for n >= 2,
    certificates for every face G_0^(k), G_1^(k).  Discrete objects are
    leaves with the identity witness.  Memoized on the object."""
    key = catn_key(G)
    if key in _SC_MEMO:
        return _SC_MEMO[key]
    cert = _sc(G)
    _SC_MEMO[key] = cert
    return cert


def _sc(G: CatNGroup) -> SCCertificate | None:
    if G.n == 0:
        raise ValueError("strong contractibility needs n >= 1")
    if G.is_discrete():
        w = discretization(G, check=False)
        return SCCertificate(G.n, G.order, w, discrete=True)
    w = discretization(G)
    if w is None:
        return None
    cert = SCCertificate(G.n, G.order, w)
    if G.n >= 2:
        for k in range(1, G.n + 1):
            for i in (0, 1):
                c = is_strongly_contractible(face(G, k, i))
                if c is None:
                    return None
                cert.faces[(k, i)] = c
    return cert


def clear_memo() -> None:
    _SC_MEMO.clear()


# --------------------------------------------------------------------------
# special and i-special
# --------------------------------------------------------------------------

@dataclass
class SpecialResult:
    ok: bool
    checks: list = field(default_factory=list)    # (label, certificate or None)

    def __bool__(self):
        return self.ok

    def failed(self) -> list[str]:
        return [lab for lab, c in self.checks if c is None]


def _sc_face_chain(G: CatNGroup, ones: int, zero_at: int) -> CatNGroup:
    """N G(x_1..x_{zero_at-ones-1}, 1..1 (ones times), 0, ..): drop the
    directions set to 1, then take the object face of the next one."""
    first = zero_at - ones
    H = drop_directions(G, range(first, zero_at)) if ones else G
    return face(H, first, 0)


def is_special(G: CatNGroup) -> SpecialResult:
    """N G(0,-) and N G(1..1,0,-) (r ones, 1 <= r <= n-2) strongly
    contractible.  For n = 1 the condition is empty."""
    res = SpecialResult(True)
    if G.n < 2:
        return res
    for r in range(0, G.n - 1):
        F = _sc_face_chain(G, r, r + 1)
        c = is_strongly_contractible(F)
        res.checks.append((f"N({'1' * r}0-)", c))
        if c is None:
            res.ok = False
    return res


def is_i_special(G: CatNGroup, i: int) -> SpecialResult:
    """(i) N G(.., 0 at i, ..) strongly contractible; (ii) for
    1 <= k <= n-1-i, N G(.., 1 at i..i+k-1, 0 at i+k, ..) strongly
    contractible."""
    n = G.n
    if not 1 <= i <= n - 1:
        raise ValueError(f"i must lie in 1..{n - 1}")
    res = SpecialResult(True)
    c = is_strongly_contractible(face(G, i, 0))
    res.checks.append((f"x_{i}=0", c))
    res.ok &= c is not None
    for k in range(1, n - i):
        F = _sc_face_chain(G, k, i + k)
        c = is_strongly_contractible(F)
        res.checks.append((f"x_{i}..x_{i + k - 1}=1,x_{i + k}=0", c))
        res.ok &= c is not None
    if i == 1:
        assert res.ok == is_special(G).ok, "1-special must agree with special"
    return res


# --------------------------------------------------------------------------
# covers
# --------------------------------------------------------------------------

COVER_DEPTH = 2


@dataclass(eq=False)
class Cover:
    H0: CatNGroup
    p0: CatNMap
    certificate: SCCertificate
    surjective: dict = field(default_factory=dict)    # level -> bool
    kind: str = "user"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "order": self.H0.order, "map": [int(x) for x in self.p0.map],
                "surjective": {",".join(map(str, k)): v for k, v in sorted(self.surjective.items())},
                "certificate": self.certificate.to_dict()}


def levelwise_surjectivity(f: CatNMap, depth: int = COVER_DEPTH) -> dict:
    """Surjectivity of N f on every multinerve level with coordinates ≤ depth."""
    import itertools
    S, T = Multinerve(f.source, depth), Multinerve(f.target, depth)
    out = {}
    for p in itertools.product(range(depth + 1), repeat=f.source.n):
        A, B = S.level(p), T.level(p)
        img = B.find(f.hom.map[A.elems])
        out[p] = bool((img >= 0).all() and len(np.unique(img)) == B.order)
    return out


def make_cover(H0: CatNGroup, target: CatNGroup, m, kind: str = "user",
               depth: int = COVER_DEPTH) -> Cover:
    """Verify a cover: a map of cat^(n-1)-groups, levelwise surjective up to
    ``depth``, with strongly contractible source."""
    try:
        p0 = catn_map(H0, target, m)
    except NotAMorphism as exc:
        raise CoverVerificationFailed(f"cover map is not a morphism: {exc}")
    cert = is_strongly_contractible(H0)
    if cert is None:
        raise CoverVerificationFailed("cover source is not strongly contractible", kind=kind)
    surj = levelwise_surjectivity(p0, depth)
    if not all(surj.values()):
        bad = [list(k) for k, v in surj.items() if not v]
        raise CoverVerificationFailed("cover is not levelwise surjective", levels=bad)
    return Cover(H0, p0, cert, surj, kind)


def identity_cover(K: CatNGroup) -> Cover:
    return make_cover(K, K, np.arange(K.order), kind="identity")


def _dec_object(K: CatNGroup, j: int):
    """Décalage total {(x,y) : t_j x = d_j y} with its operators and F_1."""
    T = K.total
    d, t = K.dk(j), K.tk(j)
    pairs = [(x, y) for x in range(K.order) for y in np.flatnonzero(d == t[x])]
    check_feasible(len(pairs) ** 2, "décalage cover table")
    S = fg.pair_subgroup(T, T, np.array(pairs), name=f"dec{j}")
    a, b = S.embedding[:, 0].astype(np.int64), S.embedding[:, 1].astype(np.int64)
    code = np.full(K.order * K.order, -1, dtype=np.int64)
    code[a * K.order + b] = np.arange(S.order)

    def idx(u, v):
        out = code[np.asarray(u, dtype=np.int64) * K.order + v]
        if (out < 0).any():
            raise CoverVerificationFailed("décalage operator leaves the cover total")
        return out

    ds, ts = [], []
    for i in range(1, K.n + 1):
        if i == j:
            ds.append(idx(a, t[a]))
            ts.append(idx(T.mul[T.mul[a, T.inv[t[a]]], b], t[b]))
        else:
            ds.append(idx(K.dk(i)[a], K.dk(i)[b]))
            ts.append(idx(K.tk(i)[a], K.tk(i)[b]))
    H = CatNGroup(S, ds, ts, name=f"dec_{j}({K.name or 'K'})")
    try:
        check_catn(H)
    except Exception as exc:
        raise CoverVerificationFailed(f"décalage object invalid: {exc}")
    return H, b.astype(IDX)


def dec_cover(K: CatNGroup, j: int = 1) -> Cover:
    """Décalage in direction j: objects are arrows x, arrows (x, y) with
    t x = d y; d'(x,y) = (x, t x), t'(x,y) = (x t(x)^-1 y, t y); F_1 = y."""
    H, F1 = _dec_object(K, j)
    return make_cover(H, K, F1, kind=f"dec{j}")


def iterated_dec_cover(K: CatNGroup) -> Cover:
    """Décalage in directions 1..n successively, composing the cover maps."""
    H, m = K, np.arange(K.order, dtype=IDX)
    for j in range(1, K.n + 1):
        H2, F = _dec_object(H, j)
        m = m[F]
        H = H2
    return make_cover(H, K, m, kind="iterated-dec")


def builtin_cover(K: CatNGroup) -> Cover:
    """The identity when K is already strongly contractible, otherwise the
    iterated décalage."""
    if is_strongly_contractible(K) is not None:
        return identity_cover(K)
    return iterated_dec_cover(K)


# --------------------------------------------------------------------------
# cofibrant replacement and specialization
# --------------------------------------------------------------------------

def cofibrant_replace(G: CatNGroup, i: int, cover: Cover | None = None, verify: bool = True):
    """C_i(G): total {(x, h, h') : d_i x = p0 h, t_i x = p0 h'} with
    d_i'(x,h,h') = (p0 h, h, h), t_i'(x,h,h') = (p0 h', h', h'), the other
    operators componentwise; α(x,h,h') = x."""
    F = face(G, i, 0)
    cover = cover or builtin_cover(F)
    if not cover.p0.target.same_as(F):
        raise CoverVerificationFailed("cover does not lie over the object face")
    H = cover.H0
    pe = F.total.embedding[cover.p0.map]          # H0 total -> G total
    T = G.total
    nh = H.order
    pre: dict[int, np.ndarray] = {}
    for h in range(nh):
        pre.setdefault(int(pe[h]), []).append(h)
    pre = {k: np.array(v) for k, v in pre.items()}
    empty = np.array([], dtype=np.int64)
    rows = []
    for x in range(G.order):
        hs = pre.get(int(G.dk(i)[x]), empty)
        hps = pre.get(int(G.tk(i)[x]), empty)
        if len(hs) and len(hps):
            grid = np.stack(np.meshgrid(hs, hps, indexing="ij"), axis=-1).reshape(-1, 2)
            rows.append(np.column_stack([np.full(len(grid), x), grid]))
    trip = np.concatenate(rows).astype(np.int64)
    m = len(trip)
    check_feasible(m * m, f"C_{i} total table")
    code = (trip[:, 0] * nh + trip[:, 1]) * nh + trip[:, 2]
    order = np.lexsort((trip[:, 2], trip[:, 1], trip[:, 0]))
    trip, code = trip[order], code[order]
    lookup = np.full(G.order * nh * nh, -1, dtype=np.int64)
    lookup[code] = np.arange(m)

    def idx(x, h, hp):
        out = lookup[(np.asarray(x, dtype=np.int64) * nh + h) * nh + hp]
        if (out < 0).any():
            raise PostconditionFailed(f"C_{i} operator leaves the total")
        return out

    x, h, hp = trip[:, 0], trip[:, 1], trip[:, 2]
    HT = H.total
    table = idx(T.mul[x[:, None], x[None, :]], HT.mul[h[:, None], h[None, :]],
                HT.mul[hp[:, None], hp[None, :]])
    C = FiniteGroup(table, name=f"C{i}", embedding=trip.astype(IDX))
    ds, ts = [], []
    hdir = 0
    for l in range(1, G.n + 1):
        if l == i:
            ds.append(idx(pe[h], h, h))
            ts.append(idx(pe[hp], hp, hp))
        else:
            ds.append(idx(G.dk(l)[x], H.d[hdir][h], H.d[hdir][hp]))
            ts.append(idx(G.tk(l)[x], H.t[hdir][h], H.t[hdir][hp]))
            hdir += 1
    CG = check_catn(CatNGroup(C, ds, ts, name=f"C_{i}({G.name or 'G'})"))
    alpha = catn_map(CG, G, x.astype(IDX))
    if verify:
        if is_strongly_contractible(face(CG, i, 0)) is None:
            raise CoverVerificationFailed(f"object face of C_{i} is not strongly contractible")
        we = is_weak_equivalence(alpha)
        if not we.ok:
            raise PostconditionFailed(f"α^({i}) is not a weak equivalence (π_{we.failed_q})")
    return CG, alpha


@dataclass(eq=False)
class SpecializeResult:
    Sp: CatNGroup
    alpha: CatNMap
    stages: list      # dicts per stage

    def to_dict(self) -> dict:
        return {"order": self.Sp.order, "stages": self.stages}


def specialize(G: CatNGroup, covers: dict | None = None, verify: bool = True) -> SpecializeResult:
    """Sp G = C_1 C_2 .. C_{n-1} G with α the composite of the stage maps.
    ``covers`` optionally maps i to a callable K -> Cover (or a Cover) used
    for the object face at stage i; missing stages use :func:`builtin_cover`."""
    if G.n < 2:
        raise ValueError("specialize needs n >= 2")
    cur = G
    alpha = CatNMap(G, G, fg.identity_hom(G.total))
    stages = []
    for i in range(G.n - 1, 0, -1):
        F = face(cur, i, 0)
        c = (covers or {}).get(i)
        cover = c(F) if callable(c) else (c or builtin_cover(F))
        C, a = cofibrant_replace(cur, i, cover, verify=verify)
        alpha = alpha.compose(a)
        cur = C
        ok = is_i_special(cur, i)
        stages.append({"stage": i, "cover": cover.kind, "order": cur.order, "i_special": ok.ok})
        if not ok.ok:
            raise StageSpecialityFailed(f"C_{i}..C_{G.n - 1} G is not {i}-special",
                                        stage=i, failed=ok.failed())
    if verify:
        if not is_special(cur).ok:
            raise StageSpecialityFailed("Sp G is not special")
        we = is_weak_equivalence(alpha)
        if not we.ok:
            raise PostconditionFailed(f"α_G is not a weak equivalence (π_{we.failed_q})")
    return SpecializeResult(cur, alpha, stages)


# --------------------------------------------------------------------------
# discrete replacements of maps and pullbacks
# --------------------------------------------------------------------------

def replacement_map(f: CatNMap, wA: DiscretizationWitness, wB: DiscretizationWitness) -> GroupHom:
    """f^d : A^d → B^d, computed on representatives (well defined by
    naturality of d, asserted)."""
    m = wB.d.map[f.hom.map[wA.t.map]]
    h = GroupHom(wA.P, wB.P, m)
    if not np.array_equal(h.map[wA.d.map], wB.d.map[f.hom.map]):
        raise AssertionError("d is not natural along f")
    return h


def sections_natural(f: CatNMap, wA: DiscretizationWitness | None = None,
                     wB: DiscretizationWitness | None = None) -> bool:
    """f is a map of strongly contractible objects in the categorical sense:
    both discretizations exist and the chosen sections are natural,
    f t_A = t_B f^d (naturality of d is asserted by replacement_map)."""
    wA = wA or discretization(f.source)
    wB = wB or discretization(f.target)
    if wA is None or wB is None:
        return False
    fd = replacement_map(f, wA, wB)
    return bool(np.array_equal(f.hom.map[wA.t.map], wB.t.map[fd.map]))


def pullback_replacement_iso(P: CatNGroup, p1: CatNMap, p2: CatNMap, f: CatNMap, g: CatNMap):
    """Check P^d ≅ A^d ×_{C^d} B^d through the canonical comparison map;
    returns (ok, comparison map)."""
    wP, wA, wB, wC = (discretization(X) for X in (P, f.source, g.source, f.target))
    if None in (wP, wA, wB, wC):
        return False, None
    fa, gb = replacement_map(f, wA, wC), replacement_map(g, wB, wC)
    Q, q1, q2 = fg.fibre_product(fa, gb)
    a, b = replacement_map(p1, wP, wA), replacement_map(p2, wP, wB)
    cmp = fg.fibre_pairing(Q, a, b)
    return cmp.is_isomorphism(), cmp
