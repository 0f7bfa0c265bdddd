"""The bundled example corpus: cat^n-groups, homomorphisms, axiom
fixtures, weak equivalences in D_n, random pullback diagrams and the
non-nerve counterexample.  ``write_corpus`` dumps the file corpus used by
the CLI."""

from __future__ import annotations

import itertools
import os
import random

import numpy as np

from . import catn as C
from . import fingrp as fg
from .catn import CatNGroup, CatNMap
from .fingrp import FiniteGroup, GroupHom
from .simplicial import Multinerve, TabulatedSimplicialGroup


# -- groups -----------------------------------------------------------------

def small_groups() -> dict[str, FiniteGroup]:
    g = {
        "1": fg.trivial_group(), "Z2": fg.cyclic_group(2), "Z3": fg.cyclic_group(3),
        "Z4": fg.cyclic_group(4), "Z6": fg.cyclic_group(6), "V4": fg.power_of_cyclic(2, 2),
        "S3": fg.symmetric_group(3), "D4": fg.dihedral_group(4), "Q8": fg.quaternion_group(),
    }
    for k, v in g.items():
        v.name = k
    return g


def all_homs(H: FiniteGroup, K: FiniteGroup, limit: int | None = None) -> list[np.ndarray]:
    """Every homomorphism H → K, enumerated over images of a generating set
    (deterministic order)."""
    gens = fg.closure_generators(H, np.arange(H.order))
    out = []
    for imgs in itertools.product(range(K.order), repeat=len(gens)):
        m = fg.extend_from_generators(H, gens, imgs, K)
        if m is not None:
            out.append(np.asarray(m.map if isinstance(m, GroupHom) else m))
            if limit and len(out) >= limit:
                break
    return out


def _hom(H, K, images: dict) -> GroupHom:
    gens = list(images)
    m = fg.extend_from_generators(H, gens, [images[x] for x in gens], K)
    if m is None:
        raise ValueError("images do not define a homomorphism")
    return m if isinstance(m, GroupHom) else GroupHom(H, K, m)


def surjections(H, K):
    return [m for m in all_homs(H, K) if len(np.unique(m)) == K.order]


# -- n = 1 ------------------------------------------------------------------

def semidirect_cat1(A: FiniteGroup, B: FiniteGroup, action, name) -> CatNGroup:
    """A ⋊ B with d = t = projection onto B (crossed module A → B with
    trivial boundary)."""
    P = fg.semidirect_product(A, B, action)
    b = P.embedding[:, 1]
    proj = np.array([int(np.flatnonzero((P.embedding[:, 0] == 0) & (P.embedding[:, 1] == y))[0])
                     for y in b])
    return C.validate_catn(P, [proj], [proj], name=name)


def n1_objects() -> dict[str, CatNGroup]:
    g = small_groups()
    out = {}
    for k in ("1", "Z2", "Z3", "S3", "Q8"):
        out[f"disc_{k}"] = C.discrete(g[k], name=f"disc({k})")
    for k in ("Z2", "Z3", "Z4", "V4"):
        out[f"one_{k}"] = C.one_object(g[k])
    for k in ("Z2", "Z3", "Z4"):
        out[f"pair_{k}"] = C.pair_object(g[k])
    for nm, f in (("Z4_Z2", _hom(g["Z4"], g["Z2"], {1: 1})),
                  ("S3_Z2", sign_hom(g["S3"])),
                  ("Z6_Z3", _hom(g["Z6"], g["Z3"], {1: 1}))):
        A, _ = C.build_kernel_pair_object(f)
        A.name = f"kp({nm})"
        out[f"kernel_pair_{nm}"] = A
    inv = np.array([0, 2, 1])
    out["Z3_x_Z2_inv"] = semidirect_cat1(g["Z3"], g["Z2"], np.array([np.arange(3), inv]), "Z3⋊Z2")
    out["one_Z2_x_disc_Z3"] = C.product(C.one_object(g["Z2"]), C.discrete(g["Z3"]), name="one(Z2)×disc(Z3)")
    return out


def sign_hom(S3: FiniteGroup) -> GroupHom:
    for m in all_homs(S3, fg.cyclic_group(2)):
        if len(np.unique(m)) == 2:
            return GroupHom(S3, fg.cyclic_group(2), m)
    raise AssertionError("no sign")


# -- n = 2, 3 ----------------------------------------------------------------

def running_example(n: int = 2) -> CatNGroup:
    """Z_2 with d_1 = t_1 = id, d_2 = t_2 = trivial (and d_3 = t_3 = id for
    n = 3): not special."""
    Z2 = fg.cyclic_group(2)
    Z2.name = "Z2"
    ide, tr = np.arange(2), np.zeros(2, dtype=np.int64)
    ops = [ide, tr, ide][:n]
    return C.validate_catn(Z2, ops, ops, name=f"running{n}")


def n2_objects() -> dict[str, CatNGroup]:
    g = small_groups()
    out = {
        "running2": running_example(2),
        "disc2_Z3": C.discrete_n(g["Z3"], 2),
        "one_Z2_tensor_disc": C.tensor(C.one_object(g["Z2"]), C.discrete(g["1"]), name="one(Z2)⊗disc"),
        "pair_Z2_tensor_disc_Z2": C.tensor(C.pair_object(g["Z2"]), C.discrete(g["Z2"]), name="pair(Z2)⊗disc(Z2)"),
        "disc_Z2_tensor_one_Z2": C.tensor(C.discrete(g["Z2"]), C.one_object(g["Z2"]), name="disc(Z2)⊗one(Z2)"),
        "one2_Z2": C.one_object(g["Z2"], 2),
        "one_Z3_tensor_disc_Z2": C.tensor(C.one_object(g["Z3"]), C.discrete(g["Z2"]), name="one(Z3)⊗disc(Z2)"),
    }
    for k, v in out.items():
        v.name = v.name or k
    return out


def n3_objects() -> dict[str, CatNGroup]:
    g = small_groups()
    d1 = C.discrete(g["1"])
    out = {
        "running3": running_example(3),
        "disc3_Z2": C.discrete_n(g["Z2"], 3),
        "one_Z2_tensor_disc_disc": C.tensor(C.tensor(C.one_object(g["Z2"]), d1), d1,
                                            name="one(Z2)⊗disc⊗disc"),
    }
    for k, v in out.items():
        v.name = v.name or k
    return out


def non_special_inputs() -> dict[str, CatNGroup]:
    return {"running2": running_example(2), "running3": running_example(3)}


def globular_fixtures() -> dict[str, CatNGroup]:
    """Objects whose globularization is the identity."""
    o2, o3 = n2_objects(), n3_objects()
    return {k: o2[k] for k in ("disc2_Z3", "one_Z2_tensor_disc", "pair_Z2_tensor_disc_Z2",
                               "one_Z3_tensor_disc_Z2")} | \
        {k: o3[k] for k in ("disc3_Z2", "one_Z2_tensor_disc_disc")}


# -- homomorphisms -------------------------------------------------------------

def homs() -> list[tuple[str, GroupHom, bool]]:
    """(name, f, f has a homomorphic section)."""
    g = small_groups()
    Z2, Z3, Z4, Z6, V4, S3, D4, Q8 = (g[k] for k in ("Z2", "Z3", "Z4", "Z6", "V4", "S3", "D4", "Q8"))
    return [
        ("Z4->Z2", _hom(Z4, Z2, {1: 1}), False),
        ("Z6->Z3", _hom(Z6, Z3, {1: 1}), True),
        ("Z6->Z2", _hom(Z6, Z2, {1: 1}), True),
        ("S3->Z2", sign_hom(S3), True),
        ("V4->Z2", GroupHom(V4, Z2, [0, 1, 0, 1]), True),
        ("Q8->V4", GroupHom(Q8, V4, surjections(Q8, V4)[0]), False),
        ("D4->V4", GroupHom(D4, V4, surjections(D4, V4)[0]), False),
        ("Z3->Z3", GroupHom(Z3, Z3, np.arange(3)), True),
        ("Z4->Z4 doubling", _hom(Z4, Z4, {1: 2}), False),
        ("Z2->Z4", _hom(Z2, Z4, {1: 2}), False),
        ("Z3->1", GroupHom(Z3, g["1"], np.zeros(3, dtype=np.int64)), True),
        ("S3->S3", GroupHom(S3, S3, np.arange(6)), True),
    ]


# -- validate_catn fixtures ---------------------------------------------------------

def catn_fixtures() -> list[tuple[str, FiniteGroup, list, list]]:
    """Hand-built C^1G / C^2G candidates (name, group, d, t); the expected
    verdict comes from an independent exhaustive checker in the tests."""
    g = small_groups()
    Z2, Z3, Z4, V4, S3 = g["Z2"], g["Z3"], g["Z4"], g["V4"], g["S3"]
    i2, z2 = np.arange(2), np.zeros(2, dtype=np.int64)
    i4, z4 = np.arange(4), np.zeros(4, dtype=np.int64)
    i6, z6 = np.arange(6), np.zeros(6, dtype=np.int64)
    P2 = C.pair_object(Z2)
    pd, pt = P2.d[0], P2.t[0]
    sgn = sign_hom(S3).map
    # V4 = Z2×Z2 coordinate projections
    p1, p2 = np.array([0, 0, 2, 2]), np.array([0, 1, 0, 1])
    swap = np.array([0, 2, 1, 3])
    rot = np.array([0, 3, 2, 1])   # x ↦ -x, an automorphism (not idempotent)
    out = [
        ("Z2 d=t=id", Z2, [i2], [i2]),
        ("Z2 d=t=0", Z2, [z2], [z2]),
        ("Z2 d=id t=0", Z2, [i2], [z2]),
        ("S3 d=t=0", S3, [z6], [z6]),
        ("S3 d=t=id", S3, [i6], [i6]),
        ("pair(Z2)", P2.total, [pd], [pt]),
        ("pair(Z2) swapped", P2.total, [pt], [pd]),
        ("pair(Z2) d=t", P2.total, [pd], [pd]),
        ("V4 proj1/proj2", V4, [p1], [p2]),
        ("V4 proj1/proj1", V4, [p1], [p1]),
        ("V4 swap", V4, [swap], [swap]),
        ("Z4 d=t=0", Z4, [z4], [z4]),
        ("Z4 x->-x", Z4, [rot], [rot]),
        ("Z4 not endo", Z4, [np.array([0, 2, 1, 3])], [z4]),
        ("S3 d=t=sign retraction", S3, [sgn], [sgn]),
        ("Z2 running2", Z2, [i2, z2], [i2, z2]),
        ("Z2 n=2 trivial", Z2, [z2, z2], [z2, z2]),
        ("Z2 n=2 mixed bad", Z2, [i2, z2], [z2, i2]),
        ("V4 n=2 proj", V4, [p1, p2], [p1, p2]),
        ("V4 n=2 proj crossed", V4, [p1, p2], [p2, p1]),
        ("S3 n=2 trivial", S3, [z6, z6], [z6, z6]),
        ("S3 n=2 id/trivial", S3, [i6, z6], [i6, z6]),
        ("pair(Z2)⊗disc", None, None, None),
    ]
    T = C.tensor(P2, C.discrete(g["1"]))
    out[-1] = ("pair(Z2)⊗disc", T.total, T.d, T.t)
    return out


# -- weak equivalences in D_n --------------------------------------------------------

def tensor_map(f: CatNMap, K: CatNGroup, h: np.ndarray | None = None) -> CatNMap:
    """f ⊗ h : A ⊗ K → B ⊗ K (h an automorphism of K's total, default id)."""
    A2, B2 = C.tensor(f.source, K), C.tensor(f.target, K)
    k = K.order
    h = np.arange(k) if h is None else np.asarray(h)
    x = np.arange(A2.order)
    return C.catn_map(A2, B2, f.hom.map[x // k] * k + h[x % k])


def d_n_weak_equivalences() -> list[tuple[str, CatNMap]]:
    """Certified weak equivalences between globular objects (so that D_n
    acts as the identity and D_n f = f entrywise)."""
    g = small_groups()
    triv = C.one_object(g["1"])
    z = lambda A: np.zeros(A.order, dtype=np.int64)
    base = []
    for k in ("Z2", "Z3", "Z4"):
        P = C.pair_object(g[k])
        base.append((f"pair({k})->1", C.catn_map(P, triv, z(P))))
    O2 = C.one_object(g["Z2"])
    PO = C.product(O2, C.pair_object(g["Z2"]))
    base.append(("one(Z2)×pair(Z2)->one(Z2)", C.catn_map(PO, O2, np.arange(PO.order) // 4)))
    O3 = C.one_object(g["Z3"])
    base.append(("one(Z3) negation", C.catn_map(O3, O3, np.array([0, 2, 1]))))
    out = []
    for nm, f in base:
        for kn in ("1", "Z2"):
            K = C.discrete(g[kn])
            out.append((f"{nm} ⊗ disc({kn})", tensor_map(f, K)))
    d1 = C.discrete(g["1"])
    P = C.pair_object(g["Z2"])
    f3 = C.catn_map(C.tensor(P, d1), C.tensor(triv, d1), z(P))
    out.append(("pair(Z2)->1 ⊗ disc ⊗ disc", tensor_map(f3, d1)))
    return out


# -- random pullback diagrams ------------------------------------------------------------

def random_sc_diagrams(count: int = 25, seed: int = 0, max_order: int = 16):
    """Diagrams A → C ← B of strongly contractible cat^1-groups whose legs
    respect the chosen sections, one leg levelwise surjective; yields
    (name, f, g)."""
    from .hstruct import is_strongly_contractible, levelwise_surjectivity, sections_natural
    g = small_groups()
    names = ["1", "Z2", "Z3", "Z4", "V4", "S3"]
    rng = random.Random(seed)

    def obj(kind, H):
        return C.discrete(H) if kind == "disc" else C.pair_object(H)

    def lift(kind_s, kind_t, H, K, m):
        S, T = obj(kind_s, H), obj(kind_t, K)
        if kind_s == kind_t == "disc":
            return C.catn_map(S, T, m)
        if kind_s == "disc":   # x ↦ (m x, m x)
            return C.catn_map(S, T, m * K.order + m)
        if kind_t == "pair":
            a, b = S.total.embedding[:, 0], S.total.embedding[:, 1]
            return C.catn_map(S, T, m[a] * K.order + m[b])
        return None

    out, tries = [], 0
    while len(out) < count and tries < 5000:
        tries += 1
        kc = rng.choice(["disc", "pair", "pair"])
        Cn = rng.choice(["1", "Z2", "Z2", "Z3", "Z3"])
        legs = []
        for surj in (True, False):
            ks = rng.choice(["disc", "pair"]) if kc == "pair" else "disc"
            Hn = rng.choice(names)
            ms = surjections(g[Hn], g[Cn]) if surj else all_homs(g[Hn], g[Cn])
            if not ms:
                break
            f = lift(ks, kc, g[Hn], g[Cn], ms[rng.randrange(len(ms))])
            if f is None or f.source.order > max_order:
                break
            legs.append(f)
        if len(legs) < 2:
            continue
        f, gg = legs
        if not all(levelwise_surjectivity(f).values()):
            continue
        if any(is_strongly_contractible(X) is None for X in (f.source, gg.source, f.target)):
            continue
        # maps in the category of strongly contractible objects: sections natural
        if not (sections_natural(f) and sections_natural(gg)):
            continue
        if f.source.order * gg.source.order // max(f.target.order, 1) > 4 * max_order:
            continue
        out.append((f"{f.source.name}->{f.target.name}<-{gg.source.name}", f, gg))
    return out


def random_special_diagrams(count: int = 25, seed: int = 1, max_order: int = 16):
    """Diagrams of special cat^2-groups A → C ← B (tensoring the SC diagrams
    with a discrete direction, and discrete objects), one leg levelwise
    surjective."""
    from .hstruct import is_special
    g = small_groups()
    out = []
    for i, (nm, f, gg) in enumerate(random_sc_diagrams(count, seed, max_order)):
        K = C.discrete(g["1"] if i % 2 == 0 else g["Z2"])
        if f.source.order * K.order > max_order or gg.source.order * K.order > max_order:
            K = C.discrete(g["1"])
        F, G = tensor_map(f, K), tensor_map(gg, K)
        if all(is_special(X).ok for X in (F.source, G.source, F.target)):
            out.append((f"({nm})⊗{K.name}", F, G))
    return out


# -- non-nerve counterexample -----------------------------------------------------------------

def vgroup_as_group(V) -> FiniteGroup:
    idx = np.arange(V.order)
    table = np.stack([V.index(V.mul(V.elems[i][None, :], V.elems)) for i in idx])
    return FiniteGroup(table.astype(np.int32), embedding=V.elems.astype(np.int32))


def non_nerve_counterexample(G: CatNGroup | None = None, A: FiniteGroup | None = None) -> TabulatedSimplicialGroup:
    """Levels 0, 1 of the nerve of G and level 2 enlarged to N_2 × A, with
    faces through the projection and degeneracies into the A = 1 slice.  The
    simplicial identities hold; the Segal map at k = 2 is not injective."""
    G = G or C.pair_object(fg.cyclic_group(2))
    A = A or fg.cyclic_group(2)
    X = Multinerve(G, 2)
    L = [X.level((q,)) for q in range(3)]
    Gs = [vgroup_as_group(v) for v in L]
    P = fg.direct_product(Gs[2], A)
    pa = P.embedding[:, 0].astype(np.int64)
    faces, degens = {}, {}
    for q in (1, 2):
        for j in range(q + 1):
            img = L[q - 1].index(X.face(1, j, (q,), L[q].elems))
            faces[(j, q)] = img[pa] if q == 2 else img
    for q in (0, 1):
        for j in range(q + 1):
            img = L[q + 1].index(X.degen(1, j, (q,), L[q].elems))
            degens[(j, q)] = img * A.order if q == 1 else img
    return TabulatedSimplicialGroup([Gs[0], Gs[1], P], faces, degens)


# -- file corpus --------------------------------------------------------------------------------

def pipeline_corpus() -> dict[str, CatNGroup]:
    return n2_objects() | n3_objects()


def write_corpus(root: str) -> list[str]:
    """Write the file corpus (cat^n-groups, maps, fixtures) under root."""
    from . import io
    paths = []

    def put(sub, name, obj, kind=None):
        d = os.path.join(root, sub)
        os.makedirs(d, exist_ok=True)
        p = os.path.join(d, f"{name}.json")
        io.save(p, obj, kind)
        paths.append(p)

    for k, v in n1_objects().items():
        put("n1", k, v)
    for k, v in n2_objects().items():
        put("n2", k, v)
    for k, v in n3_objects().items():
        put("n3", k, v)
    for i, (nm, f, _) in enumerate(homs()):
        put("homs", f"hom{i:02d}", C._as_catn_map(f))
    for i, (nm, f) in enumerate(d_n_weak_equivalences()):
        put("weq", f"weq{i:02d}", f)
    # Axiom-violating fixture and malformed input
    for nm, G, d, t in catn_fixtures():
        if nm == "S3 d=t=0":
            payload = {"group": io.group_payload(G), "d": [x.tolist() for x in d],
                       "t": [x.tolist() for x in t], "name": "S3 trivial"}
            d_ = os.path.join(root, "invalid")
            os.makedirs(d_, exist_ok=True)
            p = os.path.join(d_, "s3_trivial_operators.json")
            with open(p, "w", encoding="utf-8") as fh:
                fh.write(io.dumps(io.envelope("catn", payload)))
            paths.append(p)
    # exceeds the feasibility bound inside the pipeline (exit 3)
    put("invalid", "infeasible_pair_S3", C.tensor(C.pair_object(small_groups()["S3"]),
                                                  C.discrete(fg.trivial_group()), name="pair(S3)⊗disc"))
    # a user cover for the object face of the running n=2 example
    from .hstruct import builtin_cover
    cv = builtin_cover(C.face(running_example(2), 1, 0))
    os.makedirs(os.path.join(root, "covers"), exist_ok=True)
    p = os.path.join(root, "covers", "running2_stage1.json")
    with open(p, "w", encoding="utf-8") as fh:
        fh.write(io.dumps(io.envelope("covers", io.covers_payload({1: (cv.H0, cv.p0.hom.map)}))))
    paths.append(p)
    p = os.path.join(root, "invalid", "malformed.json")
    with open(p, "w", encoding="utf-8") as fh:
        fh.write('{"kind": "catn", "version": 1, "payload": {"group": \n')
    paths.append(p)
    return paths


if __name__ == "__main__":
    import sys
    for p in write_corpus(sys.argv[1] if len(sys.argv) > 1 else "corpus"):
        print(p)
