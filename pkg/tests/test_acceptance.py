"""The eleven acceptance criteria.  Each test records one PASS/FAIL line
(printed in the terminal summary).  Every comparison is exact: tolerance 0."""

import io as _io
import itertools

import numpy as np
import pytest

import oracles as O
from conftest import ACCEPTANCE_LINES
from semistrict import catn as C
from semistrict import corpus as K
from semistrict import fingrp as fg
from semistrict import globular as GL
from semistrict import hstruct as H
from semistrict import tamsamani as TM
from semistrict.cli import main
from semistrict.errors import AxiomIII, SemistrictError
from semistrict.simplicial import (Multinerve, check_simplicial_identities, diagonal, homotopy_cat1,
                                   homotopy_data, is_weak_equivalence, moore_homotopy, segal_check)

TOL = 0  # every check below is an exact equality


def record(n, title, ok, detail=""):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} — {title} "
                            f"[tolerance {TOL}] {detail}".rstrip())
    assert ok, f"criterion {n} failed: {detail}"


# frozen from oracles.catn_verdict (exhaustive axiom checker)
EXPECTED_VERDICTS = {
    "Z2 d=t=id": None, "Z2 d=t=0": None, "Z2 d=id t=0": "I", "S3 d=t=0": "III",
    "S3 d=t=id": None, "pair(Z2)": None, "pair(Z2) swapped": None, "pair(Z2) d=t": None,
    "V4 proj1/proj2": "I", "V4 proj1/proj1": None, "V4 swap": "I", "Z4 d=t=0": None,
    "Z4 x->-x": "I", "Z4 not endo": "endo", "S3 d=t=sign retraction": None,
    "Z2 running2": None, "Z2 n=2 trivial": None, "Z2 n=2 mixed bad": "I",
    "V4 n=2 proj": None, "V4 n=2 proj crossed": "I", "S3 n=2 trivial": "III",
    "S3 n=2 id/trivial": "III", "pair(Z2)⊗disc": None,
}
CODE_OF = {"endo": "OperatorNotEndo", "I": "AxiomI", "II": "AxiomII", "III": "AxiomIII"}

# frozen (|π_0|, |π_1|) from oracles.cat1_pi
EXPECTED_CAT1_PI = {
    "disc_1": (1, 1), "disc_Z2": (2, 1), "disc_Z3": (3, 1), "disc_S3": (6, 1), "disc_Q8": (8, 1),
    "one_Z2": (1, 2), "one_Z3": (1, 3), "one_Z4": (1, 4), "one_V4": (1, 4),
    "pair_Z2": (1, 1), "pair_Z3": (1, 1), "pair_Z4": (1, 1),
    "kernel_pair_Z4_Z2": (2, 1), "kernel_pair_S3_Z2": (2, 1), "kernel_pair_Z6_Z3": (3, 1),
    "Z3_x_Z2_inv": (2, 3), "one_Z2_x_disc_Z3": (3, 2),
}

# frozen from oracles.count_homs_with_section (exhaustive over all maps)
EXPECTED_SECTION = {
    "Z4->Z2": False, "Z6->Z3": True, "Z6->Z2": True, "S3->Z2": True, "V4->Z2": True,
    "Q8->V4": False, "D4->V4": False, "Z3->Z3": True, "Z4->Z4 doubling": False,
    "Z2->Z4": False, "Z3->1": True, "S3->S3": True,
}


def all_corpus():
    return K.n1_objects() | K.n2_objects() | K.n3_objects()


def special_version(G):
    return G if H.is_special(G).ok else H.specialize(G).Sp


# -- 1 -------------------------------------------------------------------------------

def test_criterion_1_axioms():
    fixtures = K.catn_fixtures()
    bad = []
    for nm, G, d, t in fixtures:
        want = O.catn_verdict(O.table(G), d, t)
        if want != EXPECTED_VERDICTS[nm]:
            bad.append(f"{nm}: oracle drifted")
        try:
            C.validate_catn(G, d, t)
            got = None
        except SemistrictError as exc:
            got = exc.code
        if got != (CODE_OF[want] if want else None):
            bad.append(f"{nm}: got {got}, oracle {want}")
    s3 = next(f for f in fixtures if f[0] == "S3 d=t=0")
    with pytest.raises(AxiomIII):
        C.validate_catn(*s3[1:])
    n_rej = sum(v is not None for v in EXPECTED_VERDICTS.values())
    record(1, "validate_catn agrees with the exhaustive axiom checker", len(fixtures) >= 20 and not bad,
           f"{len(fixtures)} fixtures ({n_rej} rejected, S3 trivial → AxiomIII) {bad}")


# -- 2 -------------------------------------------------------------------------------

def _views():
    for nm, G in all_corpus().items():
        for k in range(1, G.n + 1):
            yield f"{nm}/dir{k}", C.as_internal_category(G, k)
    for nm, f, _ in K.homs():
        _, v = C.build_A_f(f)
        yield f"A_{nm}", v


def _check_view(v):
    t = O.table(v.arrows.total)
    src, tgt, ide = (list(map(int, h.map)) for h in (v.src, v.tgt, v.ident))
    n = len(t)
    inv = [O.inverse(t, x) for x in range(n)]

    def m(x, y):  # x (σ∂₁x)^-1 y
        return t[t[x][inv[ide[tgt[x]]]]][y]

    pairs = [(x, y) for x in range(n) for y in range(n) if tgt[x] == src[y]]
    for x, y in pairs:
        z = int(v.compose(np.array([x]), np.array([y]))[0])
        if z != m(x, y) or src[z] != src[x] or tgt[z] != tgt[y]:
            return "composition"
    for x in range(n):
        if m(ide[src[x]], x) != x or m(x, ide[tgt[x]]) != x:
            return "identities"
    # the composite is a homomorphism on composable pairs (interchange)
    for (x, y), (u, w) in itertools.product(pairs, repeat=2):
        if m(t[x][u], t[y][w]) != t[m(x, y)][m(u, w)]:
            return "interchange"
    ka = [x for x in range(n) if src[x] == 0]
    kb = [x for x in range(n) if tgt[x] == 0]
    if any(t[x][y] != t[y][x] for x in ka for y in kb):
        return "commutator"
    for z in range(n):
        zi = int(v.inverse(np.array([z]))[0])
        if src[zi] != tgt[z] or tgt[zi] != src[z] or m(z, zi) != ide[src[z]] or m(zi, z) != ide[tgt[z]]:
            return "inverse"
    return None


def test_criterion_2_composition_law():
    bad, count = [], 0
    for nm, v in _views():
        count += 1
        r = _check_view(v)
        if r:
            bad.append(f"{nm}: {r}")
    record(2, "composition law, [ker ∂₀, ker ∂₁] = 1, inverse formula", not bad,
           f"{count} internal categories {bad}")


# -- 3 -------------------------------------------------------------------------------

def test_criterion_3_nerve_characterization():
    bad, checks = [], 0
    for nm, G in all_corpus().items():
        Kt = G.n + 2
        X = Multinerve(G, Kt)
        for r in range(1, G.n + 1):
            for k in range(2, Kt + 1):
                checks += 1
                if not segal_check(X, r, k).ok:
                    bad.append(f"{nm} r={r} k={k}")
    S = K.non_nerve_counterexample()
    check_simplicial_identities(S)       # a genuine simplicial group ...
    res = segal_check(S, 1, 2)           # ... that is not a nerve
    ok = not bad and not res.ok
    record(3, "Segal maps bijective on multinerves; counterexample detected", ok,
           f"{checks} Segal checks; counterexample: {res.reason} {bad}")


# -- 4 -------------------------------------------------------------------------------

def test_criterion_4_homotopy_oracles():
    objs = K.n1_objects()
    bad = []
    for nm, G in objs.items():
        assert G.order <= 24
        got = moore_homotopy(Multinerve(G, 3), 1)
        p0, p1 = homotopy_cat1(G)
        if fg.are_isomorphic(got[0], p0) is None or fg.are_isomorphic(got[1], p1) is None:
            bad.append(f"{nm}: Moore vs cat1")
        if (got[0].order, got[1].order) != EXPECTED_CAT1_PI[nm]:
            bad.append(f"{nm}: orders {(got[0].order, got[1].order)}")
    high = 0
    for nm, G in (K.n2_objects() | K.n3_objects()).items():
        q = G.n + 1
        pis = homotopy_data(diagonal(Multinerve(G, q + 1)), q).pis
        high += 1
        if pis[q].order != 1:
            bad.append(f"{nm}: π_{q} = {pis[q].order}")
    record(4, "Moore homotopy = crossed-module formula; π_q = 1 above n", len(objs) >= 15 and not bad,
           f"{len(objs)} n=1 objects, {high} cat²/cat³ objects {bad}")


# -- 5 -------------------------------------------------------------------------------

def test_criterion_5_kernel_pair():
    bad = []
    hs = K.homs()
    for nm, f, has_section in hs:
        Af_pair, alpha = C.build_kernel_pair_object(f)
        Af, view = C.build_A_f(f)
        # α(x,y) = (y x^-1, x), checked pointwise against the encodings
        A = f.source
        Kf = fg.kernel(f)
        P = Af_pair.total
        S = Af.total
        t = O.table(A)
        for i, (x, y) in enumerate(P.embedding.tolist()):
            j = int(alpha.hom.map[i])
            kx, a = S.embedding[j].tolist()
            if Kf.embedding[kx] != t[y][O.inverse(t, x)] or a != x:
                bad.append(f"{nm}: α formula at {(x, y)}")
                break
        if not alpha.hom.is_isomorphism() or C.map_violation(Af_pair, Af, alpha.hom.map) is not None:
            bad.append(f"{nm}: α not an isomorphism of internal categories")
        if has_section != EXPECTED_SECTION[nm]:
            bad.append(f"{nm}: section flag")
        if has_section:
            pi0, pi1 = homotopy_cat1(Af)
            if fg.are_isomorphic(pi0, f.target) is None or pi1.order != 1:
                bad.append(f"{nm}: π₀/π₁")
    record(5, "A_f ≅ A^f via α; π₀ = target, π₁ = 1 with a section", len(hs) >= 10 and not bad,
           f"{len(hs)} homomorphisms, {sum(s for _, _, s in hs)} with sections {bad}")


# -- 6 -------------------------------------------------------------------------------

def test_criterion_6_pullbacks():
    sc = K.random_sc_diagrams(25, seed=0, max_order=16)
    sp = K.random_special_diagrams(25, seed=1, max_order=16)
    bad = []
    for nm, f, g in sc:
        assert max(f.source.order, g.source.order, f.target.order) <= 16
        P, p1, p2 = C.catn_fibre_product(f, g)
        if H.is_strongly_contractible(P) is None:
            bad.append(f"{nm}: pullback not SC")
            continue
        ok, cmp = H.pullback_replacement_iso(P, p1, p2, f, g)
        # independent count of A^d ×_{C^d} B^d
        wA, wB, wC, wP = (H.discretization(X) for X in (f.source, g.source, f.target, P))
        fa = H.replacement_map(f, wA, wC).map.tolist()
        gb = H.replacement_map(g, wB, wC).map.tolist()
        if not ok or wP.P.order != O.fibre_product_order(fa, gb, wA.P.order, wB.P.order):
            bad.append(f"{nm}: P^d")
    for nm, f, g in sp:
        P, _, _ = C.catn_fibre_product(f, g)
        if not H.is_special(P).ok:
            bad.append(f"{nm}: pullback not special")
    record(6, "pullbacks strongly contractible / special; P^d = pullback of replacements",
           len(sc) >= 25 and len(sp) >= 25 and not bad,
           f"{len(sc)} SC diagrams, {len(sp)} special diagrams {bad}")


# -- 7 -------------------------------------------------------------------------------

def test_criterion_7_specialization():
    inputs = K.non_special_inputs() | {"disc_Z2_tensor_one_Z2": K.n2_objects()["disc_Z2_tensor_one_Z2"]}
    bad = []
    for nm, G in inputs.items():
        assert not H.is_special(G).ok
        r = H.specialize(G)
        if not H.is_special(r.Sp).ok:
            bad.append(f"{nm}: not special")
        if not all(s["i_special"] for s in r.stages) or len(r.stages) != G.n - 1:
            bad.append(f"{nm}: stages")
        if not H.is_i_special(r.Sp, 1).ok:
            bad.append(f"{nm}: 1-special")
        a = moore_homotopy(Multinerve(G, G.n + 1), G.n)
        b = moore_homotopy(Multinerve(r.Sp, G.n + 1), G.n)
        if any(fg.are_isomorphic(x, y) is None for x, y in zip(a, b)):
            bad.append(f"{nm}: π changed")
        if not is_weak_equivalence(r.alpha).ok:
            bad.append(f"{nm}: α not a weak equivalence")
    record(7, "specialize yields special objects, stagewise i-special, π preserved", not bad,
           f"{len(inputs)} non-special inputs (n=2,3) {bad}")


# -- 8 -------------------------------------------------------------------------------

def _same_msg(X, Y, top=2):
    for p in itertools.product(range(top + 1), repeat=X.n):
        a, b = X.level(p), Y.level(p)
        if not np.array_equal(a.elems, b.elems):
            return False
        for r in range(1, X.n + 1):
            if p[r - 1] == 0:
                continue
            for j in range(p[r - 1] + 1):
                if not np.array_equal(X.face(r, j, p, a.elems), Y.face(r, j, p, b.elems)):
                    return False
    return True


def test_criterion_8_b_preservation():
    bad, count = [], 0
    objs = K.pipeline_corpus()
    for nm, G in objs.items():
        Gs = special_version(G)
        b = GL.b_preservation_check(Gs, K=Gs.n + 2)
        count += 1
        if not (b.ok and b.R_equal and b.pi_equal):
            bad.append(nm)
    fixtures = K.globular_fixtures()
    for nm, G in fixtures.items():
        phi = GL.globularize(G, K=G.n + 2)
        if not _same_msg(phi.X, Multinerve(G, G.n + 2)):
            bad.append(f"{nm}: globularize not the identity")
    record(8, "R diag j_n D_n G = R diag N G bit-exactly; D_n = id on globular objects", not bad,
           f"{count} special objects at K = n+2, {len(fixtures)} globular fixtures {bad}")


# -- 9 -------------------------------------------------------------------------------

def test_criterion_9_delooping():
    bad = []
    objs = K.pipeline_corpus()
    for nm, G in objs.items():
        phi = GL.globularize(special_version(G))
        T = TM.deloop(phi)
        rep = TM.validate_tower(T, "H")
        checks = {"H_{n+1}": rep["ok"], "τ₁ = π₀ T": TM.deloop_tau1_is_pi0(phi, T),
                  "diag": TM.diag_nerve_equal(phi), "τ₁U = U T": TM.tau1_equals_T(phi)}
        bad += [f"{nm}: {k}" for k, v in checks.items() if not v]
    record(9, "deloop ∈ H_{n+1}; τ₁ = π₀(T φ); diag N V φ = diag N φ; τ₁ U φ = U T φ", not bad,
           f"{len(objs)} objects of 𝔻₂/𝔻₃ {bad}")


# -- 10 ------------------------------------------------------------------------------

def _delooped(f):
    pa, pb = GL.globularize(f.source), GL.globularize(f.target)
    GL.globularize_map(f, pa, pb)
    return TM.entrywise_tower_map(TM.deloop(pa), TM.deloop(pb), f.hom.map)


def test_criterion_10_equivalence_transport():
    weqs = K.d_n_weak_equivalences()
    bad = []
    for nm, f in weqs:
        if not is_weak_equivalence(f).ok:
            bad.append(f"{nm}: not certified")
            continue
        F = _delooped(f)
        a, b = TM.n_equivalence(F), TM.n_equivalence_h(F)
        if not a or a != b:
            bad.append(f"{nm}: {a}/{b}")
    # negative control: one(Z2) ⊗ disc → 1 is not a weak equivalence
    g = K.small_groups()
    d1 = C.discrete(g["1"])
    A, B = C.tensor(C.one_object(g["Z2"]), d1), C.tensor(C.one_object(g["1"]), d1)
    f = C.catn_map(A, B, np.zeros(A.order, dtype=np.int64))
    F = _delooped(f)
    neg = (is_weak_equivalence(f).ok, TM.n_equivalence(F), TM.n_equivalence_h(F))
    if neg != (False, False, False):
        bad.append(f"negative control {neg}")
    record(10, "deloop carries weak equivalences to n-equivalences; both criteria agree",
           len(weqs) >= 10 and not bad, f"{len(weqs)} weak equivalences + 1 negative control {bad}")


# -- 11 ------------------------------------------------------------------------------

def test_criterion_11_end_to_end(tmp_path):
    from semistrict import io
    paths = []
    for nm, G in K.pipeline_corpus().items():
        p = tmp_path / f"{nm}.json"
        io.save(p, G)
        paths.append(str(p))
    runs, bad = [], []
    for _ in range(2):
        out = []
        for p in paths:
            buf = _io.StringIO()
            code = main(["pipeline", p, "--json"], stdout=buf)
            if code != 0:
                bad.append(f"{p}: exit {code}")
            out.append(buf.getvalue())
        runs.append(out)
    import json
    for text in runs[0]:
        rep = json.loads(text)
        if not (rep["ok"] and rep["verification"]["pi_isomorphic"]):
            bad.append(rep["input"]["name"])
    stable = runs[0] == runs[1]
    record(11, "pipeline succeeds on the corpus, π lists isomorphic, byte-stable", stable and not bad,
           f"{len(paths)} objects, two runs {'identical' if stable else 'differ'} {bad}")
