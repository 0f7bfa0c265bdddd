"""Exact finite groups as multiplication tables.

Elements are the indices ``0..order-1`` and ``0`` is always the identity.
Derived groups (subgroups, products, fibre products, quotients) remember how
their elements sit in the ambient construction through ``embedding``: a vector
of ambient indices for subgroups and quotients (coset representatives), or an
``(order, 2)`` array of index pairs for products.
"""

from __future__ import annotations

from functools import cached_property
from itertools import permutations as _perms

import numpy as np

from .errors import (IndexOutOfRange, NoIdentityAtZero, NoInverse, NotAssociative,
                     NotAHomomorphism, NotAnAction, NotSurjective, TargetMismatch,
                     check_feasible)

IDX = np.int32


# --------------------------------------------------------------------------
# groups and homomorphisms
# --------------------------------------------------------------------------

class FiniteGroup:
    """A group given by its multiplication table (identity = index 0).

    The constructor trusts its input; use :func:`validate_group` for raw tables.
    """

    def __init__(self, mul, name: str | None = None, embedding=None, ambient=None):
        self.mul = np.ascontiguousarray(mul, dtype=IDX)
        self.order = int(self.mul.shape[0])
        self.name = name
        self.embedding = None if embedding is None else np.asarray(embedding, dtype=IDX)
        self.ambient = ambient

    def __repr__(self):
        nm = f" {self.name}" if self.name else ""
        return f"<FiniteGroup{nm} order={self.order}>"

    def __len__(self):
        return self.order

    @cached_property
    def inv(self) -> np.ndarray:
        return np.argmax(self.mul == 0, axis=1).astype(IDX)

    @cached_property
    def key(self) -> bytes:
        return self.mul.tobytes()

    def same_table(self, other: "FiniteGroup") -> bool:
        return self is other or (self.order == other.order
                                 and np.array_equal(self.mul, other.mul))

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=IDX)

    def m(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = int(self.inv[x]), -k
        r = 0
        for _ in range(k):
            r = int(self.mul[r, x])
        return r

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        orders[0] = 1
        cur = np.arange(n, dtype=IDX)
        ar = np.arange(n, dtype=IDX)
        k = 1
        while (orders == 0).any():
            cur = self.mul[cur, ar]
            k += 1
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
        # identity handled; elements equal to 0 at k=1 only the identity
        return orders

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily and deterministically:
        repeatedly add the element of largest order (ties: smallest index) that
        is not yet in the subgroup generated so far."""
        order_key = sorted(range(self.order), key=lambda x: (-self.element_orders[x], x))
        gens: list[int] = []
        inside = np.zeros(self.order, dtype=bool)
        inside[0] = True
        for x in order_key:
            if inside.all():
                break
            if not inside[x]:
                gens.append(int(x))
                inside[:] = False
                inside[closure(self, gens)] = True
        return tuple(gens)


class GroupHom:
    """A homomorphism given as an array of target indices."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, map, check: bool = True):
        self.source = source
        self.target = target
        self.map = np.ascontiguousarray(map, dtype=IDX)
        if check:
            bad = hom_violation(source, target, self.map)
            if bad is not None:
                raise NotAHomomorphism(f"not a homomorphism: {bad}", witness=bad)

    def __repr__(self):
        return f"<GroupHom {self.source.order}->{self.target.order}>"

    def __call__(self, x):
        return self.map[x]

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self ∘ other"""
        return GroupHom(other.source, self.target, self.map[other.map], check=False)

    def is_injective(self) -> bool:
        return len(np.unique(self.map)) == self.source.order

    def is_surjective(self) -> bool:
        return len(np.unique(self.map)) == self.target.order

    def is_isomorphism(self) -> bool:
        return self.source.order == self.target.order and self.is_injective()

    def image_elements(self) -> np.ndarray:
        return np.unique(self.map).astype(IDX)

    def kernel_elements(self) -> np.ndarray:
        return np.flatnonzero(self.map == 0).astype(IDX)


def hom_violation(source: FiniteGroup, target: FiniteGroup, m: np.ndarray):
    """First pair (x, y) with m(xy) != m(x)m(y), or a description of a range
    error; None if m is a homomorphism."""
    if m.shape != (source.order,):
        return "wrong length"
    if m.size and (m.min() < 0 or m.max() >= target.order):
        return "index out of range"
    lhs = m[source.mul]
    rhs = target.mul[m[:, None], m[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        return (int(bad[0][0]), int(bad[0][1]))
    return None


def identity_hom(G: FiniteGroup) -> GroupHom:
    return GroupHom(G, G, np.arange(G.order), check=False)


def trivial_hom(source: FiniteGroup, target: FiniteGroup) -> GroupHom:
    return GroupHom(source, target, np.zeros(source.order), check=False)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def validate_group(table, name: str | None = None) -> FiniteGroup:
    """Validate a raw multiplication table and return a FiniteGroup.

    Checks, in order: square shape and index range, identity at 0, two-sided
    inverses, associativity.  Errors name the first violated axiom and carry a
    witness."""
    try:
        t = np.asarray(table)
    except Exception as exc:  # ragged input
        raise IndexOutOfRange(f"table is not rectangular: {exc}")
    if t.dtype == object or t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise IndexOutOfRange("table must be a non-empty square array of indices")
    if not np.issubdtype(t.dtype, np.integer):
        if np.issubdtype(t.dtype, np.floating) and np.all(np.mod(t, 1) == 0):
            t = t.astype(np.int64)
        else:
            raise IndexOutOfRange("table entries must be integers")
    n = t.shape[0]
    bad = np.argwhere((t < 0) | (t >= n))
    if len(bad):
        i, j = map(int, bad[0])
        raise IndexOutOfRange(f"entry ({i},{j}) = {int(t[i, j])} out of range", row=i, col=j)
    t = t.astype(IDX)
    ar = np.arange(n)
    if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
        x = int(np.flatnonzero((t[0] != ar) | (t[:, 0] != ar))[0])
        raise NoIdentityAtZero(f"0 is not a two-sided identity (fails at {x})", element=x)
    for x in range(n):
        ys = np.flatnonzero((t[x] == 0) & (t[:, x] == 0))
        if len(ys) == 0:
            raise NoInverse(f"element {x} has no two-sided inverse", element=x)
    w = _associativity_witness(t)
    if w is not None:
        raise NotAssociative(f"({w[0]}*{w[1]})*{w[2]} != {w[0]}*({w[1]}*{w[2]})",
                             triple=list(w))
    return FiniteGroup(t, name=name)


def _associativity_witness(t: np.ndarray):
    n = t.shape[0]
    latin = all(len(np.unique(t[x])) == n and len(np.unique(t[:, x])) == n
                for x in range(n))
    if latin and n > 64:
        # Light's test: it suffices to test (x s) y = x (s y) for s ranging
        # over a set generating the magma; a finite multiplicatively closed
        # subset of a latin square with identity is itself a subloop, so a
        # right-multiplication closure gives the generated submagma.
        gens: list[int] = []
        inside = np.zeros(n, dtype=bool)
        inside[0] = True
        for x in range(n):
            if not inside[x]:
                gens.append(x)
                inside = _magma_closure(t, np.flatnonzero(inside | (np.arange(n) == x)))
        for s in gens:
            lhs = t[t[:, s][:, None], np.arange(n)[None, :]]   # (x s) y
            rhs = t[np.arange(n)[:, None], t[s][None, :]]       # x (s y)
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                return (int(bad[0][0]), s, int(bad[0][1]))
        return None
    for a in range(n):
        lhs = t[t[a]]                      # (a b) c, indexed [b, c]
        rhs = t[a][t]                      # a (b c)
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            return (a, int(bad[0][0]), int(bad[0][1]))
    return None


def _magma_closure(t: np.ndarray, elems: np.ndarray) -> np.ndarray:
    inside = np.zeros(t.shape[0], dtype=bool)
    inside[elems] = True
    while True:
        cur = np.flatnonzero(inside)
        prods = np.unique(t[np.ix_(cur, cur)])
        if inside[prods].all():
            return inside
        inside[prods] = True


# --------------------------------------------------------------------------
# subgroups, kernels, images
# --------------------------------------------------------------------------

def closure(G: FiniteGroup, gens) -> np.ndarray:
    """Sorted elements of the subgroup generated by ``gens``."""
    gens = np.unique(np.asarray(list(gens), dtype=IDX))
    inside = np.zeros(G.order, dtype=bool)
    inside[0] = True
    if len(gens) == 0:
        return np.array([0], dtype=IDX)
    frontier = np.array([0], dtype=IDX)
    while len(frontier):
        new = np.unique(G.mul[np.ix_(frontier, gens)])
        new = new[~inside[new]]
        inside[new] = True
        frontier = new
    return np.flatnonzero(inside).astype(IDX)


def subgroup(G: FiniteGroup, elements, name: str | None = None) -> FiniteGroup:
    """The subgroup on ``elements`` (must be closed), indexed in increasing
    ambient order, with ``embedding`` = ambient indices."""
    el = np.unique(np.asarray(elements, dtype=IDX))
    if len(el) == 0 or el[0] != 0:
        raise ValueError("subgroup must contain the identity")
    pos = np.full(G.order, -1, dtype=IDX)
    pos[el] = np.arange(len(el), dtype=IDX)
    sub = pos[G.mul[np.ix_(el, el)]]
    if (sub < 0).any():
        raise ValueError("element set is not closed under multiplication")
    return FiniteGroup(sub, name=name, embedding=el, ambient=G)


def inclusion(H: FiniteGroup) -> GroupHom:
    """Inclusion of a subgroup (built by :func:`subgroup`) into its ambient group."""
    if H.ambient is None or H.embedding is None or H.embedding.ndim != 1:
        raise ValueError("group carries no subgroup embedding")
    return GroupHom(H, H.ambient, H.embedding, check=False)


def generated_subgroup(G: FiniteGroup, gens, name=None) -> FiniteGroup:
    return subgroup(G, closure(G, gens), name=name)


def kernel(h: GroupHom) -> FiniteGroup:
    """{x : h(x) = e} as a subgroup of h.source (embedding = inclusion)."""
    return subgroup(h.source, h.kernel_elements(), name="ker")


def image(h: GroupHom) -> FiniteGroup:
    return subgroup(h.target, h.image_elements(), name="im")


def restrict(h: GroupHom, H: FiniteGroup, K: FiniteGroup | None = None) -> GroupHom:
    """Restriction of h to a subgroup H of its source, optionally corestricted
    to a subgroup K of its target."""
    vals = h.map[H.embedding]
    if K is None:
        return GroupHom(H, h.target, vals, check=False)
    pos = np.full(K.ambient.order, -1, dtype=IDX)
    pos[K.embedding] = np.arange(K.order, dtype=IDX)
    out = pos[vals]
    if (out < 0).any():
        raise ValueError("image does not lie in the corestriction")
    return GroupHom(H, K, out, check=False)


def normal_closure(G: FiniteGroup, S) -> np.ndarray:
    """Sorted elements of the smallest normal subgroup containing S."""
    S = [int(s) for s in S]
    N = closure(G, S)
    gens = list(G.generators)
    while True:
        inside = np.zeros(G.order, dtype=bool)
        inside[N] = True
        Ngens = list(closure_generators(G, N))
        conj = G.mul[G.mul[np.ix_(gens, Ngens)], G.inv[np.array(gens, dtype=IDX)][:, None]]
        extra = np.unique(conj[~inside[conj]])
        if len(extra) == 0:
            return N
        N = closure(G, list(N) + list(extra))


def closure_generators(G: FiniteGroup, elems: np.ndarray) -> list[int]:
    """Greedy generating set of the subgroup with the given elements."""
    gens: list[int] = []
    inside = np.zeros(G.order, dtype=bool)
    inside[0] = True
    for x in elems:
        if not inside[x]:
            gens.append(int(x))
            inside[:] = False
            inside[closure(G, gens)] = True
    return gens or [0]


def is_normal(G: FiniteGroup, elems) -> bool:
    inside = np.zeros(G.order, dtype=bool)
    inside[np.asarray(elems, dtype=IDX)] = True
    el = np.flatnonzero(inside)
    g = np.array(G.generators or (0,), dtype=IDX)
    conj = G.mul[G.mul[np.ix_(g, el)], G.inv[g][:, None]]
    return bool(inside[conj].all())


def quotient(G: FiniteGroup, N, name: str | None = None) -> tuple[FiniteGroup, GroupHom]:
    """G/N for a normal subgroup given by its elements.  Cosets are numbered
    by their smallest element, so the identity coset is 0 and ``embedding``
    holds the minimal coset representatives."""
    N = np.unique(np.asarray(N, dtype=IDX))
    label = np.full(G.order, -1, dtype=IDX)
    reps = []
    for x in range(G.order):
        if label[x] < 0:
            label[G.mul[x, N]] = len(reps)
            reps.append(x)
    reps = np.array(reps, dtype=IDX)
    qmul = label[G.mul[np.ix_(reps, reps)]]
    Q = FiniteGroup(qmul, name=name, embedding=reps, ambient=G)
    return Q, GroupHom(G, Q, label, check=False)


def quotient_by_normal_closure(G: FiniteGroup, S) -> tuple[FiniteGroup, GroupHom]:
    """Quotient of G by the normal closure of the element set S, with the
    canonical projection."""
    N = normal_closure(G, list(S))
    return quotient(G, N, name=f"{G.name or 'G'}/<<S>>")


def commutator_subgroup_trivial(G: FiniteGroup, A, B) -> tuple[int, int] | None:
    """None if every a in A commutes with every b in B, else a witness pair."""
    A = np.asarray(A, dtype=IDX)
    B = np.asarray(B, dtype=IDX)
    if len(A) == 0 or len(B) == 0:
        return None
    ab = G.mul[np.ix_(A, B)]
    ba = G.mul[np.ix_(B, A)].T
    bad = np.argwhere(ab != ba)
    if len(bad):
        return (int(A[bad[0][0]]), int(B[bad[0][1]]))
    return None


# --------------------------------------------------------------------------
# products
# --------------------------------------------------------------------------

def direct_product(A: FiniteGroup, B: FiniteGroup, name: str | None = None) -> FiniteGroup:
    """A×B with (a,b) at index a*|B| + b."""
    check_feasible(A.order * B.order, "direct product")
    a = np.repeat(np.arange(A.order), B.order)
    b = np.tile(np.arange(B.order), A.order)
    mul = A.mul[a[:, None], a[None, :]] * B.order + B.mul[b[:, None], b[None, :]]
    nm = name or f"{A.name or 'A'}x{B.name or 'B'}"
    return FiniteGroup(mul, name=nm, embedding=np.stack([a, b], axis=1))


def product_projections(P: FiniteGroup, A: FiniteGroup, B: FiniteGroup):
    return (GroupHom(P, A, P.embedding[:, 0], check=False),
            GroupHom(P, B, P.embedding[:, 1], check=False))


def pair_subgroup(A: FiniteGroup, B: FiniteGroup, pairs: np.ndarray, name=None) -> FiniteGroup:
    """Subgroup of A×B on the given (closed) set of pairs, sorted
    lexicographically; embedding = the pairs."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    code = pairs[:, 0] * B.order + pairs[:, 1]
    order = np.argsort(code)
    pairs, code = pairs[order], code[order]
    pos = np.full(A.order * B.order, -1, dtype=IDX)
    pos[code] = np.arange(len(code), dtype=IDX)
    a, b = pairs[:, 0], pairs[:, 1]
    prod = A.mul[a[:, None], a[None, :]].astype(np.int64) * B.order + B.mul[b[:, None], b[None, :]]
    mul = pos[prod]
    if (mul < 0).any():
        raise ValueError("pair set is not closed")
    return FiniteGroup(mul, name=name, embedding=pairs.astype(IDX))


def fibre_product(f: GroupHom, g: GroupHom, name: str | None = None):
    """A ×_C B = {(a,b) : f(a) = g(b)} with projections p1, p2."""
    if not f.target.same_table(g.target):
        raise TargetMismatch("fibre product legs must share their target")
    A, B = f.source, g.source
    check_feasible(A.order * B.order, "fibre product candidate pairs")
    pairs = []
    by_c: dict[int, list[int]] = {}
    for b in range(B.order):
        by_c.setdefault(int(g.map[b]), []).append(b)
    for a in range(A.order):
        for b in by_c.get(int(f.map[a]), ()):
            pairs.append((a, b))
    P = pair_subgroup(A, B, np.array(pairs), name=name or "fibre")
    p1 = GroupHom(P, A, P.embedding[:, 0], check=False)
    p2 = GroupHom(P, B, P.embedding[:, 1], check=False)
    return P, p1, p2


def fibre_pairing(P: FiniteGroup, hA: GroupHom, hB: GroupHom) -> GroupHom:
    """The universal map X → A ×_C B induced by hA: X → A and hB: X → B."""
    code = {(int(a), int(b)): i for i, (a, b) in enumerate(P.embedding)}
    out = np.empty(hA.source.order, dtype=IDX)
    for x in range(hA.source.order):
        key = (int(hA.map[x]), int(hB.map[x]))
        if key not in code:
            raise TargetMismatch("legs do not agree over the base", element=x)
        out[x] = code[key]
    return GroupHom(hA.source, P, out, check=False)


def semidirect_product(A: FiniteGroup, B: FiniteGroup, action, name: str | None = None) -> FiniteGroup:
    """A ⋊ B on pairs (a,b) (index a*|B| + b) with
    (a',b')(a,b) = (a'·act(b')(a), b'b).

    ``action[b]`` is the automorphism of A by which b acts."""
    act = np.asarray(action, dtype=IDX)
    if act.shape != (B.order, A.order):
        raise NotAnAction("action must be a |B|×|A| array")
    for b in range(B.order):
        if len(np.unique(act[b])) != A.order or hom_violation(A, A, act[b]) is not None:
            raise NotAnAction(f"act({b}) is not an automorphism", element=b)
    if not np.array_equal(act[0], np.arange(A.order)):
        raise NotAnAction("identity does not act trivially")
    lhs = act[B.mul]                                          # act(b1 b2)
    rhs = np.stack([act[b1][act] for b1 in range(B.order)])  # act(b1)∘act(b2)
    bad = np.argwhere((lhs != rhs).any(axis=2))
    if len(bad):
        raise NotAnAction("b ↦ act(b) is not a homomorphism",
                          pair=[int(bad[0][0]), int(bad[0][1])])
    check_feasible(A.order * B.order, "semidirect product")
    a = np.repeat(np.arange(A.order), B.order)
    b = np.tile(np.arange(B.order), A.order)
    acted = act[b[:, None], a[None, :]]           # act(b')(a) for [row=(a',b'), col=(a,b)]
    new_a = A.mul[a[:, None], acted]
    new_b = B.mul[b[:, None], b[None, :]]
    mul = new_a * B.order + new_b
    nm = name or f"{A.name or 'A'}:{B.name or 'B'}"
    return FiniteGroup(mul, name=nm, embedding=np.stack([a, b], axis=1))


# --------------------------------------------------------------------------
# homomorphism search
# --------------------------------------------------------------------------

def extend_from_generators(Q: FiniteGroup, gens, images, T: FiniteGroup):
    """The homomorphism Q → T sending gens[i] ↦ images[i] (defined on the
    subgroup generated by gens), or None if the assignment does not extend.
    Returns (elements, values) arrays on success."""
    val = np.full(Q.order, -1, dtype=np.int64)
    val[0] = 0
    order = [0]
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        vx = val[x]
        for g, im in zip(gens, images):
            y = Q.mul[x, g]
            vy = T.mul[vx, im]
            if val[y] < 0:
                val[y] = vy
                order.append(int(y))
            elif val[y] != vy:
                return None
    return val


def find_homomorphic_section(p: GroupHom, accept=None, candidates=None) -> GroupHom | None:
    """A homomorphism s: Q → G with p∘s = id, or None.

    Search: backtracking over images of ``Q.generators`` in lexicographic
    order of preimage indices.  ``accept`` (optional) is a predicate on the
    final section; ``candidates`` (optional) maps a generator to the list of
    allowed images."""
    if not p.is_surjective():
        raise NotSurjective("projection is not surjective")
    G, Q = p.source, p.target
    gens = list(Q.generators)
    if not gens:
        s = GroupHom(Q, G, np.zeros(Q.order), check=False)
        return s if accept is None or accept(s) else None
    pre = []
    for q in gens:
        cands = np.flatnonzero(p.map == q)
        cands = [int(c) for c in cands if G.element_orders[c] == Q.element_orders[q]]
        if candidates is not None:
            allowed = set(int(c) for c in candidates(q))
            cands = [c for c in cands if c in allowed]
        pre.append(cands)
    chosen: list[int] = []

    def rec(i):
        if i == len(gens):
            val = extend_from_generators(Q, gens, chosen, G)
            if val is None or (val < 0).any():
                return None
            s = GroupHom(Q, G, val, check=False)
            if accept is not None and not accept(s):
                return None
            return s
        for c in pre[i]:
            chosen.append(c)
            if extend_from_generators(Q, gens[: i + 1], chosen, G) is not None:
                r = rec(i + 1)
                if r is not None:
                    return r
            chosen.pop()
        return None

    return rec(0)


def are_isomorphic(G: FiniteGroup, H: FiniteGroup) -> GroupHom | None:
    """An isomorphism G → H, or None.  Deterministic backtracking over images
    of ``G.generators`` with element-order pruning."""
    if G.order != H.order:
        return None
    if not np.array_equal(np.sort(G.element_orders), np.sort(H.element_orders)):
        return None
    if G.is_abelian != H.is_abelian:
        return None
    gens = list(G.generators)
    if not gens:
        return GroupHom(G, H, np.zeros(G.order), check=False)
    cands = [[int(h) for h in range(H.order) if H.element_orders[h] == G.element_orders[g]]
             for g in gens]
    chosen: list[int] = []

    def rec(i):
        if i == len(gens):
            val = extend_from_generators(G, gens, chosen, H)
            if val is None or (val < 0).any() or len(np.unique(val)) != G.order:
                return None
            return GroupHom(G, H, val, check=False)
        for c in cands[i]:
            chosen.append(c)
            val = extend_from_generators(G, gens[: i + 1], chosen, H)
            if val is not None:
                dom = val >= 0
                if len(np.unique(val[dom])) == int(dom.sum()):
                    r = rec(i + 1)
                    if r is not None:
                        return r
            chosen.pop()
        return None

    return rec(0)


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def trivial_group() -> FiniteGroup:
    return FiniteGroup(np.zeros((1, 1)), name="1")


def cyclic_group(n: int) -> FiniteGroup:
    a = np.arange(n)
    return FiniteGroup((a[:, None] + a[None, :]) % n, name=f"Z{n}")


def group_from_permutations(gens, name: str | None = None) -> FiniteGroup:
    """The permutation group generated by ``gens`` (tuples on 0..d-1),
    elements sorted lexicographically (identity first); ``embedding`` holds
    the permutations as rows."""
    gens = [tuple(int(x) for x in g) for g in gens]
    d = len(gens[0]) if gens else 1
    ident = tuple(range(d))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[i] for i in p)      # apply p then g
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    elems = sorted(seen)
    check_feasible(len(elems) ** 2, "permutation group table")
    arr = np.array(elems, dtype=IDX)
    index = {p: i for i, p in enumerate(elems)}
    n = len(elems)
    mul = np.empty((n, n), dtype=IDX)
    for i, p in enumerate(elems):
        # (p·q)(x) = p(q(x)): first q then p
        comp = arr[i][arr]          # row j: p∘q_j
        for j in range(n):
            mul[i, j] = index[tuple(comp[j])]
    return FiniteGroup(mul, name=name, embedding=arr)


def symmetric_group(d: int) -> FiniteGroup:
    if d <= 1:
        return FiniteGroup(np.zeros((1, 1)), name=f"S{d}")
    gens = [tuple([1, 0] + list(range(2, d))), tuple(list(range(1, d)) + [0])]
    return group_from_permutations(gens, name=f"S{d}")


def alternating_group(d: int) -> FiniteGroup:
    elems = [p for p in _perms(range(d)) if _parity(p) == 0]
    return group_from_permutations(elems, name=f"A{d}")


def _parity(p) -> int:
    p = list(p)
    s = 0
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s ^= 1
    return s


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return group_from_permutations([rot, ref], name=f"D{n}")


def quaternion_group() -> FiniteGroup:
    # Q8 as permutations of {±1, ±i, ±j, ±k} via left multiplication
    # encoding: 0:1 1:i 2:j 3:k 4:-1 5:-i 6:-j 7:-k
    table = {(0, 0): 0, (0, 1): 1, (0, 2): 2, (0, 3): 3,
             (1, 0): 1, (1, 1): 4, (1, 2): 3, (1, 3): 6,
             (2, 0): 2, (2, 1): 7, (2, 2): 4, (2, 3): 1,
             (3, 0): 3, (3, 1): 2, (3, 2): 5, (3, 3): 4}

    def m(a, b):
        sa, ua = divmod(a, 4)
        sb, ub = divmod(b, 4)
        r = table[(ua, ub)]
        return (r + 4 * (sa ^ sb)) % 8
    gi = tuple(m(1, x) for x in range(8))
    gj = tuple(m(2, x) for x in range(8))
    return group_from_permutations([gi, gj], name="Q8")


def power_of_cyclic(n: int, k: int) -> FiniteGroup:
    G = cyclic_group(n)
    for _ in range(k - 1):
        G = direct_product(G, cyclic_group(n))
    G.name = f"Z{n}^{k}"
    return G


def endo_from_images(G: FiniteGroup, images: dict[int, int]) -> np.ndarray:
    """Endomorphism of G determined by generator images (dict gen → image)."""
    gens = list(images)
    val = extend_from_generators(G, gens, [images[g] for g in gens], G)
    if val is None or (val < 0).any():
        raise NotAHomomorphism("generator images do not define an endomorphism")
    return val.astype(IDX)
