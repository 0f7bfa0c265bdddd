"""Truncated (multi-)simplicial groups: multinerve, Segal maps, diagonal,
Moore complex and homotopy groups, weak equivalences, and the functor R.

Levels are :class:`VGroup` s (explicit row lists inside a power of one base
group); face and degeneracy operators act on batches of rows.  For the
multinerve an element of level (p_1..p_n) is an array of shape
(s_n, .., s_1), s_a = max(p_a, 1), flattened in C order; along direction a
the slices are the composable arrows x_1..x_P (t_a x_j = d_a x_{j+1}).

Face conventions along a direction, at level P:
  P = 1:  d_0 = t (target), d_1 = d (source);
  P >= 2: d_0 drops the first arrow, d_P the last, d_j composes x_j, x_{j+1};
  s_j inserts the identity at vertex j.
The Moore complex is N_q = {x : d_j x = 1 for j != q} with boundary d_q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fingrp as fg
from .catn import CatNGroup, CatNMap
from .errors import (FeasibilityExceeded, HypothesisViolated, SimplicialIdentityFailure, TruncationTooShallow,
                     check_feasible)
from .fingrp import FiniteGroup, GroupHom
from .vgroup import VGroup, coset_quotient, unique_rows, void_keys


# --------------------------------------------------------------------------
# nerve operators on arrays
# --------------------------------------------------------------------------

def nerve_face(G: CatNGroup, a: int, j: int, P: int, arr: np.ndarray, ax: int) -> np.ndarray:
    """Face d_j along direction a (array axis ``ax``) of a batch of nerve
    elements with P arrows along that axis."""
    T = G.total
    d, t = G.dk(a), G.tk(a)
    if P == 0:
        raise ValueError("no faces at level 0")
    if P == 1:
        if j == 0:
            return t[arr]
        if j == 1:
            return d[arr]
        raise ValueError("face index out of range")
    if j == 0:
        return np.take(arr, range(1, P), axis=ax)
    if j == P:
        return np.take(arr, range(0, P - 1), axis=ax)
    if not 0 < j < P:
        raise ValueError("face index out of range")
    x = np.take(arr, [j - 1], axis=ax)
    y = np.take(arr, [j], axis=ax)
    m = T.mul[T.mul[x, T.inv[t[x]]], y]
    parts = [np.take(arr, range(0, j - 1), axis=ax), m, np.take(arr, range(j + 1, P), axis=ax)]
    return np.concatenate(parts, axis=ax)


def nerve_degen(G: CatNGroup, a: int, j: int, P: int, arr: np.ndarray, ax: int) -> np.ndarray:
    """Degeneracy s_j along direction a: insert the identity at vertex j."""
    if P == 0:
        if j != 0:
            raise ValueError("degeneracy index out of range")
        return arr
    if not 0 <= j <= P:
        raise ValueError("degeneracy index out of range")
    if j < P:
        ins = G.dk(a)[np.take(arr, [j], axis=ax)]
    else:
        ins = G.tk(a)[np.take(arr, [P - 1], axis=ax)]
    return np.concatenate([np.take(arr, range(0, j), axis=ax), ins,
                           np.take(arr, range(j, P), axis=ax)], axis=ax)


def spine_join(n_rows: int, src: np.ndarray, tgt: np.ndarray, k: int, what: str) -> np.ndarray:
    """Index tuples (i_1..i_k) with tgt[i_j] == src[i_{j+1}]."""
    order = np.argsort(src, kind="stable")
    s_sorted = src[order]
    T = np.arange(n_rows)[:, None]
    for _ in range(k - 1):
        c = tgt[T[:, -1]]
        lo = np.searchsorted(s_sorted, c, "left")
        hi = np.searchsorted(s_sorted, c, "right")
        cnt = hi - lo
        total = int(cnt.sum())
        check_feasible(total, what)
        rep = np.repeat(np.arange(len(T)), cnt)
        start = np.repeat(np.cumsum(cnt) - cnt, cnt)
        idx = lo[rep] + (np.arange(total) - start)
        T = np.concatenate([T[rep], order[idx][:, None]], axis=1)
    return T


def _codes(*row_sets: np.ndarray) -> list[np.ndarray]:
    """Common integer codes for several row arrays (equal rows, equal codes)."""
    keys = np.concatenate([void_keys(r) for r in row_sets])
    _, inv = np.unique(keys, return_inverse=True)
    out, pos = [], 0
    for r in row_sets:
        out.append(inv[pos:pos + len(r)])
        pos += len(r)
    return out


# --------------------------------------------------------------------------
# multi-simplicial groups
# --------------------------------------------------------------------------

class TruncatedMultiSimplicialGroup:
    """A lazily materialized n-fold simplicial group, truncated at K in every
    direction.  Subclasses provide ``_build_level``, ``face`` and ``degen``."""

    def __init__(self, n: int, K: int, base: FiniteGroup):
        self.n = n
        self.K = K
        self.base = base
        self._levels: dict[tuple, VGroup] = {}

    def _norm(self, p) -> tuple:
        if isinstance(p, (int, np.integer)):
            p = (int(p),)
        p = tuple(int(x) for x in p)
        if len(p) != self.n:
            raise ValueError(f"multi-index {p} has wrong length for n={self.n}")
        return p

    def level(self, p) -> VGroup:
        p = self._norm(p)
        if any(x < 0 for x in p):
            raise ValueError("negative level")
        if p not in self._levels:
            self._levels[p] = self._build_level(p)
        return self._levels[p]

    def _build_level(self, p) -> VGroup:
        raise NotImplementedError

    def face(self, a: int, j: int, p, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def degen(self, a: int, j: int, p, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def lower(self, p, a):
        p = list(self._norm(p))
        p[a - 1] -= 1
        return tuple(p)

    def raise_(self, p, a):
        p = list(self._norm(p))
        p[a - 1] += 1
        return tuple(p)


def _axis(n: int, a: int) -> int:
    """Array axis (batch axis 0 included) of direction a."""
    return 1 + (n - a)


class Multinerve(TruncatedMultiSimplicialGroup):
    """The multinerve of a cat^n-group; ``support`` optionally restricts all
    entries to a sub-cat^n-group (given by its elements in the total)."""

    def __init__(self, G: CatNGroup, K: int | None = None, support=None):
        super().__init__(G.n, G.n + 2 if K is None else K, G.total)
        self.G = G
        mask = np.ones(G.order, dtype=bool)
        if support is not None:
            mask[:] = False
            mask[np.asarray(support)] = True
        self.support = mask

    def _support(self, p) -> np.ndarray:
        return self.support

    def shape(self, p) -> tuple:
        p = self._norm(p)
        return tuple(max(p[a - 1], 1) for a in range(self.n, 0, -1))

    def _arr(self, p, X):
        return np.asarray(X).reshape((-1,) + self.shape(p))

    def _build_level(self, p) -> VGroup:
        G, n = self.G, self.n
        big = [a for a in range(1, n + 1) if p[a - 1] >= 2]
        if not big:
            mask = self._support(p).copy()
            ar = np.arange(G.order)
            for a in range(1, n + 1):
                if p[a - 1] == 0:
                    mask &= G.dk(a) == ar
            rows = np.flatnonzero(mask)[:, None]
            return VGroup(G.total, self.shape(p), rows, presorted=True)
        a = big[-1]
        P = p[a - 1]
        p1 = list(p)
        p1[a - 1] = 1
        base = self.level(tuple(p1))
        arr = self._arr(p1, base.elems)
        ax = _axis(n, a)
        src_rows = G.dk(a)[arr].reshape(len(arr), -1)
        tgt_rows = G.tk(a)[arr].reshape(len(arr), -1)
        src, tgt = _codes(src_rows.astype(base.dtype), tgt_rows.astype(base.dtype))
        T = spine_join(base.order, src, tgt, P, f"multinerve level {p}")
        check_feasible(len(T), f"multinerve level {p}")
        sq = np.squeeze(arr, axis=ax)             # (M, ...rest)
        stacked = sq[T]                           # (M', P, ...rest)
        full = np.moveaxis(stacked, 1, ax)
        return VGroup(G.total, self.shape(p), full.reshape(len(T), -1))

    def face(self, a, j, p, X):
        p = self._norm(p)
        arr = self._arr(p, X)
        out = nerve_face(self.G, a, j, p[a - 1], arr, _axis(self.n, a))
        return out.reshape(len(arr), -1).astype(self.level(p).dtype)

    def degen(self, a, j, p, X):
        p = self._norm(p)
        arr = self._arr(p, X)
        out = nerve_degen(self.G, a, j, p[a - 1], arr, _axis(self.n, a))
        return out.reshape(len(arr), -1).astype(self.level(p).dtype)


def multinerve(G: CatNGroup, K: int | None = None) -> Multinerve:
    return Multinerve(G, K)


class SliceMSG(TruncatedMultiSimplicialGroup):
    """Fix direction ``axis`` of X at ``value``; the remaining directions keep
    their order."""

    def __init__(self, X: TruncatedMultiSimplicialGroup, axis: int, value: int):
        super().__init__(X.n - 1, X.K, X.base)
        self.X, self.axis, self.value = X, axis, value
        self.dirs = [b for b in range(1, X.n + 1) if b != axis]

    def full(self, p) -> tuple:
        p = list(self._norm(p))
        p.insert(self.axis - 1, self.value)
        return tuple(p)

    def _build_level(self, p):
        return self.X.level(self.full(p))

    def face(self, a, j, p, X):
        return self.X.face(self.dirs[a - 1], j, self.full(p), X)

    def degen(self, a, j, p, X):
        return self.X.degen(self.dirs[a - 1], j, self.full(p), X)


def spine_edge(X: TruncatedMultiSimplicialGroup, r: int, p, i: int, rows: np.ndarray) -> np.ndarray:
    """The i-th spine edge (vertices i-1, i) along direction r of elements at
    level p (direction r at k = p_r)."""
    p = list(X._norm(p))
    k = p[r - 1]
    for _ in range(k - i):                 # drop top vertices
        rows = X.face(r, p[r - 1], tuple(p), rows)
        p[r - 1] -= 1
    for _ in range(i - 1):                 # drop bottom vertices
        rows = X.face(r, 0, tuple(p), rows)
        p[r - 1] -= 1
    return rows


class SegalMSG(TruncatedMultiSimplicialGroup):
    """The k-fold fibre product X_1 ×_{X_0} .. ×_{X_0} X_1 along direction r,
    as an (n-1)-fold simplicial group; an element is the concatenation of k
    rows of level X(.., 1, ..) with target(y_i) = source(y_{i+1})."""

    def __init__(self, X: TruncatedMultiSimplicialGroup, r: int, k: int):
        super().__init__(X.n - 1, X.K, X.base)
        self.X, self.r, self.k = X, r, k
        self.dirs = [b for b in range(1, X.n + 1) if b != r]

    def at(self, p, v):
        p = list(self._norm(p))
        p.insert(self.r - 1, v)
        return tuple(p)

    def _build_level(self, p):
        X, r, k = self.X, self.r, self.k
        p1, p0 = self.at(p, 1), self.at(p, 0)
        Y1, Y0 = X.level(p1), X.level(p0)
        if k == 0:
            return Y0
        tgt = Y0.index(X.face(r, 0, p1, Y1.elems))
        src = Y0.index(X.face(r, 1, p1, Y1.elems))
        T = spine_join(Y1.order, src, tgt, k, f"Segal fibre product {p}")
        check_feasible(len(T), f"Segal fibre product {p}")
        rows = Y1.elems[T].reshape(len(T), -1)
        return VGroup(X.base, (k,) + Y1.shape, rows)

    def _slots(self, p, rows):
        N1 = self.X.level(self.at(p, 1)).N
        return [rows[:, i * N1:(i + 1) * N1] for i in range(self.k)]

    def face(self, a, j, p, X):
        if self.k == 0:
            return self.X.face(self.dirs[a - 1], j, self.at(p, 0), X)
        b = self.dirs[a - 1]
        return np.concatenate([self.X.face(b, j, self.at(p, 1), s) for s in self._slots(p, X)], axis=1)

    def degen(self, a, j, p, X):
        if self.k == 0:
            return self.X.degen(self.dirs[a - 1], j, self.at(p, 0), X)
        b = self.dirs[a - 1]
        return np.concatenate([self.X.degen(b, j, self.at(p, 1), s) for s in self._slots(p, X)], axis=1)


# --------------------------------------------------------------------------
# maps of multi-simplicial groups
# --------------------------------------------------------------------------

@dataclass
class MSGMap:
    """A levelwise map; ``fn(p, rows)`` sends rows of source level p to rows
    of target level p."""
    source: TruncatedMultiSimplicialGroup
    target: TruncatedMultiSimplicialGroup
    fn: object

    def __call__(self, p, rows):
        return self.fn(p, rows)


def entrywise_map(f: CatNMap, K: int | None = None, source=None, target=None) -> MSGMap:
    """N f for a map of cat^n-groups: f applied to every entry."""
    S = source or Multinerve(f.source, K)
    T = target or Multinerve(f.target, K)
    m = f.hom.map
    return MSGMap(S, T, lambda p, rows: m[rows])


def segal_map(X: TruncatedMultiSimplicialGroup, r: int, k: int) -> MSGMap:
    S = SliceMSG(X, r, k)
    T = SegalMSG(X, r, k)

    def fn(p, rows):
        full = S.full(p)
        return np.concatenate([spine_edge(X, r, full, i, rows) for i in range(1, k + 1)], axis=1)
    return MSGMap(S, T, fn)


@dataclass
class SegalResult:
    ok: bool
    direction: int
    k: int
    checked: list = field(default_factory=list)
    reason: str | None = None


def segal_check(X, r: int = 1, k: int = 2, rest=None) -> SegalResult:
    """Decide whether the Segal map η_k along direction r is an isomorphism
    at the given values of the other directions (default: every choice in
    {0,1}).  A failure is a result, not an exception."""
    if isinstance(X, TruncatedSimplicialGroup):
        X = TSGasMSG(X)
    eta = segal_map(X, r, k)
    if rest is None:
        rest = list(itertools.product((0, 1), repeat=X.n - 1))
    res = SegalResult(True, r, k)
    for p in rest:
        p = tuple(p)
        A = eta.source.level(p)
        B = eta.target.level(p)
        img = eta(p, A.elems)
        idx = B.find(img)
        n_img = len(np.unique(idx[idx >= 0]))
        entry = {"rest": list(p), "source": A.order, "target": B.order, "image": n_img}
        res.checked.append(entry)
        if (idx < 0).any():
            res.ok, res.reason = False, f"η_{k} leaves the fibre product at {p}"
        elif n_img != A.order:
            res.ok, res.reason = False, f"η_{k} not injective at {p}"
        elif n_img != B.order:
            res.ok, res.reason = False, f"η_{k} not surjective at {p}"
        if not res.ok:
            break
    return res


# --------------------------------------------------------------------------
# simplicial groups
# --------------------------------------------------------------------------

class TruncatedSimplicialGroup:
    """Levels 0..K with faces d_j: level q -> q-1 and degeneracies
    s_j: level q -> q+1 acting on row batches."""
    K: int

    def level(self, q: int) -> VGroup:
        raise NotImplementedError

    def face(self, j: int, q: int, X):
        raise NotImplementedError

    def degen(self, j: int, q: int, X):
        raise NotImplementedError


class Diagonal(TruncatedSimplicialGroup):
    def __init__(self, X: TruncatedMultiSimplicialGroup):
        self.X = X
        self.K = X.K

    def level(self, q):
        if self.X.n == 0:
            return self.X.level(())
        return self.X.level((q,) * self.X.n)

    def face(self, j, q, rows):
        p = [q] * self.X.n
        for a in range(1, self.X.n + 1):
            rows = self.X.face(a, j, tuple(p), rows)
            p[a - 1] -= 1
        return rows

    def degen(self, j, q, rows):
        p = [q] * self.X.n
        for a in range(1, self.X.n + 1):
            rows = self.X.degen(a, j, tuple(p), rows)
            p[a - 1] += 1
        return rows


def diagonal(X) -> TruncatedSimplicialGroup:
    """(diag X)_q = X(q, .., q) with all faces/degeneracies applied together."""
    if isinstance(X, TruncatedSimplicialGroup):
        return X
    if isinstance(X, CatNGroup):
        X = Multinerve(X)
    return Diagonal(X)


class TSGasMSG(TruncatedMultiSimplicialGroup):
    def __init__(self, S: TruncatedSimplicialGroup):
        # the Segal target is built from level-1 rows
        super().__init__(1, S.K, S.level(min(1, S.K)).base)
        self.S = S

    def _build_level(self, p):
        return self.S.level(p[0])

    def face(self, a, j, p, X):
        return self.S.face(j, self._norm(p)[0], X)

    def degen(self, a, j, p, X):
        return self.S.degen(j, self._norm(p)[0], X)


class TabulatedSimplicialGroup(TruncatedSimplicialGroup):
    """A simplicial group given by explicit groups and homomorphism arrays:
    faces[(j, q)] maps level q to q-1, degens[(j, q)] maps q to q+1."""

    def __init__(self, groups: list[FiniteGroup], faces: dict, degens: dict):
        self.groups = groups
        self.K = len(groups) - 1
        self.faces = {k: np.asarray(v) for k, v in faces.items()}
        self.degens = {k: np.asarray(v) for k, v in degens.items()}
        self._lv = [VGroup(g, (1,), np.arange(g.order)[:, None], presorted=True) for g in groups]

    def level(self, q):
        return self._lv[q]

    def face(self, j, q, X):
        return self.faces[(j, q)][np.asarray(X).reshape(-1)][:, None].astype(self._lv[q - 1].dtype)

    def degen(self, j, q, X):
        return self.degens[(j, q)][np.asarray(X).reshape(-1)][:, None].astype(self._lv[q + 1].dtype)


def constant_simplicial_group(H: FiniteGroup, K: int = 3) -> TabulatedSimplicialGroup:
    ar = np.arange(H.order)
    faces = {(j, q): ar for q in range(1, K + 1) for j in range(q + 1)}
    degens = {(j, q): ar for q in range(K) for j in range(q + 1)}
    return TabulatedSimplicialGroup([H] * (K + 1), faces, degens)


def group_nerve_msg(H: FiniteGroup, K: int = 3) -> Multinerve:
    """The nerve of H as a one-object groupoid (requires H abelian for the
    cat^1 presentation)."""
    from .catn import one_object
    return Multinerve(one_object(H, 1), K)


# --------------------------------------------------------------------------
# simplicial identities
# --------------------------------------------------------------------------

def check_simplicial_identities(S: TruncatedSimplicialGroup, K: int | None = None,
                                sample: int | None = None, defects: list | None = None) -> None:
    """Exhaustively check the simplicial identities between levels 0..K
    (on all elements, or on the first ``sample`` rows of each level).  With
    ``defects`` given, failing equations are appended there instead of
    raising (operators leaving their level still raise)."""
    K = S.K if K is None else K

    def rows(q):
        e = S.level(q).elems
        return e if sample is None else e[:sample]

    def eq(a, b, what):
        if not np.array_equal(a, b):
            if defects is None:
                raise SimplicialIdentityFailure(what)
            defects.append(what)

    for q in range(0, K + 1):
        X = rows(q)
        if q >= 1:
            for j in range(q + 1):
                Y = S.face(j, q, X)
                if not S.level(q - 1).contains(Y).all():
                    raise SimplicialIdentityFailure(f"d_{j} leaves level {q - 1}")
        if q >= 2:
            for i in range(q + 1):
                for j in range(i + 1, q + 1):
                    eq(S.face(i, q - 1, S.face(j, q, X)), S.face(j - 1, q - 1, S.face(i, q, X)),
                       f"d_{i} d_{j} = d_{j - 1} d_{i} at level {q}")
        if q < K:
            for j in range(q + 1):
                Y = S.degen(j, q, X)
                if not S.level(q + 1).contains(Y).all():
                    raise SimplicialIdentityFailure(f"s_{j} leaves level {q + 1}")
                for i in range(q + 2):
                    lhs = S.face(i, q + 1, Y)
                    if i < j:
                        rhs = S.degen(j - 1, q - 1, S.face(i, q, X))
                    elif i in (j, j + 1):
                        rhs = X
                    else:
                        rhs = S.degen(j, q - 1, S.face(i - 1, q, X))
                    eq(lhs, rhs, f"d_{i} s_{j} at level {q}")
            if q + 1 < K:
                for i in range(q + 1):
                    for j in range(i, q + 1):
                        eq(S.degen(i, q + 1, S.degen(j, q, X)), S.degen(j + 1, q + 1, S.degen(i, q, X)),
                           f"s_{i} s_{j} = s_{j + 1} s_{i} at level {q}")


def check_msg_identities(X: TruncatedMultiSimplicialGroup, top: int | None = None,
                         sample: int | None = None, defects: list | None = None) -> None:
    """Simplicial identities along each direction, and commutation of
    operators in distinct directions, on all levels with coordinates ≤ top.
    With ``defects`` given, failures along a direction are collected as
    (direction, fixed multi-index, equation)."""
    top = X.K if top is None else top
    for a in range(1, X.n + 1):
        for rest in itertools.product(range(top + 1), repeat=X.n - 1):
            p = list(rest)
            p.insert(a - 1, 0)
            found = [] if defects is not None else None
            check_simplicial_identities(_Restricted(X, a, tuple(p)), K=top, sample=sample,
                                        defects=found)
            if found:
                defects.extend((a, tuple(rest), w) for w in found)
    for p in itertools.product(range(top + 1), repeat=X.n):
        rows = X.level(p).elems if sample is None else X.level(p).elems[:sample]
        for a in range(1, X.n + 1):
            for b in range(1, X.n + 1):
                if a == b:
                    continue
                pa, pb = p[a - 1], p[b - 1]
                ops_a = [("d", j) for j in range(pa + 1) if pa] + \
                        ([("s", j) for j in range(pa + 1)] if pa < top else [])
                ops_b = [("d", j) for j in range(pb + 1) if pb] + \
                        ([("s", j) for j in range(pb + 1)] if pb < top else [])
                for oa in ops_a:
                    for ob in ops_b:
                        l1 = _apply(X, b, ob, _shift(p, a, oa), _apply(X, a, oa, p, rows))
                        l2 = _apply(X, a, oa, _shift(p, b, ob), _apply(X, b, ob, p, rows))
                        if not np.array_equal(l1, l2):
                            raise SimplicialIdentityFailure(
                                f"{oa[0]}_{oa[1]} (direction {a}) and {ob[0]}_{ob[1]} "
                                f"(direction {b}) do not commute at {p}")


def _shift(p, a, op):
    p = list(p)
    p[a - 1] += -1 if op[0] == "d" else 1
    return tuple(p)


def _apply(X, a, op, p, rows):
    return X.face(a, op[1], p, rows) if op[0] == "d" else X.degen(a, op[1], p, rows)


class _Restricted(TruncatedSimplicialGroup):
    """The simplicial group along direction a with the other coordinates of
    p fixed."""

    def __init__(self, X, a, p):
        self.X, self.a, self.p = X, a, list(p)
        self.K = X.K

    def _p(self, q):
        p = list(self.p)
        p[self.a - 1] = q
        return tuple(p)

    def level(self, q):
        return self.X.level(self._p(q))

    def face(self, j, q, rows):
        return self.X.face(self.a, j, self._p(q), rows)

    def degen(self, j, q, rows):
        return self.X.degen(self.a, j, self._p(q), rows)


# --------------------------------------------------------------------------
# Moore complex and homotopy groups
# --------------------------------------------------------------------------

@dataclass
class MooreComplex:
    """N_q (as row subsets of level q) for q = 0..top; boundary = d_q."""
    S: TruncatedSimplicialGroup
    N: list

    def boundary(self, q: int) -> np.ndarray:
        return self.S.face(q, q, self.N[q].elems)


def moore_complex(S: TruncatedSimplicialGroup, top: int) -> MooreComplex:
    if top > S.K:
        raise TruncationTooShallow(f"need level {top}, truncation is {S.K}", needed=top, K=S.K)
    Ns = []
    for q in range(top + 1):
        L = S.level(q)
        keep = np.ones(L.order, dtype=bool)
        for j in range(q):
            img = S.face(j, q, L.elems)
            keep &= ~img.any(axis=1)
        Ns.append(VGroup(L.base, L.shape, L.elems[keep], presorted=True))
    return MooreComplex(S, Ns)


@dataclass
class HomotopyData:
    """π_0..π_top with the cycle/boundary groups used to build them."""
    pis: list
    Z: list
    B: list
    labels: list

    def classify(self, q: int, rows) -> np.ndarray:
        idx = self.Z[q].find(rows)
        if (idx < 0).any():
            raise AssertionError("row is not a cycle")
        return self.labels[q][idx]


def homotopy_data(S: TruncatedSimplicialGroup, max_q: int) -> HomotopyData:
    if max_q + 1 > S.K:
        raise TruncationTooShallow(f"π_{max_q} needs level {max_q + 1}, truncation is {S.K}",
                                   needed=max_q + 1, K=S.K)
    M = moore_complex(S, max_q + 1)
    pis, Zs, Bs, labels = [], [], [], []
    for q in range(max_q + 1):
        Nq = M.N[q]
        if q == 0:
            Z = Nq
        else:
            bd = M.boundary(q)
            Z = VGroup(Nq.base, Nq.shape, Nq.elems[~bd.any(axis=1)], presorted=True)
        brows = unique_rows(M.boundary(q + 1))
        B = VGroup(Z.base, Z.shape, brows, presorted=True)
        try:
            Q, lab = coset_quotient(Z, B, name=f"pi_{q}")
        except FeasibilityExceeded as exc:
            exc.info.setdefault("level", q)
            raise
        pis.append(Q)
        Zs.append(Z)
        Bs.append(B)
        labels.append(lab)
    return HomotopyData(pis, Zs, Bs, labels)


class Level0Reconstruction(TruncatedSimplicialGroup):
    """S with level 0 rebuilt from levels >= 1: X_0 := Im(d_2 s_0) ⊆ X_1,
    d_1 := d_2 s_0, d_0 := d_0 s_1 on level 1, s_0 := inclusion.  For a
    simplicial group this is isomorphic to S through s_0; for objects whose
    level 0 was replaced (discrete nerves) it recovers the simplicial group
    carried by the positive levels."""

    def __init__(self, S: TruncatedSimplicialGroup):
        if S.K < 2:
            raise TruncationTooShallow("level-0 reconstruction needs level 2", needed=2, K=S.K)
        self.S = S
        self.K = S.K
        L1 = S.level(1)
        e1 = S.face(2, 2, S.degen(0, 1, L1.elems))
        self._L0 = VGroup(L1.base, L1.shape, unique_rows(e1.astype(L1.dtype)), presorted=True)

    def level(self, q):
        return self._L0 if q == 0 else self.S.level(q)

    def face(self, j, q, rows):
        if q == 1:
            return self.S.face(2, 2, self.S.degen(0, 1, rows)) if j == 1 else \
                self.S.face(0, 2, self.S.degen(1, 1, rows))
        return self.S.face(j, q, rows)

    def degen(self, j, q, rows):
        return rows if q == 0 else self.S.degen(j, q, rows)


def homotopy_data_positive(S, max_q: int) -> HomotopyData:
    """π_0..π_max_q computed from the positive levels only (see
    :class:`Level0Reconstruction`)."""
    return homotopy_data(Level0Reconstruction(diagonal(S)), max_q)


def moore_homotopy(S, max_q: int) -> list[FiniteGroup]:
    """π_0..π_max_q of a truncated simplicial group (or of the diagonal of a
    multi-simplicial group / cat^n-group)."""
    return homotopy_data(diagonal(S), max_q).pis


def induced_pi_maps(f: MSGMap | CatNMap, max_q: int, src: HomotopyData | None = None,
                    tgt: HomotopyData | None = None, K: int | None = None,
                    positive: bool = False):
    """Maps π_q(diag source) → π_q(diag target) computed on representatives;
    well-definedness (boundaries to boundaries, cycles to cycles) asserted.
    ``positive`` computes both sides from the positive levels only."""
    if isinstance(f, CatNMap):
        K = max_q + 1 if K is None else K
        if positive:
            K = max(K, 2)
        f = entrywise_map(f, K)
    Sd, Td = diagonal(f.source), diagonal(f.target)
    if positive:
        Sd, Td = Level0Reconstruction(Sd), Level0Reconstruction(Td)
    n = f.source.n
    src = src or homotopy_data(Sd, max_q)
    tgt = tgt or homotopy_data(Td, max_q)
    maps = []
    for q in range(max_q + 1):
        p = (max(q, 1) if positive else q,) * n
        imgB = f(p, src.B[q].elems)
        if not (tgt.classify(q, imgB) == 0).all():
            raise AssertionError(f"induced map on π_{q} is not well defined")
        reps = src.pis[q].embedding
        m = tgt.classify(q, f(p, reps.astype(Sd.level(q).dtype)))
        maps.append(GroupHom(src.pis[q], tgt.pis[q], m))
    return maps, src, tgt


@dataclass
class WeakEquivalenceResult:
    ok: bool
    maps: list
    source_pi: list
    target_pi: list
    failed_q: int | None = None

    def __bool__(self):
        return self.ok


def is_weak_equivalence(f, max_q: int | None = None, K: int | None = None,
                        positive: bool = False) -> WeakEquivalenceResult:
    """Decide whether f induces isomorphisms on π_0..π_max_q of diagonals."""
    n = f.source.n
    max_q = n if max_q is None else max_q
    maps, s, t = induced_pi_maps(f, max_q, K=K, positive=positive)
    for q, h in enumerate(maps):
        if not h.is_isomorphism():
            return WeakEquivalenceResult(False, maps, s.pis, t.pis, q)
    return WeakEquivalenceResult(True, maps, s.pis, t.pis)


def pi_lists_isomorphic(A: list[FiniteGroup], B: list[FiniteGroup]) -> bool:
    return len(A) == len(B) and all(fg.are_isomorphic(a, b) is not None for a, b in zip(A, B))


# --------------------------------------------------------------------------
# n = 1 closed forms
# --------------------------------------------------------------------------

def pi0_cat(G: CatNGroup) -> tuple[FiniteGroup, GroupHom]:
    """π_0 = G_0 / t(ker d) with the projection from G_0 = Im d (the
    subgroup has embedding into G.total)."""
    if G.n != 1:
        raise ValueError("pi0_cat needs n = 1")
    T = G.total
    G0 = fg.subgroup(T, np.flatnonzero(G.objects_mask(1)), name="G0")
    rel = np.unique(G.tk(1)[np.flatnonzero(G.dk(1) == 0)])
    pos = np.full(T.order, -1)
    pos[G0.embedding] = np.arange(G0.order)
    Q, proj = fg.quotient_by_normal_closure(G0, pos[rel])
    Q.name = "pi_0"
    return Q, proj


def homotopy_cat1(G: CatNGroup) -> tuple[FiniteGroup, FiniteGroup]:
    """(π_0, π_1) = (G_0 / t(ker d), ker d ∩ ker t)."""
    if G.n != 1:
        raise ValueError("homotopy_cat1 needs n = 1")
    pi0, _ = pi0_cat(G)
    k = np.flatnonzero((G.dk(1) == 0) & (G.tk(1) == 0))
    pi1 = fg.subgroup(G.total, k, name="pi_1")
    return pi0, pi1


def pi0_map(f: CatNMap) -> GroupHom:
    """π_0 f for a map of cat^1-groups."""
    A, pA = pi0_cat(f.source)
    B, pB = pi0_cat(f.target)
    posB = np.full(f.target.order, -1)
    posB[pB.source.embedding] = np.arange(pB.source.order)
    reps = pA.source.embedding[A.embedding]          # G_0 elements of π_0 reps
    return GroupHom(A, B, pB.map[posB[f.hom.map[reps]]])


# --------------------------------------------------------------------------
# R = diag ∘ (levelwise group nerve), truncated simplicial sets
# --------------------------------------------------------------------------

class TruncatedSimplicialSet:
    """R S: level 0 a point, level k the k-fold power of the set S_k, with
    faces/degeneracies of the diagonal of the bisimplicial set N(S_k)_l.

    The object is kept lazily; ``generating_data`` (levels 1..K of S with
    their operators) determines it completely and is what equality compares;
    ``materialize`` builds the explicit canonical form when small."""

    def __init__(self, S: TruncatedSimplicialGroup, K: int | None = None):
        self.S = S
        self.K = S.K if K is None else K

    def size(self, k: int) -> int:
        return 1 if k == 0 else self.S.level(k).order ** k

    def generating_data(self) -> dict:
        S, K = self.S, self.K
        data = {"levels": [], "faces": {}, "degens": {}}
        for q in range(1, K + 1):
            data["levels"].append(S.level(q).elems)
        for q in range(2, K + 1):
            for j in range(q + 1):
                data["faces"][(j, q)] = S.face(j, q, S.level(q).elems)
        for q in range(1, K):
            for j in range(q + 1):
                data["degens"][(j, q)] = S.degen(j, q, S.level(q).elems)
        return data

    def __eq__(self, other):
        if not isinstance(other, TruncatedSimplicialSet) or self.K != other.K:
            return False
        a, b = self.generating_data(), other.generating_data()
        if len(a["levels"]) != len(b["levels"]):
            return False
        if not all(x.shape == y.shape and np.array_equal(x, y) for x, y in zip(a["levels"], b["levels"])):
            return False
        for key in ("faces", "degens"):
            if a[key].keys() != b[key].keys():
                return False
            if not all(np.array_equal(a[key][k], b[key][k]) for k in a[key]):
                return False
        return True

    def materialize(self, bound: int = 200_000) -> dict | None:
        """Canonical explicit form {"K", "levels", "faces", "degeneracies"}:
        elements of level k are k-tuples of level-k row indices; faces and
        degeneracies are index arrays.  None if any level exceeds ``bound``."""
        S, K = self.S, self.K
        if any(self.size(k) > bound for k in range(K + 1)):
            return None
        levels = [np.zeros((1, 0), dtype=np.int64)]
        for k in range(1, K + 1):
            m = S.level(k).order
            levels.append(np.array(list(itertools.product(range(m), repeat=k)), dtype=np.int64).reshape(-1, k))
        faces, degens = {}, {}
        for k in range(1, K + 1):
            L = S.level(k)
            for i in range(k + 1):
                if k == 1:
                    faces[(i, k)] = np.zeros(len(levels[1]), dtype=np.int64)
                    continue
                # apply S-face d_i to every coordinate, then the nerve face d_i
                img = S.level(k - 1).index(S.face(i, k, L.elems))
                tup = img[levels[k]]
                tup = _group_nerve_face(S.level(k - 1), tup, i, k)
                faces[(i, k)] = _tuple_index(tup, S.level(k - 1).order)
        for k in range(0, K):
            for i in range(k + 1):
                if k == 0:
                    degens[(i, k)] = np.zeros(1, dtype=np.int64)   # the unit of S_1
                    continue
                L = S.level(k)
                img = S.level(k + 1).index(S.degen(i, k, L.elems))
                tup = img[levels[k]]
                tup = np.insert(tup, i, 0, axis=1)                 # insert the unit
                degens[(i, k)] = _tuple_index(tup, S.level(k + 1).order)
        return {"K": K, "levels": levels, "faces": faces, "degeneracies": degens}


def _group_nerve_face(L: VGroup, tup: np.ndarray, i: int, k: int) -> np.ndarray:
    """Face d_i of the nerve of the group L on k-tuples of indices."""
    if i == 0:
        return tup[:, 1:]
    if i == k:
        return tup[:, :-1]
    a = L.elems[tup[:, i - 1]]
    b = L.elems[tup[:, i]]
    prod = L.index(L.mul(a, b))
    return np.concatenate([tup[:, :i - 1], prod[:, None], tup[:, i + 1:]], axis=1)


def _tuple_index(tup: np.ndarray, m: int) -> np.ndarray:
    idx = np.zeros(len(tup), dtype=np.int64)
    for c in range(tup.shape[1]):
        idx = idx * m + tup[:, c]
    return idx


def R_flatten(S, K: int | None = None) -> TruncatedSimplicialSet:
    return TruncatedSimplicialSet(diagonal(S), K)


def materialized_equal(a: dict | None, b: dict | None) -> bool | None:
    """Bit-exact comparison of two materialized canonical forms (None if
    either is too large to materialize)."""
    if a is None or b is None:
        return None
    if a["K"] != b["K"] or len(a["levels"]) != len(b["levels"]):
        return False
    if not all(np.array_equal(x, y) for x, y in zip(a["levels"], b["levels"])):
        return False
    for key in ("faces", "degeneracies"):
        if a[key].keys() != b[key].keys() or not all(np.array_equal(a[key][k], b[key][k]) for k in a[key]):
            return False
    return True


def lemma_weak01_check(psi: TruncatedMultiSimplicialGroup, chi: TruncatedMultiSimplicialGroup,
                       K: int | None = None) -> bool:
    """Check the hypothesis (equal levels (p,q) for p > 0 and equal operators
    among them) and then that R diag ψ = R diag χ through level K."""
    if psi.n != 2 or chi.n != 2:
        raise HypothesisViolated("both objects must be bisimplicial")
    K = min(psi.K, chi.K) if K is None else K
    for p in range(1, K + 1):
        for q in range(0, K + 1):
            A, B = psi.level((p, q)), chi.level((p, q))
            if not A.same_elements(B):
                raise HypothesisViolated(f"levels differ at ({p},{q})", level=[p, q])
            X = A.elems
            if q >= 1:
                for i in range(q + 1):
                    if not np.array_equal(psi.face(2, i, (p, q), X), chi.face(2, i, (p, q), X)):
                        raise HypothesisViolated(f"vertical face d_{i} differs at ({p},{q})")
            if q < K:
                for i in range(q + 1):
                    if not np.array_equal(psi.degen(2, i, (p, q), X), chi.degen(2, i, (p, q), X)):
                        raise HypothesisViolated(f"vertical degeneracy s_{i} differs at ({p},{q})")
            if p >= 2:
                for i in range(p + 1):
                    if not np.array_equal(psi.face(1, i, (p, q), X), chi.face(1, i, (p, q), X)):
                        raise HypothesisViolated(f"horizontal face d_{i} differs at ({p},{q})")
            if p < K:
                for i in range(p + 1):
                    if not np.array_equal(psi.degen(1, i, (p, q), X), chi.degen(1, i, (p, q), X)):
                        raise HypothesisViolated(f"horizontal degeneracy s_{i} differs at ({p},{q})")
    a, b = R_flatten(psi, K), R_flatten(chi, K)
    if not a == b:
        return False
    m = materialized_equal(a.materialize(), b.materialize())
    return m is not False
