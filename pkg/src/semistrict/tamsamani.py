"""Finite groupoids, Tamsamani towers, τ_0 / τ_1, n-equivalences, the
delooping V_n and the functors T^(k).

An n-tower is a functor from (Δ^op)^(n-1) to groupoids, truncated at K; the
level of a multi-index p (length n-1) is a groupoid.  Outer direction 1 is
the simplicial direction of the Tamsamani recursion (φ_k = level (k, -)).

Groupoids built from multi-simplicial groups are *keyed*: objects and arrows
are rows of base-group entries (concatenated for products and fibre
products), the groupoid structure is that of an internal category in groups
applied entrywise (source d, target t, composition x t(x)^-1 y), and every
operator of a tower acts on keys.  Maps of towers are key maps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fingrp as fg
from .catn import CatNGroup
from .errors import NotANerve, ValidationFailed, check_feasible
from .fingrp import FiniteGroup
from .simplicial import Multinerve, MSGMap, TruncatedMultiSimplicialGroup, spine_join
from .vgroup import row_dtype, unique_rows, void_keys

IDX = np.int64


# --------------------------------------------------------------------------
# row lookup
# --------------------------------------------------------------------------

class RowIndex:
    """Sorted distinct rows with binary-search lookup (width 0 allowed)."""

    def __init__(self, rows: np.ndarray, presorted: bool = False):
        rows = np.ascontiguousarray(rows)
        if rows.ndim == 1:
            rows = rows[:, None]
        self.width = rows.shape[1]
        if self.width == 0:
            self.rows = rows[:1] if len(rows) else np.zeros((1, 0), dtype=rows.dtype)
            self.keys = None
        else:
            self.rows = rows if presorted else unique_rows(rows)
            self.keys = void_keys(self.rows)
        self.size = len(self.rows)

    def find(self, rows) -> np.ndarray:
        rows = np.asarray(rows, dtype=self.rows.dtype)
        if self.width == 0:
            return np.zeros(len(rows) if rows.ndim else 1, dtype=IDX)
        rows = np.ascontiguousarray(rows).reshape(-1, self.width)
        q = void_keys(rows)
        i = np.minimum(np.searchsorted(self.keys, q), self.size - 1)
        return np.where(self.keys[i] == q, i, -1).astype(IDX)

    def index(self, rows) -> np.ndarray:
        i = self.find(rows)
        if (i < 0).any():
            raise KeyError("key not present")
        return i


# --------------------------------------------------------------------------
# groupoids
# --------------------------------------------------------------------------

class FiniteGroupoid:
    """Objects 0..n_obj-1, arrows 0..n_arr-1 with src/tgt, identities,
    composition compose(x, y) = y∘x for tgt x = src y, and inverses."""
    n_obj: int
    n_arr: int
    src: np.ndarray
    tgt: np.ndarray
    ident: np.ndarray
    name: str | None = None

    def compose(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, x) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name or ''} objects={self.n_obj} arrows={self.n_arr}>"

    # -- structure ------------------------------------------------------------
    def components(self) -> tuple[np.ndarray, int]:
        """τ_0: labels of isomorphism classes, numbered by least object."""
        return union_find(self.n_obj, self.src, self.tgt)

    def hom(self, x: int, y: int) -> np.ndarray:
        return np.flatnonzero((self.src == x) & (self.tgt == y))

    def is_discrete(self) -> bool:
        return self.n_arr == self.n_obj and np.array_equal(self.ident, np.arange(self.n_obj)) \
            if np.array_equal(np.sort(self.ident), np.arange(self.n_arr)) else False

    def check(self, bound: int = 200_000) -> None:
        """Category axioms and invertibility (exhaustive on composable
        triples up to ``bound``, otherwise on composable pairs)."""
        a = np.arange(self.n_arr)
        if ((self.src < 0) | (self.src >= self.n_obj) | (self.tgt < 0) | (self.tgt >= self.n_obj)).any():
            raise ValidationFailed("source/target out of range")
        o = np.arange(self.n_obj)
        if not (np.array_equal(self.src[self.ident], o) and np.array_equal(self.tgt[self.ident], o)):
            raise ValidationFailed("identity has wrong endpoints")
        if not np.array_equal(self.compose(self.ident[self.src], a), a) or \
                not np.array_equal(self.compose(a, self.ident[self.tgt]), a):
            raise ValidationFailed("unit law fails")
        inv = self.inverse(a)
        if not (np.array_equal(self.compose(a, inv), self.ident[self.src])
                and np.array_equal(self.compose(inv, a), self.ident[self.tgt])):
            raise ValidationFailed("an arrow is not invertible")
        x, y = composable_pairs(self)
        if len(x) and len(x) * max(1, self.n_arr // max(self.n_obj, 1)) <= bound:
            xy = self.compose(x, y)
            by_src = np.argsort(self.src, kind="stable")
            starts = np.searchsorted(self.src[by_src], np.arange(self.n_obj + 1))
            for obj in range(self.n_obj):
                zs = by_src[starts[obj]:starts[obj + 1]]
                sel = np.flatnonzero(self.tgt[y] == obj)
                if not len(sel) or not len(zs):
                    continue
                X, Y = np.repeat(x[sel], len(zs)), np.repeat(y[sel], len(zs))
                Z = np.tile(zs, len(sel))
                if not np.array_equal(self.compose(np.repeat(xy[sel], len(zs)), Z),
                                      self.compose(X, self.compose(Y, Z))):
                    raise ValidationFailed("composition is not associative")

    def to_dict(self) -> dict:
        x, y = composable_pairs(self)
        z = self.compose(x, y)
        return {"objects": self.n_obj, "src": self.src.tolist(), "tgt": self.tgt.tolist(),
                "ident": self.ident.tolist(),
                "composition": np.column_stack([x, y, z]).tolist()}


def composable_pairs(G: FiniteGroupoid):
    order = np.argsort(G.src, kind="stable")
    starts = np.searchsorted(G.src[order], np.arange(G.n_obj + 1))
    xs, ys = [], []
    for obj in range(G.n_obj):
        ins = np.flatnonzero(G.tgt == obj)
        outs = order[starts[obj]:starts[obj + 1]]
        if len(ins) and len(outs):
            xs.append(np.repeat(ins, len(outs)))
            ys.append(np.tile(outs, len(ins)))
    if not xs:
        return np.zeros(0, dtype=IDX), np.zeros(0, dtype=IDX)
    return np.concatenate(xs), np.concatenate(ys)


def union_find(n: int, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, int]:
    """Classes of the equivalence generated by a[i] ~ b[i]; classes are
    numbered in order of their least element."""
    parent = np.arange(n)

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for u, v in zip(np.asarray(a).tolist(), np.asarray(b).tolist()):
        ru, rv = root(u), root(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    roots = np.array([root(i) for i in range(n)], dtype=IDX)
    _, labels = np.unique(roots, return_inverse=True)
    return labels.astype(IDX), int(labels.max()) + 1 if n else 0


class TableGroupoid(FiniteGroupoid):
    """A groupoid given by explicit tables (composition as a dict-free
    pair table with -1 off the composable pairs)."""

    def __init__(self, n_obj, src, tgt, ident, comp, inv=None, name=None):
        self.n_obj = int(n_obj)
        self.src = np.asarray(src, dtype=IDX)
        self.tgt = np.asarray(tgt, dtype=IDX)
        self.ident = np.asarray(ident, dtype=IDX)
        self.n_arr = len(self.src)
        self.table = np.asarray(comp, dtype=IDX).reshape(self.n_arr, self.n_arr)
        self.name = name
        if inv is None:
            a = np.arange(self.n_arr)
            inv = np.full(self.n_arr, -1, dtype=IDX)
            for x in a:
                cand = np.flatnonzero(self.table[x] == self.ident[self.src[x]])
                cand = [c for c in cand if self.table[c, x] == self.ident[self.tgt[x]]]
                if cand:
                    inv[x] = cand[0]
            if (inv < 0).any():
                raise ValidationFailed("an arrow is not invertible")
        self._inv = np.asarray(inv, dtype=IDX)
        self.obj_keys = RowIndex(np.arange(self.n_obj, dtype=">u4")[:, None], presorted=True)
        self.arr_keys = RowIndex(np.arange(self.n_arr, dtype=">u4")[:, None], presorted=True)

    def compose(self, x, y):
        z = self.table[np.asarray(x), np.asarray(y)]
        if (np.asarray(z) < 0).any():
            raise ValidationFailed("arrows are not composable")
        return z

    def inverse(self, x):
        return self._inv[np.asarray(x)]

    def with_keys(self, obj_rows, arr_rows, presorted=False) -> "TupleGroupoid":
        return TupleGroupoid(self, obj_rows, arr_rows, presorted)


class TupleGroupoid(FiniteGroupoid):
    """Tuples of objects/arrows of a table groupoid (keys are index
    tuples), with componentwise structure: products, fibre products and
    full subgroupoids of tabulated levels."""

    def __init__(self, parent: TableGroupoid, obj_rows, arr_rows, presorted=False):
        self.parent = parent
        self.obj_keys = RowIndex(np.asarray(obj_rows).astype(">u4"), presorted)
        self.arr_keys = RowIndex(np.asarray(arr_rows).astype(">u4"), presorted)
        self.n_obj, self.n_arr = self.obj_keys.size, self.arr_keys.size
        self.name = None
        A = self.arr_keys.rows.astype(IDX)
        self.src = self.obj_keys.index(parent.src[A])
        self.tgt = self.obj_keys.index(parent.tgt[A])
        self.ident = self.arr_keys.index(parent.ident[self.obj_keys.rows.astype(IDX)])

    def compose(self, x, y):
        ax = self.arr_keys.rows[np.asarray(x)].astype(IDX)
        ay = self.arr_keys.rows[np.asarray(y)].astype(IDX)
        return self.arr_keys.index(self.parent.compose(ax, ay))

    def inverse(self, x):
        return self.arr_keys.index(self.parent.inverse(self.arr_keys.rows[np.asarray(x)].astype(IDX)))

    def with_keys(self, obj_rows, arr_rows, presorted=False) -> "TupleGroupoid":
        return TupleGroupoid(self.parent, obj_rows, arr_rows, presorted)


class KeyGroupoid(FiniteGroupoid):
    """Underlying groupoid of an internal category in groups, restricted to
    a set of object/arrow keys; every operation acts entrywise on keys."""

    def __init__(self, base: FiniteGroup, d: np.ndarray, t: np.ndarray, obj_rows, arr_rows,
                 name=None, presorted: bool = False):
        self.base, self.d, self.t = base, np.asarray(d), np.asarray(t)
        self.obj_keys = RowIndex(obj_rows, presorted)
        self.arr_keys = RowIndex(arr_rows, presorted)
        self.n_obj, self.n_arr = self.obj_keys.size, self.arr_keys.size
        self.name = name
        A = self.arr_keys.rows
        self.src = self.obj_keys.index(self.d[A])
        self.tgt = self.obj_keys.index(self.t[A])
        self.ident = self.arr_keys.index(self.obj_keys.rows)

    @property
    def dtype(self):
        return self.arr_keys.rows.dtype

    def compose(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        if not np.array_equal(self.tgt[x], self.src[y]):
            raise ValidationFailed("arrows are not composable")
        B = self.base
        ax, ay = self.arr_keys.rows[x], self.arr_keys.rows[y]
        return self.arr_keys.index(B.mul[B.mul[ax, B.inv[self.t[ax]]], ay])

    def inverse(self, x):
        B = self.base
        a = self.arr_keys.rows[np.asarray(x)]
        return self.arr_keys.index(B.mul[B.mul[self.d[a], B.inv[a]], self.t[a]])

    def with_keys(self, obj_rows, arr_rows, presorted=False) -> "KeyGroupoid":
        return KeyGroupoid(self.base, self.d, self.t, obj_rows, arr_rows, presorted=presorted)


@dataclass(eq=False)
class GroupoidFunctor:
    source: FiniteGroupoid
    target: FiniteGroupoid
    obj: np.ndarray
    arr: np.ndarray

    def check(self) -> None:
        S, T = self.source, self.target
        if not (np.array_equal(self.obj[S.src], T.src[self.arr])
                and np.array_equal(self.obj[S.tgt], T.tgt[self.arr])):
            raise ValidationFailed("functor does not preserve source/target")
        if not np.array_equal(self.arr[S.ident], T.ident[self.obj]):
            raise ValidationFailed("functor does not preserve identities")
        x, y = composable_pairs(S)
        if len(x) and not np.array_equal(self.arr[S.compose(x, y)],
                                         T.compose(self.arr[x], self.arr[y])):
            raise ValidationFailed("functor does not preserve composition")

    def compose(self, other: "GroupoidFunctor") -> "GroupoidFunctor":
        return GroupoidFunctor(self.source, other.target, other.obj[self.obj], other.arr[self.arr])


def identity_functor(G: FiniteGroupoid) -> GroupoidFunctor:
    return GroupoidFunctor(G, G, np.arange(G.n_obj), np.arange(G.n_arr))


def discrete_groupoid(n: int) -> TableGroupoid:
    comp = np.full((n, n), -1)
    comp[np.arange(n), np.arange(n)] = np.arange(n)
    return TableGroupoid(n, np.arange(n), np.arange(n), np.arange(n), comp, name=f"disc{n}")


def one_object_groupoid(H: FiniteGroup) -> TableGroupoid:
    z = np.zeros(H.order, dtype=IDX)
    return TableGroupoid(1, z, z, [0], H.mul, inv=H.inv, name=f"B{H.name or ''}")


def pair_groupoid(n: int) -> TableGroupoid:
    """Codiscrete groupoid on n objects: one arrow (i, j) = i*n + j."""
    src = np.repeat(np.arange(n), n)
    tgt = np.tile(np.arange(n), n)
    comp = np.full((n * n, n * n), -1)
    for x in range(n * n):
        for y in range(n * n):
            if tgt[x] == src[y]:
                comp[x, y] = src[x] * n + tgt[y]
    return TableGroupoid(n, src, tgt, np.arange(n) * (n + 1), comp, name=f"pair{n}")


def underlying_groupoid(G: CatNGroup) -> KeyGroupoid:
    """U_1: objects Im d, arrows the total; composition x t(x)^-1 y."""
    if G.n != 1:
        raise ValueError("underlying groupoid needs a cat^1-group")
    dt = row_dtype(G.order)
    objs = np.flatnonzero(G.objects_mask(1)).astype(dt)[:, None]
    arrs = np.arange(G.order).astype(dt)[:, None]
    return KeyGroupoid(G.total, G.d[0], G.t[0], objs, arrs, name=f"U({G.name or 'G'})", presorted=True)


def functor_from_keys(S: FiniteGroupoid, T: FiniteGroupoid, obj_rows, arr_rows) -> GroupoidFunctor:
    try:
        return GroupoidFunctor(S, T, T.obj_keys.index(obj_rows), T.arr_keys.index(arr_rows))
    except KeyError:
        raise ValidationFailed("key map leaves the target groupoid")


def full_subgroupoid(G: FiniteGroupoid, objects) -> tuple[FiniteGroupoid, np.ndarray, np.ndarray]:
    """Full subgroupoid on sorted object indices; returns (H, obj_idx, arr_idx)."""
    objects = np.unique(np.asarray(objects, dtype=IDX))
    m = np.zeros(G.n_obj, dtype=bool)
    m[objects] = True
    arrs = np.flatnonzero(m[G.src] & m[G.tgt])
    H = G.with_keys(G.obj_keys.rows[objects], G.arr_keys.rows[arrs], presorted=True)
    return H, objects, arrs


# --------------------------------------------------------------------------
# equivalences of groupoids
# --------------------------------------------------------------------------

def groupoid_equivalence(F: GroupoidFunctor, exhaustive: bool | None = None) -> bool:
    """Essentially surjective and fully faithful.  The exhaustive mode
    compares every hom-set; the component mode compares π_0 and one vertex
    group per component (equivalent for groupoids; both are asserted to
    agree when the exhaustive mode is affordable)."""
    S, T = F.source, F.target
    ls, cs = S.components()
    lt, ct = T.components()
    ess = len(np.unique(lt[F.obj])) == ct
    # faithful on π_0: distinct components stay distinct
    inj0 = len(np.unique(lt[F.obj[np.unique(ls, return_index=True)[1]]])) == cs
    ok_c = ess and inj0
    if ok_c:
        for c in range(cs):
            x = int(np.flatnonzero(ls == c)[0])
            a = S.hom(x, x)
            fx = int(F.obj[x])
            b = T.hom(fx, fx)
            if len(a) != len(b) or len(np.unique(F.arr[a])) != len(a):
                ok_c = False
                break
    if exhaustive is None:
        exhaustive = S.n_obj * S.n_obj <= 400
    if not exhaustive:
        return ok_c
    ok_e = ess
    if ok_e:
        for x in range(S.n_obj):
            for y in range(S.n_obj):
                a = S.hom(x, y)
                b = T.hom(int(F.obj[x]), int(F.obj[y]))
                if len(a) != len(b) or len(np.unique(F.arr[a])) != len(a):
                    ok_e = False
                    break
            if not ok_e:
                break
    assert ok_e == ok_c, "equivalence criteria disagree"
    return ok_e


# --------------------------------------------------------------------------
# towers
# --------------------------------------------------------------------------

class Tower:
    """An n-tower: groupoids at multi-indices of length n-1 with key-level
    face and degeneracy operators (a = 1..n-1)."""

    def __init__(self, n: int, K: int):
        self.n, self.K = n, K
        self._cache: dict = {}

    def groupoid(self, p=()) -> FiniteGroupoid:
        p = tuple(int(x) for x in p)
        if len(p) != self.n - 1:
            raise ValueError(f"level {p} has wrong length for an {self.n}-tower")
        if p not in self._cache:
            self._cache[p] = self._build(p)
        return self._cache[p]

    def _build(self, p) -> FiniteGroupoid:
        raise NotImplementedError

    def face_keys(self, a, j, p, rows, kind):
        raise NotImplementedError

    def degen_keys(self, a, j, p, rows, kind):
        raise NotImplementedError

    def _op(self, a, j, p, delta, keyfn) -> GroupoidFunctor:
        S = self.groupoid(p)
        q = list(p)
        q[a - 1] += delta
        T = self.groupoid(tuple(q))
        return functor_from_keys(S, T, keyfn(a, j, p, S.obj_keys.rows, "obj"),
                                 keyfn(a, j, p, S.arr_keys.rows, "arr"))

    def face(self, a, j, p) -> GroupoidFunctor:
        return self._op(a, j, p, -1, self.face_keys)

    def degen(self, a, j, p) -> GroupoidFunctor:
        return self._op(a, j, p, 1, self.degen_keys)


class GroupoidTower(Tower):
    """A 1-tower: a single groupoid."""

    def __init__(self, G: FiniteGroupoid):
        super().__init__(1, 0)
        self.G = G

    def _build(self, p):
        return self.G


class UnderlyingTower(Tower):
    """U_n X: level p = underlying groupoid of the direction-n internal
    category of X at p (objects X(p,0), arrows X(p,1))."""

    def __init__(self, X: TruncatedMultiSimplicialGroup):
        super().__init__(X.n, X.K)
        self.X = X
        G = X.G
        self.base, self.d, self.t = G.total, G.dk(X.n), G.tk(X.n)

    def _build(self, p):
        X = self.X
        return KeyGroupoid(self.base, self.d, self.t, X.level(p + (0,)).elems,
                           X.level(p + (1,)).elems, presorted=True)

    def width(self, p) -> int:
        return self.X.level(tuple(p) + (0,)).N

    def _apply(self, op, delta, a, j, p, rows, kind):
        q = tuple(p) + (0 if kind == "obj" else 1,)
        if len(rows) == 0:
            tgt = list(q)
            tgt[a - 1] += delta
            return np.zeros((0, self.X.level(tuple(tgt)).N), dtype=rows.dtype)
        return op(a, j, q, rows)

    def face_keys(self, a, j, p, rows, kind):
        return self._apply(self.X.face, -1, a, j, p, rows, kind)

    def degen_keys(self, a, j, p, rows, kind):
        return self._apply(self.X.degen, 1, a, j, p, rows, kind)


class DeloopTower(Tower):
    """V_n X: level (r, p) = (U_n X)(p)^r, simplicial in r by the nerve of
    the group structure (d_0/d_r drop an end factor, d_i multiplies
    adjacent factors, s_i inserts the unit)."""

    def __init__(self, X: TruncatedMultiSimplicialGroup, K: int | None = None):
        super().__init__(X.n + 1, X.K if K is None else K)
        self.U = UnderlyingTower(X) if X.n >= 1 else None
        self.X = X
        self.base = X.base

    def _build(self, p):
        r, q = p[0], p[1:]
        G = self.U.groupoid(q)
        if r == 0:
            e = np.zeros((1, 0), dtype=G.dtype)
            return G.with_keys(e, e, presorted=True)
        check_feasible(G.n_arr ** r, f"delooped level {p}")
        objs = _power_rows(G.obj_keys.rows, r)
        arrs = _power_rows(G.arr_keys.rows, r)
        return G.with_keys(objs, arrs, presorted=True)

    def face_keys(self, a, j, p, rows, kind):
        r, q = p[0], p[1:]
        w = self.U.width(q)
        if a == 1:
            ch = [rows[:, i * w:(i + 1) * w] for i in range(r)]
            if j == 0:
                out = ch[1:]
            elif j == r:
                out = ch[:-1]
            else:
                out = ch[:j - 1] + [self.base.mul[ch[j - 1], ch[j]].astype(rows.dtype)] + ch[j + 1:]
            return _cat(out, rows)
        ch = [rows[:, i * w:(i + 1) * w] for i in range(r)]
        return _cat([self.U.face_keys(a - 1, j, q, c, kind) for c in ch], rows)

    def degen_keys(self, a, j, p, rows, kind):
        r, q = p[0], p[1:]
        w = self.U.width(q)
        ch = [rows[:, i * w:(i + 1) * w] for i in range(r)]
        if a == 1:
            ch.insert(j, np.zeros((len(rows), w), dtype=rows.dtype))
            return _cat(ch, rows)
        return _cat([self.U.degen_keys(a - 1, j, q, c, kind) for c in ch], rows)


def _power_rows(rows: np.ndarray, r: int) -> np.ndarray:
    m = len(rows)
    idx = np.array(list(itertools.product(range(m), repeat=r)), dtype=IDX).reshape(-1, r)
    return rows[idx].reshape(len(idx), -1)


def _cat(chunks, like):
    if not chunks:
        return np.zeros((len(like), 0), dtype=like.dtype)
    return np.concatenate(chunks, axis=1)


class OuterSlice(Tower):
    """φ_k: the (n-1)-tower T(k, -)."""

    def __init__(self, T: Tower, k: int):
        super().__init__(T.n - 1, T.K)
        self.T, self.k = T, k

    def _build(self, p):
        return self.T.groupoid((self.k,) + p)

    def face_keys(self, a, j, p, rows, kind):
        return self.T.face_keys(a + 1, j, (self.k,) + tuple(p), rows, kind)

    def degen_keys(self, a, j, p, rows, kind):
        return self.T.degen_keys(a + 1, j, (self.k,) + tuple(p), rows, kind)


def outer_spine(T: Tower, k: int, p, rows, kind) -> list:
    """Spine edges (as keys at level (1, p)) of keys at level (k, p)."""
    out = []
    for i in range(1, k + 1):
        cur, lev = rows, k
        for _ in range(k - i):
            cur = T.face_keys(1, lev, (lev,) + tuple(p), cur, kind)
            lev -= 1
        for _ in range(i - 1):
            cur = T.face_keys(1, 0, (lev,) + tuple(p), cur, kind)
            lev -= 1
        out.append(cur)
    return out


class SegalTarget(Tower):
    """φ_1 ×_{φ_0} .. ×_{φ_0} φ_1 (k factors) as an (n-1)-tower."""

    def __init__(self, T: Tower, k: int):
        super().__init__(T.n - 1, T.K)
        self.T, self.k = T, k

    def _build(self, p):
        T, k = self.T, self.k
        G1, G0 = T.groupoid((1,) + p), T.groupoid((0,) + p)
        parts = {}
        for kind, keys, base in (("obj", G1.obj_keys, G0.obj_keys), ("arr", G1.arr_keys, G0.arr_keys)):
            tgt = base.index(T.face_keys(1, 0, (1,) + p, keys.rows, kind))
            src = base.index(T.face_keys(1, 1, (1,) + p, keys.rows, kind))
            J = spine_join(keys.size, src, tgt, k, f"Segal target {p}")
            parts[kind] = keys.rows[J].reshape(len(J), -1)
        return G1.with_keys(parts["obj"], parts["arr"])

    def width(self, p):
        return self.T.groupoid((1,) + tuple(p)).obj_keys.width

    def face_keys(self, a, j, p, rows, kind):
        w = self.width(p)
        ch = [rows[:, i * w:(i + 1) * w] for i in range(self.k)]
        return _cat([self.T.face_keys(a + 1, j, (1,) + tuple(p), c, kind) for c in ch], rows)

    def degen_keys(self, a, j, p, rows, kind):
        w = self.width(p)
        ch = [rows[:, i * w:(i + 1) * w] for i in range(self.k)]
        return _cat([self.T.degen_keys(a + 1, j, (1,) + tuple(p), c, kind) for c in ch], rows)


def base_point_keys(T: Tower, x_rows: np.ndarray, p) -> np.ndarray:
    """Keys at level (0, p) of objects given at level (0, 0..0), moved by
    degeneracies (φ_0 is constant)."""
    cur = x_rows
    q = [0] * (T.n - 1)
    for a in range(2, T.n):
        for _ in range(p[a - 2]):
            cur = T.degen_keys(a, 0, tuple(q), cur, "obj")
            q[a - 1] += 1
    return cur


class SliceXY(Tower):
    """φ_(x,y): the part of φ_1 lying over (x, y) ∈ φ_0 × φ_0 (a full
    sub-tower; x, y are object indices of T(0, 0..0))."""

    def __init__(self, T: Tower, x: int, y: int):
        super().__init__(T.n - 1, T.K)
        self.T, self.x, self.y = T, x, y
        G0 = T.groupoid((0,) * (T.n - 1))
        self.xk = G0.obj_keys.rows[[x]]
        self.yk = G0.obj_keys.rows[[y]]

    def _build(self, p):
        T = self.T
        G1 = T.groupoid((1,) + p)
        G0 = T.groupoid((0,) + p)
        xi = G0.obj_keys.index(base_point_keys(T, self.xk, p))[0]
        yi = G0.obj_keys.index(base_point_keys(T, self.yk, p))[0]
        s = G0.obj_keys.index(T.face_keys(1, 1, (1,) + p, G1.obj_keys.rows, "obj"))
        t = G0.obj_keys.index(T.face_keys(1, 0, (1,) + p, G1.obj_keys.rows, "obj"))
        H, _, _ = full_subgroupoid(G1, np.flatnonzero((s == xi) & (t == yi)))
        return H

    def face_keys(self, a, j, p, rows, kind):
        return self.T.face_keys(a + 1, j, (1,) + tuple(p), rows, kind)

    def degen_keys(self, a, j, p, rows, kind):
        return self.T.degen_keys(a + 1, j, (1,) + tuple(p), rows, kind)


def slice_decomposition_ok(T: Tower, p=None) -> bool:
    """φ_1 = ∐_{x,y} φ_(x,y) at level p: the slices partition objects and
    arrows of T(1, p)."""
    p = (0,) * (T.n - 2) if p is None else tuple(p)
    G1 = T.groupoid((1,) + p)
    G0 = T.groupoid((0,) * (T.n - 1))
    tot_o = tot_a = 0
    for x in range(G0.n_obj):
        for y in range(G0.n_obj):
            H = SliceXY(T, x, y).groupoid(p)
            tot_o += H.n_obj
            tot_a += H.n_arr
    return tot_o == G1.n_obj and tot_a == G1.n_arr


# --------------------------------------------------------------------------
# maps of towers
# --------------------------------------------------------------------------

@dataclass(eq=False)
class TowerMap:
    """A map of towers given on keys: km(p, rows, kind) sends keys at
    level p of the source to keys at level p of the target."""
    source: Tower
    target: Tower
    km: object

    def functor(self, p=()) -> GroupoidFunctor:
        p = tuple(p)
        S, T = self.source.groupoid(p), self.target.groupoid(p)
        return functor_from_keys(S, T, self.km(p, S.obj_keys.rows, "obj"),
                                 self.km(p, S.arr_keys.rows, "arr"))


def entrywise_tower_map(A: Tower, B: Tower, m: np.ndarray) -> TowerMap:
    m = np.asarray(m)
    return TowerMap(A, B, lambda p, rows, kind: m[rows.astype(IDX)])


def identity_tower_map(T: Tower) -> TowerMap:
    return TowerMap(T, T, lambda p, rows, kind: rows)


def outer_slice_map(F: TowerMap, k: int) -> TowerMap:
    return TowerMap(OuterSlice(F.source, k), OuterSlice(F.target, k),
                    lambda p, rows, kind: F.km((k,) + tuple(p), rows, kind))


def segal_tower_map(T: Tower, k: int) -> TowerMap:
    return TowerMap(OuterSlice(T, k), SegalTarget(T, k),
                    lambda p, rows, kind: _cat(outer_spine(T, k, p, rows, kind), rows))


# --------------------------------------------------------------------------
# τ_0, τ_1
# --------------------------------------------------------------------------

def tau0(T: Tower) -> tuple[np.ndarray, int]:
    """τ_0^(n) as labels on the objects of T(0..0): for n = 1 the
    components; for n >= 2 the classes generated by d_1 u ~ d_0 u over the
    objects u of T(1, 0..0) (τ_0 = τ_0^(1) τ_1^(n))."""
    if T.n == 1:
        return T.groupoid(()).components()
    z = (0,) * (T.n - 1)
    G0 = T.groupoid(z)
    u = T.groupoid((1,) + z[1:]).obj_keys.rows
    a = G0.obj_keys.index(T.face_keys(1, 1, (1,) + z[1:], u, "obj"))
    b = G0.obj_keys.index(T.face_keys(1, 0, (1,) + z[1:], u, "obj"))
    return union_find(G0.n_obj, a, b)


def is_discrete_tower(T: Tower, top: int = 1) -> bool:
    """Image of δ^(n): discrete groupoids, constant in every direction."""
    G = T.groupoid((0,) * (T.n - 1))
    if G.n_arr != G.n_obj:
        return False
    for p in itertools.product(range(top + 1), repeat=T.n - 1):
        H = T.groupoid(p)
        if H.n_arr != H.n_obj or H.n_obj != G.n_obj:
            return False
        for a in range(1, T.n):
            if p[a - 1] >= 1:
                for j in range(p[a - 1] + 1):
                    f = T.face(a, j, p)
                    if not np.array_equal(f.obj, np.arange(G.n_obj)):
                        return False
    return True


@dataclass(eq=False)
class SimplicialSetData:
    """Levels 0..K of a simplicial set given as finite sets with face and
    degeneracy index arrays."""
    sizes: list
    faces: dict
    degens: dict


def _levelwise_tau0(T: Tower, K: int) -> SimplicialSetData:
    """k ↦ τ_0^(n-1) T_k with induced faces/degeneracies."""
    labels, sizes = [], []
    rest = (0,) * (T.n - 2)
    for k in range(K + 1):
        lab, c = tau0(OuterSlice(T, k))
        labels.append(lab)
        sizes.append(c)
    faces, degens = {}, {}
    for k in range(1, K + 1):
        G = T.groupoid((k,) + rest)
        reps = np.unique(labels[k], return_index=True)[1]
        rows = G.obj_keys.rows[reps]
        for j in range(k + 1):
            img = T.groupoid((k - 1,) + rest).obj_keys.index(T.face_keys(1, j, (k,) + rest, rows, "obj"))
            faces[(j, k)] = labels[k - 1][img]
            # well defined: every member of a class goes to the same class
            allimg = T.groupoid((k - 1,) + rest).obj_keys.index(
                T.face_keys(1, j, (k,) + rest, G.obj_keys.rows, "obj"))
            if not np.array_equal(labels[k - 1][allimg], faces[(j, k)][labels[k]]):
                raise NotANerve(f"τ_0 of face d_{j} at level {k} is not well defined")
    for k in range(0, K):
        G = T.groupoid((k,) + rest)
        reps = np.unique(labels[k], return_index=True)[1]
        rows = G.obj_keys.rows[reps]
        for j in range(k + 1):
            img = T.groupoid((k + 1,) + rest).obj_keys.index(T.degen_keys(1, j, (k,) + rest, rows, "obj"))
            degens[(j, k)] = labels[k + 1][img]
    return SimplicialSetData(sizes, faces, degens)


def groupoid_from_nerve(S: SimplicialSetData, check_k: int = 3) -> TableGroupoid:
    """The groupoid whose nerve is S (Segal bijections verified at 2..check_k,
    arrows invertible); raises NotANerve."""
    n0, n1 = S.sizes[0], S.sizes[1]
    src, tgt = S.faces[(1, 1)], S.faces[(0, 1)]
    for k in range(2, min(check_k, len(S.sizes) - 1) + 1):
        # spine of each k-simplex
        spine = []
        for i in range(1, k + 1):
            cur = np.arange(S.sizes[k])
            lev = k
            for _ in range(k - i):
                cur = S.faces[(lev, lev)][cur]
                lev -= 1
            for _ in range(i - 1):
                cur = S.faces[(0, lev)][cur]
                lev -= 1
            spine.append(cur)
        J = spine_join(n1, src, tgt, k, "τ_1 Segal")
        sp = np.column_stack(spine)
        if len(J) != S.sizes[k] or len(unique_rows(sp.astype(np.int64))) != S.sizes[k] \
                or len(np.unique(_row_codes(sp, n1))) != len(J) \
                or not np.isin(_row_codes(sp, n1), _row_codes(J, n1)).all():
            raise NotANerve(f"levelwise τ_0 fails the Segal condition at k={k}")
    e2, e0 = S.faces[(2, 2)], S.faces[(0, 2)]
    comp = np.full((n1, n1), -1, dtype=IDX)
    comp[e2, e0] = S.faces[(1, 2)]
    ident = S.degens[(0, 0)]
    G = TableGroupoid(n0, src, tgt, ident, comp)
    return G


def _row_codes(rows: np.ndarray, m: int) -> np.ndarray:
    c = np.zeros(len(rows), dtype=np.int64)
    for j in range(rows.shape[1]):
        c = c * m + rows[:, j]
    return c


def tau1(T: Tower, K: int = 3, check_lemma: bool = True) -> FiniteGroupoid:
    """τ_1^(n) T: Ner τ_1 = levelwise τ_0^(n-1).  For n > 2 also asserts
    τ_1^(n) = τ_1^(2) of the levelwise τ_1^(n-1) tower."""
    if T.n == 1:
        return T.groupoid(())
    K = min(K, T.K)
    if K < 2:
        raise NotANerve("τ_1 needs level 2")
    if not is_discrete_tower(OuterSlice(T, 0)) if T.n > 2 else T.groupoid((0,)).n_arr != T.groupoid((0,)).n_obj:
        raise NotANerve("level 0 is not discrete")
    S = _levelwise_tau0(T, K)
    G = groupoid_from_nerve(S, K)
    if check_lemma and T.n > 2:
        H = tau1(Tau1Levelwise(T, min(K, 2), inner=2), min(K, 2), check_lemma=False)
        if not same_groupoid(G, H):
            raise NotANerve("τ_1^(n) differs from τ_1^(2) of the levelwise τ_1")
    return G


class Tau1Levelwise(Tower):
    """The 2-tower k ↦ τ_1^(n-1) T_k with induced functors."""

    def __init__(self, T: Tower, K: int, inner: int = 2):
        super().__init__(2, K)
        self.T = T
        self._g = [tau1(OuterSlice(T, k), inner, check_lemma=False) for k in range(K + 1)]

    def _build(self, p):
        G = self._g[p[0]]
        return G

    def _map(self, k, k2, op, j, kind, rows):
        """Induced map on τ_1 objects/arrows by applying T's outer op on
        representatives at levels (k, 0..) / (k, 1, 0..)."""
        T = self.T
        rest = (0,) * (T.n - 3)
        lvl = 0 if kind == "obj" else 1
        src_T, dst_T = OuterSlice(T, k), OuterSlice(T, k2)
        labs, labd = tau0_at(src_T, lvl), tau0_at(dst_T, lvl)
        Gs = T.groupoid((k, lvl) + rest)
        Gd = T.groupoid((k2, lvl) + rest)
        reps = np.unique(labs, return_index=True)[1]
        fn = T.face_keys if op == "d" else T.degen_keys
        img = Gd.obj_keys.index(fn(1, j, (k, lvl) + rest, Gs.obj_keys.rows[reps], "obj"))
        return labd[img][np.asarray(rows).ravel()].reshape(-1, 1).astype(">u4")

    def face_keys(self, a, j, p, rows, kind):
        return self._map(p[0], p[0] - 1, "d", j, kind, rows[:, 0].astype(np.int64))

    def degen_keys(self, a, j, p, rows, kind):
        return self._map(p[0], p[0] + 1, "s", j, kind, rows[:, 0].astype(np.int64))


def tau0_at(T: Tower, level: int) -> np.ndarray:
    """τ_0^(n-1) labels of T_level (objects of T(level, 0..))."""
    return tau0(OuterSlice(T, level))[0]


def same_groupoid(A: FiniteGroupoid, B: FiniteGroupoid) -> bool:
    if (A.n_obj, A.n_arr) != (B.n_obj, B.n_arr):
        return False
    if not (np.array_equal(A.src, B.src) and np.array_equal(A.tgt, B.tgt)
             and np.array_equal(A.ident, B.ident)):
        return False
    x, y = composable_pairs(A)
    return np.array_equal(A.compose(x, y), B.compose(x, y))


# --------------------------------------------------------------------------
# n-equivalences
# --------------------------------------------------------------------------

def tau1_functor(F: TowerMap, K: int = 3) -> GroupoidFunctor:
    """τ_1^(n) F on the canonical τ_1 groupoids."""
    GA = tau1(F.source, K, check_lemma=False)
    GB = tau1(F.target, K, check_lemma=False)
    return tau1_functor_between(F, GA, GB, K)


def slice_map(F: TowerMap, x: int, y: int) -> TowerMap:
    A, B = F.source, F.target
    z = (0,) * (A.n - 1)
    GA, GB = A.groupoid(z), B.groupoid(z)
    fx, fy = GB.obj_keys.index(F.km(z, GA.obj_keys.rows[[x, y]], "obj"))
    return TowerMap(SliceXY(A, x, y), SliceXY(B, int(fx), int(fy)),
                    lambda p, rows, kind: F.km((1,) + tuple(p), rows, kind))


def n_equivalence(F: TowerMap, K: int = 3) -> bool:
    """Slicewise (n-1)-equivalence over all pairs of φ_0 plus τ_1
    equivalence; groupoid equivalence for n = 1."""
    n = F.source.n
    if n == 1:
        return groupoid_equivalence(F.functor(()))
    G0 = F.source.groupoid((0,) * (n - 1))
    for x in range(G0.n_obj):
        for y in range(G0.n_obj):
            if not n_equivalence(slice_map(F, x, y), K):
                return False
    return groupoid_equivalence(tau1_functor(F, K))


def n_equivalence_h(F: TowerMap, K: int = 3) -> bool:
    """The criterion for towers with φ_0 a point: f_1 an (n-1)-equivalence
    and τ_1 f an equivalence."""
    return n_equivalence(outer_slice_map(F, 1), K) and groupoid_equivalence(tau1_functor(F, K))


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def validate_tower(T: Tower, mode: str = "T", segal_k=(2, 3), top: int = 1, K: int = 3) -> dict:
    """Recursive validation.  mode "T": level 0 discrete, Segal maps
    (n-1)-equivalences, slices valid, τ_1 a groupoid, levels valid.
    mode "H": additionally φ_0 a point and Segal maps isomorphisms."""
    rep = {"n": T.n, "mode": mode, "ok": True, "failures": [], "children": []}

    def fail(msg):
        rep["ok"] = False
        rep["failures"].append(msg)

    if T.n == 1:
        try:
            T.groupoid(()).check()
        except ValidationFailed as exc:
            fail(f"groupoid: {exc}")
        return rep
    base = OuterSlice(T, 0)
    if not (is_discrete_tower(base, top) if T.n > 2 else
            T.groupoid((0,)).n_arr == T.groupoid((0,)).n_obj):
        fail("level 0 is not discrete")
        return rep
    if mode == "H" and T.groupoid((0,) * (T.n - 1)).n_obj != 1:
        fail("level 0 is not a point")
    for k in segal_k:
        if k > T.K:
            continue
        eta = segal_tower_map(T, k)
        if mode == "H":
            for p in itertools.product(range(top + 1), repeat=T.n - 2):
                f = eta.functor(p)
                if len(np.unique(f.obj)) != f.target.n_obj or len(np.unique(f.arr)) != f.target.n_arr \
                        or f.source.n_arr != f.target.n_arr or f.source.n_obj != f.target.n_obj:
                    fail(f"Segal map η_{k} is not an isomorphism at {p}")
                    break
        elif not n_equivalence(eta, K):
            fail(f"Segal map η_{k} is not an equivalence")
    try:
        tau1(T, K)
    except (NotANerve, ValidationFailed) as exc:
        fail(f"τ_1: {exc}")
    if not slice_decomposition_ok(T):
        fail("φ_1 is not the coproduct of its slices")
    for k in range(0, top + 1):
        child = validate_tower(OuterSlice(T, k), "T", segal_k, top, K)
        rep["children"].append(child)
        if not child["ok"]:
            fail(f"level {k} is not a valid {T.n - 1}-tower")
    return rep


# --------------------------------------------------------------------------
# delooping and T^(k)
# --------------------------------------------------------------------------

def deloop(phi, K: int | None = None, validate: bool = True) -> DeloopTower:
    """V_n φ for an internal weak n-groupoid (or any multi-simplicial group
    arising as a multinerve)."""
    X = getattr(phi, "X", phi)
    if isinstance(X, CatNGroup):
        X = Multinerve(X)
    T = DeloopTower(X, K)
    if validate:
        rep = validate_tower(T, "H")
        if not rep["ok"]:
            raise ValidationFailed("delooped tower fails H_{n+1}", report=rep)
    return T


def deloop_map(f: MSGMap | np.ndarray, A: DeloopTower, B: DeloopTower) -> TowerMap:
    m = f if isinstance(f, np.ndarray) else None
    if m is None:
        raise ValueError("deloop_map needs an entrywise homomorphism array")
    return entrywise_tower_map(A, B, m)


def _pi0_cat1(Z, B):
    from .vgroup import coset_quotient
    return coset_quotient(Z, B)


def T_functor(phi, grid: int = 2, check: bool = True) -> CatNGroup:
    """T^(n-1) φ: collapse directions n, n-1, .., 2 by levelwise π_0 (each
    step verified to be a nerve), then read off the cat^1-group from the
    remaining simplicial group: total = level 1, d = s_0 d_1, t = s_0 d_0."""
    X = getattr(phi, "X", phi)
    n = X.n
    if n == 1:      # T^(0) is the identity
        return phi.as_catn() if hasattr(phi, "as_catn") else X.G
    # stage 0: groups A(p) = π_0 of the direction-n internal category at p
    pts = list(itertools.product(range(grid + 1), repeat=n - 1))
    groups, reps = {}, {}
    from .vgroup import VGroup
    for p in pts:
        Z = X.level(p + (0,))
        A1 = X.level(p + (1,))
        rel = X.base.mul[X.face(n, 0, p + (1,), A1.elems), X.base.inv[X.face(n, 1, p + (1,), A1.elems)]]
        B = VGroup(X.base, Z.shape, unique_rows(rel.astype(Z.dtype)), presorted=True)
        Q, lab = _pi0_cat1(Z, B)
        groups[p] = (Q, lab, Z)

    def op_map(p, a, j, kind):
        """Induced hom A(p) → A(p ± e_a)."""
        Q, lab, Z = groups[p]
        q = list(p)
        q[a - 1] += -1 if kind == "d" else 1
        q = tuple(q)
        Q2, lab2, Z2 = groups[q]
        rows = Z.elems[np.unique(lab, return_index=True)[1]]
        img = X.face(a, j, p + (0,), rows) if kind == "d" else X.degen(a, j, p + (0,), rows)
        return lab2[Z2.index(img)]

    # tabulated (n-1)-fold simplicial group of π_0's; collapse the last direction
    cur = {p: groups[p][0] for p in pts}
    maps = {}
    for p in pts:
        for a in range(1, n):
            for j in range(p[a - 1] + 1):
                if p[a - 1] >= 1:
                    maps[(p, a, "d", j)] = op_map(p, a, j, "d")
                if p[a - 1] < grid:
                    maps[(p, a, "s", j)] = op_map(p, a, j, "s")
    dims = n - 1
    while dims > 1:
        a = dims
        heads = list(itertools.product(range(grid + 1), repeat=dims - 1))
        new, labs = {}, {}
        for h in heads:
            L0, L1, L2 = cur[h + (0,)], cur[h + (1,)], cur[h + (2,)]
            _segal_groups(L0, L1, L2, maps, h, a)
            d0, d1 = maps[(h + (1,), a, "d", 0)], maps[(h + (1,), a, "d", 1)]
            Qh, qh = fg.quotient(L0, fg.closure(L0, d0[d1 == 0]))
            new[h], labs[h] = Qh, qh.map
        newmaps = {}
        for h in heads:
            reps = np.unique(labs[h], return_index=True)[1]
            for b in range(1, dims):
                for j in range(h[b - 1] + 1):
                    for kind, delta, ok in (("d", -1, h[b - 1] >= 1), ("s", 1, h[b - 1] < grid)):
                        if ok:
                            hp = list(h)
                            hp[b - 1] += delta
                            m0 = maps[(h + (0,), b, kind, j)]
                            newmaps[(h, b, kind, j)] = labs[tuple(hp)][m0[reps]]
        cur, maps, dims = new, newmaps, dims - 1
    L0, L1, L2 = cur[(0,)], cur[(1,)], cur[(2,)]
    _segal_groups(L0, L1, L2, maps, (), 1)
    s0 = maps[((0,), 1, "s", 0)]
    d = s0[maps[((1,), 1, "d", 1)]]
    t = s0[maps[((1,), 1, "d", 0)]]
    from .catn import check_catn
    C = CatNGroup(L1, [d.astype(np.int32)], [t.astype(np.int32)], name="T")
    if check:
        check_catn(C)
    return C


def _segal_groups(L0, L1, L2, maps, h, a) -> None:
    """Level 2 ≅ L1 ×_{L0} L1 through (d_2, d_0)."""
    e2, e0 = maps[(h + (2,), a, "d", 2)], maps[(h + (2,), a, "d", 0)]
    s, t = maps[(h + (1,), a, "d", 1)], maps[(h + (1,), a, "d", 0)]
    pairs = set(zip(e2.tolist(), e0.tolist()))
    want = sum(int(((s == t[x])).sum()) for x in range(L1.order))
    if len(pairs) != L2.order or want != L2.order or any(t[x] != s[y] for x, y in pairs):
        raise NotANerve(f"levelwise π_0 fails the Segal condition in direction {a}")


def tau1_equals_T(phi, K: int = 3) -> bool:
    """τ_1^(n) U_n φ = U_1 T^(n-1) φ, compared bit-exactly on the canonical
    numberings (classes by least element)."""
    X = getattr(phi, "X", phi)
    A = tau1(UnderlyingTower(X), K)
    C = T_functor(phi)
    B = underlying_groupoid(C)
    return _same_up_to_objects(A, B)


def _same_up_to_objects(A: FiniteGroupoid, B: FiniteGroupoid) -> bool:
    """Equality after renumbering B's objects in their (sorted) order, which
    is how both sides index object classes."""
    return same_groupoid(A, B)


def deloop_tau1_is_pi0(phi, T: DeloopTower | None = None, K: int = 3) -> bool:
    """τ_1^(n+1) V_n φ is the one-object groupoid of π_0(T^(n-1) φ)."""
    from .simplicial import pi0_cat
    T = T or deloop(phi, validate=False)
    G = tau1(T, K)
    P, _ = pi0_cat(T_functor(phi))
    if G.n_obj != 1 or G.n_arr != P.order:
        return False
    x, y = composable_pairs(G)
    return np.array_equal(G.compose(x, y), P.mul[x, y])


def diag_nerve_equal(phi, qmax: int = 2) -> bool:
    """diag N φ = diag N V_n φ bit-exactly.  Left: level q is X(q..q)^q with
    X's diagonal faces and group-nerve faces.  Right: level q is the nerve
    (level q) of the groupoid V_n φ(q, q..q), with the tower's face functors
    and groupoid-nerve faces.  Both are laid out as (factor, entries of
    X(q..q)) rows and compared as sorted sets with their face maps."""
    X = getattr(phi, "X", phi)
    T = DeloopTower(X)
    n = X.n
    left, right, strings = {}, {}, {}
    for q in range(1, qmax + 1):
        L = X.level((q,) * n)
        idx = np.array(list(itertools.product(range(L.order), repeat=q)), dtype=IDX).reshape(-1, q)
        left[q] = L.elems[idx].reshape(len(idx), -1)
        G = T.groupoid((q,) * n)
        J = spine_join(G.n_arr, G.src, G.tgt, q, "groupoid nerve") if q > 1 else np.arange(G.n_arr)[:, None]
        strings[q] = J
        right[q] = _string_layout(G, J, q)
        if not np.array_equal(unique_rows(left[q]), unique_rows(right[q])):
            return False
    for q in range(2, qmax + 1):
        for j in range(q + 1):
            fa = _left_face(X, left[q], q, j)
            fb = _right_face(T, strings[q], q, j)
            ia = RowIndex(left[q]).index(left[q])
            ib = RowIndex(right[q]).index(right[q])
            A = np.empty_like(fa)
            A[ia] = fa
            B = np.empty_like(fb)
            B[ib] = fb
            if not np.array_equal(A, B):
                return False
    return True


def _string_layout(G: KeyGroupoid, J: np.ndarray, q: int) -> np.ndarray:
    """q-strings of arrows of a product groupoid U^r (vertex-major) as
    (factor, vertex, entries) rows."""
    rows = G.arr_keys.rows[J]                         # (M, vertex, r*w)
    M = len(rows)
    w = rows.shape[2] // q
    return rows.reshape(M, q, q, w).transpose(0, 2, 1, 3).reshape(M, -1)


def _left_face(X, rows, q, j):
    """Diagonal face of N φ: X's diagonal face entrywise, then group-nerve d_j."""
    n = X.n
    L = X.level((q,) * n)
    flat = rows.reshape(-1, L.N)
    p = [q] * n
    for a in range(1, n + 1):
        flat = X.face(a, j, tuple(p), flat)
        p[a - 1] -= 1
    ch = flat.reshape(len(rows), q, -1)
    if j == 0:
        out = ch[:, 1:]
    elif j == q:
        out = ch[:, :-1]
    else:
        prod = X.base.mul[ch[:, j - 1], ch[:, j]].astype(rows.dtype)
        out = np.concatenate([ch[:, :j - 1], prod[:, None], ch[:, j + 1:]], axis=1)
    return out.reshape(len(rows), -1)


def _right_face(T: DeloopTower, J: np.ndarray, q: int, j: int):
    """Diagonal face of N V_n φ: the tower's face functors d_j in every
    direction, then the groupoid-nerve face d_j on strings."""
    p = [q] * T.n
    G = T.groupoid(tuple(p[:-1]))
    cur = J
    for a in range(1, T.n):
        F = T.face(a, j, tuple(p[:-1]))
        cur = F.arr[cur]
        p[a - 1] -= 1
    H = T.groupoid(tuple(p[:-1]))
    if j == 0:
        out = cur[:, 1:]
    elif j == q:
        out = cur[:, :-1]
    else:
        c = H.compose(cur[:, j - 1], cur[:, j])
        out = np.concatenate([cur[:, :j - 1], c[:, None], cur[:, j + 1:]], axis=1)
    return _string_layout(H, out, q - 1)


# --------------------------------------------------------------------------
# tabulated towers (serialization) and property checks
# --------------------------------------------------------------------------

class TabulatedTower(Tower):
    """A tower given by explicit groupoids and face/degeneracy functors
    (object and arrow index arrays); keys are indices."""

    def __init__(self, n: int, K: int, groupoids: dict, faces: dict, degens: dict):
        super().__init__(n, K)
        self._g, self._faces, self._degens = groupoids, faces, degens

    def _build(self, p):
        return self._g[p]

    def _op(self, table, a, j, p, rows, kind):
        m = table[(a, j, tuple(p))][0 if kind == "obj" else 1]
        return np.asarray(m)[rows[:, 0].astype(IDX)].astype(">u4")[:, None]

    def face_keys(self, a, j, p, rows, kind):
        return self._op(self._faces, a, j, p, rows, kind)

    def degen_keys(self, a, j, p, rows, kind):
        return self._op(self._degens, a, j, p, rows, kind)


def tabulate(T: Tower, top: int | None = None) -> TabulatedTower:
    """Materialize levels ≤ top (3 for 2-towers, else 2) with all
    operators between them."""
    top = (3 if T.n == 2 else 2) if top is None else top
    pts = list(itertools.product(range(top + 1), repeat=T.n - 1))
    gs, faces, degens = {}, {}, {}
    for p in pts:
        G = T.groupoid(p)
        gs[p] = G if isinstance(G, TableGroupoid) else table_groupoid(G)
    for p in pts:
        for a in range(1, T.n):
            for j in range(p[a - 1] + 1):
                if p[a - 1] >= 1:
                    f = T.face(a, j, p)
                    faces[(a, j, p)] = (f.obj, f.arr)
                if p[a - 1] < top:
                    s = T.degen(a, j, p)
                    degens[(a, j, p)] = (s.obj, s.arr)
    return TabulatedTower(T.n, top, gs, faces, degens)


def table_groupoid(G: FiniteGroupoid) -> TableGroupoid:
    x, y = composable_pairs(G)
    comp = np.full((G.n_arr, G.n_arr), -1, dtype=IDX)
    comp[x, y] = G.compose(x, y)
    return TableGroupoid(G.n_obj, G.src, G.tgt, G.ident, comp, inv=G.inverse(np.arange(G.n_arr)))


def constant_discrete_tower(m: int, n: int, top: int | None = None) -> TabulatedTower:
    """δ^(n) of a set with m elements."""
    top = (3 if n == 2 else 2) if top is None else top
    pts = list(itertools.product(range(top + 1), repeat=n - 1))
    D = discrete_groupoid(m)
    ar = np.arange(m)
    faces = {(a, j, p): (ar, ar) for p in pts for a in range(1, n)
             for j in range(p[a - 1] + 1) if p[a - 1] >= 1}
    degens = {(a, j, p): (ar, ar) for p in pts for a in range(1, n)
              for j in range(p[a - 1] + 1) if p[a - 1] < top}
    return TabulatedTower(n, top, {p: D for p in pts}, faces, degens)


def tau1_preserves_segal_product(T: Tower, K: int = 2) -> bool:
    """τ_1^(n-1)(T_1 ×_{T_0} T_1) ≅ τ_1 T_1 ×_{T_0} τ_1 T_1 through the
    two projections (fibre product over the discrete tower T_0)."""
    if T.n < 3:
        raise ValueError("needs an n-tower with n >= 3")
    S = SegalTarget(T, 2)
    A = OuterSlice(T, 1)
    GS, GA = tau1(S, K, check_lemma=False), tau1(A, K, check_lemma=False)
    rest = (0,) * (S.n - 2)
    cols = []
    for i in (0, 1):
        proj = TowerMap(S, A, lambda p, rows, kind, i=i: rows[:, i * (rows.shape[1] // 2):(i + 1) * (rows.shape[1] // 2)])
        F = tau1_functor_between(proj, GS, GA, K)
        cols.append(F)
    D = T.groupoid((0,) * (T.n - 1))
    # images in T_0 of τ_1 T_1 objects/arrows: via outer faces of representatives
    ends = []
    for lvl in (0, 1):
        lab = tau0_at(A, lvl)
        H = A.groupoid((lvl,) + rest)
        reps = np.unique(lab, return_index=True)[1]
        e = []
        for j in (0, 1):
            k = T.face_keys(1, j, (1, lvl) + rest, H.obj_keys.rows[reps], "obj")
            e.append(T.groupoid((0, lvl) + rest).obj_keys.index(k))
        ends.append(e)
    for lvl, size in ((0, GS.n_obj), (1, GS.n_arr)):
        a = cols[0].obj if lvl == 0 else cols[0].arr
        b = cols[1].obj if lvl == 0 else cols[1].arr
        pairs = set(zip(a.tolist(), b.tolist()))
        tgt0, src1 = ends[lvl][0], ends[lvl][1]
        want = {(x, y) for x in range(len(tgt0)) for y in range(len(src1)) if tgt0[x] == src1[y]}
        if len(pairs) != size or pairs != want:
            return False
    return True


def tau1_functor_between(F: TowerMap, GA, GB, K) -> GroupoidFunctor:
    A, B = F.source, F.target
    rest = (0,) * (A.n - 2)
    out = []
    for lvl in (0, 1):
        la, lb = tau0_at(A, lvl), tau0_at(B, lvl)
        Ha, Hb = A.groupoid((lvl,) + rest), B.groupoid((lvl,) + rest)
        reps = np.unique(la, return_index=True)[1]
        img = Hb.obj_keys.index(F.km((lvl,) + rest, Ha.obj_keys.rows[reps], "obj"))
        out.append(lb[img])
    return GroupoidFunctor(GA, GB, out[0], out[1])


def equivalence_matches_nerve(f) -> bool:
    """n = 1: U_1 f is an equivalence of groupoids iff f is a weak
    equivalence of group nerves (π_0 and π_1)."""
    from .simplicial import is_weak_equivalence
    A, B = underlying_groupoid(f.source), underlying_groupoid(f.target)
    m = f.hom.map
    F = functor_from_keys(A, B, m[A.obj_keys.rows.astype(IDX)], m[A.arr_keys.rows.astype(IDX)])
    return groupoid_equivalence(F) == bool(is_weak_equivalence(f, 1))
