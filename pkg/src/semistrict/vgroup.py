"""Explicit subgroups of a power G^N with coordinatewise multiplication.

Every level of a multinerve, a diagonal or a fibre product of such levels is a
subgroup of some power of one base group, so levels are stored as sorted
arrays of coordinate rows.  Rows are kept as unsigned bytes (big-endian
16-bit for bases above 256 elements), so byte order is lexicographic order
and lookups are a binary search over a void view.
"""

from __future__ import annotations

from math import prod

import numpy as np

from .errors import check_feasible
from .fingrp import FiniteGroup


def row_dtype(order: int):
    if order <= 256:
        return np.dtype(np.uint8)
    if order <= 65536:
        return np.dtype(">u2")
    raise ValueError("base group too large for row storage")


def void_keys(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows)
    if rows.ndim == 1:
        rows = rows[:, None]
    width = rows.dtype.itemsize * rows.shape[1]
    return rows.view(np.dtype((np.void, max(width, 1)))).ravel()


def unique_rows(rows: np.ndarray) -> np.ndarray:
    """Sorted distinct rows (lexicographic for the row dtypes used here)."""
    if rows.shape[1] == 0:
        return rows[:1]
    keys = void_keys(rows)
    _, first = np.unique(keys, return_index=True)
    return rows[first]


class VGroup:
    """A subgroup of base^N listed explicitly; ``elems`` is sorted, so the
    identity (all zeros) is row 0."""

    def __init__(self, base: FiniteGroup, shape, elems, presorted: bool = False):
        self.base = base
        self.shape = tuple(int(s) for s in shape)
        self.N = prod(self.shape)
        self.dtype = row_dtype(base.order)
        e = np.asarray(elems).reshape(-1, self.N).astype(self.dtype, copy=False)
        e = np.ascontiguousarray(e)
        if not presorted:
            e = unique_rows(e)
        self.elems = e
        self.keys = void_keys(e)
        self.order = int(e.shape[0])
        if self.order == 0 or e[0].any():
            raise ValueError("level does not contain the identity")

    def __repr__(self):
        return f"<VGroup order={self.order} shape={self.shape}>"

    def __len__(self):
        return self.order

    # -- arithmetic on rows -------------------------------------------------
    def mul(self, a, b) -> np.ndarray:
        return self.base.mul[a, b].astype(self.dtype)

    def inv(self, a) -> np.ndarray:
        return self.base.inv[a].astype(self.dtype)

    def identity(self, count: int = 1) -> np.ndarray:
        return np.zeros((count, self.N), dtype=self.dtype)

    # -- lookup -------------------------------------------------------------
    def find(self, rows) -> np.ndarray:
        """Indices of ``rows`` in elems, -1 where absent."""
        rows = np.ascontiguousarray(np.asarray(rows).reshape(-1, self.N), dtype=self.dtype)
        q = void_keys(rows)
        idx = np.searchsorted(self.keys, q)
        idx_c = np.minimum(idx, self.order - 1)
        ok = self.keys[idx_c] == q
        return np.where(ok, idx_c, -1)

    def index(self, rows) -> np.ndarray:
        idx = self.find(rows)
        if (idx < 0).any():
            raise KeyError("row not in level")
        return idx

    def contains(self, rows) -> np.ndarray:
        return self.find(rows) >= 0

    def same_elements(self, other: "VGroup") -> bool:
        return (self.shape == other.shape and self.order == other.order
                and np.array_equal(self.elems, other.elems))

    # -- derived groups -----------------------------------------------------
    def sub(self, rows) -> "VGroup":
        return VGroup(self.base, self.shape, rows)

    def to_group(self, name: str | None = None) -> FiniteGroup:
        """The level as a FiniteGroup (index = row position), embedding = rows."""
        check_feasible(self.order * self.order, "level multiplication table")
        e = self.elems
        table = np.empty((self.order, self.order), dtype=np.int32)
        for i in range(self.order):
            table[i] = self.index(self.mul(e[i][None, :], e))
        return FiniteGroup(table, name=name, embedding=e.astype(np.int32))

    def is_closed(self) -> bool:
        """Closure check on a greedy generating set (enough for finite sets)."""
        gens = generating_rows(self)
        prods = self.mul(self.elems[:, None, :], gens[None, :, :]).reshape(-1, self.N)
        return bool(self.contains(prods).all())


def generating_rows(V: VGroup, limit: int | None = None) -> np.ndarray:
    """A greedy generating set of V (rows).  Each chosen row lies outside the
    subgroup generated by the previous ones."""
    inside = np.zeros(V.order, dtype=bool)
    inside[0] = True
    gens = []
    while not inside.all():
        x = int(np.argmin(inside))
        gens.append(V.elems[x])
        inside = span_mask(V, np.array(gens))
        if limit is not None and len(gens) >= limit:
            break
    if not gens:
        return V.identity(1)
    return np.array(gens, dtype=V.dtype)


def span_mask(V: VGroup, gens: np.ndarray) -> np.ndarray:
    """Mask over V.elems of the subgroup generated by ``gens``."""
    inside = np.zeros(V.order, dtype=bool)
    inside[0] = True
    frontier = V.elems[:1]
    while len(frontier):
        prods = V.mul(frontier[:, None, :], gens[None, :, :]).reshape(-1, V.N)
        idx = V.index(prods)
        idx = np.unique(idx[~inside[idx]])
        inside[idx] = True
        frontier = V.elems[idx]
    return inside


def coset_quotient(Z: VGroup, B: VGroup, name: str | None = None):
    """Z/B for B ⊆ Z normal, as a FiniteGroup whose element i is the coset of
    the lexicographically least row ``reps[i]`` (stored in ``embedding``).

    Returns (Q, labels) with labels[k] the coset of Z.elems[k].  Containment
    and normality are asserted (left and right cosets of every
    representative coincide)."""
    if B.N != Z.N:
        raise ValueError("shape mismatch")
    if not Z.contains(B.elems).all():
        raise AssertionError("boundaries not contained in cycles")
    labels = np.full(Z.order, -1, dtype=np.int64)
    reps = []
    start = 0
    while True:
        free = np.flatnonzero(labels[start:] < 0)
        if len(free) == 0:
            break
        k = start + int(free[0])
        start = k
        r = Z.elems[k]
        left = Z.index(Z.mul(r[None, :], B.elems))
        labels[left] = len(reps)
        right = Z.index(Z.mul(B.elems, r[None, :]))
        if not (labels[right] == len(reps)).all():
            raise AssertionError("boundary subgroup is not normal in cycles")
        reps.append(k)
    reps_rows = Z.elems[np.array(reps)]
    m = len(reps)
    check_feasible(m * m, "quotient table")
    table = np.empty((m, m), dtype=np.int32)
    for i in range(m):
        table[i] = labels[Z.index(Z.mul(reps_rows[i][None, :], reps_rows))]
    Q = FiniteGroup(table, name=name, embedding=reps_rows.astype(np.int32))
    return Q, labels
