"""Independent brute-force oracles (plain Python loops over tables; no
library code).  Used to derive and freeze expected values."""

from itertools import product


def table(G):
    return [list(map(int, row)) for row in G.mul]


def is_group(t):
    n = len(t)
    if any(t[0][x] != x or t[x][0] != x for x in range(n)):
        return False
    if any(t[t[a][b]][c] != t[a][t[b][c]] for a in range(n) for b in range(n) for c in range(n)):
        return False
    return all(any(t[a][b] == 0 for b in range(n)) for a in range(n))


def is_endo(t, f):
    n = len(t)
    return len(f) == n and all(0 <= f[x] < n for x in range(n)) and \
        all(f[t[a][b]] == t[f[a]][f[b]] for a in range(n) for b in range(n))


def catn_verdict(t, d, t_ops):
    """First violated axiom ("endo", "I", "II", "III") or None."""
    n = len(t)
    d = [list(map(int, x)) for x in d]
    s = [list(map(int, x)) for x in t_ops]
    if len(d) != len(s) or not all(is_endo(t, f) for f in d + s):
        return "endo"
    for a, b in zip(d, s):
        if any(a[b[x]] != b[x] or b[a[x]] != a[x] for x in range(n)):
            return "I"
    for i, j in product(range(len(d)), repeat=2):
        if i != j:
            for f, g in ((d[i], d[j]), (d[i], s[j]), (s[i], d[j]), (s[i], s[j])):
                if any(f[g[x]] != g[f[x]] for x in range(n)):
                    return "II"
    for a, b in zip(d, s):
        ka = [x for x in range(n) if a[x] == 0]
        kb = [x for x in range(n) if b[x] == 0]
        if any(t[x][y] != t[y][x] for x in ka for y in kb):
            return "III"
    return None


def inverse(t, x):
    return next(y for y in range(len(t)) if t[x][y] == 0)


def subgroup_order(t, elems):
    return len(set(elems))


def count_homs_with_section(t_src, t_tgt, f):
    """Does the surjection f: A → B admit a homomorphic section?  Exhaustive
    over all maps B → A (small orders only)."""
    nA, nB = len(t_src), len(t_tgt)
    for s in product(range(nA), repeat=nB):
        if s[0] != 0:
            continue
        if all(f[s[b]] == b for b in range(nB)) and \
                all(s[t_tgt[a][b]] == t_src[s[a]][s[b]] for a in range(nB) for b in range(nB)):
            return True
    return False


def element_order_multiset(t):
    out = []
    for x in range(len(t)):
        k, y = 1, x
        while y != 0:
            y = t[y][x]
            k += 1
        out.append(k)
    return sorted(out)


def cat1_pi(t, d, s):
    """(π_0, π_1) orders of a cat^1-group by the crossed-module formula:
    π_1 = ker d ∩ ker t; π_0 = |Im d| / |t(ker d)|."""
    n = len(t)
    ker_d = [x for x in range(n) if d[x] == 0]
    pi1 = [x for x in ker_d if s[x] == 0]
    im_d = {d[x] for x in range(n)}
    boundary = {s[x] for x in ker_d}
    return len(im_d) // len(boundary), len(pi1)


def fibre_product_order(f, g, nA, nB):
    return sum(1 for a in range(nA) for b in range(nB) if f[a] == g[b])
