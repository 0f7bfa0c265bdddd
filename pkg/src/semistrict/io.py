"""JSON serialization: one self-describing envelope
{"kind": ..., "version": 1, "payload": ...} with canonical key order.

Kinds: group, catn, catn_map, groupoid, tower, covers, weak_groupoid,
report.  ``dumps`` is byte-stable (sorted keys, fixed separators)."""

from __future__ import annotations

import itertools
import json

import numpy as np

from . import fingrp as fg
from .catn import CatNGroup, CatNMap, catn_map, validate_catn
from .errors import ParseError
from .fingrp import FiniteGroup

VERSION = 1
KINDS = ("group", "catn", "catn_map", "groupoid", "tower", "covers", "weak_groupoid", "report")


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    return x


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def envelope(kind: str, payload) -> dict:
    return {"kind": kind, "version": VERSION, "payload": payload}


# -- encoders ---------------------------------------------------------------

def group_payload(G: FiniteGroup) -> dict:
    out = {"order": G.order, "table": G.mul.tolist()}
    if G.name:
        out["name"] = G.name
    return out


def catn_payload(G: CatNGroup) -> dict:
    out = {"group": group_payload(G.total), "d": [x.tolist() for x in G.d],
           "t": [x.tolist() for x in G.t]}
    if G.name:
        out["name"] = G.name
    return out


def map_payload(f: CatNMap) -> dict:
    return {"source": catn_payload(f.source), "target": catn_payload(f.target),
            "map": f.hom.map.tolist()}


def groupoid_payload(G) -> dict:
    return G.to_dict()


def tower_payload(T) -> dict:
    """A tabulated tower (see tamsamani.tabulate)."""
    from .tamsamani import tabulate, TabulatedTower
    T = T if isinstance(T, TabulatedTower) else tabulate(T)
    levels = [{"p": list(p), "groupoid": G.to_dict()} for p, G in sorted(T._g.items())]
    ops = lambda tab: [{"a": a, "j": j, "p": list(p), "obj": o.tolist(), "arr": r.tolist()}
                       for (a, j, p), (o, r) in sorted(tab.items())]
    return {"n": T.n, "top": T.K, "levels": levels, "faces": ops(T._faces), "degens": ops(T._degens)}


def serialize(obj, kind: str | None = None) -> str:
    from .tamsamani import FiniteGroupoid, Tower
    if kind is None:
        if isinstance(obj, FiniteGroup):
            kind = "group"
        elif isinstance(obj, CatNGroup):
            kind = "catn"
        elif isinstance(obj, CatNMap):
            kind = "catn_map"
        elif isinstance(obj, FiniteGroupoid):
            kind = "groupoid"
        elif isinstance(obj, Tower):
            kind = "tower"
        else:
            kind = "report"
    enc = {"group": group_payload, "catn": catn_payload, "catn_map": map_payload,
           "groupoid": groupoid_payload, "tower": tower_payload}
    payload = enc[kind](obj) if kind in enc else obj
    return dumps(envelope(kind, payload))


# -- decoders ---------------------------------------------------------------

def _need(d, key, typ=None):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"missing field {key!r}", field=key)
    v = d[key]
    if typ is not None and not isinstance(v, typ):
        raise ParseError(f"field {key!r} has the wrong type", field=key)
    return v


def _int_array(v, what, ndim=1):
    try:
        a = np.asarray(v, dtype=np.int64)
    except (TypeError, ValueError):
        raise ParseError(f"{what} must be an integer array", field=what)
    if a.ndim != ndim:
        raise ParseError(f"{what} must be {ndim}-dimensional", field=what)
    return a


def parse_group(p) -> FiniteGroup:
    table = _int_array(_need(p, "table", list), "table", 2)
    if "order" in p and p["order"] != len(table):
        raise ParseError("order does not match the table", field="order")
    return fg.validate_group(table, name=p.get("name"))


def parse_catn(p) -> CatNGroup:
    G = parse_group(_need(p, "group", dict))
    d = [_int_array(x, "d") for x in _need(p, "d", list)]
    t = [_int_array(x, "t") for x in _need(p, "t", list)]
    return validate_catn(G, d, t, name=p.get("name"))


def parse_map(p) -> CatNMap:
    A, B = parse_catn(_need(p, "source", dict)), parse_catn(_need(p, "target", dict))
    return catn_map(A, B, _int_array(_need(p, "map", list), "map"))


def parse_groupoid(p):
    from .tamsamani import TableGroupoid
    n = _need(p, "objects", int)
    src, tgt = _int_array(_need(p, "src", list), "src"), _int_array(_need(p, "tgt", list), "tgt")
    ident = _int_array(_need(p, "ident", list), "ident")
    comp = np.full((len(src), len(src)), -1, dtype=np.int64)
    trip = _int_array(_need(p, "composition", list), "composition", 2) if p["composition"] else \
        np.zeros((0, 3), dtype=np.int64)
    if len(trip):
        if trip.shape[1] != 3 or trip.min() < 0 or trip.max() >= len(src):
            raise ParseError("composition entries must be arrow triples", field="composition")
        comp[trip[:, 0], trip[:, 1]] = trip[:, 2]
    G = TableGroupoid(n, src, tgt, ident, comp)
    G.check()
    return G


def parse_tower(p):
    from .tamsamani import TabulatedTower
    n, top = _need(p, "n", int), _need(p, "top", int)
    gs = {tuple(lv["p"]): parse_groupoid(_need(lv, "groupoid", dict)) for lv in _need(p, "levels", list)}
    want = set(itertools.product(range(top + 1), repeat=n - 1))
    if set(gs) != want:
        raise ParseError("tower levels do not cover the truncation grid", field="levels")
    ops = lambda key: {(o["a"], o["j"], tuple(o["p"])): (np.asarray(o["obj"], dtype=np.int64),
                                                         np.asarray(o["arr"], dtype=np.int64))
                       for o in _need(p, key, list)}
    return TabulatedTower(n, top, gs, ops("faces"), ops("degens"))


def parse_covers(p) -> dict:
    """Stage → (source cat^(n-1)-group, map array)."""
    out = {}
    for st in _need(p, "stages", list):
        out[int(_need(st, "stage", int))] = (parse_catn(_need(st, "source", dict)),
                                             _int_array(_need(st, "map", list), "map"))
    return out


def covers_payload(covers: dict) -> dict:
    return {"stages": [{"stage": i, "source": catn_payload(H0), "map": np.asarray(m).tolist()}
                       for i, (H0, m) in sorted(covers.items())]}


PARSERS = {"group": parse_group, "catn": parse_catn, "catn_map": parse_map,
           "groupoid": parse_groupoid, "tower": parse_tower, "covers": parse_covers,
           "weak_groupoid": lambda p: parse_catn(_need(p, "source", dict)),
           "report": lambda p: p}


def loads(text: str):
    """Parse an envelope; returns (kind, object)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg} at line {exc.lineno}", line=exc.lineno)
    kind = _need(doc, "kind", str)
    if kind not in PARSERS:
        raise ParseError(f"unknown kind {kind!r}", field="kind")
    if doc.get("version") != VERSION:
        raise ParseError(f"unsupported version {doc.get('version')!r}", field="version")
    return kind, PARSERS[kind](_need(doc, "payload"))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(path, obj, kind: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(obj, kind))
