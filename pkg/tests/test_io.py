import glob
import os

import pytest

from semistrict import catn as C
from semistrict import corpus as K
from semistrict import fingrp as fg
from semistrict import globular as GL
from semistrict import hstruct as H
from semistrict import io
from semistrict import tamsamani as TM
from semistrict.errors import ParseError

ROOT = os.path.join(os.path.dirname(__file__), "..", "corpus")


def roundtrip(obj, kind=None):
    text = io.serialize(obj, kind)
    k, back = io.loads(text)
    assert io.serialize(back, k if k != "covers" else "covers") == text
    return k, back


def test_roundtrip_every_kind():
    Z2 = fg.cyclic_group(2)
    assert roundtrip(fg.symmetric_group(3))[0] == "group"
    assert roundtrip(K.running_example(2))[0] == "catn"
    assert roundtrip(C.identity_map(C.pair_object(Z2)))[0] == "catn_map"
    assert roundtrip(TM.pair_groupoid(3))[0] == "groupoid"
    T = TM.tabulate(TM.deloop(GL.globularize(H.specialize(K.running_example(2)).Sp)))
    assert roundtrip(T)[0] == "tower"
    cv = H.builtin_cover(C.face(K.running_example(2), 1, 0))
    text = io.dumps(io.envelope("covers", io.covers_payload({1: (cv.H0, cv.p0.hom.map)})))
    kind, covers = io.loads(text)
    assert kind == "covers" and list(covers) == [1]
    assert io.dumps(io.envelope("covers", io.covers_payload(covers))) == text


def test_corpus_files_roundtrip():
    files = sorted(glob.glob(os.path.join(ROOT, "*", "*.json")))
    assert len(files) == 54
    for p in files:
        if "invalid" in p or "covers" in p:
            continue
        with open(p, encoding="utf-8") as fh:
            text = fh.read()
        kind, obj = io.loads(text)
        assert io.serialize(obj, kind) == text, p


@pytest.mark.parametrize("text, field", [
    ("{not json", None),
    ('{"kind": "nope", "version": 1, "payload": {}}', "kind"),
    ('{"version": 1, "payload": {}}', "kind"),
    ('{"kind": "group", "version": 99, "payload": {}}', "version"),
    ('{"kind": "group", "version": 1, "payload": {}}', None),
])
def test_parse_errors(text, field):
    with pytest.raises(ParseError) as ei:
        io.loads(text)
    if field:
        assert ei.value.info.get("field") == field
