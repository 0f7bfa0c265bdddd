"""Command line: serialization round trips, invariants and the pipeline
F = V_n ∘ D_n ∘ Sp.

Exit codes: 0 ok, 1 domain failure, 2 parse error, 3 feasibility."""

from __future__ import annotations

import argparse
import random
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import fingrp as fg
from . import io
from .catn import CatNGroup, CatNMap
from .errors import FeasibilityExceeded, ParseError, SemistrictError
from .simplicial import (Multinerve, homotopy_data, homotopy_data_positive, diagonal,
                         pi_lists_isomorphic, segal_check)

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE, EXIT_FEASIBILITY = 0, 1, 2, 3


class DomainFailure(Exception):
    """A check ran and answered "no"; carries the report."""

    def __init__(self, report):
        self.report = report
        super().__init__(report.get("reason", "failed"))


# -- group descriptors ------------------------------------------------------------

def describe_group(G: fg.FiniteGroup) -> dict:
    """Order, abelian flag and the multiset of element orders (an
    isomorphism invariant used only for display; comparisons use
    fingrp.are_isomorphic)."""
    orders = []
    for x in range(G.order):
        k, y = 1, x
        while y != 0:
            y = G.mul[y, x]
            k += 1
        orders.append(k)
    return {"order": G.order, "abelian": bool((G.mul == G.mul.T).all()),
            "element_orders": sorted(orders)}


def pi_list(G: CatNGroup, max_q: int | None = None) -> list:
    max_q = G.n if max_q is None else max_q
    return homotopy_data(diagonal(Multinerve(G, max_q + 1)), max_q).pis


def classifying_pis(pis: list) -> list:
    """π_q of the classifying space: π_0 = 1, π_{q+1} = π_q."""
    return [fg.trivial_group()] + list(pis)


# -- pipeline ---------------------------------------------------------------------

@dataclass
class PipelineReport:
    input: dict
    K: int
    stages: list = field(default_factory=list)
    pis: dict = field(default_factory=dict)
    verification: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    ok: bool = False

    def to_dict(self, timings: bool = False) -> dict:
        out = {"input": self.input, "K": self.K, "stages": self.stages,
               "pis": {k: [describe_group(g) for g in v] for k, v in self.pis.items()},
               "verification": self.verification, "ok": self.ok}
        if timings:
            out["timings"] = {k: round(v, 4) for k, v in self.timings.items()}
        return out


class _StageTag:
    name = "input"


def run_pipeline(G: CatNGroup, covers: dict | None = None, K: int | None = None,
                 seed: int | None = None) -> PipelineReport:
    """specialize → globularize → deloop with every stage verification on;
    π_0..π_{n+1} (of classifying spaces) at each stage.  Stage errors
    propagate with ``info["stage"]`` set."""
    stage = _StageTag()
    try:
        return _run_pipeline(G, covers, K, seed, stage)
    except SemistrictError as exc:
        exc.info.setdefault("stage", stage.name)
        raise


def _run_pipeline(G, covers, K, seed, stage) -> PipelineReport:
    from . import globular as GL, hstruct as H, tamsamani as TM
    if G.n < 2:
        raise ValueError("the pipeline needs n >= 2")
    n = G.n
    K = n + 2 if K is None else K
    rep = PipelineReport({"name": G.name, "n": n, "order": G.order}, K)
    clock = time.perf_counter

    t0 = clock()
    stage.name = "input"
    pis_G = pi_list(G)
    rep.pis["input"] = classifying_pis(pis_G)
    rep.timings["input"] = clock() - t0

    t0 = clock()
    stage.name = "Sp"
    sp = H.specialize(G, covers=covers)
    Sp = sp.Sp
    rep.stages.append({"stage": "Sp", "order": Sp.order, "steps": sp.stages,
                       "special": H.is_special(Sp).ok,
                       "unchanged": bool(Sp.order == G.order and H.is_special(G).ok),
                       "output": io.catn_payload(Sp)})
    rep.pis["Sp"] = classifying_pis(pi_list(Sp))
    rep.timings["Sp"] = clock() - t0

    t0 = clock()
    stage.name = "D_n"
    phi = GL.globularize(Sp, K=max(K, n + 1))
    b = GL.b_preservation_check(Sp, phi, K=n + 2)
    levels = phi.to_dict(top=1)["levels"]
    rep.stages.append({"stage": "D_n", "levels": levels,
                       "identity_defects": phi.report.get("identity_defects", []),
                       "segal": phi.report.get("segal", []),
                       "B_preservation": {"ok": b.ok, "R_equal": b.R_equal, "pi_equal": b.pi_equal}})
    rep.pis["D_n"] = classifying_pis(homotopy_data_positive(phi.X, n).pis)
    rep.timings["D_n"] = clock() - t0

    t0 = clock()
    stage.name = "V_n"
    T = TM.deloop(phi)
    diag_ok = TM.diag_nerve_equal(phi)
    tau_ok = TM.deloop_tau1_is_pi0(phi, T)
    pro_ok = TM.tau1_equals_T(phi)
    rep.stages.append({"stage": "V_n", "tower_n": T.n, "H_mode": True,
                       "diag_equal": diag_ok, "tau1_is_pi0_T": tau_ok, "tau1_U_is_U_T": pro_ok})
    # diag N V_n φ = diag N φ (verified bit-exactly), whose π_q is π_{q-1} of diag φ
    rep.pis["V_n"] = classifying_pis(homotopy_data_positive(phi.X, n).pis)
    rep.timings["V_n"] = clock() - t0

    if seed is not None:
        # randomized property check: τ_1 on a randomly chosen iterated slice
        # preserves the Segal fibre product
        rng = random.Random(seed)
        S = T
        for _ in range(rng.randrange(T.n - 2)):      # keep S.n >= 3
            S = TM.OuterSlice(S, 1)
        rep.verification["tau1_fibre_product"] = bool(TM.tau1_preserves_segal_product(S, 2))

    names = list(rep.pis)
    iso = all(pi_lists_isomorphic(rep.pis[names[0]], rep.pis[m]) for m in names[1:])
    rep.verification.update({"pi_isomorphic": iso, "B_preservation": b.ok, "diag_equal": diag_ok,
                             "tau1_is_pi0_T": tau_ok, "tau1_U_is_U_T": pro_ok,
                             "Sp_special": rep.stages[0]["special"]})
    rep.ok = all(v for v in rep.verification.values())
    return rep


# -- commands -------------------------------------------------------------------------

def _load_catn(path) -> CatNGroup:
    kind, obj = io.load(path)
    if kind not in ("catn", "weak_groupoid"):
        raise ParseError(f"expected a cat^n-group, got {kind!r}", field="kind")
    return obj


def _load_covers(arg):
    if arg in (None, "built-in", "builtin"):
        return None
    from .hstruct import make_cover
    kind, stages = io.load(arg)
    if kind != "covers":
        raise ParseError(f"expected covers, got {kind!r}", field="kind")
    return {i: (lambda F, H0=H0, m=m: make_cover(H0, F, m, kind="file")) for i, (H0, m) in stages.items()}


def cmd_validate(args) -> dict:
    kind, obj = io.load(args.path)
    out = {"kind": kind, "ok": True}
    if kind == "catn":
        out.update(n=obj.n, order=obj.order)
    elif kind == "catn_map":
        out.update(n=obj.source.n, source=obj.source.order, target=obj.target.order)
    elif kind == "groupoid":
        out.update(objects=obj.n_obj, arrows=obj.n_arr)
    elif kind == "tower":
        from .tamsamani import validate_tower
        r = validate_tower(obj, "H" if args.mode == "H" else "T")
        out.update(n=obj.n, mode=args.mode, report=r)
        if not r["ok"]:
            out["ok"] = False
            raise DomainFailure(out)
    elif kind == "group":
        out.update(order=obj.order)
    return out


def cmd_homotopy(args) -> dict:
    G = _load_catn(args.path)
    q = G.n if args.max_q is None else args.max_q
    pis = pi_list(G, q)
    return {"n": G.n, "order": G.order, "pi": [describe_group(p) for p in pis]}


def cmd_segal(args) -> dict:
    G = _load_catn(args.path)
    K = args.trunc or G.n + 2
    X = Multinerve(G, K)
    checks = []
    for r in range(1, G.n + 1):
        for k in range(2, K + 1):
            s = segal_check(X, r, k)
            checks.append({"direction": r, "k": k, "ok": s.ok, "reason": s.reason})
    out = {"n": G.n, "K": K, "checks": checks, "ok": all(c["ok"] for c in checks)}
    if not out["ok"]:
        raise DomainFailure(out)
    return out


def cmd_check_contractible(args) -> dict:
    from .hstruct import is_strongly_contractible
    G = _load_catn(args.path)
    cert = is_strongly_contractible(G)
    out = {"n": G.n, "order": G.order, "strongly_contractible": cert is not None}
    if cert is None:
        out["reason"] = "no strong-contractibility certificate"
        raise DomainFailure(out)
    out["certificate"] = cert.to_dict()
    return out


def cmd_check_special(args) -> dict:
    from .hstruct import is_special
    G = _load_catn(args.path)
    r = is_special(G)
    out = {"n": G.n, "special": r.ok,
           "checks": [{"face": lab, "strongly_contractible": c is not None} for lab, c in r.checks]}
    if not r.ok:
        out["reason"] = "not special"
        raise DomainFailure(out)
    return out


def cmd_specialize(args) -> dict:
    from .hstruct import specialize
    G = _load_catn(args.path)
    res = specialize(G, covers=_load_covers(args.covers))
    if args.out:
        io.save(args.out, res.Sp, "catn")
    return {"stages": res.stages, "order": res.Sp.order, "Sp": io.envelope("catn", io.catn_payload(res.Sp))}


def cmd_globularize(args) -> dict:
    from .globular import globularize
    G = _load_catn(args.path)
    phi = globularize(G, K=args.trunc or G.n + 2)
    env = io.envelope("weak_groupoid", {"source": io.catn_payload(G), "summary": phi.to_dict()})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.dumps(env))
    return env


def cmd_deloop(args) -> dict:
    from .globular import globularize
    from . import tamsamani as TM
    G = _load_catn(args.path)
    phi = globularize(G, K=args.trunc or G.n + 2)
    T = TM.deloop(phi)
    out = {"n": T.n, "H_mode": True, "tau1": TM.tau1(T).to_dict(),
           "levels": {",".join(map(str, p)): [T.groupoid(p).n_obj, T.groupoid(p).n_arr]
                      for p in _grid(T.n - 1, 1)}}
    if args.seed is not None:
        out["properties"] = {"tau1_fibre_product": TM.tau1_preserves_segal_product(T, 2),
                             "seed": args.seed}
    if args.tower or args.out:
        env = io.envelope("tower", io.tower_payload(TM.tabulate(T)))
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(io.dumps(env))
        if args.tower:
            out["tower"] = env
    return out


def _grid(m, top):
    import itertools
    return list(itertools.product(range(top + 1), repeat=m))


def cmd_pipeline(args) -> dict:
    G = _load_catn(args.path)
    rep = run_pipeline(G, _load_covers(args.covers), args.trunc, args.seed)
    out = rep.to_dict(timings=args.timings)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.dumps(io.envelope("report", out)))
    if not rep.ok:
        out["reason"] = "verification failed"
        raise DomainFailure(out)
    return out


def cmd_compare(args) -> dict:
    A, B = _load_catn(args.path), _load_catn(args.other)
    q = max(A.n, B.n) if args.max_q is None else args.max_q
    pa, pb = pi_list(A, q), pi_list(B, q)
    rows = []
    for i, (x, y) in enumerate(zip(pa, pb)):
        rows.append({"q": i, "isomorphic": fg.are_isomorphic(x, y) is not None,
                     "left": describe_group(x), "right": describe_group(y)})
    out = {"isomorphic": all(r["isomorphic"] for r in rows), "pi": rows}
    if not out["isomorphic"]:
        out["reason"] = "π mismatch at q = " + ",".join(str(r["q"]) for r in rows if not r["isomorphic"])
        raise DomainFailure(out)
    return out


COMMANDS = {
    "validate": cmd_validate, "homotopy": cmd_homotopy, "segal": cmd_segal,
    "check-contractible": cmd_check_contractible, "check-special": cmd_check_special,
    "specialize": cmd_specialize, "globularize": cmd_globularize, "deloop": cmd_deloop,
    "pipeline": cmd_pipeline, "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semistrict", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--trunc", type=int, default=None, help="truncation K (default n + 2)")
    common.add_argument("--max-q", type=int, default=None, help="highest homotopy degree")
    common.add_argument("--covers", default="built-in", help="built-in or a covers file")
    common.add_argument("--out", default=None, help="write the stage output envelope to a file")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized property checks")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, parents=[common])
        s.add_argument("path")
        if name == "compare":
            s.add_argument("other")
        if name == "validate":
            s.add_argument("--mode", choices=["T", "H"], default="T", help="tower membership mode")
        if name == "pipeline":
            s.add_argument("--timings", action="store_true", help="include timings (not byte-stable)")
        if name == "deloop":
            s.add_argument("--tower", action="store_true", help="include the tabulated tower")
    return p


def _emit(obj, as_json: bool, stream) -> None:
    if as_json:
        stream.write(io.dumps(obj))
    else:
        _pretty(obj, stream)


def _pretty(obj, stream, indent=0) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                stream.write(f"{pad}{k}:\n")
                _pretty(v, stream, indent + 1)
            else:
                stream.write(f"{pad}{k}: {io.dumps(v).strip()}\n")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                stream.write(f"{pad}-\n")
                _pretty(v, stream, indent + 1)
            else:
                stream.write(f"{pad}- {io.dumps(v).strip()}\n")
    else:
        stream.write(f"{pad}{obj}\n")


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v) and len(v) <= 16


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        out = COMMANDS[args.command](args)
        _emit(out, args.json, stdout)
        return EXIT_OK
    except DomainFailure as exc:
        _emit({"ok": False, **exc.report}, args.json, stdout)
        return EXIT_DOMAIN
    except ParseError as exc:
        _emit({"ok": False, **exc.to_dict()}, args.json, stdout)
        return EXIT_PARSE
    except FeasibilityExceeded as exc:
        _emit({"ok": False, **exc.to_dict()}, args.json, stdout)
        return EXIT_FEASIBILITY
    except SemistrictError as exc:
        _emit({"ok": False, **exc.to_dict()}, args.json, stdout)
        return EXIT_DOMAIN
    except (OSError, ValueError) as exc:
        _emit({"ok": False, "error": type(exc).__name__, "message": str(exc)}, args.json, stdout)
        return EXIT_PARSE if isinstance(exc, OSError) else EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
