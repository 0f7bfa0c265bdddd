"""Structured errors.

Every failure the library reports is a :class:`SemistrictError` whose ``code``
names the violated condition (``"AxiomIII"``, ``"NotSurjective"``, ...) and whose
``info`` dict locates it.  The CLI maps :class:`FeasibilityExceeded` to exit code
3 and every other domain error to exit code 1.
"""

from __future__ import annotations


class SemistrictError(Exception):
    code = "Error"

    def __init__(self, message: str = "", **info):
        self.info = info
        super().__init__(message or self.code)

    def to_dict(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        if self.info:
            out["info"] = {k: _jsonable(v) for k, v in self.info.items()}
        return out


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v


_CODES = [
    # fingrp
    "NotAssociative", "NoIdentityAtZero", "NoInverse", "IndexOutOfRange",
    "TargetMismatch", "NotSurjective", "NotAnAction", "NotAHomomorphism",
    # catn
    "OperatorNotEndo", "AxiomI", "AxiomII", "AxiomIII", "BadDirection",
    "ReflexiveGraphAxiomFailure", "CommutatorFailure", "NotAMorphism",
    # simplicial
    "TruncationTooShallow", "HypothesisViolated",
    # hstruct
    "CoverVerificationFailed", "PostconditionFailed", "StageSpecialityFailed",
    # globular
    "NotSpecial", "SimplicialIdentityFailure", "SegalWeakEquivalenceFailed",
    # tamsamani
    "NotANerve", "ValidationFailed",
    # cli
    "ParseError",
]

for _c in _CODES:
    globals()[_c] = type(_c, (SemistrictError,), {"code": _c})


class FeasibilityExceeded(SemistrictError):
    code = "FeasibilityExceeded"


# default bound on candidate tuples / materialized sizes
FEASIBILITY_BOUND = 10**6


def check_feasible(size: int, what: str, bound: int | None = None) -> None:
    b = FEASIBILITY_BOUND if bound is None else bound
    if size > b:
        raise FeasibilityExceeded(f"{what}: {size} exceeds feasibility bound {b}",
                                  size=int(size), bound=int(b), where=what)


__all__ = ["SemistrictError", "FeasibilityExceeded", "FEASIBILITY_BOUND",
           "check_feasible"] + _CODES
