"""Dispatch on trace documents: parse, then verify, reporting malformed input
as a failed check rather than an exception."""

from __future__ import annotations

from typing import Optional

from . import serialize as J
from .density import DensityTrace, verify_density
from .ideal import IdealTrace, verify_ideal
from .report import Report
from .sparse import SparseTrace, verify_sparse

PARSERS = {"sparse": SparseTrace, "density": DensityTrace, "ideal": IdealTrace}


def verify_document(doc: dict, sparse: Optional[SparseTrace] = None, requirements: int = 1) -> Report:
    """Verify a JSON trace document.

    Raises ``VersionMismatch`` for a foreign cost model and ``ValueError`` when
    a density or ideal trace comes without its sparse trace.
    """
    J.check_version(doc)
    kind = doc.get("kind")
    if kind not in PARSERS:
        raise ValueError(f"unknown trace kind {kind!r}")
    if kind != "sparse" and sparse is None:
        raise ValueError(f"verifying a {kind} trace needs its sparse trace")
    try:
        trace = PARSERS[kind].from_json(doc)
    except (J.TraceFormatError, KeyError, TypeError, ValueError, IndexError) as exc:
        rep = Report(kind)
        rep.add("well-formed", False, f"{type(exc).__name__}: {exc}")
        return rep
    if kind == "sparse":
        return verify_sparse(trace)
    if kind == "density":
        return verify_density(trace, sparse)
    return verify_ideal(trace, sparse, requirements)
