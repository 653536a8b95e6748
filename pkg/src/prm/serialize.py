"""Canonical JSON for trace files.

Keys are sorted, separators are compact and floats are refused, so equal
traces always serialize to identical bytes and golden files diff cleanly.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path
from typing import Any

from .evaluate import COST_MODEL_VERSION

# Index combinators produce integers with thousands of decimal digits.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


class TraceFormatError(ValueError):
    """A trace document is structurally malformed."""


class VersionMismatch(ValueError):
    def __init__(self, found: Any):
        self.found = found
        super().__init__(f"trace was written under cost model {found!r}, "
                         f"this build uses {COST_MODEL_VERSION!r}")


def _no_floats(obj: Any, path: str = "$") -> None:
    if isinstance(obj, float):
        raise TypeError(f"float at {path}; traces hold naturals only")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _no_floats(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _no_floats(v, f"{path}[{i}]")


def canonical_json(obj: Any) -> str:
    _no_floats(obj)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def content_hash(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def dump(obj: Any, path: str | Path) -> None:
    Path(path).write_text(canonical_json(obj) + "\n")


def load(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())


def check_version(doc: dict) -> None:
    found = doc.get("cost_model_version")
    if found != COST_MODEL_VERSION:
        raise VersionMismatch(found)


def require(cond: bool, message: str) -> None:
    if not cond:
        raise TraceFormatError(message)


def nat(value: Any, what: str) -> int:
    require(type(value) is int and value >= 0, f"{what} must be a natural number")
    return value


def nat_list(value: Any, what: str) -> list[int]:
    require(isinstance(value, list), f"{what} must be a list")
    return [nat(v, f"{what}[{i}]") for i, v in enumerate(value)]


def bit(value: Any, what: str) -> int:
    require(value in (0, 1) and type(value) is int, f"{what} must be 0 or 1")
    return value
