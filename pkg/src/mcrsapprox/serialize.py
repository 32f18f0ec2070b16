"""Versioned JSON envelopes.

Thread count and kernel backend are deliberately left out of the output so
that runs differing only in those settings are byte-identical.
"""
from __future__ import annotations

import json
from fractions import Fraction

SCHEMA = "mcrs-approx/1"


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def envelope(kind: str, result, precision_bits: int | None = None) -> dict:
    out = {"schema": SCHEMA, "kind": kind}
    if precision_bits is not None:
        out["precision_bits"] = precision_bits
    out["result"] = result
    return out


def dumps(obj) -> str:
    return json.dumps(obj, default=_default, indent=2, ensure_ascii=True) + "\n"
