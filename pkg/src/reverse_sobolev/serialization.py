"""Extended reals, float formatting and atomic file output."""

from __future__ import annotations

import enum
import json
import math
import os
import tempfile


class Indeterminate(enum.Enum):
    """Value of 0 * inf: reported, never coerced to a number."""

    INDETERMINATE = "indeterminate"

    def __str__(self) -> str:
        return self.value


INDETERMINATE = Indeterminate.INDETERMINATE

ExtReal = float | Indeterminate


def encode_ext(x: ExtReal):
    """{"finite": x} | "+inf" | "-inf" | "indeterminate"."""
    if x is INDETERMINATE:
        return "indeterminate"
    x = float(x)
    if math.isnan(x):
        return "indeterminate"
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return {"finite": x}


def decode_ext(obj) -> ExtReal:
    if obj == "indeterminate":
        return INDETERMINATE
    if obj == "+inf":
        return math.inf
    if obj == "-inf":
        return -math.inf
    if isinstance(obj, dict) and set(obj) == {"finite"}:
        return float(obj["finite"])
    raise ValueError(f"not an extended real: {obj!r}")


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(x), ".17g")


def format_ext(x: ExtReal) -> str:
    enc = encode_ext(x)
    return format_float(enc["finite"]) if isinstance(enc, dict) else enc


def dumps(obj) -> str:
    # float repr is the shortest string that round-trips, so JSON is lossless
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the target directory and rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
