"""Minimal JSON emitter that prints floats with 17 significant digits.

The standard library encoder prints shortest round-trip floats; result files
and CLI output pin the textual format instead, so records are byte-stable
across Python versions.
"""

from __future__ import annotations

import math


def _encode(value, parts: list[str]) -> None:
    if value is None:
        parts.append("null")
    elif value is True:
        parts.append("true")
    elif value is False:
        parts.append("false")
    elif isinstance(value, int):
        parts.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot serialize non-finite float {value!r}")
        parts.append(format(value, ".17g"))
    elif isinstance(value, str):
        parts.append(_escape(value))
    elif isinstance(value, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(value):
            if i:
                parts.append(", ")
            _encode(item, parts)
        parts.append("]")
    elif isinstance(value, dict):
        parts.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                parts.append(", ")
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {type(key).__name__}")
            parts.append(_escape(key))
            parts.append(": ")
            _encode(item, parts)
        parts.append("}")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__} to JSON")


_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def _escape(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def dumps(value) -> str:
    """Serialize ``value`` to a JSON string, floats rendered with %.17g."""
    parts: list[str] = []
    _encode(value, parts)
    return "".join(parts)
