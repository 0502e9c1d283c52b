"""Canonical document serialization.

The canonical form is bit-exact: reserved keys in fixed order, definitions in
declaration order, 2-space indentation, LF endings. Sequences made purely of
numbers are written in flow form (`[x, y, w, h]`); everything else is block
form. Strings are written plain only when rereading them (by this reader or
any YAML 1.1 loader) gives the same string back; otherwise they are quoted
with JSON escaping.
"""

from __future__ import annotations

import json
import math
import re

from .model import ClassDomain, DataSection, DsdlDocument, RecordDef
from .reader import FLOAT_RE, INT_RE

_SAFE_KEY_RE = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$.\-]*$")
_UNSAFE_PLAIN_START = set("-?:,[]{}#&*!|>'\"%@` .")
_YAML_WORDS = frozenset(
    {"true", "false", "null", "none", "yes", "no", "on", "off", "y", "n", "~"}
)
_NUMERIC_LOOKALIKE_RE = re.compile(r"^[-+]?(0x[0-9a-fA-F_]+|0o?[0-7_]+|\.(inf|nan))$", re.IGNORECASE)


def _plain_safe(text: str) -> bool:
    if not text or text != text.strip(" "):
        return False
    if any(ch in text for ch in ':#"\n\t\r'):
        return False
    if text[0] in _UNSAFE_PLAIN_START:
        return False
    if text.lower() in _YAML_WORDS:
        return False
    bare = text.replace("_", "")
    if INT_RE.match(bare) or FLOAT_RE.match(bare) or _NUMERIC_LOOKALIKE_RE.match(text):
        return False
    return True


def _scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite numbers cannot be serialized")
        return repr(value)
    if isinstance(value, str):
        return value if _plain_safe(value) else json.dumps(value, ensure_ascii=False)
    raise TypeError(f"cannot serialize value of type {type(value).__name__}")


def _key(text: str) -> str:
    if not isinstance(text, str):
        raise TypeError("mapping keys must be strings")
    return text if _SAFE_KEY_RE.match(text) else json.dumps(text, ensure_ascii=False)


def _is_scalar(value) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def _flow_worthy(seq) -> bool:
    return bool(seq) and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in seq
    )


def _emit_value(value, indent: int, lines: list[str]):
    """Emit a non-scalar value as indented block lines."""
    pad = "  " * indent
    if isinstance(value, dict):
        for k, v in value.items():
            _emit_entry(k, v, indent, lines)
    elif isinstance(value, (list, tuple)):
        for item in value:
            if _is_scalar(item):
                lines.append(f"{pad}- {_scalar(item)}")
            elif isinstance(item, (list, tuple)) and _flow_worthy(item):
                lines.append(f"{pad}- {_flow(item)}")
            else:
                start = len(lines)
                _emit_value(item, indent + 1, lines)
                if len(lines) == start:  # empty container item
                    lines.append(f"{pad}- {'{}' if isinstance(item, dict) else '[]'}")
                else:
                    head = lines[start]
                    lines[start] = pad + "- " + head[len(pad) + 2 :]
    else:
        raise TypeError(f"cannot serialize value of type {type(value).__name__}")


def _flow(seq) -> str:
    return "[" + ", ".join(_scalar(v) for v in seq) + "]"


def _emit_entry(key, value, indent: int, lines: list[str]):
    pad = "  " * indent
    label = f"{pad}{_key(key)}:"
    if _is_scalar(value):
        lines.append(f"{label} {_scalar(value)}")
    elif isinstance(value, (list, tuple)):
        if not value:
            lines.append(f"{label} []")
        elif _flow_worthy(value):
            lines.append(f"{label} {_flow(value)}")
        else:
            lines.append(label)
            _emit_value(value, indent + 1, lines)
    elif isinstance(value, dict):
        if not value:
            lines.append(f"{label} {{}}")
        else:
            lines.append(label)
            _emit_value(value, indent + 1, lines)
    else:
        raise TypeError(f"cannot serialize value of type {type(value).__name__}")


def serialize_document(doc: DsdlDocument) -> str:
    """Render a document in canonical form; parse(serialize(doc)) == doc."""
    lines: list[str] = []
    _emit_entry("$dsdl-version", doc.version, 0, lines)
    if doc.imports:
        _emit_entry("$import", list(doc.imports), 0, lines)
    if doc.meta is not None:
        _emit_entry("meta", doc.meta, 0, lines)
    if doc.defs:
        lines.append("defs:")
        for name, definition in doc.defs.items():
            _emit_definition(name, definition, lines)
    if doc.data is not None:
        _emit_data(doc.data, lines)
    return "\n".join(lines) + "\n"


def _emit_definition(name, definition, lines: list[str]):
    lines.append(f"  {_key(name)}:")
    if isinstance(definition, RecordDef):
        lines.append("    $def: record")
        if definition.fields:
            lines.append("    fields:")
            for fname, ftype in definition.fields.items():
                _emit_entry(fname, str(ftype), 3, lines)
        else:
            lines.append("    fields: {}")
        if definition.optional:
            _emit_entry("optional", list(definition.optional), 2, lines)
    elif isinstance(definition, ClassDomain):
        lines.append("    $def: class_domain")
        _emit_entry("classes", list(definition.classes), 2, lines)
    else:
        raise TypeError(f"unknown definition type {type(definition).__name__}")


def _emit_data(data: DataSection, lines: list[str]):
    lines.append("data:")
    _emit_entry("sample-type", data.sample_type, 1, lines)
    if data.samples_locator is not None:
        _emit_entry("samples", data.samples_locator, 1, lines)
    else:
        _emit_entry("samples", list(data.samples or ()), 1, lines)
