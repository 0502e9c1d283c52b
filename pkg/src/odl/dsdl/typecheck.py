"""Document validation and sample typechecking.

`validate` walks a resolved document in declaration order, so diagnostics come
out ordered by source location for parsed documents. `typecheck_sample` turns
a raw sample mapping into canonical field values:

- BBox -> 4-tuple [x, y, w, h] of finite numbers, w >= 0 and h >= 0
- Coord -> (x, y); Polygon -> tuple of at least 3 coordinate pairs
- Label -> LabelValue(name, index in its domain)
- Image/Text -> the locator string, syntax-checked
- List -> tuple of canonical element values; record refs -> nested dicts

Integer coordinates stay integers so converted legacy data inverts exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .. import diagnostics as dc
from ..diagnostics import Diagnostic, DocumentError
from .model import (
    ACCEPTED_VERSION,
    MAX_LIST_DEPTH,
    ClassDomain,
    Definition,
    DsdlDocument,
    FieldType,
    RecordDef,
)


@dataclass(frozen=True)
class LabelValue:
    """A validated category label: the class name plus its index in the domain."""

    name: str
    index: int


@dataclass(frozen=True)
class Sample:
    """A type-checked sample with canonical field values in schema order."""

    fields: dict[str, object]

    def __getitem__(self, key: str):
        return self.fields[key]

    def get(self, key: str, default=None):
        return self.fields.get(key, default)

    def __contains__(self, key: str) -> bool:
        return key in self.fields


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _finite(value) -> bool:
    return not isinstance(value, float) or math.isfinite(value)


class _Checker:
    def __init__(self, defs: Mapping[str, Definition], path: str | None, pos):
        self.defs = defs
        self.path = path
        self.pos = pos
        self.diags: list[Diagnostic] = []

    def err(self, code: str, message: str):
        line, col = self.pos if self.pos else (None, None)
        self.diags.append(dc.error(code, message, path=self.path, line=line, column=col))

    def check_record(self, raw, schema: RecordDef, where: str):
        if not isinstance(raw, dict):
            self.err(dc.TYPE_MISMATCH, f"{where}: expected a mapping for record {schema.name}")
            return None
        out: dict[str, object] = {}
        for fname, ftype in schema.fields.items():
            if fname not in raw:
                if schema.is_required(fname):
                    self.err(dc.MISSING_FIELD, f"{where}: required field {fname!r} is missing")
                continue
            value = self.check_value(raw[fname], ftype, f"{where}.{fname}")
            if value is not None or raw[fname] is None:
                out[fname] = value
        for key in raw:
            if key not in schema.fields:
                self.err(dc.UNKNOWN_FIELD, f"{where}: field {key!r} is not declared by {schema.name}")
        return out

    def check_value(self, value, ftype: FieldType, where: str):
        kind = ftype.kind
        if value is None:
            self.err(dc.TYPE_MISMATCH, f"{where}: null is not a value; omit optional fields instead")
            return None
        if kind == "Bool":
            if isinstance(value, bool):
                return value
            self.err(dc.TYPE_MISMATCH, f"{where}: expected a boolean")
        elif kind == "Int":
            if isinstance(value, int) and not isinstance(value, bool):
                return value
            self.err(dc.TYPE_MISMATCH, f"{where}: expected an integer")
        elif kind == "Num":
            if _is_number(value) and _finite(value):
                return float(value)
            self.err(dc.TYPE_MISMATCH, f"{where}: expected a finite number")
        elif kind == "Str":
            if isinstance(value, str):
                return value
            self.err(dc.TYPE_MISMATCH, f"{where}: expected a string")
        elif kind == "Coord":
            pair = self._number_seq(value, 2, where)
            if pair is not None:
                return pair
        elif kind == "BBox":
            quad = self._number_seq(value, 4, where)
            if quad is not None:
                if quad[2] < 0 or quad[3] < 0:
                    self.err(dc.TYPE_MISMATCH, f"{where}: bbox extent must be non-negative")
                    return None
                return quad
        elif kind == "Polygon":
            if not isinstance(value, (list, tuple)) or len(value) < 3:
                self.err(dc.TYPE_MISMATCH, f"{where}: polygon needs at least 3 points")
                return None
            points = []
            for i, point in enumerate(value):
                pair = self._number_seq(point, 2, f"{where}[{i}]")
                if pair is None:
                    return None
                points.append(pair)
            return tuple(points)
        elif kind == "Label":
            return self._label(value, ftype, where)
        elif kind in ("Image", "Text"):
            if not isinstance(value, str) or not value:
                self.err(dc.TYPE_MISMATCH, f"{where}: expected an object locator string")
                return None
            from ..locator import LocatorError, parse_locator

            try:
                parse_locator(value)
            except LocatorError as exc:
                self.err(dc.TYPE_MISMATCH, f"{where}: {exc.args[0]}")
                return None
            return value
        elif kind == "List":
            if not isinstance(value, (list, tuple)):
                self.err(dc.TYPE_MISMATCH, f"{where}: expected a sequence")
                return None
            assert ftype.element is not None
            items = []
            for i, item in enumerate(value):
                checked = self.check_value(item, ftype.element, f"{where}[{i}]")
                if checked is None and item is not None:
                    return None
                items.append(checked)
            return tuple(items)
        elif kind == "Ref":
            target = self.defs.get(ftype.ref or "")
            if not isinstance(target, RecordDef):
                self.err(dc.UNKNOWN_TYPE, f"{where}: unknown record type {ftype.ref!r}")
                return None
            return self.check_record(value, target, where)
        return None

    def _number_seq(self, value, length: int, where: str):
        if (
            isinstance(value, (list, tuple))
            and len(value) == length
            and all(_is_number(v) and _finite(v) for v in value)
        ):
            return tuple(value)
        self.err(dc.TYPE_MISMATCH, f"{where}: expected {length} finite numbers")
        return None

    def _label(self, value, ftype: FieldType, where: str):
        domain = self.defs.get(ftype.domain or "")
        if not isinstance(domain, ClassDomain):
            self.err(dc.UNKNOWN_DOMAIN, f"{where}: unknown class domain {ftype.domain!r}")
            return None
        if not isinstance(value, str):
            self.err(dc.TYPE_MISMATCH, f"{where}: labels are class-name strings")
            return None
        if value not in domain.classes:
            self.err(dc.UNKNOWN_LABEL, f"{where}: label {value!r} is not in domain {domain.name}")
            return None
        return LabelValue(value, domain.index_of(value))


def check_sample(
    raw: Mapping,
    schema: RecordDef,
    defs: Mapping[str, Definition],
    *,
    path: str | None = None,
    pos=None,
    where: str = "sample",
) -> tuple[Sample | None, list[Diagnostic]]:
    """Typecheck one raw sample; returns (sample or None, diagnostics)."""
    checker = _Checker(defs, path, pos)
    fields = checker.check_record(dict(raw), schema, where)
    if checker.diags:
        return None, checker.diags
    assert fields is not None
    return Sample(fields), []


def typecheck_sample(raw: Mapping, schema: RecordDef, defs: Mapping[str, Definition]) -> Sample:
    """Typecheck one raw sample mapping against a record schema.

    `defs` must contain the class domains (and any referenced records). Raises
    DocumentError carrying all findings when the sample does not conform.
    """
    sample, diags = check_sample(raw, schema, defs)
    if sample is None:
        raise DocumentError(diags, "sample does not conform to its schema")
    return sample


def _type_errors(ftype: FieldType, defs: Mapping[str, Definition], where: str, path, pos):
    diags = []
    line, col = pos if pos else (None, None)

    def walk(t: FieldType, list_depth: int):
        if list_depth > MAX_LIST_DEPTH:
            diags.append(
                dc.error(
                    dc.LIST_DEPTH_EXCEEDED,
                    f"{where}: List nesting deeper than {MAX_LIST_DEPTH}",
                    path=path, line=line, column=col,
                )
            )
            return
        if t.kind == "List":
            assert t.element is not None
            walk(t.element, list_depth + 1)
        elif t.kind == "Label":
            target = defs.get(t.domain or "")
            if not isinstance(target, ClassDomain):
                diags.append(
                    dc.error(
                        dc.UNKNOWN_DOMAIN,
                        f"{where}: unknown class domain {t.domain!r}",
                        path=path, line=line, column=col,
                    )
                )
        elif t.kind == "Ref":
            target = defs.get(t.ref or "")
            if not isinstance(target, RecordDef):
                diags.append(
                    dc.error(
                        dc.UNKNOWN_TYPE,
                        f"{where}: unknown record type {t.ref!r}",
                        path=path, line=line, column=col,
                    )
                )

    walk(ftype, 0)
    return diags


def _record_cycles(doc: DsdlDocument) -> list[str]:
    """Names of records that can reach themselves through Ref/List edges."""

    def targets(t: FieldType):
        while t.kind == "List":
            assert t.element is not None
            t = t.element
        if t.kind == "Ref" and isinstance(doc.defs.get(t.ref or ""), RecordDef):
            yield t.ref

    cyclic = []
    for name, definition in doc.defs.items():
        if not isinstance(definition, RecordDef):
            continue
        seen = set()
        stack = [t for f in definition.fields.values() for t in targets(f)]
        while stack:
            current = stack.pop()
            if current == name:
                cyclic.append(name)
                break
            if current in seen:
                continue
            seen.add(current)
            record = doc.defs[current]
            assert isinstance(record, RecordDef)
            stack.extend(t for f in record.fields.values() for t in targets(f))
    return cyclic


def validate(doc: DsdlDocument) -> list[Diagnostic]:
    """Check every document invariant; empty result means the document is valid.

    The walk follows declaration order, so diagnostics are deterministic and
    (for parsed documents) ordered by source location.
    """
    diags: list[Diagnostic] = []
    path = doc.source_path

    if doc.version != ACCEPTED_VERSION:
        diags.append(dc.error(dc.UNSUPPORTED_VERSION, f"version {doc.version!r} is not supported", path=path))
    for name in doc.imports:
        diags.append(dc.error(dc.UNRESOLVED_IMPORT, f"import {name!r} has not been resolved", path=path))

    for name, definition in doc.defs.items():
        if isinstance(definition, RecordDef):
            line, col = definition.pos if definition.pos else (None, None)
            for opt in definition.optional:
                if opt not in definition.fields:
                    diags.append(
                        dc.error(
                            dc.UNKNOWN_OPTIONAL_FIELD,
                            f"record {name!r}: optional field {opt!r} is not declared",
                            path=path, line=line, column=col,
                        )
                    )
            for fname, ftype in definition.fields.items():
                diags.extend(_type_errors(ftype, doc.defs, f"record {name!r} field {fname!r}", path, definition.pos))
        else:
            line, col = definition.pos if definition.pos else (None, None)
            if not definition.classes:
                diags.append(dc.error(dc.EMPTY_DOMAIN, f"class_domain {name!r} has no classes", path=path, line=line, column=col))
            seen = set()
            for cls in definition.classes:
                if not isinstance(cls, str) or not cls:
                    diags.append(dc.error(dc.INVALID_CLASS, f"class_domain {name!r}: classes must be non-empty strings", path=path, line=line, column=col))
                elif cls in seen:
                    diags.append(dc.error(dc.DUPLICATE_CLASS, f"class_domain {name!r}: duplicate class {cls!r}", path=path, line=line, column=col))
                else:
                    seen.add(cls)

    for name in _record_cycles(doc):
        definition = doc.defs[name]
        line, col = definition.pos if definition.pos else (None, None)
        diags.append(dc.error(dc.RECURSIVE_TYPE, f"record {name!r} contains itself", path=path, line=line, column=col))

    if doc.data is not None:
        line, col = doc.data.pos if doc.data.pos else (None, None)
        schema = doc.defs.get(doc.data.sample_type)
        if not isinstance(schema, RecordDef):
            diags.append(
                dc.error(
                    dc.UNKNOWN_TYPE,
                    f"sample-type {doc.data.sample_type!r} does not name a record",
                    path=path, line=line, column=col,
                )
            )
        elif doc.data.inline and not dc.has_errors(diags):
            positions = doc.data.sample_pos or (None,) * len(doc.data.samples or ())
            for i, raw in enumerate(doc.data.samples or ()):
                _, sample_diags = check_sample(
                    raw, schema, doc.defs, path=path, pos=positions[i], where=f"sample {i}"
                )
                diags.extend(sample_diags)
    return diags
