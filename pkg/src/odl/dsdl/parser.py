"""Document parser: node tree to typed model.

Only syntax and document shape are checked here; cross-definition rules
(unknown domains, recursion, sample typechecking) live in `typecheck`.
"""

from __future__ import annotations

import re

from .. import diagnostics as dc
from ..diagnostics import Diagnostic, DocumentError
from .model import ACCEPTED_VERSION, ATOM_KINDS, ClassDomain, DataSection, DsdlDocument, FieldType, RecordDef
from .reader import Node, ReadError, plain, read_tree

RESERVED_KEYS = ("$dsdl-version", "$import", "meta", "defs", "data")

_TYPE_EXPR_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_-]*)\s*(\[(.*)\])?\s*$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")


def parse_type_expr(text: str) -> FieldType:
    """Parse a type expression string such as `List[BBoxAnn]` or `Label[Colors]`.

    Raises ValueError with a human message on malformed expressions.
    """
    m = _TYPE_EXPR_RE.match(text)
    if not m:
        raise ValueError(f"malformed type expression {text!r}")
    name, has_param, param = m.group(1), m.group(2), m.group(3)
    if name == "Label":
        if not has_param or not _IDENT_RE.match((param or "").strip()):
            raise ValueError("Label requires a domain name parameter, e.g. Label[Colors]")
        return FieldType("Label", domain=param.strip())
    if name == "List":
        if not has_param or not (param or "").strip():
            raise ValueError("List requires an element type parameter, e.g. List[Int]")
        return FieldType("List", element=parse_type_expr(param))
    if has_param:
        raise ValueError(f"type {name} takes no parameter")
    if name in ATOM_KINDS:
        return FieldType(name)
    return FieldType("Ref", ref=name)


class _DocBuilder:
    def __init__(self, path: str | None):
        self.path = path
        self.errors: list[Diagnostic] = []
        self.warnings: list[Diagnostic] = []

    def err(self, code: str, message: str, node: Node | None = None):
        line = node.line if node else None
        col = node.column if node else None
        self.errors.append(dc.error(code, message, path=self.path, line=line, column=col))

    def warn(self, code: str, message: str, node: Node | None = None):
        line = node.line if node else None
        col = node.column if node else None
        self.warnings.append(dc.warning(code, message, path=self.path, line=line, column=col))

    def build(self, root: Node) -> DsdlDocument | None:
        if not isinstance(root.value, dict):
            self.err(dc.PARSE_ERROR, "document must be a mapping", root)
            return None
        top: dict[str, Node] = root.value

        version = self._version(top)
        imports = self._imports(top.get("$import"))
        meta = self._meta(top.get("meta"))
        defs = self._defs(top.get("defs"))
        data = self._data(top.get("data"))

        for key, node in top.items():
            if key not in RESERVED_KEYS:
                self.warn(dc.UNKNOWN_KEY, f"unknown top-level key {key!r} ignored", node)

        if self.errors:
            return None
        return DsdlDocument(
            version=version or "",
            imports=imports,
            meta=meta,
            defs=defs,
            data=data,
            warnings=tuple(self.warnings),
            source_path=self.path,
        )

    def _version(self, top: dict[str, Node]) -> str | None:
        node = top.get("$dsdl-version")
        if node is None:
            self.err(dc.MISSING_VERSION, "document has no $dsdl-version key")
            return None
        if not isinstance(node.value, str):
            self.err(
                dc.UNSUPPORTED_VERSION,
                f"$dsdl-version must be the string \"{ACCEPTED_VERSION}\"",
                node,
            )
            return None
        if node.value != ACCEPTED_VERSION:
            self.err(
                dc.UNSUPPORTED_VERSION,
                f"version {node.value!r} is not supported (expected {ACCEPTED_VERSION!r})",
                node,
            )
            return None
        return node.value

    def _imports(self, node: Node | None) -> tuple[str, ...]:
        if node is None:
            return ()
        value = node.value
        if isinstance(value, str):
            return (value,)
        if not isinstance(value, list):
            self.err(dc.INVALID_DOCUMENT, "$import must be a sequence of module names", node)
            return ()
        names = []
        for item in value:
            if not isinstance(item.value, str) or not item.value:
                self.err(dc.INVALID_DOCUMENT, "import entries must be non-empty strings", item)
                continue
            names.append(item.value)
        return tuple(names)

    def _meta(self, node: Node | None) -> dict | None:
        if node is None:
            return None
        if not isinstance(node.value, dict):
            self.err(dc.INVALID_DOCUMENT, "meta must be a mapping", node)
            return None
        result = plain(node)
        assert isinstance(result, dict)
        return result

    def _defs(self, node: Node | None) -> dict:
        if node is None:
            return {}
        if not isinstance(node.value, dict):
            self.err(dc.INVALID_DOCUMENT, "defs must be a mapping of definitions", node)
            return {}
        defs = {}
        for name, def_node in node.value.items():
            definition = self._definition(name, def_node)
            if definition is not None:
                defs[name] = definition
        return defs

    def _definition(self, name: str, node: Node):
        if not isinstance(node.value, dict):
            self.err(dc.INVALID_DEFINITION, f"definition {name!r} must be a mapping", node)
            return None
        body: dict[str, Node] = node.value
        kind_node = body.get("$def")
        kind = kind_node.value if kind_node else None
        if kind == "record":
            return self._record(name, node, body)
        if kind == "class_domain":
            return self._class_domain(name, node, body)
        self.err(
            dc.INVALID_DEFINITION,
            f"definition {name!r} needs `$def: record` or `$def: class_domain`",
            kind_node or node,
        )
        return None

    def _record(self, name: str, node: Node, body: dict[str, Node]) -> RecordDef | None:
        fields_node = body.get("fields")
        if fields_node is None or not isinstance(fields_node.value, dict):
            self.err(dc.INVALID_DEFINITION, f"record {name!r} needs a `fields` mapping", node)
            return None
        fields: dict[str, FieldType] = {}
        for fname, type_node in fields_node.value.items():
            if not isinstance(type_node.value, str):
                self.err(dc.INVALID_TYPE_EXPR, f"field {fname!r} needs a type expression string", type_node)
                continue
            try:
                fields[fname] = parse_type_expr(type_node.value)
            except ValueError as exc:
                self.err(dc.INVALID_TYPE_EXPR, f"field {fname!r}: {exc}", type_node)
        optional: list[str] = []
        opt_node = body.get("optional")
        if opt_node is not None:
            if not isinstance(opt_node.value, list) or not all(
                isinstance(i.value, str) for i in opt_node.value
            ):
                self.err(dc.INVALID_DEFINITION, f"record {name!r}: optional must list field names", opt_node)
            else:
                optional = [i.value for i in opt_node.value]
        for key, extra in body.items():
            if key not in ("$def", "fields", "optional"):
                self.warn(dc.UNKNOWN_KEY, f"unknown key {key!r} in record {name!r} ignored", extra)
        return RecordDef(name, fields, tuple(optional), pos=(node.line, node.column))

    def _class_domain(self, name: str, node: Node, body: dict[str, Node]) -> ClassDomain | None:
        classes_node = body.get("classes")
        if classes_node is None or not isinstance(classes_node.value, list):
            self.err(dc.INVALID_DEFINITION, f"class_domain {name!r} needs a `classes` sequence", node)
            return None
        classes = []
        ok = True
        for item in classes_node.value:
            if not isinstance(item.value, str):
                self.err(dc.INVALID_DEFINITION, f"class_domain {name!r}: classes must be strings", item)
                ok = False
                continue
            classes.append(item.value)
        for key, extra in body.items():
            if key not in ("$def", "classes"):
                self.warn(dc.UNKNOWN_KEY, f"unknown key {key!r} in class_domain {name!r} ignored", extra)
        if not ok:
            return None
        return ClassDomain(name, tuple(classes), pos=(node.line, node.column))

    def _data(self, node: Node | None) -> DataSection | None:
        if node is None:
            return None
        if not isinstance(node.value, dict):
            self.err(dc.INVALID_DOCUMENT, "data must be a mapping", node)
            return None
        body: dict[str, Node] = node.value
        st_node = body.get("sample-type")
        if st_node is None or not isinstance(st_node.value, str):
            self.err(dc.INVALID_DOCUMENT, "data needs a `sample-type` record name", node)
            return None
        samples_node = body.get("samples")
        if samples_node is None:
            self.err(dc.INVALID_DOCUMENT, "data needs a `samples` sequence or locator string", node)
            return None
        for key, extra in body.items():
            if key not in ("sample-type", "samples"):
                self.warn(dc.UNKNOWN_KEY, f"unknown key {key!r} in data ignored", extra)
        if isinstance(samples_node.value, str):
            return DataSection(
                sample_type=st_node.value,
                samples_locator=samples_node.value,
                pos=(node.line, node.column),
            )
        if isinstance(samples_node.value, list):
            samples = []
            positions = []
            for item in samples_node.value:
                if not isinstance(item.value, dict):
                    self.err(dc.INVALID_DOCUMENT, "each sample must be a mapping", item)
                    continue
                raw = plain(item)
                assert isinstance(raw, dict)
                samples.append(raw)
                positions.append((item.line, item.column))
            return DataSection(
                sample_type=st_node.value,
                samples=tuple(samples),
                pos=(node.line, node.column),
                sample_pos=tuple(positions),
            )
        self.err(dc.INVALID_DOCUMENT, "samples must be a sequence or a locator string", samples_node)
        return None


def parse_document(text: str, path: str | None = None) -> DsdlDocument:
    """Parse document text into the typed model.

    Raises DocumentError carrying located diagnostics on any error; non-fatal
    findings (unknown keys) are attached to the returned document as warnings.
    """
    try:
        root = read_tree(text)
    except ReadError as exc:
        raise DocumentError(
            [dc.error(exc.code, exc.message, path=path, line=exc.line, column=exc.column)]
        ) from None
    builder = _DocBuilder(path)
    doc = builder.build(root)
    if doc is None:
        raise DocumentError(tuple(builder.errors) + tuple(builder.warnings))
    return doc


def parse_samples_file(text: str, path: str | None = None) -> tuple[tuple[dict, ...], tuple]:
    """Parse an external samples file: a top-level sequence of sample mappings."""
    try:
        root = read_tree(text)
    except ReadError as exc:
        raise DocumentError(
            [dc.error(exc.code, exc.message, path=path, line=exc.line, column=exc.column)]
        ) from None
    if not isinstance(root.value, list):
        raise DocumentError(
            [dc.error(dc.INVALID_DOCUMENT, "samples file must be a sequence", path=path,
                      line=root.line, column=root.column)]
        )
    samples = []
    positions = []
    for item in root.value:
        if not isinstance(item.value, dict):
            raise DocumentError(
                [dc.error(dc.INVALID_DOCUMENT, "each sample must be a mapping", path=path,
                          line=item.line, column=item.column)]
            )
        samples.append(plain(item))
        positions.append((item.line, item.column))
    return tuple(samples), tuple(positions)
