"""Import resolution: merge template and file imports into a document."""

from __future__ import annotations

from pathlib import Path

from .. import diagnostics as dc
from ..diagnostics import Diagnostic, DocumentError
from .model import Definition, DsdlDocument
from .templates import BUILTIN_TEMPLATES


def resolve_imports(doc: DsdlDocument, search_paths: tuple | list = ()) -> DsdlDocument:
    """Resolve the document's imports and merge the imported definitions.

    Each import name is looked up first in the built-in template catalog, then
    as ``<name>.yaml`` under each search path in order. Imported definitions
    come before local ones; any name collision is a hard error (a local
    definition never silently shadows an imported one).

    Returns the document unchanged when it has no imports.
    """
    if not doc.imports:
        return doc

    errors: list[Diagnostic] = []
    merged: dict[str, Definition] = {}

    def add_defs(defs: dict[str, Definition], origin: str):
        for name, definition in defs.items():
            if name in merged:
                errors.append(
                    dc.error(
                        dc.DUPLICATE_DEFINITION,
                        f"definition {name!r} from {origin} collides with an earlier definition",
                        path=doc.source_path,
                    )
                )
            else:
                merged[name] = definition

    def load(name: str, stack: tuple[str, ...]):
        if name in stack:
            errors.append(
                dc.error(
                    dc.IMPORT_CYCLE,
                    f"import cycle: {' -> '.join(stack + (name,))}",
                    path=doc.source_path,
                )
            )
            return
        if name in BUILTIN_TEMPLATES:
            add_defs(BUILTIN_TEMPLATES[name], f"template {name!r}")
            return
        for base in search_paths:
            candidate = Path(base) / f"{name}.yaml"
            if candidate.is_file():
                from .parser import parse_document

                try:
                    imported = parse_document(candidate.read_text(encoding="utf-8"), str(candidate))
                except DocumentError as exc:
                    errors.extend(exc.diagnostics)
                    return
                for sub in imported.imports:
                    load(sub, stack + (name,))
                add_defs(imported.defs, f"import {name!r}")
                return
        errors.append(
            dc.error(
                dc.IMPORT_NOT_FOUND,
                f"import {name!r} is neither a built-in template nor a file on the search path",
                path=doc.source_path,
            )
        )

    for name in doc.imports:
        load(name, ())
    add_defs(doc.defs, "this document")

    if errors:
        raise DocumentError(errors)
    return DsdlDocument(
        version=doc.version,
        imports=(),
        meta=doc.meta,
        defs=merged,
        data=doc.data,
        warnings=doc.warnings,
        source_path=doc.source_path,
    )
