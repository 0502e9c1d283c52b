"""In-memory model for dataset description documents.

Documents are immutable after construction. Source positions and parse
warnings ride along as non-comparing fields so that two documents with the
same content are equal regardless of where they came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..diagnostics import Diagnostic

ACCEPTED_VERSION = "1.0"

#: Type-expression kinds that take no parameter.
ATOM_KINDS = ("Bool", "Int", "Num", "Str", "Coord", "BBox", "Polygon", "Image", "Text")

MAX_LIST_DEPTH = 4


@dataclass(frozen=True)
class FieldType:
    """A field type expression: an atom, Label[domain], List[elem], or a record reference."""

    kind: str  # one of ATOM_KINDS, "Label", "List", "Ref"
    domain: str | None = None  # Label only
    element: "FieldType | None" = None  # List only
    ref: str | None = None  # Ref only

    def __str__(self) -> str:
        if self.kind == "Label":
            return f"Label[{self.domain}]"
        if self.kind == "List":
            return f"List[{self.element}]"
        if self.kind == "Ref":
            return str(self.ref)
        return self.kind

    def list_depth(self) -> int:
        if self.kind == "List":
            assert self.element is not None
            return 1 + self.element.list_depth()
        return 0


@dataclass(frozen=True)
class RecordDef:
    """A record schema: ordered fields, a subset of which may be optional."""

    name: str
    fields: dict[str, FieldType]
    optional: tuple[str, ...] = ()
    pos: tuple[int, int] | None = field(default=None, compare=False)

    def is_required(self, field_name: str) -> bool:
        return field_name not in self.optional


@dataclass(frozen=True)
class ClassDomain:
    """An ordered set of category-label names."""

    name: str
    classes: tuple[str, ...]
    pos: tuple[int, int] | None = field(default=None, compare=False)

    def index_of(self, label: str) -> int:
        return self.classes.index(label)


Definition = Union[RecordDef, ClassDomain]


@dataclass(frozen=True)
class DataSection:
    """The data block: a sample record type plus inline samples or a locator to them."""

    sample_type: str
    samples: tuple[dict, ...] | None = None
    samples_locator: str | None = None
    pos: tuple[int, int] | None = field(default=None, compare=False)
    sample_pos: tuple[tuple[int, int] | None, ...] | None = field(default=None, compare=False)

    @property
    def inline(self) -> bool:
        return self.samples_locator is None


@dataclass(frozen=True)
class DsdlDocument:
    version: str
    imports: tuple[str, ...] = ()
    meta: dict | None = None
    defs: dict[str, Definition] = field(default_factory=dict)
    data: DataSection | None = None
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)
    source_path: str | None = field(default=None, compare=False)

    def records(self) -> dict[str, RecordDef]:
        return {k: v for k, v in self.defs.items() if isinstance(v, RecordDef)}

    def domains(self) -> dict[str, ClassDomain]:
        return {k: v for k, v in self.defs.items() if isinstance(v, ClassDomain)}
