"""Dataset description language: model, parser, templates, validation, serialization."""

from .model import (
    ACCEPTED_VERSION,
    ATOM_KINDS,
    MAX_LIST_DEPTH,
    ClassDomain,
    DataSection,
    Definition,
    DsdlDocument,
    FieldType,
    RecordDef,
)
from .parser import parse_document, parse_samples_file, parse_type_expr
from .resolve import resolve_imports
from .serialize import serialize_document
from .templates import BUILTIN_TEMPLATES, TEMPLATE_DOMAIN
from .typecheck import LabelValue, Sample, check_sample, typecheck_sample, validate

__all__ = [
    "ACCEPTED_VERSION",
    "ATOM_KINDS",
    "MAX_LIST_DEPTH",
    "BUILTIN_TEMPLATES",
    "TEMPLATE_DOMAIN",
    "ClassDomain",
    "DataSection",
    "Definition",
    "DsdlDocument",
    "FieldType",
    "RecordDef",
    "LabelValue",
    "Sample",
    "check_sample",
    "parse_document",
    "parse_samples_file",
    "parse_type_expr",
    "resolve_imports",
    "serialize_document",
    "typecheck_sample",
    "validate",
]
