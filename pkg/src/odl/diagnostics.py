"""Coded findings and the toolchain error hierarchy.

Every finding the toolchain can emit carries one code from the closed set
below, so callers and tests can match on codes instead of message text.
"""

from __future__ import annotations

from dataclasses import dataclass

# Parsing and document structure
PARSE_ERROR = "ParseError"
DUPLICATE_KEY = "DuplicateKey"
MISSING_VERSION = "MissingVersion"
UNSUPPORTED_VERSION = "UnsupportedVersion"
INVALID_DOCUMENT = "InvalidDocument"
INVALID_DEFINITION = "InvalidDefinition"
INVALID_TYPE_EXPR = "InvalidTypeExpr"
UNKNOWN_KEY = "UnknownKey"  # warning

# Import resolution
IMPORT_NOT_FOUND = "ImportNotFound"
IMPORT_CYCLE = "ImportCycle"
DUPLICATE_DEFINITION = "DuplicateDefinition"
UNRESOLVED_IMPORT = "UnresolvedImport"

# Document validation and sample typechecking
UNKNOWN_TYPE = "UnknownType"
UNKNOWN_DOMAIN = "UnknownDomain"
DUPLICATE_CLASS = "DuplicateClass"
INVALID_CLASS = "InvalidClass"
EMPTY_DOMAIN = "EmptyDomain"
UNKNOWN_OPTIONAL_FIELD = "UnknownOptionalField"
LIST_DEPTH_EXCEEDED = "ListDepthExceeded"
RECURSIVE_TYPE = "RecursiveType"
MISSING_FIELD = "MissingField"
TYPE_MISMATCH = "TypeMismatch"
UNKNOWN_LABEL = "UnknownLabel"
UNKNOWN_FIELD = "UnknownField"

# Locators and storage backends
INVALID_LOCATOR = "InvalidLocator"
UNSUPPORTED_SCHEME = "UnsupportedScheme"
NOT_FOUND = "NotFound"
REMOTE_ERROR = "RemoteError"
UNKNOWN_BUCKET = "UnknownBucket"
INTEGRITY_ERROR = "IntegrityError"
NO_LOCAL_ROOT = "NoLocalRoot"
HTTP_DISABLED = "HttpDisabled"

# Dataset engine
EMPTY_DATASET = "EmptyDataset"  # warning
EMPTY_CONCAT = "EmptyConcat"
INCOMPATIBLE_SCHEMAS = "IncompatibleSchemas"
MEDIA_UNAVAILABLE = "MediaUnavailable"
UNKNOWN_RESOLUTION = "UnknownResolution"  # warning
INDEX_OUT_OF_RANGE = "IndexOutOfRange"
UNSUPPORTED_FOR_RENDER = "UnsupportedForRender"
WRITE_ERROR = "WriteError"

# Converters
CONVERSION_ERROR = "ConversionError"

# Registry
INVALID_LICENSE = "InvalidLicense"
INVALID_CARD = "InvalidCard"
INVALID_MANIFEST = "InvalidManifest"
STARTUP_ERROR = "StartupError"

#: The closed set of diagnostic codes this toolchain emits.
ALL_CODES: frozenset[str] = frozenset(
    v for k, v in list(globals().items()) if k.isupper() and isinstance(v, str)
)

#: Codes that indicate an environment problem (I/O, network, data corruption)
#: rather than invalid input; the CLI maps these to exit code 2.
IO_CODES: frozenset[str] = frozenset(
    {
        NOT_FOUND,
        REMOTE_ERROR,
        UNKNOWN_BUCKET,
        INTEGRITY_ERROR,
        MEDIA_UNAVAILABLE,
        WRITE_ERROR,
        STARTUP_ERROR,
    }
)


@dataclass(frozen=True)
class Diagnostic:
    """One coded finding with an optional source location."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    path: str | None = None
    line: int | None = None
    column: int | None = None

    def __str__(self) -> str:
        loc = ""
        if self.path:
            loc = self.path
        if self.line is not None:
            loc += f":{self.line}"
            if self.column is not None:
                loc += f":{self.column}"
        if loc:
            loc += ": "
        return f"{loc}{self.severity}[{self.code}]: {self.message}"


def error(code: str, message: str, *, path=None, line=None, column=None) -> Diagnostic:
    return Diagnostic("error", code, message, path, line, column)


def warning(code: str, message: str, *, path=None, line=None, column=None) -> Diagnostic:
    return Diagnostic("warning", code, message, path, line, column)


def has_errors(diags) -> bool:
    return any(d.severity == "error" for d in diags)


class ToolError(Exception):
    """Base error; carries a diagnostic code and the diagnostics that caused it."""

    def __init__(self, code: str, message: str, diagnostics: tuple[Diagnostic, ...] = ()):
        super().__init__(message)
        self.code = code
        self.diagnostics = diagnostics

    @property
    def exit_code(self) -> int:
        return 2 if self.code in IO_CODES else 1

    def __str__(self) -> str:
        base = f"[{self.code}] {self.args[0]}"
        if self.diagnostics:
            base += "\n" + "\n".join(str(d) for d in self.diagnostics)
        return base


class DocumentError(ToolError):
    """A document failed to parse, resolve, or validate."""

    def __init__(self, diagnostics, message: str = "document is invalid"):
        diags = tuple(diagnostics)
        first = next((d.code for d in diags if d.severity == "error"), PARSE_ERROR)
        super().__init__(first, message, diags)


class LocatorError(ToolError):
    pass


class EngineError(ToolError):
    pass


class ConversionError(ToolError):
    def __init__(self, message: str, diagnostics: tuple[Diagnostic, ...] = ()):
        super().__init__(CONVERSION_ERROR, message, diagnostics)


class RegistryError(ToolError):
    pass
