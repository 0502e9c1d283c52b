"""Dataset description toolchain.

Parse and validate dataset description documents, materialize and merge
datasets with unified label spaces, compute preview statistics, render
annotation overlays, convert VOC/COCO annotations, and talk to a dataset
registry (search, verified resumable downloads, uploads). The `odl` command
exposes the same functionality on the command line.
"""

from .convert import CocoSource, VocSource, import_coco, import_voc
from .diagnostics import (
    ALL_CODES,
    ConversionError,
    Diagnostic,
    DocumentError,
    EngineError,
    LocatorError,
    RegistryError,
    ToolError,
)
from .dsdl import (
    BUILTIN_TEMPLATES,
    ClassDomain,
    DataSection,
    DsdlDocument,
    FieldType,
    LabelValue,
    RecordDef,
    Sample,
    parse_document,
    parse_type_expr,
    resolve_imports,
    serialize_document,
    typecheck_sample,
    validate,
)
from .engine import (
    DatasetStats,
    MergedSampleSet,
    SampleSet,
    compute_stats,
    concat,
    dump_jsonl,
    export_sampleset,
    open_sampleset,
    render_sample,
)
from .locator import ObjectLocator, ResolutionRoots, parse_locator, read_bytes, resolve
from .registry import (
    DataCard,
    DatasetSummary,
    DownloadReport,
    FileManifest,
    LicenseSpec,
    RegistryServer,
    download_dataset,
    search_datasets,
    serve_registry,
    upload_dataset,
    validate_license,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CODES",
    "BUILTIN_TEMPLATES",
    "ClassDomain",
    "CocoSource",
    "ConversionError",
    "DataCard",
    "DataSection",
    "DatasetStats",
    "DatasetSummary",
    "Diagnostic",
    "DocumentError",
    "DownloadReport",
    "DsdlDocument",
    "EngineError",
    "FieldType",
    "FileManifest",
    "LabelValue",
    "LicenseSpec",
    "LocatorError",
    "MergedSampleSet",
    "ObjectLocator",
    "RecordDef",
    "RegistryError",
    "RegistryServer",
    "ResolutionRoots",
    "Sample",
    "SampleSet",
    "ToolError",
    "VocSource",
    "compute_stats",
    "concat",
    "download_dataset",
    "dump_jsonl",
    "export_sampleset",
    "import_coco",
    "import_voc",
    "open_sampleset",
    "parse_document",
    "parse_locator",
    "parse_type_expr",
    "read_bytes",
    "render_sample",
    "resolve",
    "resolve_imports",
    "search_datasets",
    "serialize_document",
    "serve_registry",
    "typecheck_sample",
    "upload_dataset",
    "validate",
    "validate_license",
]
