"""Registry: data cards, licenses, manifests, a test server, and the download client."""

from .client import (
    DatasetSummary,
    DownloadReport,
    download_dataset,
    fetch_card,
    fetch_manifest,
    search_datasets,
    upload_dataset,
)
from .model import (
    CC_VARIANT_FLAGS,
    CDLA_VARIANTS,
    FAMILIES,
    FLAG_NAMES,
    ODC_VARIANTS,
    DataCard,
    FileManifest,
    LicenseSpec,
    ManifestEntry,
    Metafile,
    build_manifest,
    card_from_json,
    card_to_json,
    manifest_from_json,
    manifest_to_json,
    sha256_file,
    validate_license,
)
from .server import RegistryServer, RequestRecord, serve_registry

__all__ = [
    "CC_VARIANT_FLAGS",
    "CDLA_VARIANTS",
    "FAMILIES",
    "FLAG_NAMES",
    "ODC_VARIANTS",
    "DataCard",
    "DatasetSummary",
    "DownloadReport",
    "FileManifest",
    "LicenseSpec",
    "ManifestEntry",
    "Metafile",
    "RegistryServer",
    "RequestRecord",
    "build_manifest",
    "card_from_json",
    "card_to_json",
    "download_dataset",
    "fetch_card",
    "fetch_manifest",
    "manifest_from_json",
    "manifest_to_json",
    "search_datasets",
    "serve_registry",
    "sha256_file",
    "upload_dataset",
    "validate_license",
]
