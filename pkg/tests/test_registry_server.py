import json
import urllib.error
import urllib.request

import pytest

from odl.registry import (
    RegistryServer,
    fetch_card,
    fetch_manifest,
    search_datasets,
    serve_registry,
    sha256_file,
)


def get_json(url):
    with urllib.request.urlopen(url) as resp:
        return json.loads(resp.read().decode("utf-8"))


def test_list_returns_both_summaries(registry):
    summaries = search_datasets(registry.endpoint)
    assert [s.repo for s in summaries] == [
        "OpenDataLab/COCO_2017",
        "OpenDataLab/PASCAL_VOC2007",
    ]


def test_search_text_voc_matches_exactly_one(registry):
    summaries = search_datasets(registry.endpoint, text="voc")
    assert [s.repo for s in summaries] == ["OpenDataLab/PASCAL_VOC2007"]


def test_search_readme_substring(registry):
    summaries = search_datasets(registry.endpoint, text="common objects")
    assert [s.repo for s in summaries] == ["OpenDataLab/COCO_2017"]


def test_filters_are_conjunctive(registry):
    assert search_datasets(registry.endpoint, text="voc", task_type="ocr") == []
    hit = search_datasets(registry.endpoint, text="voc", task_type="OBJECT-DETECTION")
    assert len(hit) == 1  # task filter is case-insensitive


def test_sort_updated_is_most_recent_first(registry):
    summaries = search_datasets(registry.endpoint, sort="updated")
    assert [s.name for s in summaries] == ["COCO_2017", "PASCAL_VOC2007"]


def test_datacard_round_trip(registry):
    card = fetch_card(registry.endpoint, "OpenDataLab", "PASCAL_VOC2007")
    assert card.metafile.publisher == "OpenDataLab"
    assert card.metafile.license.variant == "BY"
    assert "PASCAL VOC" in card.readme


def test_manifest_sizes_match_filesystem(registry, registry_root):
    manifest = fetch_manifest(registry.endpoint, "OpenDataLab", "PASCAL_VOC2007")
    base = registry_root / "OpenDataLab" / "PASCAL_VOC2007"
    assert [e.path for e in manifest.entries] == ["README.txt", "data/archive.bin"]
    for entry in manifest.entries:
        on_disk = base / entry.path
        assert entry.size == on_disk.stat().st_size
        assert entry.sha256 == sha256_file(on_disk)
    assert manifest.total_size == sum(e.size for e in manifest.entries)


def test_datacard_not_in_manifest(registry):
    manifest = fetch_manifest(registry.endpoint, "OpenDataLab", "PASCAL_VOC2007")
    assert all(e.path != "datacard.json" for e in manifest.entries)


def test_range_request_partial_content(registry, registry_root):
    url = f"{registry.endpoint}/api/v1/files/OpenDataLab/PASCAL_VOC2007/data/archive.bin"
    request = urllib.request.Request(url, headers={"Range": "bytes=0-99"})
    with urllib.request.urlopen(request) as resp:
        assert resp.status == 206
        assert resp.headers["Content-Range"].startswith("bytes 0-99/")
        body = resp.read()
    assert len(body) == 100
    archive = registry_root / "OpenDataLab" / "PASCAL_VOC2007" / "data" / "archive.bin"
    assert body == archive.read_bytes()[:100]


def test_open_ended_and_suffix_ranges(registry):
    url = f"{registry.endpoint}/api/v1/files/OpenDataLab/PASCAL_VOC2007/README.txt"
    size = len(urllib.request.urlopen(url).read())
    request = urllib.request.Request(url, headers={"Range": f"bytes={size - 5}-"})
    with urllib.request.urlopen(request) as resp:
        assert resp.status == 206 and len(resp.read()) == 5


def test_unsatisfiable_range(registry):
    url = f"{registry.endpoint}/api/v1/files/OpenDataLab/PASCAL_VOC2007/README.txt"
    request = urllib.request.Request(url, headers={"Range": "bytes=999999-"})
    with pytest.raises(urllib.error.HTTPError) as err:
        urllib.request.urlopen(request)
    assert err.value.code == 416


def test_unknown_routes_and_datasets(registry):
    for suffix in ("/api/v1/datasets/OpenDataLab/Nope", "/api/v1/nothing"):
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(registry.endpoint + suffix)
        assert err.value.code == 404


def test_path_traversal_rejected(registry):
    url = f"{registry.endpoint}/api/v1/files/OpenDataLab/PASCAL_VOC2007/..%2F..%2Fsecret"
    with pytest.raises(urllib.error.HTTPError) as err:
        urllib.request.urlopen(url)
    assert err.value.code == 404


def test_request_log_records_ranges(registry):
    registry.clear_log()
    url = f"{registry.endpoint}/api/v1/files/OpenDataLab/PASCAL_VOC2007/README.txt"
    request = urllib.request.Request(url, headers={"Range": "bytes=3-9"})
    urllib.request.urlopen(request).read()
    records = registry.data_requests()
    assert len(records) == 1 and records[0].range == (3, 9)
    assert records[0].data_bytes == 7


def test_startup_error_on_taken_port(registry_root, registry):
    from odl.diagnostics import RegistryError

    host, port = registry._http.server_address[:2]
    with pytest.raises(RegistryError) as err:
        RegistryServer(registry_root, (host, port))
    assert err.value.code == "StartupError"


def test_serve_registry_lifecycle(tmp_path):
    server = serve_registry(tmp_path)
    try:
        assert get_json(server.endpoint + "/api/v1/datasets") == []
    finally:
        server.stop()
