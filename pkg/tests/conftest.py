import json
import random
from pathlib import Path

import pytest
from PIL import Image

from odl.convert import CocoSource, VocSource
from odl.registry import RegistryServer

# Known composition of the mini fixtures; tests assert against these.

VOC_FILES = [
    # (xml name, media name, (width, height), [(label, xmin, ymin, xmax, ymax, difficult)])
    ("000001.xml", "000001.jpg", (353, 500), [("dog", 48, 240, 195, 371, False),
                                              ("person", 8, 12, 352, 498, True)]),
    ("000002.xml", "000002.jpg", (335, 500), [("aeroplane", 104, 78, 375, 183, False)]),
    ("000003.xml", "000003.jpg", (500, 375), [("dog", 100, 96, 355, 324, False),
                                              ("aeroplane", 2, 2, 40, 40, False)]),
]
VOC_CLASSES = ("dog", "person", "aeroplane")  # first-appearance order

COCO_CATEGORIES = [(5, "dog"), (1, "person"), (3, "car")]  # non-contiguous ids
COCO_CLASSES = ("person", "car", "dog")  # ordered by ascending id
COCO_IMAGES = [
    # (image id, file name, (width, height))
    (13, "coco_000013.jpg", (640, 480)),
    (7, "coco_000007.jpg", (480, 360)),
    (9, "coco_000009.jpg", (320, 240)),
]
COCO_ANNOTATIONS = [
    # (image id, category id, bbox, iscrowd)
    (7, 1, [10.5, 20.0, 30.0, 40.0], 0),
    (7, 3, [100, 50, 64, 32], 0),
    (13, 5, [5, 5, 200, 100], 1),
    # image 9 has no annotations
]


def make_jpeg(path: Path, width: int, height: int, color=(120, 40, 40)):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.new("RGB", (width, height), color).save(path, "JPEG", quality=85)


def make_png(path: Path, width: int, height: int, color=(40, 120, 40)):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.new("RGB", (width, height), color).save(path, "PNG")


def voc_xml(filename: str, size: tuple[int, int], objects) -> str:
    lines = [
        "<annotation>",
        f"  <filename>{filename}</filename>",
        "  <size>",
        f"    <width>{size[0]}</width>",
        f"    <height>{size[1]}</height>",
        "    <depth>3</depth>",
        "  </size>",
    ]
    for label, xmin, ymin, xmax, ymax, difficult in objects:
        lines += [
            "  <object>",
            f"    <name>{label}</name>",
            f"    <difficult>{1 if difficult else 0}</difficult>",
            "    <bndbox>",
            f"      <xmin>{xmin}</xmin>",
            f"      <ymin>{ymin}</ymin>",
            f"      <xmax>{xmax}</xmax>",
            f"      <ymax>{ymax}</ymax>",
            "    </bndbox>",
            "  </object>",
        ]
    lines.append("</annotation>")
    return "\n".join(lines)


@pytest.fixture
def voc_source(tmp_path) -> VocSource:
    base = tmp_path / "voc_src"
    annotations = base / "Annotations"
    images = base / "JPEGImages"
    annotations.mkdir(parents=True)
    images.mkdir()
    for xml_name, media_name, size, objects in VOC_FILES:
        (annotations / xml_name).write_text(voc_xml(media_name, size, objects))
        make_jpeg(images / media_name, *size)
    return VocSource(annotations, images)


@pytest.fixture
def coco_source(tmp_path) -> CocoSource:
    base = tmp_path / "coco_src"
    images_dir = base / "images"
    images_dir.mkdir(parents=True)
    for _, file_name, size in COCO_IMAGES:
        make_jpeg(images_dir / file_name, *size)
    instances = {
        "images": [
            {"id": image_id, "file_name": file_name, "width": size[0], "height": size[1]}
            for image_id, file_name, size in COCO_IMAGES
        ],
        "annotations": [
            {"id": i + 1, "image_id": img, "category_id": cat, "bbox": bbox, "iscrowd": crowd,
             "area": bbox[2] * bbox[3]}
            for i, (img, cat, bbox, crowd) in enumerate(COCO_ANNOTATIONS)
        ],
        "categories": [{"id": cid, "name": name} for cid, name in COCO_CATEGORIES],
    }
    instances_path = base / "instances.json"
    instances_path.write_text(json.dumps(instances))
    return CocoSource(instances_path, images_dir)


MINI_DOC = '''$dsdl-version: "1.0"
$import:
  - object-detection
defs:
  ClassDom:
    $def: class_domain
    classes:
      - cat
      - dog
data:
  sample-type: ObjectDetSample
  samples:
    - media: media/000001.jpg
      objects:
        - bbox: [48, 240, 147, 131]
          label: dog
    - media: media/000002.jpg
      objects:
        - bbox: [10, 10, 20, 20]
          label: cat
        - bbox: [4, 4, 8, 8]
          label: dog
    - media: media/000003.png
      objects: []
'''


@pytest.fixture
def mini_root(tmp_path) -> Path:
    """A tiny on-disk detection dataset: 3 samples, 2-class domain, mixed media."""
    root = tmp_path / "mini"
    (root / "dsdl" / "set-train").mkdir(parents=True)
    (root / "dsdl" / "set-train" / "train.yaml").write_text(MINI_DOC)
    make_jpeg(root / "media" / "000001.jpg", 353, 500)
    make_jpeg(root / "media" / "000002.jpg", 64, 48)
    make_png(root / "media" / "000003.png", 16, 16)
    return root


def make_datacard(namespace: str, name: str, readme: str, *, tasks=("object-detection",),
                  updated: str = "2024-05-01") -> dict:
    return {
        "namespace": namespace,
        "name": name,
        "readme": readme,
        "metafile": {
            "publisher": "OpenDataLab",
            "homepage": None,
            "paper_refs": [],
            "task_types": list(tasks),
            "data_types": ["image"],
            "license": {"family": "CC", "variant": "BY", "flags": ["BY"]},
        },
        "updated": updated,
    }


ARCHIVE_SEED = 20240501
ARCHIVE_SIZE = 10 * 1024 * 1024


def archive_bytes() -> bytes:
    return random.Random(ARCHIVE_SEED).randbytes(ARCHIVE_SIZE)


@pytest.fixture(scope="module")
def registry_root(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("registry")
    voc = root / "OpenDataLab" / "PASCAL_VOC2007"
    (voc / "data").mkdir(parents=True)
    (voc / "data" / "archive.bin").write_bytes(archive_bytes())
    (voc / "README.txt").write_text("detection benchmark, twenty classes\n")
    (voc / "datacard.json").write_text(
        json.dumps(make_datacard("OpenDataLab", "PASCAL_VOC2007",
                                 "# PASCAL VOC 2007\nDetection benchmark.",
                                 updated="2024-04-02"))
    )
    coco = root / "OpenDataLab" / "COCO_2017"
    coco.mkdir(parents=True)
    (coco / "instances.json").write_text('{"images": [], "annotations": [], "categories": []}')
    (coco / "datacard.json").write_text(
        json.dumps(make_datacard("OpenDataLab", "COCO_2017",
                                 "# COCO 2017\nCommon objects in context.",
                                 updated="2024-06-15"))
    )
    return root


@pytest.fixture(scope="module")
def registry(registry_root):
    server = RegistryServer(registry_root)
    server.start()
    yield server
    server.stop()


@pytest.fixture(autouse=True)
def _clear_registry_state(request):
    yield
    if "registry" in request.fixturenames:
        server = request.getfixturevalue("registry")
        server.clear_log()
        server.fail_after_data_bytes(None)
