import base64
import xml.etree.ElementTree as ET

import pytest

from odl.diagnostics import EngineError
from odl.engine import open_sampleset, render_sample

from .conftest import make_jpeg

SVG_NS = "{http://www.w3.org/2000/svg}"
XLINK = "{http://www.w3.org/1999/xlink}href"


def elements(svg: str, tag: str):
    return ET.fromstring(svg).findall(f".//{SVG_NS}{tag}")


def write_dataset(root, doc: str, media=()):
    (root / "dsdl").mkdir(parents=True)
    (root / "dsdl" / "train.yaml").write_text(doc)
    for name, (w, h) in media:
        make_jpeg(root / "media" / name, w, h)
    return open_sampleset(root / "dsdl" / "train.yaml")


def test_detection_two_objects_two_rects_two_texts(mini_root):
    ds = open_sampleset(mini_root / "dsdl" / "set-train" / "train.yaml")
    svg = render_sample(ds, 1)
    assert len(elements(svg, "rect")) == 2
    assert len(elements(svg, "text")) == 2
    assert svg.startswith('<?xml version="1.0"')


def test_canvas_matches_media_resolution(mini_root):
    ds = open_sampleset(mini_root / "dsdl" / "set-train" / "train.yaml")
    root_el = ET.fromstring(render_sample(ds, 0))
    assert root_el.get("width") == "353.0" and root_el.get("height") == "500.0"


def test_classification_badge(tmp_path):
    doc = (
        '$dsdl-version: "1.0"\n'
        "$import: [classification]\n"
        "defs:\n  ClassDom:\n    $def: class_domain\n    classes: [cat, dog]\n"
        "data:\n  sample-type: ClassificationSample\n  samples:\n"
        "    - {media: media/a.jpg, label: cat}\n"
    )
    ds = write_dataset(tmp_path / "cls", doc, [("a.jpg", (32, 32))])
    svg = render_sample(ds, 0)
    texts = elements(svg, "text")
    assert len(texts) == 1 and texts[0].text == "cat"
    assert elements(svg, "rect") == []


def test_ocr_polygon_and_transcription(tmp_path):
    doc = (
        '$dsdl-version: "1.0"\n'
        "$import: [ocr]\n"
        "data:\n  sample-type: OcrSample\n  samples:\n"
        "    - media: media/sign.jpg\n"
        "      objects:\n"
        "        - polygon:\n"
        "            - [10, 10]\n"
        "            - [90, 10]\n"
        "            - [90, 40]\n"
        "            - [10, 40]\n"
        '          text: "STOP"\n'
    )
    ds = write_dataset(tmp_path / "ocr", doc, [("sign.jpg", (100, 50))])
    svg = render_sample(ds, 0)
    polygons = elements(svg, "polygon")
    assert len(polygons) == 1
    assert len(polygons[0].get("points").split(" ")) == 4
    texts = elements(svg, "text")
    assert len(texts) == 1 and texts[0].text == "STOP"


def test_segmentation_polygons_no_text(tmp_path):
    doc = (
        '$dsdl-version: "1.0"\n'
        "$import: [semantic-segmentation]\n"
        "defs:\n  ClassDom:\n    $def: class_domain\n    classes: [road]\n"
        "data:\n  sample-type: SegmentationSample\n  samples:\n"
        "    - media: media/a.jpg\n"
        "      objects:\n"
        "        - polygon:\n"
        "            - [0, 0]\n"
        "            - [4, 0]\n"
        "            - [4, 4]\n"
        "          label: road\n"
    )
    ds = write_dataset(tmp_path / "seg", doc, [("a.jpg", (8, 8))])
    svg = render_sample(ds, 0)
    assert len(elements(svg, "polygon")) == 1
    assert elements(svg, "text") == []


def test_rect_count_equals_object_count(mini_root):
    ds = open_sampleset(mini_root / "dsdl" / "set-train" / "train.yaml")
    for i in range(len(ds)):
        svg = render_sample(ds, i)
        assert len(elements(svg, "rect")) == len(ds[i]["objects"])


def test_embed_media_base64(mini_root):
    ds = open_sampleset(mini_root / "dsdl" / "set-train" / "train.yaml")
    svg = render_sample(ds, 0, embed_media=True)
    images = elements(svg, "image")
    href = images[0].get(XLINK)
    assert href.startswith("data:image/jpeg;base64,")
    raw = base64.b64decode(href.split(",", 1)[1])
    assert raw == (mini_root / "media" / "000001.jpg").read_bytes()


def test_link_media_by_locator(mini_root):
    ds = open_sampleset(mini_root / "dsdl" / "set-train" / "train.yaml")
    svg = render_sample(ds, 0)
    assert elements(svg, "image")[0].get(XLINK) == "media/000001.jpg"


def test_index_out_of_range(mini_root):
    ds = open_sampleset(mini_root / "dsdl" / "set-train" / "train.yaml")
    with pytest.raises(EngineError) as err:
        render_sample(ds, 3)
    assert err.value.code == "IndexOutOfRange"


def test_unsupported_schema(tmp_path):
    doc = (
        '$dsdl-version: "1.0"\n'
        "defs:\n  R:\n    $def: record\n    fields:\n      x: Int\n"
        "data:\n  sample-type: R\n  samples:\n    - {x: 1}\n"
    )
    ds = write_dataset(tmp_path / "plain", doc)
    with pytest.raises(EngineError) as err:
        render_sample(ds, 0)
    assert err.value.code == "UnsupportedForRender"


def test_embed_requires_media(tmp_path):
    doc = (
        '$dsdl-version: "1.0"\n'
        "$import: [classification]\n"
        "defs:\n  ClassDom:\n    $def: class_domain\n    classes: [cat]\n"
        "data:\n  sample-type: ClassificationSample\n  samples:\n"
        "    - {media: media/missing.jpg, label: cat}\n"
    )
    ds = write_dataset(tmp_path / "nomedia", doc)
    with pytest.raises(EngineError) as err:
        render_sample(ds, 0, embed_media=True)
    assert err.value.code == "MediaUnavailable"
    # without embedding the locator is linked and a fallback canvas is used
    svg = render_sample(ds, 0)
    assert elements(svg, "text")[0].text == "cat"


def test_label_text_xml_escaped(tmp_path):
    doc = (
        '$dsdl-version: "1.0"\n'
        "$import: [classification]\n"
        'defs:\n  ClassDom:\n    $def: class_domain\n    classes: ["a<b&c"]\n'
        "data:\n  sample-type: ClassificationSample\n  samples:\n"
        '    - {media: media/a.jpg, label: "a<b&c"}\n'
    )
    ds = write_dataset(tmp_path / "esc", doc, [("a.jpg", (8, 8))])
    svg = render_sample(ds, 0)
    assert elements(svg, "text")[0].text == "a<b&c"
