"""Built-in record templates for mainstream tasks.

Each template ships record definitions only. Label fields reference a class
domain named ``ClassDom`` which the importing document must define; this keeps
templates reusable across datasets with different label sets.
"""

from __future__ import annotations

from .model import Definition, FieldType, RecordDef

TEMPLATE_DOMAIN = "ClassDom"

_LABEL = FieldType("Label", domain=TEMPLATE_DOMAIN)


def _catalog() -> dict[str, dict[str, Definition]]:
    bbox_ann = RecordDef("BBoxAnn", {"bbox": FieldType("BBox"), "label": _LABEL})
    polygon_ann = RecordDef("PolygonAnn", {"polygon": FieldType("Polygon"), "label": _LABEL})
    text_ann = RecordDef("TextAnn", {"polygon": FieldType("Polygon"), "text": FieldType("Str")})
    return {
        "classification": {
            "ClassificationSample": RecordDef(
                "ClassificationSample", {"media": FieldType("Image"), "label": _LABEL}
            ),
        },
        "object-detection": {
            "BBoxAnn": bbox_ann,
            "ObjectDetSample": RecordDef(
                "ObjectDetSample",
                {"media": FieldType("Image"), "objects": FieldType("List", element=FieldType("Ref", ref="BBoxAnn"))},
            ),
        },
        "semantic-segmentation": {
            "PolygonAnn": polygon_ann,
            "SegmentationSample": RecordDef(
                "SegmentationSample",
                {"media": FieldType("Image"), "objects": FieldType("List", element=FieldType("Ref", ref="PolygonAnn"))},
            ),
        },
        "ocr": {
            "TextAnn": text_ann,
            "OcrSample": RecordDef(
                "OcrSample",
                {"media": FieldType("Image"), "objects": FieldType("List", element=FieldType("Ref", ref="TextAnn"))},
            ),
        },
    }


BUILTIN_TEMPLATES: dict[str, dict[str, Definition]] = _catalog()
