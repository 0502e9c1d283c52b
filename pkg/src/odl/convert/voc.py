"""Pascal VOC detection XML to the canonical dataset model.

Boxes convert as [x, y, w, h] = [xmin, ymin, xmax - xmin, ymax - ymin] with no
off-by-one adjustment, so integer inputs invert exactly. The per-object
`difficult` flag is preserved as an optional Bool without interpretation.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from .. import diagnostics as dc
from ..diagnostics import ConversionError
from ..dsdl.model import ClassDomain, DataSection, DsdlDocument, FieldType, RecordDef
from ..dsdl.templates import TEMPLATE_DOMAIN
from ..engine.sampleset import SampleSet, from_document


@dataclass(frozen=True)
class VocSource:
    annotations_dir: str | Path
    images_dir: str | Path
    class_list: tuple[str, ...] | None = None


def detection_defs(classes: tuple[str, ...], *, difficult: bool = False, iscrowd: bool = False):
    """Object-detection definitions over the given class list.

    The annotation record follows the built-in template, extended with the
    optional legacy flags a converter needs to preserve.
    """
    fields: dict[str, FieldType] = {
        "bbox": FieldType("BBox"),
        "label": FieldType("Label", domain=TEMPLATE_DOMAIN),
    }
    optional = []
    if difficult:
        fields["difficult"] = FieldType("Bool")
        optional.append("difficult")
    if iscrowd:
        fields["iscrowd"] = FieldType("Bool")
        optional.append("iscrowd")
    return {
        "BBoxAnn": RecordDef("BBoxAnn", fields, tuple(optional)),
        "ObjectDetSample": RecordDef(
            "ObjectDetSample",
            {
                "media": FieldType("Image"),
                "objects": FieldType("List", element=FieldType("Ref", ref="BBoxAnn")),
            },
        ),
        TEMPLATE_DOMAIN: ClassDomain(TEMPLATE_DOMAIN, classes),
    }


def _number(element: ET.Element | None, xml_path: Path, what: str):
    if element is None or element.text is None:
        raise ConversionError(f"{xml_path.name}: missing {what}")
    text = element.text.strip()
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            raise ConversionError(f"{xml_path.name}: {what} is not a number: {text!r}") from None


def _parse_annotation(xml_path: Path) -> tuple[str, list[dict]]:
    try:
        tree = ET.parse(xml_path)
    except ET.ParseError as exc:
        raise ConversionError(f"{xml_path.name}: malformed XML: {exc}") from None
    root = tree.getroot()

    size = root.find("size")
    if size is None:
        raise ConversionError(f"{xml_path.name}: missing size block")
    _number(size.find("width"), xml_path, "size width")
    _number(size.find("height"), xml_path, "size height")

    filename_el = root.find("filename")
    if filename_el is None or not (filename_el.text or "").strip():
        raise ConversionError(f"{xml_path.name}: missing filename element")
    filename = (filename_el.text or "").strip()

    objects = []
    for obj in root.findall("object"):
        name_el = obj.find("name")
        if name_el is None or not (name_el.text or "").strip():
            raise ConversionError(f"{xml_path.name}: object without a name")
        bndbox = obj.find("bndbox")
        if bndbox is None:
            raise ConversionError(f"{xml_path.name}: object without a bndbox")
        xmin = _number(bndbox.find("xmin"), xml_path, "bndbox xmin")
        ymin = _number(bndbox.find("ymin"), xml_path, "bndbox ymin")
        xmax = _number(bndbox.find("xmax"), xml_path, "bndbox xmax")
        ymax = _number(bndbox.find("ymax"), xml_path, "bndbox ymax")
        if xmax < xmin or ymax < ymin:
            raise ConversionError(
                f"{xml_path.name}: degenerate bndbox [{xmin}, {ymin}, {xmax}, {ymax}]"
            )
        record = {
            "bbox": [xmin, ymin, xmax - xmin, ymax - ymin],
            "label": (name_el.text or "").strip(),
        }
        difficult_el = obj.find("difficult")
        if difficult_el is not None and (difficult_el.text or "").strip():
            record["difficult"] = (difficult_el.text or "").strip() not in ("0", "false")
        objects.append(record)
    return filename, objects


def import_voc(src: VocSource) -> SampleSet:
    """Convert a directory of VOC detection XML files into a sample set.

    XML files are processed in lexicographic filename order; without an
    explicit class list the domain is the first-appearance order of object
    names. One sample per XML file, zero-object files included.
    """
    annotations_dir = Path(src.annotations_dir)
    images_dir = Path(src.images_dir)
    if not annotations_dir.is_dir():
        raise ConversionError(f"annotations directory {annotations_dir} does not exist")
    if not images_dir.is_dir():
        raise ConversionError(f"images directory {images_dir} does not exist")

    root = images_dir.parent
    media_prefix = images_dir.name

    samples = []
    seen_classes: list[str] = []
    for xml_path in sorted(annotations_dir.glob("*.xml"), key=lambda p: p.name):
        filename, objects = _parse_annotation(xml_path)
        for obj in objects:
            if obj["label"] not in seen_classes:
                seen_classes.append(obj["label"])
        samples.append({"media": f"{media_prefix}/{filename}", "objects": objects})

    classes = tuple(src.class_list) if src.class_list is not None else tuple(seen_classes)
    if src.class_list is not None:
        for cls in seen_classes:
            if cls not in classes:
                raise ConversionError(f"object class {cls!r} is not in the explicit class list")

    defs = detection_defs(classes, difficult=True)
    origin = f"voc:{annotations_dir}"
    if not samples and not classes:
        # Degenerate empty source: an empty domain would not validate.
        return SampleSet(
            defs=defs,
            sample_type="ObjectDetSample",
            samples=(),
            root=root,
            origin=origin,
            warnings=(dc.warning(dc.EMPTY_DATASET, f"no XML files under {annotations_dir}"),),
        )
    doc = DsdlDocument(
        version="1.0",
        defs=defs,
        data=DataSection(sample_type="ObjectDetSample", samples=tuple(samples)),
    )
    return from_document(doc, root, origin)
