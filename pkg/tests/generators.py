"""Seeded random generators for documents and mergeable sample sets."""

from __future__ import annotations

import random
from pathlib import Path

from odl.dsdl import ClassDomain, DataSection, DsdlDocument, FieldType, RecordDef
from odl.engine.sampleset import from_document

# Strings that stress quoting: numeric lookalikes, YAML keywords, punctuation,
# unicode, and whitespace at the edges.
TRICKY_STRINGS = [
    "cat", "dog", "person", "traffic light", "aeroplane", "tv/monitor",
    "16×16", "007", "1.5", "-3", "true", "null", "yes", "off", "~",
    "a#b", "x, y", "[weird]", "{curly}", "- dash", ": colon", "0x1f", "1_000",
    " leading", "trailing ", "q\"quote", "back\\slash", "line\nbreak", "été",
]

ATOM_KINDS = ("Bool", "Int", "Num", "Str", "Coord", "BBox", "Polygon", "Image", "Text")


def _ident(rng: random.Random, taken: set[str]) -> str:
    while True:
        name = rng.choice("abcdefghijklmnopqrstuvwxyz") + "".join(
            rng.choice("abcdefghijklmnopqrstuvwxyz0123456789_") for _ in range(rng.randint(0, 7))
        )
        if name not in taken:
            taken.add(name)
            return name


def _class_name(rng: random.Random, taken: set[str]) -> str:
    while True:
        base = rng.choice(TRICKY_STRINGS)
        if rng.random() < 0.5:
            base = f"{base}-{rng.randint(0, 999)}"
        if base not in taken:
            taken.add(base)
            return base


def gen_field_type(rng: random.Random, domains: list[str], records: list[str],
                   list_depth: int = 0) -> FieldType:
    choices = list(ATOM_KINDS)
    if domains:
        choices += ["Label"] * 3
    if records:
        choices += ["Ref"] * 2
    if list_depth < 3:
        choices += ["List"] * 2
    kind = rng.choice(choices)
    if kind == "Label":
        return FieldType("Label", domain=rng.choice(domains))
    if kind == "Ref":
        return FieldType("Ref", ref=rng.choice(records))
    if kind == "List":
        return FieldType("List", element=gen_field_type(rng, domains, records, list_depth + 1))
    return FieldType(kind)


def gen_value(rng: random.Random, ftype: FieldType, defs):
    kind = ftype.kind
    if kind == "Bool":
        return rng.random() < 0.5
    if kind == "Int":
        return rng.randint(-10**6, 10**6)
    if kind == "Num":
        return round(rng.uniform(-1000, 1000), 4)
    if kind == "Str":
        return rng.choice(TRICKY_STRINGS)
    if kind == "Coord":
        return [rng.randint(0, 500), round(rng.uniform(0, 500), 2)]
    if kind == "BBox":
        return [rng.randint(0, 300), rng.randint(0, 300), rng.randint(0, 200), round(rng.uniform(0, 200), 2)]
    if kind == "Polygon":
        return [[rng.randint(0, 500), rng.randint(0, 500)] for _ in range(rng.randint(3, 6))]
    if kind == "Label":
        return rng.choice(defs[ftype.domain].classes)
    if kind == "Image":
        return f"media/{rng.randint(0, 99):06d}.jpg"
    if kind == "Text":
        return f"texts/{rng.randint(0, 99):06d}.txt"
    if kind == "List":
        return [gen_value(rng, ftype.element, defs) for _ in range(rng.randint(0, 3))]
    if kind == "Ref":
        return gen_record_value(rng, defs[ftype.ref], defs)
    raise AssertionError(kind)


def gen_record_value(rng: random.Random, record: RecordDef, defs) -> dict:
    out = {}
    for fname, ftype in record.fields.items():
        if fname in record.optional and rng.random() < 0.5:
            continue
        out[fname] = gen_value(rng, ftype, defs)
    return out


def gen_document(rng: random.Random) -> DsdlDocument:
    """A random valid document: DAG of records, domains, and conforming samples."""
    taken: set[str] = set()
    defs = {}

    domains = []
    for _ in range(rng.randint(1, 3)):
        name = _ident(rng, taken).capitalize()
        classes_taken: set[str] = set()
        classes = tuple(_class_name(rng, classes_taken) for _ in range(rng.randint(1, 30)))
        defs[name] = ClassDomain(name, classes)
        domains.append(name)

    records = []
    for _ in range(rng.randint(1, 4)):
        name = _ident(rng, taken).capitalize() + "Rec"
        fields_taken: set[str] = set()
        fields = {}
        for _ in range(rng.randint(1, 6)):
            fields[_ident(rng, fields_taken)] = gen_field_type(rng, domains, records)
        optional = tuple(f for f in fields if rng.random() < 0.25)
        defs[name] = RecordDef(name, fields, optional)
        records.append(name)

    meta = None
    if rng.random() < 0.3:
        meta = {"origin": rng.choice(TRICKY_STRINGS), "count": rng.randint(0, 99)}

    data = None
    if rng.random() < 0.8:
        sample_type = rng.choice(records)
        samples = tuple(
            gen_record_value(rng, defs[sample_type], defs) for _ in range(rng.randint(0, 5))
        )
        data = DataSection(sample_type=sample_type, samples=samples)

    return DsdlDocument(version="1.0", defs=defs, meta=meta, data=data)


# -- mergeable parts ---------------------------------------------------------

MERGE_CLASS_POOL = [
    "cat", "dog", "person", "car", "bird", "horse", "sheep", "cow",
    "boat", "train", "16×16", "traffic light",
]


def gen_merge_parts(rng: random.Random, max_parts: int = 4, max_samples: int = 10,
                    max_classes: int = 8):
    """Structurally compatible detection-style parts with overlapping domains."""
    parts = []
    n_parts = rng.randint(1, max_parts)
    for k in range(n_parts):
        classes = tuple(rng.sample(MERGE_CLASS_POOL, rng.randint(1, max_classes)))
        with_flag = rng.random() < 0.5  # optional per-part extra field
        ann_fields = {
            "bbox": FieldType("BBox"),
            "label": FieldType("Label", domain="ClassDom"),
        }
        optional = ()
        if with_flag:
            ann_fields["flag"] = FieldType("Bool")
            optional = ("flag",)
        defs = {
            "ClassDom": ClassDomain("ClassDom", classes),
            "BBoxAnn": RecordDef("BBoxAnn", ann_fields, optional),
            "ObjectDetSample": RecordDef(
                "ObjectDetSample",
                {
                    "media": FieldType("Image"),
                    "objects": FieldType("List", element=FieldType("Ref", ref="BBoxAnn")),
                },
            ),
        }
        samples = []
        for i in range(rng.randint(1, max_samples)):
            objects = []
            for _ in range(rng.randint(0, 3)):
                obj = {
                    "bbox": [rng.randint(0, 100), rng.randint(0, 100), rng.randint(0, 50), rng.randint(0, 50)],
                    "label": rng.choice(classes),
                }
                if with_flag and rng.random() < 0.5:
                    obj["flag"] = rng.random() < 0.5
                objects.append(obj)
            samples.append({"media": f"media/p{k}_{i:04d}.jpg", "objects": objects})
        doc = DsdlDocument(
            version="1.0",
            defs=defs,
            data=DataSection(sample_type="ObjectDetSample", samples=tuple(samples)),
        )
        parts.append(from_document(doc, Path(f"/nonexistent/part{k}"), f"generated:part{k}"))
    return parts
