import pytest
import yaml

from odl.diagnostics import DocumentError
from odl.dsdl import DsdlDocument, FieldType, parse_document, parse_type_expr

DETECTION_DOC = '''$dsdl-version: "1.0"
defs:
  BBoxAnn:
    $def: record
    fields:
      bbox: BBox
      label: Label[ClassDom]
  ObjectDetSample:
    $def: record
    fields:
      media: Image
      objects: List[BBoxAnn]
  ClassDom:
    $def: class_domain
    classes:
      - cat
      - dog
'''


def codes(excinfo):
    return [d.code for d in excinfo.value.diagnostics if d.severity == "error"]


def test_minimal_document():
    doc = parse_document('$dsdl-version: "1.0"\n')
    assert doc == DsdlDocument(version="1.0")
    assert doc.imports == () and doc.defs == {} and doc.data is None


def test_detection_fixture_counts_match_generic_parse():
    doc = parse_document(DETECTION_DOC, "detection.yaml")
    records = doc.records()
    assert set(records) == {"BBoxAnn", "ObjectDetSample"}
    assert [len(r.fields) for r in records.values()] == [2, 2]

    # Independent generic parse of the same bytes.
    generic = yaml.safe_load(DETECTION_DOC)
    generic_records = {
        name: body for name, body in generic["defs"].items() if body["$def"] == "record"
    }
    assert set(generic_records) == set(records)
    for name, body in generic_records.items():
        assert len(body["fields"]) == len(records[name].fields)


def test_missing_version():
    with pytest.raises(DocumentError) as err:
        parse_document("defs: {}\n")
    assert codes(err) == ["MissingVersion"]


def test_unsupported_version():
    with pytest.raises(DocumentError) as err:
        parse_document('$dsdl-version: "2.0"\n')
    assert codes(err) == ["UnsupportedVersion"]


def test_unquoted_version_is_rejected():
    with pytest.raises(DocumentError) as err:
        parse_document("$dsdl-version: 1.0\n")
    assert codes(err) == ["UnsupportedVersion"]


def test_unknown_top_level_key_is_warning():
    doc = parse_document('$dsdl-version: "1.0"\nextra: 1\n')
    assert [w.code for w in doc.warnings] == ["UnknownKey"]
    assert doc == DsdlDocument(version="1.0")  # warnings do not affect equality


def test_syntax_error_carries_location():
    with pytest.raises(DocumentError) as err:
        parse_document('$dsdl-version: "1.0"\ndefs: [unclosed\n')
    diag = err.value.diagnostics[0]
    assert diag.code == "ParseError" and diag.line == 2 and diag.column is not None


def test_definition_order_preserved():
    doc = parse_document(DETECTION_DOC)
    assert list(doc.defs) == ["BBoxAnn", "ObjectDetSample", "ClassDom"]


def test_data_section_with_locator():
    doc = parse_document(
        '$dsdl-version: "1.0"\ndata:\n  sample-type: S\n  samples: dsdl/set-train/samples.yaml\n'
    )
    assert doc.data is not None and not doc.data.inline
    assert doc.data.samples_locator == "dsdl/set-train/samples.yaml"


def test_import_list_and_single_string():
    doc = parse_document('$dsdl-version: "1.0"\n$import:\n  - object-detection\n')
    assert doc.imports == ("object-detection",)
    doc = parse_document('$dsdl-version: "1.0"\n$import: object-detection\n')
    assert doc.imports == ("object-detection",)


def test_invalid_type_expression():
    text = '$dsdl-version: "1.0"\ndefs:\n  R:\n    $def: record\n    fields:\n      f: List[\n'
    with pytest.raises(DocumentError) as err:
        parse_document(text)
    assert "InvalidTypeExpr" in codes(err)


def test_bad_def_kind():
    text = '$dsdl-version: "1.0"\ndefs:\n  R:\n    $def: struct\n    fields: {}\n'
    with pytest.raises(DocumentError) as err:
        parse_document(text)
    assert "InvalidDefinition" in codes(err)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("Int", FieldType("Int")),
        ("Label[Colors]", FieldType("Label", domain="Colors")),
        ("List[List[Num]]", FieldType("List", element=FieldType("List", element=FieldType("Num")))),
        ("BBoxAnn", FieldType("Ref", ref="BBoxAnn")),
    ],
)
def test_parse_type_expr(text, expected):
    assert parse_type_expr(text) == expected


@pytest.mark.parametrize("text", ["Label", "Label[]", "List", "Int[Foo]", "List[", "9bad"])
def test_parse_type_expr_rejects(text):
    with pytest.raises(ValueError):
        parse_type_expr(text)
