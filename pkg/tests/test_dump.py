import json
import subprocess
import sys

from odl.engine import concat, dump_jsonl, open_sampleset


def test_dump_lines_are_schema_ordered_json(mini_root):
    ds = open_sampleset(mini_root / "dsdl" / "set-train" / "train.yaml")
    lines = list(dump_jsonl(ds))
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert list(first) == ["media", "objects"]
    assert first["objects"][0]["label"] == ["dog", 1]
    assert first["objects"][0]["bbox"] == [48, 240, 147, 131]


def test_dump_module_concatenates(mini_root, tmp_path):
    doc = str(mini_root / "dsdl" / "set-train" / "train.yaml")
    proc = subprocess.run(
        [sys.executable, "-m", "odl.engine.dump", doc, doc],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.splitlines()
    header = json.loads(lines[0])["header"]
    assert header["length"] == 6
    assert header["domains"] == {"ClassDom": ["cat", "dog"]}
    assert len(header["roots"]) == 6
    assert len(lines) == 7

    ds = open_sampleset(doc)
    merged = concat([ds, ds])
    assert lines[1:] == list(dump_jsonl(merged))


def test_dump_no_header(mini_root):
    doc = str(mini_root / "dsdl" / "set-train" / "train.yaml")
    proc = subprocess.run(
        [sys.executable, "-m", "odl.engine.dump", "--no-header", doc],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 3
    for line in proc.stdout.splitlines():
        json.loads(line)
