"""JSON-lines dump of sample sets, for host-language bindings and conformance diffs.

One compact JSON object per sample, fields in schema order, labels encoded as
`[name, unified_index]` pairs. `python -m odl.engine.dump a.yaml [b.yaml ...]`
concatenates the given documents through the engine and writes a header line
followed by one line per sample.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..diagnostics import ToolError
from ..dsdl.typecheck import LabelValue
from .sampleset import concat, open_sampleset


def jsonable(value):
    if isinstance(value, LabelValue):
        return [value.name, value.index]
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    return value


def sample_line(sample) -> str:
    return json.dumps(jsonable(sample.fields), ensure_ascii=False, separators=(",", ":"))


def dump_jsonl(ds):
    """Yield one JSON line per sample."""
    for i in range(len(ds)):
        yield sample_line(ds[i])


def header_line(ds) -> str:
    header = {
        "length": len(ds),
        "sample_type": ds.sample_type,
        "domains": {name: list(dom.classes) for name, dom in ds.domains.items()},
        "image_fields": [f for f, t in ds.schema.fields.items() if t.kind == "Image"],
        "roots": [str(ds.root_for(i)) for i in range(len(ds))],
    }
    return json.dumps({"header": header}, ensure_ascii=False, separators=(",", ":"))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m odl.engine.dump",
        description="Dump one or more documents (concatenated) as JSON lines.",
    )
    parser.add_argument("documents", nargs="+", help="document paths; several are concatenated")
    parser.add_argument("--no-header", action="store_true", help="emit sample lines only")
    args = parser.parse_args(argv)

    try:
        sets = [open_sampleset(p) for p in args.documents]
        ds = sets[0] if len(sets) == 1 else concat(sets)
    except ToolError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    out = sys.stdout
    if not args.no_header:
        out.write(header_line(ds) + "\n")
    for line in dump_jsonl(ds):
        out.write(line + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
