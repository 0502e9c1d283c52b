"""Write a sample set back to the canonical on-disk layout.

The layout is `<out_dir>/dsdl/set-<split>/<split>.yaml` plus the media files
the samples reference. Merged sets are materialized: the document carries the
unified domains, and labels are written as class-name strings so indices fall
out of the unified domain on re-open.
"""

from __future__ import annotations

import filecmp
import re
import shutil
from pathlib import Path

from .. import diagnostics as dc
from ..diagnostics import EngineError
from ..dsdl.model import DataSection, DsdlDocument, FieldType, RecordDef
from ..dsdl.serialize import serialize_document
from ..dsdl.typecheck import LabelValue, Sample
from ..locator import parse_locator

_SPLIT_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")


class _MediaPlan:
    """Decides, per relative media path, whether it can be copied under out_dir."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.copies: dict[tuple[Path, str], str | None] = {}

    def rewrite(self, raw: str, source_root: Path) -> str:
        loc = parse_locator(raw)
        if loc.scheme != "relative":
            return raw
        key = (source_root, loc.path)
        if key not in self.copies:
            self.copies[key] = self._plan(source_root, loc.path)
        rewritten = self.copies[key]
        if rewritten is None:
            return raw
        return rewritten

    def _plan(self, source_root: Path, rel_path: str) -> str | None:
        src = source_root / rel_path
        dst = self.out_dir / rel_path
        if not src.is_file():
            # Nothing to copy; keep the pointer absolute so it stays meaningful.
            return f"file://{src.resolve()}"
        if dst.exists():
            if filecmp.cmp(src, dst, shallow=False):
                return None  # already in place, keep the relative path
            return f"file://{src.resolve()}"
        dst.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(src, dst)
        return None


def _raw_value(value, ftype: FieldType, defs, plan: _MediaPlan, root: Path):
    kind = ftype.kind
    if kind == "Label" and isinstance(value, LabelValue):
        return value.name
    if kind == "Image" and isinstance(value, str):
        return plan.rewrite(value, root)
    if kind == "List" and isinstance(value, tuple):
        return [_raw_value(v, ftype.element, defs, plan, root) for v in value]
    if kind == "Ref" and isinstance(value, dict):
        return _raw_record(value, defs[ftype.ref], defs, plan, root)
    if isinstance(value, tuple):  # Coord / BBox / Polygon
        return [list(v) if isinstance(v, tuple) else v for v in value]
    return value


def _raw_record(fields: dict, record: RecordDef, defs, plan: _MediaPlan, root: Path) -> dict:
    return {
        k: _raw_value(v, record.fields[k], defs, plan, root)
        for k, v in fields.items()
        if k in record.fields
    }


def export_sampleset(ds, out_dir: str | Path, split_name: str) -> Path:
    """Write `ds` under out_dir as `dsdl/set-<split>/<split>.yaml`; returns the path.

    Relative media locators are rewritten into out_dir when the file can be
    copied there; otherwise (missing source, or a different file already at
    the target path) the locator is kept absolute. I/O failures raise
    EngineError(WriteError).
    """
    if not _SPLIT_RE.match(split_name):
        raise ValueError(f"invalid split name {split_name!r}")
    out = Path(out_dir)
    plan = _MediaPlan(out)

    try:
        samples = []
        for i in range(len(ds)):
            sample: Sample = ds[i]
            samples.append(_raw_record(sample.fields, ds.schema, ds.defs, plan, ds.root_for(i)))
        doc = DsdlDocument(
            version="1.0",
            defs=dict(ds.defs),
            data=DataSection(sample_type=ds.sample_type, samples=tuple(samples)),
        )
        target = out / "dsdl" / f"set-{split_name}" / f"{split_name}.yaml"
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(serialize_document(doc), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise EngineError(dc.WRITE_ERROR, f"export to {out} failed: {exc}") from None
    return target
