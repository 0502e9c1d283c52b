"""Sample sets: materialized datasets and merged views with unified label spaces."""

from __future__ import annotations

import dataclasses
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path

from .. import diagnostics as dc
from ..diagnostics import Diagnostic, DocumentError, EngineError, LocatorError
from ..dsdl.model import ClassDomain, DataSection, Definition, DsdlDocument, FieldType, RecordDef
from ..dsdl.parser import parse_document, parse_samples_file
from ..dsdl.resolve import resolve_imports
from ..dsdl.typecheck import LabelValue, Sample, check_sample, validate
from ..locator import ResolutionRoots, parse_locator, read_bytes


@dataclass
class SampleSet:
    """A validated, indexable dataset materialized from one document."""

    defs: dict[str, Definition]
    sample_type: str
    samples: tuple[Sample, ...]
    root: Path
    origin: str
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)

    @property
    def schema(self) -> RecordDef:
        schema = self.defs[self.sample_type]
        assert isinstance(schema, RecordDef)
        return schema

    @property
    def domains(self) -> dict[str, ClassDomain]:
        return {k: v for k, v in self.defs.items() if isinstance(v, ClassDomain)}

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, index: int) -> Sample:
        if not isinstance(index, int) or isinstance(index, bool) or not 0 <= index < len(self.samples):
            raise IndexError(f"index {index} out of range [0, {len(self.samples)})")
        return self.samples[index]

    def __iter__(self):
        return iter(self.samples)

    def root_for(self, index: int) -> Path:
        return self.root


def infer_dataset_root(document_path: Path) -> Path:
    """The ancestor directory containing `dsdl/`, else the document's directory."""
    for ancestor in document_path.resolve().parents:
        if ancestor.name == "dsdl":
            return ancestor.parent
    return document_path.resolve().parent


def _with_local_root(roots: ResolutionRoots | None, root: Path) -> ResolutionRoots:
    if roots is None:
        return ResolutionRoots(local_root=root)
    if roots.local_root is None:
        return dataclasses.replace(roots, local_root=root)
    return roots


def open_sampleset(document_path: str | Path, roots: ResolutionRoots | None = None) -> SampleSet:
    """Parse, resolve, and validate a document, materializing its samples eagerly.

    External sample files referenced by locator are fetched and inlined. The
    dataset root is inferred from the on-disk layout and used to resolve
    relative locators unless `roots` already pins a local root.
    """
    path = Path(document_path)
    if not path.is_file():
        raise LocatorError(dc.NOT_FOUND, f"{path} does not exist")
    root = infer_dataset_root(path)
    roots = _with_local_root(roots, root)

    doc = parse_document(path.read_text(encoding="utf-8"), str(path))
    doc = resolve_imports(doc, (path.parent,))
    if doc.data is None:
        raise DocumentError(
            [dc.error(dc.INVALID_DOCUMENT, "document has no data section", path=str(path))]
        )
    if not doc.data.inline:
        locator = parse_locator(doc.data.samples_locator or "")
        raw_text = read_bytes(locator, roots).decode("utf-8")
        samples, positions = parse_samples_file(raw_text, doc.data.samples_locator)
        doc = dataclasses.replace(
            doc,
            data=DataSection(
                sample_type=doc.data.sample_type,
                samples=samples,
                pos=doc.data.pos,
                sample_pos=positions,
            ),
        )

    diags = validate(doc)
    if dc.has_errors(diags):
        raise DocumentError(diags)

    schema = doc.defs[doc.data.sample_type]
    assert isinstance(schema, RecordDef)
    samples = []
    for raw in doc.data.samples or ():
        sample, sample_diags = check_sample(raw, schema, doc.defs)
        assert sample is not None, sample_diags
        samples.append(sample)

    warnings = tuple(doc.warnings) + tuple(diags)
    if not samples:
        warnings += (dc.warning(dc.EMPTY_DATASET, "dataset has no samples", path=str(path)),)
    return SampleSet(
        defs=dict(doc.defs),
        sample_type=doc.data.sample_type,
        samples=tuple(samples),
        root=root,
        origin=f"document:{path}",
        warnings=warnings,
    )


def from_document(doc: DsdlDocument, root: Path, origin: str) -> SampleSet:
    """Materialize an in-memory document that already carries inline samples."""
    diags = validate(doc)
    if dc.has_errors(diags):
        raise DocumentError(diags)
    assert doc.data is not None and doc.data.inline
    schema = doc.defs[doc.data.sample_type]
    assert isinstance(schema, RecordDef)
    samples = []
    for raw in doc.data.samples or ():
        sample, _ = check_sample(raw, schema, doc.defs)
        assert sample is not None
        samples.append(sample)
    warnings = tuple(doc.warnings)
    if not samples:
        warnings += (dc.warning(dc.EMPTY_DATASET, "dataset has no samples"),)
    return SampleSet(
        defs=dict(doc.defs),
        sample_type=doc.data.sample_type,
        samples=tuple(samples),
        root=root,
        origin=origin,
        warnings=warnings,
    )


class _SchemaMerger:
    """Builds the unified definitions for a merge, tracking per-part label remaps.

    Record and type alignment carries the original part index throughout so
    that optional fields present in only some parts still remap correctly.
    """

    def __init__(self, parts):
        self.parts = parts
        self.part_defs = [p.defs for p in parts]
        self.defs: dict[str, Definition] = {}
        self.remaps: list[dict[str, dict[int, int]]] = [{} for _ in parts]
        self._record_memo: dict[tuple, str] = {}
        self._domain_memo: dict[tuple, str] = {}

    def fail(self, where: str, detail: str):
        raise EngineError(dc.INCOMPATIBLE_SCHEMAS, f"incompatible schemas at {where}: {detail}")

    def merge_root(self) -> str:
        return self._merge_record([(k, p.schema) for k, p in enumerate(self.parts)], "sample")

    def _merge_record(self, records: list[tuple[int, RecordDef]], where: str) -> str:
        memo_key = tuple((k, r.name) for k, r in records)
        if memo_key in self._record_memo:
            return self._record_memo[memo_key]

        first_k, first = records[0]
        required = [f for f in first.fields if first.is_required(f)]
        for k, record in records[1:]:
            other_required = [f for f in record.fields if record.is_required(f)]
            if other_required != required:
                differing = next(
                    (a for a, b in zip(required, other_required) if a != b),
                    (required + other_required)[min(len(required), len(other_required))],
                )
                self.fail(
                    where,
                    f"required field {differing!r} differs between parts {first_k} and {k}",
                )

        merged_fields: dict[str, FieldType] = {}
        optional: list[str] = []
        for fname in required:
            types = [(k, r.fields[fname]) for k, r in records]
            merged_fields[fname] = self._merge_type(types, f"{where}.{fname}")
        for _, record in records:
            for fname in record.optional:
                if fname not in optional:
                    optional.append(fname)
        for fname in optional:
            types = [(k, r.fields[fname]) for k, r in records if fname in r.fields]
            merged_fields[fname] = self._merge_type(types, f"{where}.{fname}")

        # Field order: first part's declaration order, then new optionals.
        ordered = {f: merged_fields[f] for f in first.fields if f in merged_fields}
        for fname in optional:
            if fname not in ordered:
                ordered[fname] = merged_fields[fname]

        name = self._claim_name(first.name)
        self.defs[name] = RecordDef(name, ordered, tuple(optional))
        self._record_memo[memo_key] = name
        return name

    def _merge_type(self, types: list[tuple[int, FieldType]], where: str) -> FieldType:
        kinds = {t.kind for _, t in types}
        if len(kinds) != 1:
            self.fail(where, f"kinds differ: {sorted(kinds)}")
        kind = kinds.pop()
        if kind == "List":
            element = self._merge_type([(k, t.element) for k, t in types], where + "[]")
            return FieldType("List", element=element)
        if kind == "Label":
            return FieldType("Label", domain=self._merge_domain(types, where))
        if kind == "Ref":
            records = []
            for k, t in types:
                target = self.part_defs[k].get(t.ref or "")
                if not isinstance(target, RecordDef):
                    self.fail(where, f"part {k} references unknown record {t.ref!r}")
                records.append((k, target))
            return FieldType("Ref", ref=self._merge_record(records, where))
        return FieldType(kind)

    def _merge_domain(self, types: list[tuple[int, FieldType]], where: str) -> str:
        key = tuple((k, t.domain) for k, t in types)
        if key in self._domain_memo:
            return self._domain_memo[key]

        unified: list[str] = []
        seen: set[str] = set()
        contributors = []
        for k, t in types:
            domain = self.part_defs[k].get(t.domain or "")
            if not isinstance(domain, ClassDomain):
                self.fail(where, f"part {k} references unknown domain {t.domain!r}")
            contributors.append((k, domain))
            for cls in domain.classes:
                if cls not in seen:
                    seen.add(cls)
                    unified.append(cls)

        name = contributors[0][1].name
        existing = self.defs.get(name)
        if isinstance(existing, ClassDomain):
            if existing.classes != tuple(unified):
                self.fail(where, f"domain {name!r} unifies differently at two schema paths")
        elif existing is not None:
            self.fail(where, f"name {name!r} is both a record and a domain")
        else:
            self.defs[name] = ClassDomain(name, tuple(unified))

        index_of = {cls: i for i, cls in enumerate(unified)}
        for k, domain in contributors:
            table = {i: index_of[cls] for i, cls in enumerate(domain.classes)}
            previous = self.remaps[k].get(domain.name)
            if previous is not None and previous != table:
                self.fail(where, f"domain {domain.name!r} of part {k} remaps inconsistently")
            self.remaps[k][domain.name] = table

        self._domain_memo[key] = name
        return name

    def _claim_name(self, name: str) -> str:
        if name in self.defs:
            self.fail(name, f"definition name {name!r} already used by the merge")
        return name


@dataclass
class MergedSampleSet:
    """A concatenation of structurally compatible sample sets.

    Indexing delegates to the owning part; label values come back re-indexed
    into the unified domains through the part's remap table.
    """

    parts: tuple
    defs: dict[str, Definition]
    sample_type: str
    remaps: tuple[dict[str, dict[int, int]], ...]
    offsets: tuple[int, ...]
    origin: str = "merged"
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)

    @property
    def schema(self) -> RecordDef:
        schema = self.defs[self.sample_type]
        assert isinstance(schema, RecordDef)
        return schema

    @property
    def domains(self) -> dict[str, ClassDomain]:
        return {k: v for k, v in self.defs.items() if isinstance(v, ClassDomain)}

    def __len__(self) -> int:
        return self.offsets[-1]

    def _locate(self, index: int) -> tuple[int, int]:
        if not isinstance(index, int) or isinstance(index, bool) or not 0 <= index < len(self):
            raise IndexError(f"index {index} out of range [0, {len(self)})")
        part = bisect_right(self.offsets, index) - 1
        return part, index - self.offsets[part]

    def __getitem__(self, index: int) -> Sample:
        part, local = self._locate(index)
        source = self.parts[part]
        return _remap_sample(source[local], source.schema, source.defs, self.remaps[part])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def root_for(self, index: int) -> Path:
        part, local = self._locate(index)
        return self.parts[part].root_for(local)


def _remap_sample(sample: Sample, schema: RecordDef, defs, remap: dict[str, dict[int, int]]) -> Sample:
    def remap_value(value, ftype: FieldType):
        if ftype.kind == "Label" and isinstance(value, LabelValue):
            table = remap.get(ftype.domain or "", {})
            return LabelValue(value.name, table.get(value.index, value.index))
        if ftype.kind == "List" and isinstance(value, tuple):
            assert ftype.element is not None
            return tuple(remap_value(v, ftype.element) for v in value)
        if ftype.kind == "Ref" and isinstance(value, dict):
            target = defs[ftype.ref]
            return remap_record(value, target)
        return value

    def remap_record(fields: dict, record: RecordDef) -> dict:
        return {
            k: remap_value(v, record.fields[k]) if k in record.fields else v
            for k, v in fields.items()
        }

    return Sample(remap_record(sample.fields, schema))


def concat(parts) -> MergedSampleSet:
    """Concatenate sample sets, unifying their label domains.

    For each Label field, the unified domain is the first part's classes in
    order followed by each later part's unseen classes in that part's order.
    Parts must agree on required field names and kinds; optional fields are
    unioned. Raises EngineError(EmptyConcat) for an empty sequence and
    EngineError(IncompatibleSchemas) naming the first differing field.
    """
    parts = tuple(parts)
    if not parts:
        raise EngineError(dc.EMPTY_CONCAT, "cannot concatenate zero datasets")

    merger = _SchemaMerger(parts)
    sample_type = merger.merge_root()

    offsets = [0]
    for part in parts:
        offsets.append(offsets[-1] + len(part))

    return MergedSampleSet(
        parts=parts,
        defs=merger.defs,
        sample_type=sample_type,
        remaps=tuple(merger.remaps),
        offsets=tuple(offsets),
    )
