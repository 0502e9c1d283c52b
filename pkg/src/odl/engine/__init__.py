"""Dataset engine: materialize, merge, summarize, render, and export sample sets."""

from .dump import dump_jsonl
from .export import export_sampleset
from .mediaprobe import jpeg_dimensions, png_dimensions, probe_dimensions
from .render import render_sample
from .sampleset import MergedSampleSet, SampleSet, concat, from_document, infer_dataset_root, open_sampleset
from .stats import DatasetStats, compute_stats

__all__ = [
    "DatasetStats",
    "MergedSampleSet",
    "SampleSet",
    "compute_stats",
    "concat",
    "dump_jsonl",
    "export_sampleset",
    "from_document",
    "infer_dataset_root",
    "jpeg_dimensions",
    "open_sampleset",
    "png_dimensions",
    "probe_dimensions",
    "render_sample",
]
