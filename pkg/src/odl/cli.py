"""The `odl` command line tool.

Two command groups: `odl dataset ...` talks to a registry (endpoint from
--endpoint or ODL_ENDPOINT), `odl dsdl ...` works on local documents.

Exit codes: 0 success, 1 validation/conversion error, 2 I/O or network error,
3 usage error. Errors and warnings go to stderr; --json output goes to stdout.
"""

from __future__ import annotations

import json
import re
import sys
from pathlib import Path

import click

from . import diagnostics as dc
from .convert import CocoSource, VocSource, import_coco, import_voc
from .diagnostics import ConversionError, ToolError
from .engine import compute_stats, concat, export_sampleset, open_sampleset, render_sample
from .registry.client import download_dataset, fetch_card, search_datasets, upload_dataset
from .registry.model import card_to_json

_ENDPOINT_OPTION = click.option(
    "--endpoint",
    envvar="ODL_ENDPOINT",
    required=True,
    metavar="URL",
    help="Registry base URL (or set ODL_ENDPOINT).",
)


_SPLIT_NAME_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")


def _SPLIT_OK(name: str) -> bool:
    return bool(_SPLIT_NAME_RE.match(name))


def _split_repo(repo: str) -> tuple[str, str]:
    namespace, sep, name = repo.partition("/")
    if not sep or not namespace or not name or "/" in name:
        raise click.BadParameter("expected NAMESPACE/NAME", param_hint="--dataset-repo")
    return namespace, name


@click.group()
def cli():
    """Dataset toolchain: registry access and dataset-description utilities."""


@cli.group()
def dataset():
    """Search, inspect, download, and publish datasets on a registry."""


@cli.group()
def dsdl():
    """Validate, summarize, visualize, merge, and convert dataset documents."""


@dataset.command("get")
@click.option("--dataset-repo", "repo", required=True, metavar="NS/NAME")
@click.option("--target-path", type=click.Path(file_okay=False), default=None,
              help="Download directory [default: ./NS___NAME].")
@click.option("--jobs", type=click.IntRange(min=1), default=4, show_default=True,
              help="Concurrent connections for large files.")
@_ENDPOINT_OPTION
def dataset_get(repo, target_path, jobs, endpoint):
    """Download a dataset, verifying every file against its manifest."""
    namespace, name = _split_repo(repo)
    target = Path(target_path) if target_path else Path(f"{namespace}___{name}")
    report = download_dataset(endpoint, namespace, name, target, jobs=jobs)
    if not report.verified:
        for failure in report.failures:
            click.echo(f"incomplete: {failure}", err=True)
        raise ToolError(dc.REMOTE_ERROR, f"download of {repo} did not complete; rerun to resume")
    click.echo(f"{repo}: {report.files} files verified in {target} ({report.bytes_fetched} bytes fetched)")


dataset.add_command(dataset_get, name="download")  # alias


@dataset.command("ls")
@click.option("--query", default=None, help="Substring match on namespace/name/readme.")
@click.option("--task", default=None, help="Filter by task type.")
@click.option("--sort", type=click.Choice(["name", "updated"]), default="name", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the summaries as JSON.")
@_ENDPOINT_OPTION
def dataset_ls(query, task, sort, as_json, endpoint):
    """List datasets hosted by the registry."""
    summaries = search_datasets(endpoint, text=query, task_type=task, sort=sort)
    if as_json:
        click.echo(json.dumps([s.__dict__ for s in summaries], ensure_ascii=False, default=list))
        return
    for s in summaries:
        tasks = ",".join(s.task_types) or "-"
        click.echo(f"{s.repo}\t{tasks}\t{s.license}\t{s.updated or '-'}")


@dataset.command("info")
@click.option("--dataset-repo", "repo", required=True, metavar="NS/NAME")
@click.option("--json", "as_json", is_flag=True, help="Emit the full data card as JSON.")
@_ENDPOINT_OPTION
def dataset_info(repo, as_json, endpoint):
    """Show a dataset's data card."""
    namespace, name = _split_repo(repo)
    card = fetch_card(endpoint, namespace, name)
    if as_json:
        click.echo(json.dumps(card_to_json(card), ensure_ascii=False))
        return
    meta = card.metafile
    click.echo(f"{card.repo}")
    click.echo(f"publisher: {meta.publisher}")
    click.echo(f"license: {meta.license.family} {meta.license.variant}")
    if meta.homepage:
        click.echo(f"homepage: {meta.homepage}")
    if meta.task_types:
        click.echo(f"tasks: {', '.join(meta.task_types)}")
    if meta.data_types:
        click.echo(f"data: {', '.join(meta.data_types)}")
    if card.updated:
        click.echo(f"updated: {card.updated}")
    click.echo("")
    click.echo(card.readme)


@dataset.command("create")
@click.option("--dataset-repo", "repo", required=True, metavar="NS/NAME")
@click.option("--source", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory with datacard.json plus the content files.")
@_ENDPOINT_OPTION
def dataset_create(repo, source, endpoint):
    """Publish a local directory as a new dataset."""
    namespace, name = _split_repo(repo)
    result = upload_dataset(endpoint, namespace, name, source)
    state = "committed" if result["committed"] else "staged"
    click.echo(f"{repo}: {result['files']} files ({result['total_size']} bytes) {state}")


@dsdl.command("validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def dsdl_validate(file):
    """Check a document against every language rule; exit 0 only when clean."""
    ds = open_sampleset(file)
    for warning in ds.warnings:
        click.echo(str(warning), err=True)
    click.echo(f"{file}: valid ({len(ds)} samples)")


@dsdl.command("stat")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Emit the histograms as JSON.")
def dsdl_stat(file, as_json):
    """Media and label statistics for a document's samples."""
    ds = open_sampleset(file)
    stats = compute_stats(ds)
    for warning in stats.warnings:
        click.echo(str(warning), err=True)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "extensions": stats.extension_histogram,
                    "sizes": stats.size_histogram,
                    "resolutions": stats.resolution_histogram,
                    "classes": stats.class_frequency,
                    "media_count": stats.media_count,
                    "samples": len(ds),
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
        return
    click.echo(f"samples: {len(ds)}  media: {stats.media_count}")
    for title, histogram in (
        ("extensions", stats.extension_histogram),
        ("sizes", stats.size_histogram),
        ("resolutions", stats.resolution_histogram),
        ("classes", stats.class_frequency),
    ):
        click.echo(f"{title}:")
        for key in sorted(histogram):
            click.echo(f"  {key or '(none)'}: {histogram[key]}")


@dsdl.command("visualize")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--index", type=click.IntRange(min=0), required=True, help="Sample index.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Output SVG path.")
@click.option("--embed-media", is_flag=True, help="Inline the media as base64.")
def dsdl_visualize(file, index, out_path, embed_media):
    """Render one sample's annotations to an SVG file."""
    ds = open_sampleset(file)
    svg = render_sample(ds, index, embed_media=embed_media)
    Path(out_path).write_text(svg, encoding="utf-8")
    click.echo(f"wrote {out_path}")


@dsdl.command("merge")
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--split", "split_name", required=True, metavar="NAME")
def dsdl_merge(files, out_dir, split_name):
    """Concatenate documents (unifying label domains) and export the result."""
    if not _SPLIT_OK(split_name):
        raise click.BadParameter("use letters, digits, '._-'", param_hint="--split")
    parts = [open_sampleset(f) for f in files]
    merged = concat(parts) if len(parts) > 1 else parts[0]
    written = export_sampleset(merged, out_dir, split_name)
    click.echo(str(written))


@dsdl.command("convert")
@click.option("--from", "source_format", type=click.Choice(["voc", "coco"]), required=True)
@click.option("--src", required=True, type=click.Path(exists=True),
              help="VOC dataset directory, or a COCO instances JSON file.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--split", "split_name", default="train", show_default=True, metavar="NAME")
def dsdl_convert(source_format, src, out_dir, split_name):
    """Standardize a legacy dataset into the canonical layout."""
    if not _SPLIT_OK(split_name):
        raise click.BadParameter("use letters, digits, '._-'", param_hint="--split")
    source = Path(src)
    if source_format == "voc":
        if not source.is_dir():
            raise ConversionError(f"{source} is not a VOC dataset directory")
        ds = import_voc(VocSource(source / "Annotations", source / "JPEGImages"))
    else:
        if not source.is_file():
            raise ConversionError(f"{source} is not a COCO instances file")
        images_dir = source.parent / "images"
        ds = import_coco(CocoSource(source, images_dir if images_dir.is_dir() else source.parent))
    for warning in ds.warnings:
        click.echo(str(warning), err=True)
    written = export_sampleset(ds, out_dir, split_name)
    click.echo(str(written))


def main(argv: list[str] | None = None) -> int:
    """Run the CLI; returns the process exit code."""
    try:
        cli.main(args=argv, prog_name="odl", standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        click.echo(f"error: {exc.format_message()}", err=True)
        return 3
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ToolError as exc:
        click.echo(str(exc), err=True)
        return exc.exit_code
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
