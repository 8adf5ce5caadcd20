"""Operator command line: ingest, curate, index, serve, query, map.

Exit codes: 0 success, 1 validation failures present, 2 usage/config error.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import curation
from .engine import load_engine
from .errors import StatuaryError
from .ingest import extract_all, scan_tree
from .manifest import read_manifest, write_manifest
from .metadata import Gazetteer, aggregate_statue_metadata, coverage_report
from .model import MetadataRecord, StatueRecord
from .neighborhood import MapParams, build_map
from .validate import validate_archive
from .vecf import read_vector_store


def _fail_usage(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


@click.group()
def main():
    """Archive curation and retrieval for statue photo collections."""


@main.command()
@click.option("--root", required=True, type=click.Path(file_okay=False))
@click.option("--gazetteer", "gazetteer_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def ingest(root, gazetteer_path, out_dir):
    """Scan a picture tree into a manifest plus extraction report."""
    if not Path(root).is_dir():
        _fail_usage(f"archive root {root} does not exist")
    if not Path(gazetteer_path).is_file():
        _fail_usage(f"gazetteer file {gazetteer_path} does not exist")
    gazetteer = Gazetteer.from_file(gazetteer_path)
    images, warnings = scan_tree(root)
    records = extract_all(images, gazetteer)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out / "manifest.jsonl", images)
    field_counts: dict[str, int] = {}
    for rec in records.values():
        for fname in rec:
            field_counts[fname] = field_counts.get(fname, 0) + 1
    report = {"images": len(images), "warnings": warnings,
              "field_coverage": field_counts}
    (out / "ingest_report.json").write_text(json.dumps(report, indent=2) + "\n",
                                            encoding="utf-8")
    click.echo(json.dumps(report))


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--vectors", "vectors_path", required=True, type=click.Path(exists=True))
@click.option("--overrides", "overrides_path", type=click.Path(exists=True))
@click.option("--gazetteer", "gazetteer_path", type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Output manifest (default: rewrite --manifest in place).")
@click.option("--theta-dup", type=float, default=curation.DEFAULT_THETA_DUP, show_default=True)
@click.option("--theta-chain", type=float, default=curation.DEFAULT_THETA_CHAIN, show_default=True)
@click.option("--theta-link", type=float, default=curation.DEFAULT_THETA_LINK, show_default=True)
@click.option("--k", type=int, default=curation.DEFAULT_K_LINK, show_default=True)
@click.option("--min-pictures", type=int, default=1, show_default=True)
@click.option("--report", "report_path", type=click.Path(), default=None)
def curate(manifest_path, vectors_path, overrides_path, gazetteer_path, out_path,
           theta_dup, theta_chain, theta_link, k, min_pictures, report_path):
    """Dedup, chain, match and cluster images into statue identities."""
    images, _ = read_manifest(manifest_path)
    store = read_vector_store(vectors_path)
    # attach rows for images present in the store
    for img in images.values():
        if img.id in store:
            img.global_row = store.row_of(img.id)
    overrides = None
    if overrides_path:
        overrides = curation.parse_override_script(
            Path(overrides_path).read_text(encoding="utf-8"))
    try:
        result = curation.run_curation(
            list(images.values()), store, theta_dup=theta_dup,
            theta_chain=theta_chain, theta_link=theta_link, k=k, overrides=overrides)
    except StatuaryError as exc:
        _fail_usage(str(exc))
    clusters, covered = curation.filter_statues(result.clusters, min_pictures)
    result.events.append({"stage": "filter", "min_pictures": min_pictures,
                          "statues": len(clusters), "pictures": covered})

    gazetteer = Gazetteer.from_file(gazetteer_path) if gazetteer_path else None
    statues = []
    for sid, members in sorted(clusters.items()):
        if gazetteer is not None:
            from .metadata import extract_metadata
            recs = [extract_metadata(images[m].path, gazetteer) for m in members]
            meta, _conflicts = aggregate_statue_metadata(recs)
        else:
            meta = MetadataRecord()
        statues.append(StatueRecord(sid, members, meta))
        for m in members:
            images[m].statue_id = sid

    survivors = {m for members in clusters.values() for m in members}
    kept_images = [img for img in images.values()
                   if img.id in survivors or img.id in result.duplicate_map]
    write_manifest(out_path or manifest_path, sorted(kept_images, key=lambda i: i.id),
                   statues)
    report_lines = "\n".join(json.dumps(e) for e in result.events) + "\n"
    if report_path:
        Path(report_path).write_text(report_lines, encoding="utf-8")
    click.echo(report_lines.rstrip())


@main.command()
@click.option("--archive", "archive_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
def index(archive_dir):
    """Build indexes, validate the archive and print statistics."""
    engine = load_engine(archive_dir)
    report = validate_archive(engine.images, engine.statues, engine.stores)
    stats = {"counts": engine.counts(), "coverage": engine.coverage(),
             "violations": [{"code": v.code, "message": v.message}
                            for v in report.violations]}
    click.echo(json.dumps(stats, indent=2))
    sys.exit(0 if report.ok else 1)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path):
    """Start the HTTP service."""
    from .service import ApiConfig, run_server

    try:
        config = ApiConfig.from_file(config_path)
    except (json.JSONDecodeError, TypeError) as exc:
        _fail_usage(f"bad config: {exc}")
    run_server(config)


@main.command()
@click.option("--archive", "archive_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--text", default=None)
@click.option("--vector-file", type=click.Path(exists=True), default=None,
              help="JSON file holding a raw query vector.")
@click.option("--namespace", default="global", show_default=True)
@click.option("--filter", "filters", multiple=True, metavar="FIELD=VALUE")
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "table"]),
              default="table", show_default=True)
def query(archive_dir, text, vector_file, namespace, filters, k, fmt):
    """Offline hybrid search against an archive directory."""
    parsed = {}
    for item in filters:
        if "=" not in item:
            _fail_usage(f"bad --filter {item!r}, expected FIELD=VALUE")
        fname, value = item.split("=", 1)
        parsed[fname] = value
    vector = None
    if vector_file:
        vector = np.array(json.loads(Path(vector_file).read_text()), dtype=np.float64)
    if text is None and vector is None and not parsed:
        _fail_usage("need --text, --vector-file or --filter")
    engine = load_engine(archive_dir)
    try:
        hits = engine.hybrid_search(text=text, vector=vector, namespace=namespace,
                                    filters=parsed, k=k)
    except StatuaryError as exc:
        _fail_usage(str(exc))
    if fmt == "json":
        click.echo(json.dumps([{"id": h.entity_id, "score": h.score, "rank": h.rank,
                                "facets": h.facets} for h in hits]))
    else:
        click.echo(f"{'rank':>4}  {'score':>10}  id")
        for h in hits:
            click.echo(f"{h.rank:>4}  {h.score:>10.6f}  {h.entity_id}")


@main.command(name="map")
@click.option("--archive", "archive_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--scope", type=click.Choice(["all"]), default="all", show_default=True)
@click.option("--namespace", default="global", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--epochs", type=int, default=MapParams.epochs, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
def map_cmd(archive_dir, scope, namespace, out_path, epochs, seed):
    """Emit a 2D layout of the archive as JSON-lines of {id, x, y}."""
    engine = load_engine(archive_dir)
    store = engine.stores.get(namespace)
    if store is None:
        _fail_usage(f"archive has no {namespace!r} vector store")
    params = MapParams(epochs=epochs)
    layout = build_map(store.matrix, store.row_ids, params, seed=seed)
    with open(out_path, "w", encoding="utf-8") as fh:
        for rec in layout.to_records():
            fh.write(json.dumps(rec) + "\n")
    click.echo(f"wrote {store.count} points to {out_path}")


if __name__ == "__main__":
    main()
