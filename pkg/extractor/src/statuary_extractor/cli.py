"""Extractor command line: batch directory extraction and the HTTP sidecar."""
from __future__ import annotations

import sys
from pathlib import Path

import click

from statuary.manifest import write_manifest
from statuary.vecf import write_vector_store

from .batch import extract_tree


@click.group()
def main():
    """Embedding extraction for statuary archives."""


@main.command()
@click.option("--images", "images_dir", required=True, type=click.Path(file_okay=False))
@click.option("--out-global", required=True, type=click.Path())
@click.option("--out-face", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
def batch(images_dir, out_global, out_face, manifest_path):
    """Embed a picture tree into VECF stores plus a manifest."""
    if not Path(images_dir).is_dir():
        click.echo(f"error: {images_dir} is not a directory", err=True)
        sys.exit(2)
    images, global_store, face_store, warnings = extract_tree(images_dir)
    write_vector_store(global_store, out_global)
    write_vector_store(face_store, out_face)
    write_manifest(manifest_path, images)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)
    click.echo(f"embedded {global_store.count}/{len(images)} images, "
               f"{face_store.count} faces")


@main.command()
@click.option("--port", type=int, default=8090, show_default=True)
def serve(port):
    """Run the /embed HTTP sidecar."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
