#!/usr/bin/env python3
"""
Corpus commands: preprocessing raw seed directories and converting
afl-showmap output into binary traces
"""

import logging

import click

from distiller.commands.base import fail
from distiller.errors import DistillError
from distiller.ingestion import prep_corpus, read_manifest, write_manifest
from distiller.utils.ingestion import start_trace_conversion

logger = logging.getLogger(__name__)


@click.command('prep')
@click.option('--in', 'input_dir', required=True,
              type=click.Path(exists=True, file_okay=False, readable=True),
              help='Raw corpus directory')
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False),
              help='Manifest to write')
@click.option('--max-size', type=click.IntRange(min=1), default=None,
              help='Largest seed kept, in bytes (default 307200)')
@click.pass_obj
def prep(settings, input_dir, out_path, max_size):
    """Deduplicate and size-filter a corpus into a manifest"""
    max_size = max_size or settings.MAX_SEED_SIZE
    try:
        manifest = prep_corpus(input_dir, max_size, settings.TRACE_WORKERS)
    except OSError as e:
        click.echo(f'ERROR: cannot read {input_dir}: {e}', err=True)
        raise SystemExit(2)

    try:
        write_manifest(manifest, out_path)
    except OSError as e:
        click.echo(f'ERROR: cannot write manifest {out_path}: {e}', err=True)
        raise SystemExit(2)

    if manifest.skipped_unreadable:
        click.echo(f'WARNING: skipped {manifest.skipped_unreadable} unreadable file(s)', err=True)
    logger.info(f'Wrote manifest with {len(manifest)} seeds to {out_path}')


@click.command('trace')
@click.option('--manifest', 'manifest_path', required=True, type=click.Path(dir_okay=False))
@click.option('--showmap-dir', required=True, type=click.Path(file_okay=False))
@click.option('--out', 'out_dir', required=True, type=click.Path(file_okay=False))
@click.option('--map-size', type=click.IntRange(min=1), default=None,
              help='Edge-space width (default 65536)')
@click.option('--keep-text', is_flag=True,
              help='Also store canonical showmap text next to each trace (needed by cmin)')
@click.pass_obj
def trace(settings, manifest_path, showmap_dir, out_dir, map_size, keep_text):
    """Convert <id>.showmap files into <id>.mlbv binary traces"""
    map_size = map_size or settings.MAP_SIZE
    try:
        manifest = read_manifest(manifest_path)
        start_trace_conversion(manifest, showmap_dir, out_dir, map_size,
                               settings.TRACE_WORKERS, keep_text)
    except DistillError as e:
        fail(e)
