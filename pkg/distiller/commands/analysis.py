#!/usr/bin/env python3
"""
Analysis commands: coverage verification and corpus statistics
"""

import logging

import click

from distiller.commands.base import fail, load_corpus, read_selection
from distiller.errors import DistillError, VerificationError
from distiller.ingestion import read_manifest
from distiller.models import WeightScheme
from distiller.reporting import corpus_stats, verify_cover
from distiller.utils.file_utils import write_json_file
from distiller.utils.format_utils import format_file_size, format_id_list, format_number

logger = logging.getLogger(__name__)


@click.command('verify')
@click.option('--selection', 'selection_path', required=True, type=click.Path(dir_okay=False))
@click.option('--manifest', 'manifest_path', required=True, type=click.Path(dir_okay=False))
@click.option('--traces', 'traces_dir', required=True, type=click.Path(file_okay=False))
@click.option('--map-size', type=click.IntRange(min=1), default=None)
@click.pass_obj
def verify(settings, selection_path, manifest_path, traces_dir, map_size):
    """Check that a selection covers every edge the full corpus covers"""
    try:
        manifest, _, matrix = load_corpus(manifest_path, traces_dir,
                                          map_size or settings.MAP_SIZE, WeightScheme.UNWEIGHTED)
        selection = read_selection(selection_path, len(manifest))
        verdict = verify_cover(matrix, selection)
        if not verdict.ok:
            raise VerificationError(
                f'selection misses {len(verdict.missing)} column(s): '
                f'{format_id_list(sorted(verdict.missing))}',
                verdict.missing,
            )
    except DistillError as e:
        fail(e)

    click.echo(f'ok: {selection.size} seeds cover {len(matrix.nonsingular_cols)} edges')


@click.command('stats')
@click.option('--manifest', 'manifest_path', required=True, type=click.Path(dir_okay=False))
@click.option('--selection', 'selection_path', type=click.Path(dir_okay=False), default=None)
@click.option('--traces', 'traces_dir', type=click.Path(file_okay=False), default=None,
              help='Also count covered edges')
@click.option('--json', 'json_path', type=click.Path(dir_okay=False), default=None,
              help='Write the statistics as JSON')
@click.option('--map-size', type=click.IntRange(min=1), default=None)
@click.pass_obj
def stats(settings, manifest_path, selection_path, traces_dir, json_path, map_size):
    """File count and total size of a corpus or a selection"""
    try:
        if traces_dir:
            manifest, _, matrix = load_corpus(manifest_path, traces_dir,
                                              map_size or settings.MAP_SIZE, WeightScheme.UNWEIGHTED)
        else:
            manifest, matrix = read_manifest(manifest_path), None
        selection = read_selection(selection_path, len(manifest)) if selection_path else None
        result = corpus_stats(manifest.entries, selection, matrix)
    except DistillError as e:
        fail(e)

    click.echo(f'files: {format_number(result.file_count)}')
    click.echo(f'bytes: {format_number(result.total_size_bytes)} '
               f'({format_file_size(result.total_size_bytes)})')
    click.echo(f'mean:  {format_file_size(result.mean_size_bytes)}')
    if result.edges_covered is not None:
        click.echo(f'edges: {format_number(result.edges_covered)}')

    if json_path:
        write_json_file(json_path, result.to_dict())
