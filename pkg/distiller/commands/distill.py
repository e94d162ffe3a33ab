#!/usr/bin/env python3
"""
Distillation commands: run one distiller, or compare several
"""

import logging

import click
import psutil

from distiller.commands.base import (
    ALGORITHMS,
    RNG_SEEDS,
    WEIGHT_FLAGS,
    fail,
    load_corpus,
    run_algorithm,
    write_selection,
)
from distiller.errors import DistillError, VerificationError
from distiller.models import WeightScheme
from distiller.reporting import compare_report, corpus_stats, verify_cover
from distiller.utils.file_utils import copy_selected_files, write_json_file
from distiller.utils.format_utils import format_duration, format_file_size

logger = logging.getLogger(__name__)


def _run_report(selection, stats, verdict, scheme):
    return {
        'algo': selection.algo,
        'weight': scheme.value,
        'selected': sorted(selection.chosen),
        'order': list(selection.order),
        'files': stats.file_count,
        'bytes': stats.total_size_bytes,
        'edges_covered': stats.edges_covered,
        'total_weight': float(selection.total_weight),
        'cost': float(selection.heuristic_cost),
        'steps': [step.to_dict() for step in selection.steps],
        'step_counts': {kind.value: n for kind, n in selection.step_counts().items()},
        'dropped_singular_rows': sorted(selection.dropped_singular_rows),
        'coverage_ok': verdict.ok,
        'wall_ms': round(selection.wall_ms, 3),
        'rss_bytes': psutil.Process().memory_info().rss,
    }


@click.command('distill')
@click.option('--algo', type=click.Choice(ALGORITHMS), default='moonlight', show_default=True)
@click.option('--weight', type=click.Choice(WEIGHT_FLAGS), default='none', show_default=True)
@click.option('--manifest', 'manifest_path', required=True, type=click.Path(dir_okay=False))
@click.option('--traces', 'traces_dir', required=True, type=click.Path(file_okay=False))
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False),
              help='Selection file, one seed id per line')
@click.option('--copy-to', type=click.Path(file_okay=False), default=None,
              help='Copy the selected seed files into this directory')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False), default=None,
              help='Write a JSON run report')
@click.option('--k', type=int, default=None, help='Sample size for --algo random')
@click.option('--rng-seed', type=RNG_SEEDS, default=0, show_default=True)
@click.option('--map-size', type=click.IntRange(min=1), default=None)
@click.pass_obj
def distill(settings, algo, weight, manifest_path, traces_dir, out_path, copy_to,
            report_path, k, rng_seed, map_size):
    """Distill a corpus and write the selected seed ids"""
    scheme = WeightScheme.from_flag(weight)
    try:
        manifest, traces, matrix = load_corpus(manifest_path, traces_dir,
                                               map_size or settings.MAP_SIZE, scheme)
        selection = run_algorithm(algo, matrix, manifest, traces, scheme, settings,
                                  k=k, rng_seed=rng_seed)
        verdict = verify_cover(matrix, selection)
        if not verdict.ok and not selection.coverage_exempt:
            raise VerificationError(
                f'{algo} selection misses {len(verdict.missing)} column(s)', verdict.missing
            )
    except DistillError as e:
        fail(e)

    write_selection(selection.chosen, out_path)
    stats = corpus_stats(manifest.entries, selection, matrix)
    logger.info(f'{algo}: {stats.file_count} seeds, {format_file_size(stats.total_size_bytes)} '
                f'in {format_duration(selection.wall_ms)}')

    if copy_to:
        try:
            copy_selected_files([(i, manifest.entries[i].path) for i in selection.chosen], copy_to)
        except OSError as e:
            click.echo(f'ERROR: cannot copy seeds to {copy_to}: {e}', err=True)
            raise SystemExit(2)

    if report_path:
        write_json_file(report_path, _run_report(selection, stats, verdict, scheme))


@click.command('compare')
@click.option('--algo', 'algos', type=click.Choice(ALGORITHMS), multiple=True,
              help='Algorithm to include; repeatable (default moonlight, minset, cmin)')
@click.option('--weight', type=click.Choice(WEIGHT_FLAGS), default='none', show_default=True)
@click.option('--manifest', 'manifest_path', required=True, type=click.Path(dir_okay=False))
@click.option('--traces', 'traces_dir', required=True, type=click.Path(file_okay=False))
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True)
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), default=None,
              help='Write the table here instead of stdout')
@click.option('--k', type=int, default=None, help='Sample size for random')
@click.option('--rng-seed', type=RNG_SEEDS, default=0, show_default=True)
@click.option('--no-timing', is_flag=True, help='Report wall_ms as 0 for reproducible output')
@click.option('--map-size', type=click.IntRange(min=1), default=None)
@click.pass_obj
def compare(settings, algos, weight, manifest_path, traces_dir, fmt, out_path, k,
            rng_seed, no_timing, map_size):
    """Run several distillers on one corpus and tabulate the results"""
    scheme = WeightScheme.from_flag(weight)
    algos = algos or ('moonlight', 'minset', 'cmin')
    try:
        manifest, traces, matrix = load_corpus(manifest_path, traces_dir,
                                               map_size or settings.MAP_SIZE, scheme)
        results = [
            (algo, run_algorithm(algo, matrix, manifest, traces, scheme, settings,
                                 k=k, rng_seed=rng_seed))
            for algo in algos
        ]
        table = compare_report(results, manifest.entries, matrix, include_timing=not no_timing)
    except DistillError as e:
        fail(e)

    if fmt == 'csv':
        output = table.to_csv()
    else:
        output = table.to_json().decode('utf-8')

    if out_path:
        with open(out_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(output)
    else:
        click.echo(output, nl=False)
