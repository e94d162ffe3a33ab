#!/usr/bin/env python3
"""
Shared plumbing for the command modules

Error-to-exit-code conversion, corpus loading, selection files and the
algorithm dispatch table.
"""

import logging
import sys
import time
from typing import List, Optional, Sequence, Tuple

import click

from distiller.baselines import cmin_distill, full_selection, minset_weighted, random_sample
from distiller.errors import ConfigurationError, DistillError, FormatError
from distiller.ingestion import Manifest, load_traces, read_manifest
from distiller.models import CoverageMatrix, CoverageTrace, Selection, WeightScheme, build_matrix
from distiller.oracle import exact_minset
from distiller.solver import SolverConfig, moonlight_distill

logger = logging.getLogger(__name__)

ALGORITHMS = ('moonlight', 'minset', 'cmin', 'random', 'exact', 'full')
WEIGHT_FLAGS = ('none', 'size', 'time')
# Seeds accepted by numpy's default_rng
RNG_SEEDS = click.IntRange(0, 2 ** 64 - 1)


def fail(error: DistillError):
    """Report a toolkit error on stderr and exit with its code"""
    click.echo(f'ERROR: {error}', err=True)
    logger.debug(f'{type(error).__name__}: {error}')
    sys.exit(error.exit_code)


def load_corpus(manifest_path: str, traces_dir: str, map_size: int,
                scheme: WeightScheme) -> Tuple[Manifest, List[CoverageTrace], CoverageMatrix]:
    """Manifest, traces and the coverage matrix built from them"""
    manifest = read_manifest(manifest_path)
    traces = load_traces(manifest, traces_dir, map_size)
    matrix = build_matrix(traces, manifest.entries, scheme)
    return manifest, traces, matrix


def write_selection(ids, path: str) -> None:
    """One decimal id per line, ascending"""
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(''.join(f'{i}\n' for i in sorted(ids)))


def read_selection(path: str, n_seeds: Optional[int] = None) -> Selection:
    """Parse a selection file, checking ids against the corpus size"""
    ids = set()
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.read().split('\n')
    except OSError as e:
        raise FormatError(f'cannot read selection {path}: {e}')

    for line_number, line in enumerate(lines, start=1):
        if not line:
            continue
        if not line.isdigit():
            raise FormatError(f'{path}:{line_number}: not a seed id: {line[:40]!r}')
        seed_id = int(line)
        if n_seeds is not None and seed_id >= n_seeds:
            raise FormatError(f'{path}:{line_number}: seed id {seed_id} not in manifest')
        ids.add(seed_id)
    return Selection(chosen=frozenset(ids), algo='file')


def run_algorithm(algo: str, matrix: CoverageMatrix, manifest: Manifest,
                  traces: Sequence[CoverageTrace], scheme: WeightScheme,
                  settings, k: Optional[int] = None, rng_seed: int = 0) -> Selection:
    """
    Dispatch one distiller by its command-line name.

    Returns:
        Selection with ``wall_ms`` set to the measured run time
    """
    seeds = manifest.entries
    started = time.perf_counter()

    if algo == 'moonlight':
        selection = moonlight_distill(matrix, SolverConfig(scheme=scheme))
    elif algo == 'minset':
        selection = minset_weighted(matrix, scheme)
    elif algo == 'cmin':
        selection = cmin_distill([trace.tuples for trace in traces], seeds, scheme)
    elif algo == 'random':
        if k is None:
            raise ConfigurationError('--algo random needs --k')
        selection = random_sample(seeds, k, rng_seed, scheme)
    elif algo == 'exact':
        selection = exact_minset(matrix, scheme, settings.ORACLE_ROW_LIMIT)
    elif algo == 'full':
        selection = full_selection(seeds, scheme)
    else:
        raise ConfigurationError(f'unknown algorithm {algo}')

    selection.wall_ms = (time.perf_counter() - started) * 1000.0
    return selection
