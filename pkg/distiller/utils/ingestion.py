#!/usr/bin/env python3
"""
Trace conversion task management for the distillation toolkit

Fans showmap-to-MLBV conversion out over a worker pool and merges the
per-file results back in seed-id order.
"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Tuple

from distiller.errors import DistillError, MissingTraceError
from distiller.ingestion import (
    Manifest,
    load_showmap_file,
    render_showmap,
    parse_showmap,
    showmap_path,
    trace_path,
    write_trace_file,
)

logger = logging.getLogger(__name__)


def convert_showmap(seed_id: int, showmap_dir: str, out_dir: str, map_size: int,
                    keep_text: bool = False) -> Tuple[int, int]:
    """
    Convert one ``<id>.showmap`` file into ``<id>.mlbv``.

    Args:
        seed_id: Manifest id of the seed
        showmap_dir: Directory holding showmap text
        out_dir: Directory receiving the binary trace
        map_size: Edge-space width
        keep_text: Also write canonical showmap text next to the binary

    Returns:
        Tuple of (seed_id, popcount)
    """
    source = showmap_path(showmap_dir, seed_id)
    trace = load_showmap_file(source, map_size)
    write_trace_file(trace, trace_path(out_dir, seed_id))

    if keep_text:
        with open(source, 'rb') as f:
            records = parse_showmap(f.read(), source=source)
        with open(showmap_path(out_dir, seed_id), 'wb') as f:
            f.write(render_showmap(records))

    return seed_id, trace.popcount


def start_trace_conversion(manifest: Manifest, showmap_dir: str, out_dir: str,
                           map_size: int, workers: int = 4,
                           keep_text: bool = False) -> Dict[str, Any]:
    """
    Convert every manifest entry's showmap file.

    All showmap files are checked for presence before any work starts.
    Conversion errors are re-raised for the lowest failing id, so the
    reported failure does not depend on worker scheduling.

    Returns:
        Dict of conversion statistics
    """
    missing = [seed.id for seed in manifest.entries
               if not os.path.exists(showmap_path(showmap_dir, seed.id))]
    if missing:
        raise MissingTraceError(missing)

    os.makedirs(out_dir, exist_ok=True)
    started = time.monotonic()

    def task(seed_id):
        try:
            return convert_showmap(seed_id, showmap_dir, out_dir, map_size, keep_text), None
        except DistillError as e:
            return (seed_id, 0), e

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(task, [seed.id for seed in manifest.entries]))

    for (seed_id, _), error in results:
        if error is not None:
            logger.error(f'Trace conversion failed for seed {seed_id}: {error}')
            raise error

    stats = {
        'converted': len(results),
        'total_edges': sum(popcount for (_, popcount), _ in results),
        'empty_traces': sum(1 for (_, popcount), _ in results if popcount == 0),
        'processing_time': time.monotonic() - started,
    }
    logger.info(
        f'Converted {stats["converted"]} showmap files '
        f'({stats["empty_traces"]} empty) in {stats["processing_time"]:.2f}s'
    )
    return stats
