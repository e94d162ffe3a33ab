#!/usr/bin/env python3
"""
Baseline distillers

Greedy-reduced Minset (unweighted and weighted), afl-cmin style
smallest-seed nomination over bucketed tuples, random sampling, and the
identity selection.
"""

import heapq
import logging
import time
from fractions import Fraction
from typing import FrozenSet, List, Optional, Sequence

import numpy as np

from distiller.errors import SampleSizeError, TupleDataError
from distiller.models import (
    CoverageMatrix,
    SeedRecord,
    Selection,
    WeightScheme,
    resolve_weights,
)

logger = logging.getLogger(__name__)


def _reduce(order: List[int], masks: dict, target: int) -> List[int]:
    """Drop picks whose coverage the rest of the selection already spans, latest first"""
    kept = list(order)
    for row in reversed(order):
        others = 0
        for other in kept:
            if other != row:
                others |= masks[other]
        if others & target == target:
            kept.remove(row)
            logger.debug(f'Greedy reduction dropped redundant seed {row}')
    return kept


def minset_weighted(A: CoverageMatrix, scheme: WeightScheme = WeightScheme.UNWEIGHTED) -> Selection:
    """
    Greedy-reduced Minset.

    Each round picks the live row with the most newly covered columns per
    unit weight (plain count when unweighted), ties to the lowest id, until
    every non-singular column is covered; a reverse-order pass then drops
    redundant picks. Uses lazy evaluation: a row's gain never grows as the
    selection grows.
    """
    started = time.perf_counter()
    masks = A.live_row_bitmasks()
    target = 0
    for mask in masks.values():
        target |= mask

    def score(row, uncovered):
        gain = (masks[row] & uncovered).bit_count()
        return Fraction(gain, A.weights[row]) if scheme.weighted else gain

    uncovered = target
    heap = [(-score(row, uncovered), row) for row in masks if masks[row]]
    heapq.heapify(heap)
    order = []
    while uncovered and heap:
        _, row = heapq.heappop(heap)
        fresh = score(row, uncovered)
        if fresh == 0:
            continue
        if heap and (-fresh, row) > heap[0]:
            heapq.heappush(heap, (-fresh, row))
            continue
        order.append(row)
        uncovered &= ~masks[row]

    order = _reduce(order, masks, target)
    selection = Selection(
        chosen=frozenset(order),
        total_weight=sum(A.weights[r] for r in order),
        dropped_singular_rows=A.dropped_singular_rows,
        algo='minset',
        order=order,
        wall_ms=(time.perf_counter() - started) * 1000.0,
    )
    logger.info(f'Minset ({scheme.value}) selected {selection.size} of {A.n_rows} seeds')
    return selection


def minset_unweighted(A: CoverageMatrix) -> Selection:
    """Unweighted greedy-reduced Minset"""
    return minset_weighted(A, WeightScheme.UNWEIGHTED)


def cmin_distill(tuple_traces: Sequence[Optional[FrozenSet]], seeds: Sequence[SeedRecord],
                 scheme: WeightScheme = WeightScheme.SIZE) -> Selection:
    """
    afl-cmin style distillation over (edge, bucket) tuples.

    Every tuple nominates the smallest seed covering it (ties to the lowest
    id). Tuples are then swept in ascending order and each one not yet
    covered pulls in its nominee, whose whole tuple set becomes covered.

    Args:
        tuple_traces: Per-seed tuple sets, in seed-id order
        seeds: Seed records supplying sizes
        scheme: Scheme used only to report ``total_weight``

    Returns:
        Selection that covers every input tuple
    """
    started = time.perf_counter()
    if len(tuple_traces) != len(seeds):
        raise TupleDataError(f'{len(tuple_traces)} tuple sets for {len(seeds)} seeds')
    missing = [seed.id for seed, tuples in zip(seeds, tuple_traces) if tuples is None]
    if missing:
        raise TupleDataError(
            f'cmin needs hit-count tuples, which only showmap text traces carry; '
            f'{len(missing)} seed(s) have binary traces only (first: {missing[0]})'
        )

    nominee = {}
    for seed, tuples in zip(seeds, tuple_traces):
        key = (seed.size_bytes, seed.id)
        for item in tuples:
            current = nominee.get(item)
            if current is None or key < current:
                nominee[item] = key

    covered = set()
    order = []
    for item in sorted(nominee):
        if item in covered:
            continue
        seed_id = nominee[item][1]
        order.append(seed_id)
        covered.update(tuple_traces[seed_id])

    weights = resolve_weights(seeds, scheme)
    selection = Selection(
        chosen=frozenset(order),
        total_weight=sum(weights[i] for i in order),
        algo='cmin',
        order=order,
        wall_ms=(time.perf_counter() - started) * 1000.0,
    )
    logger.info(f'cmin selected {selection.size} of {len(seeds)} seeds over {len(nominee)} tuples')
    return selection


def random_sample(seeds: Sequence[SeedRecord], k: int, rng_seed: int,
                  scheme: WeightScheme = WeightScheme.UNWEIGHTED) -> Selection:
    """Uniform sample of ``k`` seeds without replacement, reproducible from ``rng_seed``"""
    if k < 1 or k > len(seeds):
        raise SampleSizeError(f'sample size {k} outside 1..{len(seeds)}')

    rng = np.random.default_rng(rng_seed)
    order = sorted(rng.choice(len(seeds), size=k, replace=False).tolist())
    weights = resolve_weights(seeds, scheme)
    return Selection(
        chosen=frozenset(order),
        total_weight=sum(weights[i] for i in order),
        algo='random',
        order=order,
        coverage_exempt=True,
    )


def full_selection(seeds: Sequence[SeedRecord],
                   scheme: WeightScheme = WeightScheme.UNWEIGHTED) -> Selection:
    """The undistilled corpus"""
    weights = resolve_weights(seeds, scheme)
    return Selection(
        chosen=frozenset(range(len(seeds))),
        total_weight=sum(weights),
        algo='full',
    )
