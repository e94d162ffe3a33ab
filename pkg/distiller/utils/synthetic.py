"""
Distillation toolkit - Synthetic Corpora

Random coverage matrices and corpora for property suites, ensemble
comparisons and the scale benchmark.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from distiller.models import (
    CoverageMatrix,
    CoverageTrace,
    SeedRecord,
    WeightScheme,
    pack_bits,
)

logger = logging.getLogger(__name__)


def random_dense(n_rows: int, n_cols: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli(density) entries"""
    return rng.random((n_rows, n_cols)) < density


def random_matrix(n_rows: int, n_cols: int, density: float, rng: np.random.Generator,
                  weights: Optional[List[int]] = None,
                  scheme: WeightScheme = WeightScheme.UNWEIGHTED) -> CoverageMatrix:
    return CoverageMatrix.from_dense(random_dense(n_rows, n_cols, density, rng), weights, scheme)


def synthetic_packed(n_rows: int, n_cols: int, density: float, rng: np.random.Generator,
                     redundancy: float = 0.0, n_behaviours: Optional[int] = None,
                     block_rows: int = 1024) -> np.ndarray:
    """
    Packed coverage rows with optional duplicate-behaviour redundancy.

    With ``redundancy`` r, a fraction r of the rows are clones of one of
    ``n_behaviours`` base rows, each clone losing a few of its base edges.
    The rest are independent random rows. Rows are generated in blocks so
    the dense intermediate stays bounded.
    """
    n_bytes = (n_cols + 7) // 8
    out = np.zeros((n_rows, n_bytes), dtype=np.uint8)
    for start in range(0, n_rows, block_rows):
        stop = min(start + block_rows, n_rows)
        dense = rng.random((stop - start, n_cols), dtype=np.float32) < density
        out[start:stop] = pack_bits(dense)

    if redundancy > 0 and n_rows:
        n_behaviours = n_behaviours or max(1, n_rows // 20)
        n_clones = int(round(n_rows * redundancy))
        bases = rng.choice(n_rows, size=min(n_behaviours, n_rows), replace=False)
        clones = rng.choice(n_rows, size=min(n_clones, n_rows), replace=False)
        for row in clones:
            base = bases[rng.integers(len(bases))]
            if row == base:
                continue
            keep = rng.random(n_cols, dtype=np.float32) < 0.9
            out[row] = out[base] & pack_bits(keep)
    return out


@dataclass
class SyntheticCorpus:
    """Seeds, traces (with tuples) and the matching dense coverage"""
    seeds: List[SeedRecord]
    traces: List[CoverageTrace]
    dense: np.ndarray


def synthetic_corpus(n_seeds: int, map_size: int, density: float, rng: np.random.Generator,
                     redundancy: float = 0.5, n_behaviours: Optional[int] = None,
                     max_size: int = 4096) -> SyntheticCorpus:
    """
    A small corpus with file sizes and bucketed hit counts.

    Clones share their base behaviour's edges but draw their own hit-count
    buckets, so the (edge, bucket) universe is finer than the edge universe.
    """
    dense = np.unpackbits(
        synthetic_packed(n_seeds, map_size, density, rng, redundancy, n_behaviours),
        axis=1, count=map_size, bitorder='little').astype(bool)

    seeds, traces = [], []
    for i in range(n_seeds):
        edges = np.flatnonzero(dense[i])
        buckets = rng.integers(0, 8, size=edges.size)
        tuples = frozenset(zip(edges.tolist(), buckets.tolist()))
        seeds.append(SeedRecord(
            id=i,
            path=f'corpus/seed_{i:05d}',
            size_bytes=int(rng.integers(1, max_size + 1)),
            exec_time_us=int(rng.integers(1, 10_000)),
            content_hash=i.to_bytes(32, 'big'),
        ))
        traces.append(CoverageTrace(map_size, pack_bits(dense[i]), tuples))
    return SyntheticCorpus(seeds, traces, dense)
