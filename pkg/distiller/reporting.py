#!/usr/bin/env python3
"""
Corpus statistics, coverage verification and algorithm comparison

The comparison table mirrors the usual corpus-comparison metrics: file
count and total byte size per distillation technique.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import orjson

from distiller.errors import VerificationError
from distiller.models import CoverageMatrix, SeedRecord, Selection, StepKind, union_coverage

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    'algo', 'files', 'bytes', 'cost',
    'steps_singularity', 'steps_exotic', 'steps_row_dom', 'steps_col_dom', 'steps_heuristic',
    'wall_ms', 'coverage_ok',
]


@dataclass(frozen=True)
class CorpusStats:
    file_count: int
    total_size_bytes: int
    mean_size_bytes: float = 0.0
    edges_covered: Optional[int] = None

    def to_dict(self) -> Dict:
        return {
            'file_count': self.file_count,
            'total_size_bytes': self.total_size_bytes,
            'mean_size_bytes': self.mean_size_bytes,
            'edges_covered': self.edges_covered,
        }


@dataclass(frozen=True)
class CoverVerdict:
    missing: FrozenSet[int] = frozenset()

    @property
    def ok(self) -> bool:
        return not self.missing


def _check_ids(ids, n):
    for i in ids:
        if i < 0 or i >= n:
            raise IndexError(f'seed id {i} outside 0..{n - 1}')


def corpus_stats(seeds: Sequence[SeedRecord], selection: Optional[Selection] = None,
                 matrix: Optional[CoverageMatrix] = None) -> CorpusStats:
    """
    File count and total size of a selection, or of the whole corpus.

    Args:
        seeds: Manifest seeds
        selection: Optional selection to restrict to
        matrix: Optional coverage matrix, enabling ``edges_covered``

    Returns:
        CorpusStats
    """
    ids = sorted(selection.chosen) if selection is not None else list(range(len(seeds)))
    _check_ids(ids, len(seeds))
    total = sum(seeds[i].size_bytes for i in ids)
    edges = int(union_coverage(matrix, ids).sum()) if matrix is not None else None
    return CorpusStats(
        file_count=len(ids),
        total_size_bytes=total,
        mean_size_bytes=total / len(ids) if ids else 0.0,
        edges_covered=edges,
    )


def verify_cover(A: CoverageMatrix, selection: Selection) -> CoverVerdict:
    """Check that a selection covers every non-singular column of ``A``"""
    covered = union_coverage(A, selection.chosen)
    required = A.nonsingular_col_ids()
    missing = required[~covered[required]]
    if missing.size:
        logger.warning(f'Selection {selection.algo or "?"} misses {missing.size} columns')
    return CoverVerdict(frozenset(missing.tolist()))


def _cost_value(cost):
    return int(cost) if float(cost) == int(cost) else cost


@dataclass
class ComparisonTable:
    rows: List[Dict] = field(default_factory=list)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(REPORT_COLUMNS)
        for row in self.rows:
            writer.writerow([
                str(row[c]).lower() if isinstance(row[c], bool) else row[c]
                for c in REPORT_COLUMNS
            ])
        return buffer.getvalue()

    def to_json(self) -> bytes:
        return orjson.dumps(self.rows, option=orjson.OPT_INDENT_2) + b'\n'


def compare_report(results: Sequence[Tuple[str, Selection]], seeds: Sequence[SeedRecord],
                   matrix: CoverageMatrix, include_timing: bool = True) -> ComparisonTable:
    """
    One comparison row per algorithm.

    Selections that fail coverage verification are refused unless they are
    marked coverage-exempt (random sampling), in which case the failure is
    recorded in the ``coverage_ok`` column.

    Raises:
        VerificationError: a non-exempt selection loses coverage
    """
    table = ComparisonTable()
    for name, selection in results:
        verdict = verify_cover(matrix, selection)
        if not verdict.ok and not selection.coverage_exempt:
            raise VerificationError(
                f'{name} selection misses {len(verdict.missing)} column(s); refusing to report it',
                verdict.missing,
            )
        stats = corpus_stats(seeds, selection)
        counts = selection.step_counts()
        table.rows.append({
            'algo': name,
            'files': stats.file_count,
            'bytes': stats.total_size_bytes,
            'cost': _cost_value(selection.heuristic_cost),
            'steps_singularity': counts[StepKind.COL_SINGULARITY] + counts[StepKind.ROW_SINGULARITY],
            'steps_exotic': counts[StepKind.EXOTIC_ROW],
            'steps_row_dom': counts[StepKind.DOMINANT_ROW_DELETE],
            'steps_col_dom': counts[StepKind.DOMINANT_COL_DELETE],
            'steps_heuristic': counts[StepKind.HEURISTIC_ROW],
            'wall_ms': round(selection.wall_ms, 3) if include_timing else 0,
            'coverage_ok': verdict.ok,
        })
    return table
