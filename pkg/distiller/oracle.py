#!/usr/bin/env python3
"""
Exact (weighted) minimum set cover for small matrices

Branch-and-bound over row inclusion. Used as ground truth for the solver's
reduction rules and as the ``exact`` distiller for tiny corpora.
"""

import logging
import math
import time
from typing import List, Optional, Tuple

from distiller.errors import OracleLimitError
from distiller.models import CoverageMatrix, Selection, WeightScheme

logger = logging.getLogger(__name__)

DEFAULT_ROW_LIMIT = 20


class _BranchAndBound:
    """Depth-first search keeping the lightest, then lexicographically smallest, cover"""

    def __init__(self, rows: List[Tuple[int, int, int]]):
        self.rows = rows
        self.best_weight: Optional[int] = None
        self.best_ids: Optional[Tuple[int, ...]] = None
        self.nodes = 0

    def _offer(self, weight: int, ids: List[int]) -> None:
        key = tuple(sorted(ids))
        if (self.best_weight is None or weight < self.best_weight
                or (weight == self.best_weight and key < self.best_ids)):
            self.best_weight, self.best_ids = weight, key

    def search(self, uncovered: int, chosen: List[int], weight: int, available: List[int]) -> None:
        self.nodes += 1
        if uncovered == 0:
            self._offer(weight, chosen)
            return
        if not available:
            return

        max_gain = max((self.rows[i][1] & uncovered).bit_count() for i in available)
        if max_gain == 0:
            return
        min_weight = min(self.rows[i][2] for i in available)
        bound = weight + math.ceil(uncovered.bit_count() / max_gain) * min_weight
        if self.best_weight is not None and bound > self.best_weight:
            return

        # Branch on the uncovered column with the fewest candidate rows
        pivot_rows = None
        remaining = uncovered
        while remaining:
            bit = remaining & -remaining
            remaining ^= bit
            covering = [i for i in available if self.rows[i][1] & bit]
            if not covering:
                return
            if pivot_rows is None or len(covering) < len(pivot_rows):
                pivot_rows = covering
                if len(covering) == 1:
                    break

        excluded = set()
        for i in pivot_rows:
            row_id, mask, row_weight = self.rows[i]
            rest = [j for j in available if j != i and j not in excluded]
            self.search(uncovered & ~mask, chosen + [row_id], weight + row_weight, rest)
            excluded.add(i)


def exact_minset(A: CoverageMatrix, scheme: WeightScheme = WeightScheme.UNWEIGHTED,
                 row_limit: int = DEFAULT_ROW_LIMIT) -> Selection:
    """
    Provably minimum-weight cover of the live, non-singular columns of ``A``.

    Args:
        A: Coverage matrix (its live state is read, not modified)
        scheme: UNWEIGHTED minimizes the seed count; otherwise matrix weights
        row_limit: Refuse matrices with more live rows than this

    Returns:
        Selection; equal-weight optima resolve to the lexicographically
        smallest id set
    """
    started = time.perf_counter()
    if A.n_live_rows > row_limit:
        raise OracleLimitError(
            f'exact search limited to {row_limit} live rows, matrix has {A.n_live_rows}'
        )

    rows = []
    target = 0
    for row, mask in A.live_row_bitmasks().items():
        if mask:
            rows.append((row, mask, A.weights[row] if scheme.weighted else 1))
            target |= mask

    search = _BranchAndBound(rows)
    search.search(target, [], 0, list(range(len(rows))))
    chosen = search.best_ids or ()

    logger.debug(f'Exact search visited {search.nodes} nodes, optimum {search.best_weight}')
    return Selection(
        chosen=frozenset(chosen),
        total_weight=sum(A.weights[r] for r in chosen),
        heuristic_cost=0,
        dropped_singular_rows=A.dropped_singular_rows,
        algo='exact',
        wall_ms=(time.perf_counter() - started) * 1000.0,
    )


def optimum_value(A: CoverageMatrix, scheme: WeightScheme = WeightScheme.UNWEIGHTED,
                  row_limit: int = DEFAULT_ROW_LIMIT) -> int:
    """Objective value of the exact optimum: seed count or total weight"""
    selection = exact_minset(A, scheme, row_limit)
    return selection.total_weight if scheme.weighted else selection.size
