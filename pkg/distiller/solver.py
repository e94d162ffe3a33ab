#!/usr/bin/env python3
"""
MoonLight corpus distillation

Dynamic-programming reduction of the coverage matrix. Each pass applies
the first applicable operation family, in priority order:

    1. singularities (zero columns, then zero rows)
    2. exotic rows, plus the columns they contain
    3. submissive-row deletion
    4. dominant-column deletion
    5. one heuristic row, plus the columns it contains

Families 1-4 are optimal and free; a heuristic pick costs 1 (unweighted)
or the row's weight (weighted). A run that finishes with zero heuristic
cost has produced an exact minimum cover.

Inside a run, families 3 and 4 only rescan rows and columns whose
certificate of non-dominance was invalidated by a removal.
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Set, Tuple

import numpy as np

from distiller.errors import PreconditionError
from distiller.models import (
    CoverageMatrix,
    ReductionStep,
    Selection,
    StepKind,
    WeightScheme,
)

logger = logging.getLogger(__name__)

# Rarest members used to seed a dominance candidate search
PROBE_COUNT = 3
# Relative float error tolerated when shortlisting heuristic ratios
_RATIO_SLACK = 1e-9

LOWEST_ID = 'LOWEST_ID'


@dataclass(frozen=True)
class SolverConfig:
    scheme: WeightScheme = WeightScheme.UNWEIGHTED
    tie_break: str = LOWEST_ID
    record_steps: bool = True

    def __post_init__(self):
        if self.tie_break != LOWEST_ID:
            raise ValueError(f'unsupported tie-break policy {self.tie_break}')


def find_column_singularities(A: CoverageMatrix) -> Set[int]:
    """Live columns no live row covers"""
    live = A.live_col_ids()
    return set(live[A.col_counts()[live] == 0].tolist())


def find_row_singularities(A: CoverageMatrix) -> Set[int]:
    """Live rows covering no live column"""
    live = A.live_row_ids()
    return set(live[A.row_counts()[live] == 0].tolist())


def find_exotic_rows(A: CoverageMatrix) -> Set[int]:
    """Rows that are the only live cover of at least one live column"""
    live = A.live_col_ids()
    exotic = set()
    for col in live[A.col_counts()[live] == 1]:
        exotic.add(int(A.live_rows_of_col(col)[0]))
    return exotic


def _probes(members: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """The rarest live members, rarest first"""
    if members.size > PROBE_COUNT:
        members = members[np.argpartition(counts[members], PROBE_COUNT)[:PROBE_COUNT]]
    return members[np.argsort(counts[members], kind='stable')]


def _candidates(item: int, probes: np.ndarray, index_of: Callable[[int], np.ndarray],
                probe_table: np.ndarray, live: np.ndarray) -> np.ndarray:
    """
    Live items of the opposite view that contain every probe.

    Any superset of ``item`` is among them. The rarest probe's index list
    seeds the set and the other probes are bit-tested against it.
    """
    found = index_of(int(probes[0]))
    found = found[live[found]]
    for probe in probes[1:]:
        if found.size == 0:
            break
        bits = probe_table[probe]
        found = found[((bits[found >> 3] >> (found & 7)) & 1).astype(bool)]
    return found[found != item]


def _compare(own: np.ndarray, table: np.ndarray, candidates: np.ndarray
             ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Containment of ``own`` in each candidate's bitset.

    Only the bytes where ``own`` has bits are gathered. Returns the
    containment mask, the missed bits per candidate and the byte offsets
    they refer to.
    """
    offsets = np.flatnonzero(own)
    missed = own[offsets] & ~table[np.ix_(candidates, offsets)]
    return ~missed.any(axis=1), missed, offsets


def _witnesses(missed: np.ndarray, offsets: np.ndarray, outside: np.ndarray) -> List[int]:
    """
    Few members that separate ``own`` from every non-containing candidate.

    A candidate already missing a chosen witness needs no new one.
    """
    chosen, witnesses = [], []
    for i in outside.tolist():
        line = missed[i]
        if any(line[j] & bit for j, bit in chosen):
            continue
        j = int(np.flatnonzero(line)[0])
        value = int(line[j])
        bit = value & -value
        chosen.append((j, bit))
        witnesses.append(int(offsets[j]) * 8 + bit.bit_length() - 1)
    return witnesses


def _check_row(A: CoverageMatrix, row: int, weighted: bool, live_mask: np.ndarray
               ) -> Tuple[bool, List[int], List[int]]:
    """
    Dominance test of one live row.

    Returns:
        (submissive, identical rows that lose the tie to ``row``, watch list).
        The watch list is empty when ``row`` is submissive.
    """
    counts = A.row_counts()
    probes = _probes(A.live_cols_of_row(row), A.col_counts())
    candidates = _candidates(row, probes, A.rows_of_col, A.cols, A.live_row_flags())
    if weighted and candidates.size:
        # a heavier row never licenses a deletion
        candidates = candidates[A.weight_array[candidates] <= A.weights[row]]
    if candidates.size == 0:
        return False, [], probes.tolist()

    # larger popcounts first: only they can dominate
    candidates = candidates[np.argsort(-counts[candidates], kind='stable')]
    contained, missed, offsets = _compare(A.rows[row] & live_mask, A.rows, candidates)

    losers = []
    for dom in candidates[contained].tolist():
        if counts[dom] > counts[row]:
            return True, losers, []
        if weighted:
            wins = (A.weights[dom], dom) < (A.weights[row], row)
        else:
            wins = dom < row
        if wins:
            return True, losers, []
        losers.append(dom)
    return False, losers, probes.tolist() + _witnesses(missed, offsets, np.flatnonzero(~contained))


def _check_col(A: CoverageMatrix, col: int, live_mask: np.ndarray) -> Tuple[List[int], List[int]]:
    """
    Superset test of one live column.

    Returns:
        (dominant columns found, watch list). ``col`` itself is reported,
        with an empty watch list, when it duplicates a lower-id column.
    """
    counts = A.col_counts()
    probes = _probes(A.live_rows_of_col(col), A.row_counts())
    candidates = _candidates(col, probes, A.cols_of_row, A.rows, A.live_col_flags())
    if candidates.size == 0:
        return [], probes.tolist()

    contained, missed, offsets = _compare(A.cols[col] & live_mask, A.cols, candidates)
    dominant, duplicate = [], False
    for other in candidates[contained].tolist():
        if counts[other] > counts[col] or other > col:
            dominant.append(other)
        else:
            duplicate = True
    if duplicate:
        return dominant + [col], []
    return dominant, probes.tolist() + _witnesses(missed, offsets, np.flatnonzero(~contained))


def _scan_rows(A: CoverageMatrix, rows: np.ndarray, weighted: bool
               ) -> Tuple[Set[int], Dict[int, List[int]]]:
    live_mask = A.live_col_mask()
    counts = A.row_counts()
    submissive, watched = set(), {}
    for row in rows.tolist():
        if row in submissive or counts[row] == 0:
            continue
        deleted, losers, watch = _check_row(A, row, weighted, live_mask)
        submissive.update(losers)
        if deleted:
            submissive.add(row)
        else:
            watched[row] = watch
    return submissive, {r: w for r, w in watched.items() if r not in submissive}


def _scan_cols(A: CoverageMatrix, cols: np.ndarray) -> Tuple[Set[int], Dict[int, List[int]]]:
    live_mask = A.live_row_mask()
    counts = A.col_counts()
    dominant, watched = set(), {}
    for col in cols.tolist():
        if col in dominant or counts[col] == 0:
            continue
        found, watch = _check_col(A, col, live_mask)
        dominant.update(found)
        if watch:
            watched[col] = watch
    return dominant, {c: w for c, w in watched.items() if c not in dominant}


def find_submissive_rows(A: CoverageMatrix, scheme: WeightScheme = WeightScheme.UNWEIGHTED) -> Set[int]:
    """
    Rows that some other live row dominates.

    A dominator d of r covers every live column r covers. When weighted, r
    is only deletable if its weight is at least d's. Among rows with
    identical live coverage, the one with the smallest (weight, id) survives.
    """
    return _scan_rows(A, A.live_row_ids(), scheme.weighted)[0]


def find_dominant_columns(A: CoverageMatrix) -> Set[int]:
    """
    Columns whose live row set strictly contains another live column's.

    Any cover of the smaller column also covers the larger one. Among
    identical columns all but the lowest id are reported.
    """
    return _scan_cols(A, A.live_col_ids())[0]


class DominanceTracker:
    """
    Incremental dominance scans over one residual matrix.

    A row that passes a scan is watched on the columns it was probed with
    plus one witness column per candidate that does not contain it. Rows
    only lose dominators and columns, so until a watched column is removed
    no row can start dominating it and it is not rescanned. Columns are
    watched on rows the same way. Scan results equal a full rescan of the
    current matrix.
    """

    def __init__(self, A: CoverageMatrix, weighted: bool = False):
        self.A = A
        self.weighted = weighted
        self.dirty_rows = A.live_row_flags().copy()
        self.dirty_cols = A.live_col_flags().copy()
        self._row_watchers: Dict[int, List[int]] = {}
        self._col_watchers: Dict[int, List[int]] = {}

    def submissive_rows(self) -> Set[int]:
        rows = np.flatnonzero(self.dirty_rows & self.A.live_row_flags())
        submissive, watched = _scan_rows(self.A, rows, self.weighted)
        self._watch(watched, self.dirty_rows, self._row_watchers)
        return submissive

    def dominant_cols(self) -> Set[int]:
        cols = np.flatnonzero(self.dirty_cols & self.A.live_col_flags())
        dominant, watched = _scan_cols(self.A, cols)
        self._watch(watched, self.dirty_cols, self._col_watchers)
        return dominant

    def remove_rows(self, rows: Iterable[int]) -> None:
        rows = list(rows)
        self.A.remove_rows(rows)
        self._fire(rows, self._col_watchers, self.dirty_cols)

    def remove_cols(self, cols: Iterable[int]) -> None:
        cols = list(cols)
        self.A.remove_cols(cols)
        self._fire(cols, self._row_watchers, self.dirty_rows)

    @staticmethod
    def _watch(watched: Dict[int, List[int]], dirty: np.ndarray,
               watchers: Dict[int, List[int]]) -> None:
        for item, keys in watched.items():
            dirty[item] = False
            for key in keys:
                watchers.setdefault(key, []).append(item)

    @staticmethod
    def _fire(keys: List[int], watchers: Dict[int, List[int]], dirty: np.ndarray) -> None:
        for key in keys:
            items = watchers.pop(key, None)
            if items:
                dirty[items] = True


def contained_columns(A: CoverageMatrix, rows: Iterable[int]) -> Set[int]:
    """Union of the live columns covered by the given rows"""
    cols = set()
    for row in rows:
        cols.update(A.live_cols_of_row(row).tolist())
    return cols


def heuristic_row(A: CoverageMatrix, scheme: WeightScheme = WeightScheme.UNWEIGHTED) -> int:
    """
    Fallback pick: largest live row sum, or row sum / weight when weighted.

    Ratios are compared by cross-multiplication so scaling every weight by
    a constant never changes the choice. Ties go to the lowest id.
    """
    live = A.live_row_ids()
    if live.size == 0 or A.n_live_cols == 0:
        raise PreconditionError('heuristic row requested on an empty matrix')

    counts = A.row_counts()[live]
    if not scheme.weighted:
        return int(live[int(np.argmax(counts))])

    # float ratios only shortlist; the exact comparison decides
    ratios = counts / A.weight_array[live]
    shortlist = np.flatnonzero(ratios >= ratios.max() * (1 - _RATIO_SLACK))
    best, best_count, best_weight = None, 0, 1
    for i in shortlist.tolist():
        row, count = int(live[i]), int(counts[i])
        weight = A.weights[row]
        if best is None or count * best_weight > best_count * weight:
            best, best_count, best_weight = row, count, weight
    return best


def moonlight_distill(A: CoverageMatrix, config: SolverConfig = SolverConfig()) -> Selection:
    """
    Run MoonLight to completion on a copy of ``A``.

    Args:
        A: Matrix from build_matrix (left untouched)
        config: Weighting and step-recording options

    Returns:
        Selection covering every non-singular column, with its step log
    """
    started = time.perf_counter()
    scheme = config.scheme
    M = A.copy()
    tracker = DominanceTracker(M, scheme.weighted)
    order: List[int] = []
    steps: List[ReductionStep] = []
    cost = 0
    passes = 0

    def record(kind, **kwargs):
        if config.record_steps:
            steps.append(ReductionStep(kind, **{k: frozenset(v) if isinstance(v, set) else v
                                                for k, v in kwargs.items()}))

    def select(rows, kind, delta=0):
        cols = contained_columns(M, rows)
        tracker.remove_rows(rows)
        tracker.remove_cols(cols)
        order.extend(sorted(rows))
        record(kind, rows_removed=set(rows), rows_selected=set(rows), cost_delta=delta)
        record(StepKind.CONTAINED_COLS, cols_removed=cols)

    while M.n_live_cols:
        passes += 1

        cols = find_column_singularities(M)
        if cols:
            tracker.remove_cols(cols)
            record(StepKind.COL_SINGULARITY, cols_removed=cols)
            continue

        rows = find_row_singularities(M)
        if rows:
            tracker.remove_rows(rows)
            record(StepKind.ROW_SINGULARITY, rows_removed=rows)
            continue

        rows = find_exotic_rows(M)
        if rows:
            select(rows, StepKind.EXOTIC_ROW)
            continue

        rows = tracker.submissive_rows()
        if rows:
            tracker.remove_rows(rows)
            record(StepKind.DOMINANT_ROW_DELETE, rows_removed=rows)
            continue

        cols = tracker.dominant_cols()
        if cols:
            tracker.remove_cols(cols)
            record(StepKind.DOMINANT_COL_DELETE, cols_removed=cols)
            continue

        row = heuristic_row(M, scheme)
        delta = A.weights[row] if scheme.weighted else 1
        cost += delta
        select({row}, StepKind.HEURISTIC_ROW, delta)
        logger.debug(f'Heuristic pick: seed {row} (cost {delta}), {M.n_live_cols} columns left')

    selection = Selection(
        chosen=frozenset(order),
        total_weight=sum(A.weights[r] for r in order),
        heuristic_cost=cost,
        steps=steps,
        dropped_singular_rows=A.dropped_singular_rows,
        algo='moonlight',
        order=order,
        wall_ms=(time.perf_counter() - started) * 1000.0,
    )
    logger.info(
        f'MoonLight ({scheme.value}) selected {selection.size} of {A.n_rows} seeds, '
        f'weight {selection.total_weight}, heuristic cost {cost}, {passes} passes'
    )
    return selection
