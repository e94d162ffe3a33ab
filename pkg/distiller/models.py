#!/usr/bin/env python3
"""
Core data model for the distillation toolkit

Seeds, coverage traces, the reducible coverage matrix and the selection
records every distiller returns.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

import numpy as np

from distiller.errors import FormatError, MissingWeightError, WeightError

logger = logging.getLogger(__name__)

DEFAULT_MAP_SIZE = 65536

# Rows unpacked at a time while indexing a matrix
_UNPACK_BLOCK_ROWS = 1024
# Columns transposed at a time; must be a multiple of 8
_TRANSPOSE_BLOCK_COLS = 4096


def packed_length(n_bits: int) -> int:
    """Number of bytes holding ``n_bits`` LSB-first bits."""
    return (n_bits + 7) // 8


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean vector (or matrix, along the last axis) LSB-first."""
    return np.packbits(np.asarray(bits, dtype=bool), axis=-1, bitorder='little')


def unpack_bits(packed: np.ndarray, n_bits: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`, returning a boolean array."""
    return np.unpackbits(packed, axis=-1, count=n_bits, bitorder='little').astype(bool)


class WeightScheme(Enum):
    """How a seed's weight c_i is resolved"""
    UNWEIGHTED = 'none'
    SIZE = 'size'
    TIME = 'time'

    @classmethod
    def from_flag(cls, flag: str) -> 'WeightScheme':
        return cls(flag.lower())

    @property
    def weighted(self) -> bool:
        return self is not WeightScheme.UNWEIGHTED


class StepKind(Enum):
    """Matrix operations the solver can log"""
    COL_SINGULARITY = 'col_singularity'
    ROW_SINGULARITY = 'row_singularity'
    EXOTIC_ROW = 'exotic_row'
    DOMINANT_ROW_DELETE = 'dominant_row_delete'
    DOMINANT_COL_DELETE = 'dominant_col_delete'
    CONTAINED_COLS = 'contained_cols'
    HEURISTIC_ROW = 'heuristic_row'


@dataclass(frozen=True)
class SeedRecord:
    """One candidate seed file"""
    id: int
    path: str
    size_bytes: int
    exec_time_us: Optional[int] = None
    content_hash: bytes = b''

    def to_dict(self) -> Dict:
        """Convert to a manifest entry"""
        return {
            'id': self.id,
            'path': self.path,
            'size_bytes': self.size_bytes,
            'exec_time_us': self.exec_time_us,
            'sha256': self.content_hash.hex(),
        }

    @classmethod
    def from_dict(cls, entry: Dict) -> 'SeedRecord':
        return cls(
            id=entry['id'],
            path=entry['path'],
            size_bytes=entry['size_bytes'],
            exec_time_us=entry.get('exec_time_us'),
            content_hash=bytes.fromhex(entry['sha256']),
        )


def resolve_weight(seed: SeedRecord, scheme: WeightScheme) -> int:
    """
    Resolve one seed's weight under a scheme.

    Raises:
        MissingWeightError: TIME scheme and the seed has no execution time
        WeightError: the resolved weight is not strictly positive
    """
    if scheme is WeightScheme.UNWEIGHTED:
        return 1
    if scheme is WeightScheme.SIZE:
        weight = seed.size_bytes
    else:
        if seed.exec_time_us is None:
            raise MissingWeightError(
                f'seed {seed.id} ({seed.path}) has no exec_time_us; '
                f'time weighting needs it for every seed'
            )
        weight = seed.exec_time_us
    if weight <= 0:
        raise WeightError(
            f'seed {seed.id} ({seed.path}) resolves to non-positive '
            f'{scheme.value} weight {weight}'
        )
    return int(weight)


def resolve_weights(seeds: Sequence[SeedRecord], scheme: WeightScheme) -> List[int]:
    return [resolve_weight(seed, scheme) for seed in seeds]


@dataclass(eq=False)
class CoverageTrace:
    """
    Edge coverage of one seed.

    ``bits`` is the packed LSB-first bit vector: edge j lives in byte j // 8
    at bit position j % 8. ``tuples`` holds (edge_id, bucket_class) pairs when
    the trace came from showmap text; binary traces leave it ``None``.
    """
    map_size: int
    bits: np.ndarray
    tuples: Optional[FrozenSet] = None

    def __post_init__(self):
        if self.map_size <= 0:
            raise FormatError(f'map_size must be positive, got {self.map_size}')
        self.bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if self.bits.shape != (packed_length(self.map_size),):
            raise FormatError(
                f'bit vector holds {self.bits.size} bytes, '
                f'map_size {self.map_size} needs {packed_length(self.map_size)}'
            )

    @classmethod
    def empty(cls, map_size: int = DEFAULT_MAP_SIZE) -> 'CoverageTrace':
        return cls(map_size, np.zeros(packed_length(map_size), dtype=np.uint8), frozenset())

    @classmethod
    def from_edges(cls, edges: Iterable[int], map_size: int = DEFAULT_MAP_SIZE,
                   tuples: Optional[Iterable] = None) -> 'CoverageTrace':
        dense = np.zeros(map_size, dtype=bool)
        dense[list(edges)] = True
        return cls(map_size, pack_bits(dense),
                   frozenset(tuples) if tuples is not None else None)

    def edges(self) -> np.ndarray:
        """Ids of the edges this trace covers, ascending"""
        return np.flatnonzero(unpack_bits(self.bits, self.map_size))

    @property
    def popcount(self) -> int:
        return int(np.unpackbits(self.bits).sum())

    def __eq__(self, other):
        if not isinstance(other, CoverageTrace):
            return NotImplemented
        return self.map_size == other.map_size and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True)
class ReductionStep:
    """One audited matrix operation"""
    kind: StepKind
    rows_removed: FrozenSet[int] = frozenset()
    cols_removed: FrozenSet[int] = frozenset()
    rows_selected: FrozenSet[int] = frozenset()
    cost_delta: int = 0

    def to_dict(self) -> Dict:
        return {
            'kind': self.kind.value,
            'rows_removed': sorted(self.rows_removed),
            'cols_removed': sorted(self.cols_removed),
            'rows_selected': sorted(self.rows_selected),
            'cost_delta': self.cost_delta,
        }


@dataclass
class Selection:
    """
    A distilled corpus.

    ``chosen`` is the decision vector (rows with x_i = 1). ``order`` keeps the
    sequence in which a distiller picked them. ``coverage_exempt`` marks
    selections that never promised to preserve coverage (random sampling).
    """
    chosen: FrozenSet[int]
    total_weight: int = 0
    heuristic_cost: int = 0
    steps: List[ReductionStep] = field(default_factory=list)
    dropped_singular_rows: FrozenSet[int] = frozenset()
    algo: str = ''
    order: List[int] = field(default_factory=list)
    coverage_exempt: bool = False
    wall_ms: float = 0.0

    def __post_init__(self):
        self.chosen = frozenset(int(i) for i in self.chosen)
        if not self.order:
            self.order = sorted(self.chosen)

    @property
    def size(self) -> int:
        return len(self.chosen)

    def step_kinds(self, include_contained: bool = False) -> List[StepKind]:
        return [step.kind for step in self.steps
                if include_contained or step.kind is not StepKind.CONTAINED_COLS]

    def step_counts(self) -> Dict[StepKind, int]:
        counts = {kind: 0 for kind in StepKind}
        for step in self.steps:
            counts[step.kind] += 1
        return counts


class CoverageMatrix:
    """
    The N x M boolean coverage matrix with live row/column sets.

    Bit data is immutable after construction. Reductions only clear entries
    of the live masks and keep the per-row and per-column live counts in
    step, so every solver query runs against the current residual matrix.
    """

    def __init__(self, packed: np.ndarray, n_cols: int, weights: Sequence[int],
                 scheme: WeightScheme = WeightScheme.UNWEIGHTED):
        packed = np.ascontiguousarray(packed, dtype=np.uint8)
        if packed.ndim != 2 or packed.shape[1] != packed_length(n_cols):
            raise FormatError(
                f'packed matrix shape {packed.shape} does not match {n_cols} columns'
            )
        if len(weights) != packed.shape[0]:
            raise FormatError(f'{len(weights)} weights for {packed.shape[0]} rows')

        self.n_rows = packed.shape[0]
        self.n_cols = n_cols
        self.scheme = scheme
        self.weights = tuple(int(w) for w in weights)
        self.weight_array = np.asarray(self.weights, dtype=np.int64)
        if any(w <= 0 for w in self.weights):
            raise WeightError('matrix weights must be strictly positive')

        self.rows = packed
        self.rows.setflags(write=False)
        self._index()
        self.cols = self._transpose()
        self.cols.setflags(write=False)

        self._row_count = np.array([c.size for c in self._row_cols], dtype=np.int64)
        self._col_count = np.array([r.size for r in self._col_rows], dtype=np.int64)
        self._covered = self._col_count > 0

        self._live_row = self._row_count > 0
        self._live_col = np.ones(n_cols, dtype=bool)
        self.dropped_singular_rows = frozenset(
            int(r) for r in np.flatnonzero(~self._live_row))
        self._live_row_mask = None
        self._live_col_mask = None

        logger.debug(
            f'Coverage matrix {self.n_rows}x{self.n_cols}: '
            f'{int(self._row_count.sum())} set bits, '
            f'{len(self.dropped_singular_rows)} singular rows dropped'
        )

    @classmethod
    def from_dense(cls, dense, weights: Optional[Sequence[int]] = None,
                   scheme: WeightScheme = WeightScheme.UNWEIGHTED) -> 'CoverageMatrix':
        """Build from a 0/1 array-like of shape (N, M)"""
        dense = np.atleast_2d(np.asarray(dense, dtype=bool))
        if weights is None:
            weights = [1] * dense.shape[0]
        return cls(pack_bits(dense), dense.shape[1], weights, scheme)

    def _index(self):
        """Per-row and per-column lists of set positions"""
        row_ids, col_ids = [], []
        for start in range(0, self.n_rows, _UNPACK_BLOCK_ROWS):
            block = np.unpackbits(self.rows[start:start + _UNPACK_BLOCK_ROWS], axis=1,
                                  count=self.n_cols, bitorder='little')
            r, c = np.nonzero(block)
            row_ids.append((r + start).astype(np.int32))
            col_ids.append(c.astype(np.int32))
        rr = np.concatenate(row_ids) if row_ids else np.empty(0, dtype=np.int32)
        cc = np.concatenate(col_ids) if col_ids else np.empty(0, dtype=np.int32)

        row_counts = np.bincount(rr, minlength=self.n_rows)
        self._row_cols = np.split(cc, np.cumsum(row_counts)[:-1]) if self.n_rows else []

        order = np.argsort(cc, kind='stable')
        col_counts = np.bincount(cc, minlength=self.n_cols)
        self._col_rows = np.split(rr[order], np.cumsum(col_counts)[:-1]) if self.n_cols else []

    def _transpose(self) -> np.ndarray:
        """Packed column-major view: one LSB-first row bitset per column"""
        n_bytes = self.rows.shape[1]
        out = np.zeros((self.n_cols, packed_length(self.n_rows)), dtype=np.uint8)
        step = _TRANSPOSE_BLOCK_COLS // 8
        for b0 in range(0, n_bytes, step):
            b1 = min(b0 + step, n_bytes)
            dense = np.unpackbits(self.rows[:, b0:b1], axis=1, bitorder='little')
            c0 = b0 * 8
            c1 = min(b1 * 8, self.n_cols)
            out[c0:c1] = np.packbits(dense[:, :c1 - c0].T, axis=1, bitorder='little')
        return out

    def copy(self) -> 'CoverageMatrix':
        """Independent live state over the same immutable bit data"""
        clone = object.__new__(CoverageMatrix)
        clone.__dict__.update(self.__dict__)
        clone._row_count = self._row_count.copy()
        clone._col_count = self._col_count.copy()
        clone._live_row = self._live_row.copy()
        clone._live_col = self._live_col.copy()
        clone._live_row_mask = None
        clone._live_col_mask = None
        return clone

    # -- live state ---------------------------------------------------------

    @property
    def live_rows(self) -> List[int]:
        return np.flatnonzero(self._live_row).tolist()

    @property
    def live_cols(self) -> List[int]:
        return np.flatnonzero(self._live_col).tolist()

    def live_row_ids(self) -> np.ndarray:
        return np.flatnonzero(self._live_row)

    def live_col_ids(self) -> np.ndarray:
        return np.flatnonzero(self._live_col)

    @property
    def n_live_rows(self) -> int:
        return int(self._live_row.sum())

    @property
    def n_live_cols(self) -> int:
        return int(self._live_col.sum())

    def row_counts(self) -> np.ndarray:
        """Live-column popcount of every row, indexed by row id (read-only)"""
        return self._row_count

    def col_counts(self) -> np.ndarray:
        """Live-row count of every column, indexed by column id (read-only)"""
        return self._col_count

    def live_row_flags(self) -> np.ndarray:
        return self._live_row

    def live_col_flags(self) -> np.ndarray:
        return self._live_col

    def row_count(self, row: int) -> int:
        """Live-column popcount of a row"""
        return int(self._row_count[row])

    def col_count(self, col: int) -> int:
        """Number of live rows covering a column"""
        return int(self._col_count[col])

    def live_cols_of_row(self, row: int) -> np.ndarray:
        cols = self._row_cols[row]
        return cols[self._live_col[cols]]

    def live_rows_of_col(self, col: int) -> np.ndarray:
        rows = self._col_rows[col]
        return rows[self._live_row[rows]]

    def cols_of_row(self, row: int) -> np.ndarray:
        return self._row_cols[row]

    def rows_of_col(self, col: int) -> np.ndarray:
        return self._col_rows[col]

    def live_col_mask(self) -> np.ndarray:
        """Packed mask of live columns, cached until the next reduction"""
        if self._live_col_mask is None:
            self._live_col_mask = pack_bits(self._live_col)
        return self._live_col_mask

    def live_row_mask(self) -> np.ndarray:
        if self._live_row_mask is None:
            self._live_row_mask = pack_bits(self._live_row)
        return self._live_row_mask

    def live_row_bitmasks(self) -> Dict[int, int]:
        """Row id -> live-column bitset as a Python int, for every live row"""
        live_mask = self.live_col_mask()
        return {
            row: int.from_bytes((self.rows[row] & live_mask).tobytes(), 'little')
            for row in self.live_row_ids().tolist()
        }

    @property
    def nonsingular_cols(self) -> FrozenSet[int]:
        """Columns covered by at least one row of the full matrix"""
        return frozenset(np.flatnonzero(self._covered).tolist())

    def nonsingular_col_ids(self) -> np.ndarray:
        return np.flatnonzero(self._covered)

    # -- reductions ---------------------------------------------------------

    def remove_rows(self, rows: Iterable[int]) -> None:
        for row in rows:
            if not self._live_row[row]:
                continue
            self._live_row[row] = False
            self._col_count[self._row_cols[row]] -= 1
        self._live_row_mask = None

    def remove_cols(self, cols: Iterable[int]) -> None:
        for col in cols:
            if not self._live_col[col]:
                continue
            self._live_col[col] = False
            self._row_count[self._col_rows[col]] -= 1
        self._live_col_mask = None

    def __repr__(self):
        return (f'<CoverageMatrix {self.n_rows}x{self.n_cols} '
                f'live {self.n_live_rows}x{self.n_live_cols}>')


def build_matrix(traces: Sequence[CoverageTrace], seeds: Sequence[SeedRecord],
                 scheme: WeightScheme = WeightScheme.UNWEIGHTED) -> CoverageMatrix:
    """
    Stack per-seed traces into a coverage matrix.

    Args:
        traces: One trace per seed, in seed-id order
        seeds: Seed records with ids 0..N-1
        scheme: Weight scheme used to resolve c_i

    Returns:
        CoverageMatrix with zero-coverage rows already dropped and recorded
    """
    if len(traces) != len(seeds):
        raise FormatError(f'{len(traces)} traces for {len(seeds)} seeds')
    for index, seed in enumerate(seeds):
        if seed.id != index:
            raise FormatError(f'seed at position {index} has id {seed.id}; ids must be contiguous')

    map_sizes = {trace.map_size for trace in traces}
    if len(map_sizes) > 1:
        raise FormatError(f'traces mix map sizes {sorted(map_sizes)}')
    map_size = map_sizes.pop() if map_sizes else DEFAULT_MAP_SIZE

    weights = resolve_weights(seeds, scheme)
    if traces:
        packed = np.stack([trace.bits for trace in traces])
    else:
        packed = np.zeros((0, packed_length(map_size)), dtype=np.uint8)

    matrix = CoverageMatrix(packed, map_size, weights, scheme)
    logger.info(
        f'Built {matrix.n_rows}x{matrix.n_cols} coverage matrix '
        f'({scheme.value} weights, {len(matrix.dropped_singular_rows)} zero-coverage seeds)'
    )
    return matrix


def union_coverage(matrix: CoverageMatrix, row_ids: Iterable[int]) -> np.ndarray:
    """
    Bitwise OR of the named rows' full bit vectors.

    Returns:
        Boolean vector of length ``matrix.n_cols``
    """
    ids = sorted(int(r) for r in row_ids)
    for row in ids:
        if row < 0 or row >= matrix.n_rows:
            raise IndexError(f'row id {row} outside 0..{matrix.n_rows - 1}')
    if not ids:
        return np.zeros(matrix.n_cols, dtype=bool)
    packed = np.bitwise_or.reduce(matrix.rows[ids], axis=0)
    return unpack_bits(packed, matrix.n_cols)
