#!/usr/bin/env python3
"""
Trace ingestion for the distillation toolkit

Parses afl-showmap text, converts it to bit-vector traces and bucketed
hit-count tuples, persists traces in the MLBV binary format, and turns a raw
seed directory into a deduplicated manifest.
"""

import logging
import os
import re
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from distiller.errors import FormatError, MissingTraceError, ParseError, TraceRangeError
from distiller.models import (
    DEFAULT_MAP_SIZE,
    CoverageTrace,
    SeedRecord,
    pack_bits,
    packed_length,
)
from distiller.utils.file_utils import hash_file, list_corpus_files, read_json_file, write_json_file

logger = logging.getLogger(__name__)

TRACE_MAGIC = b'MLBV'
TRACE_VERSION = 1
_HEADER = struct.Struct('<4sBI')

SHOWMAP_LINE_RE = re.compile(rb'^([0-9]{1,6}):([0-9]+)$')
SHA256_HEX_RE = re.compile(r'^[0-9a-f]{64}$')

# Upper bound (inclusive) of each hit-count bucket class 0..6; class 7 is 128+
BUCKET_BOUNDS = (1, 2, 3, 7, 15, 31, 127)


class ShowmapRecord(NamedTuple):
    """One ``edge:count`` line of afl-showmap output"""
    edge_id: int
    hit_count: int


def bucket(hit_count: int) -> int:
    """AFL's 8-class quantization of an edge hit count"""
    if hit_count < 1:
        raise FormatError(f'hit count must be positive, got {hit_count}')
    for bucket_class, upper in enumerate(BUCKET_BOUNDS):
        if hit_count <= upper:
            return bucket_class
    return 7


def parse_showmap(text: bytes, source: Optional[str] = None) -> List[ShowmapRecord]:
    """
    Parse afl-showmap text output.

    Args:
        text: Raw showmap bytes, one ``<edge>:<count>`` per line
        source: Optional file name used in error messages

    Returns:
        One record per non-empty line, in file order
    """
    records = []
    seen = set()
    for line_number, line in enumerate(text.split(b'\n'), start=1):
        if not line:
            continue
        match = SHOWMAP_LINE_RE.match(line)
        if not match:
            raise ParseError(f'malformed showmap line {line[:40]!r}', line_number, source)
        edge_id, hit_count = int(match.group(1)), int(match.group(2))
        if hit_count == 0:
            raise ParseError(f'edge {edge_id} has hit count 0', line_number, source)
        if edge_id in seen:
            raise ParseError(f'duplicate edge id {edge_id}', line_number, source)
        seen.add(edge_id)
        records.append(ShowmapRecord(edge_id, hit_count))
    return records


def render_showmap(records: Iterable[ShowmapRecord]) -> bytes:
    """Canonical showmap text: 6-digit zero-padded ids, LF terminated"""
    return b''.join(f'{r.edge_id:06d}:{r.hit_count}\n'.encode() for r in records)


def to_trace(records: Sequence[ShowmapRecord], map_size: int = DEFAULT_MAP_SIZE) -> CoverageTrace:
    """
    Convert showmap records into a coverage trace with cmin tuples.

    Raises:
        TraceRangeError: an edge id is not below ``map_size``
    """
    dense = np.zeros(map_size, dtype=bool)
    tuples = set()
    for record in records:
        if record.edge_id >= map_size:
            raise TraceRangeError(
                f'edge id {record.edge_id} out of range for map size {map_size}'
            )
        dense[record.edge_id] = True
        tuples.add((record.edge_id, bucket(record.hit_count)))
    return CoverageTrace(map_size, pack_bits(dense), frozenset(tuples))


def write_trace(trace: CoverageTrace, sink: BinaryIO) -> None:
    """Write a trace in MLBV binary form (bit vector only; tuples are dropped)"""
    sink.write(_HEADER.pack(TRACE_MAGIC, TRACE_VERSION, trace.map_size))
    sink.write(trace.bits.tobytes())


def read_trace(source: BinaryIO) -> CoverageTrace:
    """Read one MLBV binary trace"""
    header = source.read(_HEADER.size)
    if len(header) < _HEADER.size:
        raise FormatError('truncated trace header')
    magic, version, map_size = _HEADER.unpack(header)
    if magic != TRACE_MAGIC:
        raise FormatError(f'bad trace magic {magic!r}')
    if version != TRACE_VERSION:
        raise FormatError(f'unsupported trace version {version}')
    if map_size == 0:
        raise FormatError('trace map_size is zero')

    expected = packed_length(map_size)
    payload = source.read(expected)
    if len(payload) < expected:
        raise FormatError(f'truncated trace payload: {len(payload)} of {expected} bytes')
    if source.read(1):
        raise FormatError('trailing bytes after trace payload')

    bits = np.frombuffer(payload, dtype=np.uint8).copy()
    spare = expected * 8 - map_size
    if spare and bits[-1] >> (8 - spare):
        raise FormatError('padding bits beyond map_size are set')
    return CoverageTrace(map_size, bits)


def write_trace_file(trace: CoverageTrace, path: str) -> None:
    with open(path, 'wb') as f:
        write_trace(trace, f)


def read_trace_file(path: str) -> CoverageTrace:
    with open(path, 'rb') as f:
        return read_trace(f)


@dataclass
class Manifest:
    """
    Index of a preprocessed corpus.

    The counters are only populated by :func:`prep_corpus` and are not
    persisted.
    """
    entries: List[SeedRecord] = field(default_factory=list)
    skipped_unreadable: int = 0
    dropped_duplicates: int = 0
    dropped_oversize: int = 0

    def __len__(self):
        return len(self.entries)

    def to_list(self) -> List[dict]:
        return [seed.to_dict() for seed in self.entries]


def validate_manifest_entries(raw) -> List[SeedRecord]:
    """Check ids, paths and hashes of a decoded manifest document"""
    if not isinstance(raw, list):
        raise FormatError('manifest must be a JSON array')

    expected_keys = {'id', 'path', 'size_bytes', 'exec_time_us', 'sha256'}
    seeds, paths = [], set()
    for index, entry in enumerate(raw):
        if not isinstance(entry, dict) or set(entry) != expected_keys:
            raise FormatError(f'manifest entry {index} must have keys {sorted(expected_keys)}')
        if entry['id'] != index:
            raise FormatError(f'manifest entry {index} has id {entry["id"]}; ids must be contiguous')
        if entry['path'] in paths:
            raise FormatError(f'duplicate manifest path {entry["path"]}')
        if not isinstance(entry['size_bytes'], int) or entry['size_bytes'] < 0:
            raise FormatError(f'manifest entry {index} has invalid size_bytes')
        exec_time = entry['exec_time_us']
        if exec_time is not None and (not isinstance(exec_time, int) or exec_time < 0):
            raise FormatError(f'manifest entry {index} has invalid exec_time_us')
        if not isinstance(entry['sha256'], str) or not SHA256_HEX_RE.match(entry['sha256']):
            raise FormatError(f'manifest entry {index} has a malformed sha256')
        paths.add(entry['path'])
        seeds.append(SeedRecord.from_dict(entry))
    return seeds


def write_manifest(manifest: Manifest, path: str) -> None:
    write_json_file(path, manifest.to_list())


def read_manifest(path: str) -> Manifest:
    """Load and validate a manifest file"""
    success, data = read_json_file(path)
    if not success:
        raise FormatError(f'cannot read manifest {path}: {data}')
    return Manifest(entries=validate_manifest_entries(data))


def _stat_and_hash(path: str, max_size_bytes: int) -> Tuple[str, Optional[int], Optional[bytes], Optional[str]]:
    """Worker: (path, size, digest, error). Oversize files are not hashed."""
    try:
        size = os.path.getsize(path)
        if size > max_size_bytes:
            return path, size, None, None
        return path, size, hash_file(path), None
    except OSError as e:
        return path, None, None, str(e)


def prep_corpus(input_dir: str, max_size_bytes: int, workers: int = 4) -> Manifest:
    """
    Deduplicate and size-filter a raw corpus directory.

    Files are visited in lexicographic path order, so the first path of each
    content-hash class is the one kept and ids follow that order regardless
    of how the directory lists or how many hashing workers run.

    Args:
        input_dir: Directory holding candidate seeds (walked recursively)
        max_size_bytes: Largest file size kept
        workers: Hashing threads

    Returns:
        Manifest plus counters for skipped and dropped files
    """
    paths = list_corpus_files(input_dir)
    manifest = Manifest()

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda p: _stat_and_hash(p, max_size_bytes), paths))

    seen_hashes = set()
    for path, size, digest, error in results:
        if error is not None:
            logger.warning(f'Skipping unreadable seed {path}: {error}')
            manifest.skipped_unreadable += 1
            continue
        if size > max_size_bytes:
            manifest.dropped_oversize += 1
            continue
        if digest in seen_hashes:
            manifest.dropped_duplicates += 1
            continue
        seen_hashes.add(digest)
        manifest.entries.append(SeedRecord(
            id=len(manifest.entries),
            path=path,
            size_bytes=size,
            exec_time_us=None,
            content_hash=digest,
        ))

    logger.info(
        f'Prepared {len(manifest)} seeds from {len(paths)} files '
        f'({manifest.dropped_duplicates} duplicates, {manifest.dropped_oversize} oversize, '
        f'{manifest.skipped_unreadable} unreadable)'
    )
    return manifest


def canonicalize(seeds: Sequence[SeedRecord], traces: Sequence[CoverageTrace]
                 ) -> Tuple[List[SeedRecord], List[CoverageTrace]]:
    """Reorder seeds by path and reassign ids 0..N-1, carrying traces along"""
    order = sorted(range(len(seeds)), key=lambda i: seeds[i].path)
    new_seeds = [
        SeedRecord(new_id, seeds[i].path, seeds[i].size_bytes,
                   seeds[i].exec_time_us, seeds[i].content_hash)
        for new_id, i in enumerate(order)
    ]
    return new_seeds, [traces[i] for i in order]


def showmap_path(directory: str, seed_id: int) -> str:
    return os.path.join(directory, f'{seed_id}.showmap')


def trace_path(directory: str, seed_id: int) -> str:
    return os.path.join(directory, f'{seed_id}.mlbv')


def load_showmap_file(path: str, map_size: int) -> CoverageTrace:
    with open(path, 'rb') as f:
        text = f.read()
    return to_trace(parse_showmap(text, source=path), map_size)


def load_traces(manifest: Manifest, traces_dir: str,
                map_size: int = DEFAULT_MAP_SIZE) -> List[CoverageTrace]:
    """
    Load one trace per manifest entry.

    ``<id>.mlbv`` supplies the bit vector when present; ``<id>.showmap`` text,
    when present, supplies the cmin tuples (and the bits if no binary exists).

    Raises:
        MissingTraceError: some ids have neither file
        FormatError: a showmap and a binary trace of the same id disagree on edges
    """
    traces, missing = [], []
    for seed in manifest.entries:
        binary = trace_path(traces_dir, seed.id)
        text = showmap_path(traces_dir, seed.id)
        has_text = os.path.exists(text)
        if os.path.exists(binary):
            trace = read_trace_file(binary)
            if has_text:
                text_trace = load_showmap_file(text, trace.map_size)
                if not np.array_equal(text_trace.bits, trace.bits):
                    raise FormatError(f'{text}: edges differ from {binary}')
                trace = CoverageTrace(trace.map_size, trace.bits, text_trace.tuples)
        elif has_text:
            trace = load_showmap_file(text, map_size)
        else:
            missing.append(seed.id)
            continue
        traces.append(trace)

    if missing:
        raise MissingTraceError(missing)
    logger.info(f'Loaded {len(traces)} traces from {traces_dir}')
    return traces
