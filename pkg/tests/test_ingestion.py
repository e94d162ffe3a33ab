"""Tests for showmap parsing, MLBV traces, manifests and corpus preparation."""

import io

import numpy as np
import pytest

from distiller.errors import FormatError, MissingTraceError, ParseError, TraceRangeError
from distiller.ingestion import (
    Manifest,
    ShowmapRecord,
    bucket,
    canonicalize,
    load_traces,
    parse_showmap,
    prep_corpus,
    read_manifest,
    read_trace,
    read_trace_file,
    render_showmap,
    to_trace,
    write_manifest,
    write_trace,
    write_trace_file,
)
from distiller.models import CoverageTrace, SeedRecord, pack_bits
from distiller.utils.ingestion import start_trace_conversion


class TestParseShowmap:
    """Tests for parse_showmap."""

    def test_padded_and_unpadded(self):
        records = parse_showmap(b'000012:3\n7:1\n')
        assert records == [ShowmapRecord(12, 3), ShowmapRecord(7, 1)]

    def test_empty_input(self):
        assert parse_showmap(b'') == []

    @pytest.mark.parametrize('text,line', [
        (b'1:1\nabc\n', 2),
        (b'1:1\n2:1\n3\n', 3),
        (b'1234567:1\n', 1),
        (b'-1:4\n', 1),
        (b'5: 2\n', 1),
    ])
    def test_malformed_line_number(self, text, line):
        with pytest.raises(ParseError) as excinfo:
            parse_showmap(text)
        assert excinfo.value.line_number == line

    def test_duplicate_edge(self):
        with pytest.raises(ParseError) as excinfo:
            parse_showmap(b'4:1\n4:2\n', source='3.showmap')
        assert str(excinfo.value).startswith('3.showmap:2:')

    def test_zero_count(self):
        with pytest.raises(ParseError):
            parse_showmap(b'4:0\n')

    def test_render_is_canonical(self):
        assert render_showmap(parse_showmap(b'3:2\n000010:200\n')) == b'000003:2\n000010:200\n'


class TestBuckets:
    """Tests for hit-count bucketing."""

    @pytest.mark.parametrize('count,expected', [
        (1, 0), (2, 1), (3, 2), (4, 3), (7, 3), (8, 4), (15, 4),
        (16, 5), (31, 5), (32, 6), (127, 6), (128, 7), (10 ** 6, 7),
    ])
    def test_class_boundaries(self, count, expected):
        assert bucket(count) == expected


class TestToTrace:
    """Tests for to_trace."""

    def test_bits_and_tuples(self):
        trace = to_trace([ShowmapRecord(0, 1), ShowmapRecord(9, 40)], map_size=16)
        assert trace.edges().tolist() == [0, 9]
        assert trace.tuples == frozenset({(0, 0), (9, 6)})

    def test_edge_out_of_range(self):
        with pytest.raises(TraceRangeError):
            to_trace([ShowmapRecord(5000, 1)], map_size=4096)

    def test_last_edge_in_range(self):
        trace = to_trace([ShowmapRecord(4095, 1)], map_size=4096)
        assert trace.edges().tolist() == [4095]


class TestBinaryTrace:
    """Tests for the MLBV binary format."""

    def _bytes(self, trace):
        buffer = io.BytesIO()
        write_trace(trace, buffer)
        return buffer.getvalue()

    def test_header_layout(self):
        data = self._bytes(CoverageTrace.from_edges([0], map_size=10))
        assert data[:4] == b'MLBV'
        assert data[4] == 1
        assert int.from_bytes(data[5:9], 'little') == 10
        assert data[9:] == b'\x01\x00'

    @pytest.mark.parametrize('map_size', [1, 8, 13, 4096])
    def test_boundary_vectors(self, map_size):
        for bits in (np.zeros(map_size, dtype=bool), np.ones(map_size, dtype=bool)):
            trace = CoverageTrace(map_size, pack_bits(bits))
            assert read_trace(io.BytesIO(self._bytes(trace))) == trace

    def test_random_vectors(self, rng, tmp_path):
        for i in range(100):
            map_size = int(rng.integers(1, 2000))
            trace = CoverageTrace(map_size, pack_bits(rng.random(map_size) < 0.3))
            path = str(tmp_path / f'{i}.mlbv')
            write_trace_file(trace, path)
            assert read_trace_file(path) == trace

    def test_bad_magic(self):
        data = bytearray(self._bytes(CoverageTrace.empty(8)))
        data[:4] = b'XXXX'
        with pytest.raises(FormatError, match='magic'):
            read_trace(io.BytesIO(bytes(data)))

    def test_truncated_payload(self):
        data = self._bytes(CoverageTrace.empty(64))
        with pytest.raises(FormatError, match='truncated'):
            read_trace(io.BytesIO(data[:-1]))

    def test_trailing_bytes(self):
        data = self._bytes(CoverageTrace.empty(8)) + b'\x00'
        with pytest.raises(FormatError, match='trailing'):
            read_trace(io.BytesIO(data))

    def test_padding_bits_set(self):
        data = bytearray(self._bytes(CoverageTrace.empty(10)))
        data[-1] = 0b00000100
        with pytest.raises(FormatError, match='padding'):
            read_trace(io.BytesIO(bytes(data)))

    def test_unsupported_version(self):
        data = bytearray(self._bytes(CoverageTrace.empty(8)))
        data[4] = 2
        with pytest.raises(FormatError, match='version'):
            read_trace(io.BytesIO(bytes(data)))


class TestManifest:
    """Tests for manifest persistence and validation."""

    def test_round_trip(self, tmp_path):
        manifest = Manifest(entries=[
            SeedRecord(0, 'a', 5, None, b'\x01' * 32),
            SeedRecord(1, 'b', 7, 120, b'\x02' * 32),
        ])
        path = str(tmp_path / 'manifest.json')
        write_manifest(manifest, path)
        assert read_manifest(path).entries == manifest.entries

    def test_stable_bytes(self, tmp_path):
        manifest = Manifest(entries=[SeedRecord(0, 'a', 5, None, b'\x01' * 32)])
        first, second = tmp_path / 'm1.json', tmp_path / 'm2.json'
        write_manifest(manifest, str(first))
        write_manifest(manifest, str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_gap_in_ids(self, tmp_path):
        path = tmp_path / 'manifest.json'
        path.write_text('[{"id": 1, "path": "a", "size_bytes": 1, '
                        '"exec_time_us": null, "sha256": "' + '0' * 64 + '"}]')
        with pytest.raises(FormatError, match='contiguous'):
            read_manifest(str(path))

    def test_not_json(self, tmp_path):
        path = tmp_path / 'manifest.json'
        path.write_text('{not json')
        with pytest.raises(FormatError):
            read_manifest(str(path))


class TestPrepCorpus:
    """Tests for prep_corpus."""

    def test_dedup_keeps_first_path(self, tmp_path):
        (tmp_path / 'b').write_bytes(b'same')
        (tmp_path / 'a').write_bytes(b'same')
        (tmp_path / 'c').write_bytes(b'other')
        manifest = prep_corpus(str(tmp_path), max_size_bytes=100)
        assert [s.path.rsplit('/', 1)[-1] for s in manifest.entries] == ['a', 'c']
        assert [s.id for s in manifest.entries] == [0, 1]
        assert manifest.dropped_duplicates == 1

    def test_size_cutoff_inclusive(self, tmp_path):
        (tmp_path / 'small').write_bytes(b'x' * 10)
        (tmp_path / 'big').write_bytes(b'y' * 11)
        manifest = prep_corpus(str(tmp_path), max_size_bytes=10)
        assert [s.size_bytes for s in manifest.entries] == [10]
        assert manifest.dropped_oversize == 1

    def test_empty_directory(self, tmp_path):
        assert len(prep_corpus(str(tmp_path), 100)) == 0

    def test_worker_count_does_not_change_ids(self, tmp_path):
        for i in range(20):
            (tmp_path / f'seed{i:02d}').write_bytes(bytes([i]) * (i + 1))
        one = prep_corpus(str(tmp_path), 100, workers=1)
        many = prep_corpus(str(tmp_path), 100, workers=8)
        assert one.entries == many.entries


class TestLoadTraces:
    """Tests for trace loading and conversion."""

    def _manifest(self, n):
        return Manifest(entries=[SeedRecord(i, f's{i}', 1, None, bytes([i]) * 32) for i in range(n)])

    def test_missing_ids_listed(self, tmp_path):
        (tmp_path / '0.showmap').write_text('1:1\n')
        with pytest.raises(MissingTraceError) as excinfo:
            load_traces(self._manifest(3), str(tmp_path), 8)
        assert excinfo.value.missing_ids == [1, 2]

    def test_binary_with_text_tuples(self, tmp_path):
        showmaps, traces = tmp_path / 'showmaps', tmp_path / 'traces'
        showmaps.mkdir()
        (showmaps / '0.showmap').write_text('3:9\n')
        (showmaps / '1.showmap').write_text('')
        stats = start_trace_conversion(self._manifest(2), str(showmaps), str(traces), 8,
                                       workers=2, keep_text=True)
        assert stats['converted'] == 2
        assert stats['empty_traces'] == 1

        loaded = load_traces(self._manifest(2), str(traces), 8)
        assert loaded[0].edges().tolist() == [3]
        assert loaded[0].tuples == frozenset({(3, 4)})
        assert loaded[1].popcount == 0

    def test_text_and_binary_must_agree(self, tmp_path):
        showmaps, traces = tmp_path / 'showmaps', tmp_path / 'traces'
        showmaps.mkdir()
        (showmaps / '0.showmap').write_text('3:9\n')
        start_trace_conversion(self._manifest(1), str(showmaps), str(traces), 8, keep_text=True)
        (traces / '0.showmap').write_text('3:9\n5:1\n')

        with pytest.raises(FormatError) as excinfo:
            load_traces(self._manifest(1), str(traces), 8)
        assert '0.showmap' in str(excinfo.value)

    def test_conversion_checks_presence_first(self, tmp_path):
        with pytest.raises(MissingTraceError):
            start_trace_conversion(self._manifest(1), str(tmp_path), str(tmp_path / 'out'), 8)
        assert not (tmp_path / 'out').exists()

    def test_conversion_reports_range_error(self, tmp_path):
        (tmp_path / '0.showmap').write_text('5000:1\n')
        with pytest.raises(TraceRangeError):
            start_trace_conversion(self._manifest(1), str(tmp_path), str(tmp_path / 'out'), 4096)


class TestCanonicalize:
    """Tests for canonicalize."""

    def test_sorted_by_path(self):
        seeds = [SeedRecord(0, 'z', 1), SeedRecord(1, 'a', 2)]
        traces = [CoverageTrace.from_edges([0], 8), CoverageTrace.from_edges([1], 8)]
        new_seeds, new_traces = canonicalize(seeds, traces)
        assert [(s.id, s.path) for s in new_seeds] == [(0, 'a'), (1, 'z')]
        assert new_traces[0].edges().tolist() == [1]
