"""Tests for statistics, verification and the comparison table."""

import orjson
import pytest

from distiller.baselines import minset_unweighted, random_sample
from distiller.errors import VerificationError
from distiller.models import CoverageMatrix, Selection
from distiller.reporting import REPORT_COLUMNS, compare_report, corpus_stats, verify_cover
from distiller.solver import moonlight_distill


class TestCorpusStats:
    """Tests for corpus_stats."""

    def test_selection(self, a0_seeds):
        stats = corpus_stats(a0_seeds, Selection(chosen={0, 4}))
        assert (stats.file_count, stats.total_size_bytes) == (2, 110)
        assert stats.mean_size_bytes == 55.0

    def test_whole_corpus(self, a0_seeds):
        stats = corpus_stats(a0_seeds)
        assert (stats.file_count, stats.total_size_bytes) == (5, 115)

    def test_edges_covered(self, a0_seeds, a0):
        assert corpus_stats(a0_seeds, Selection(chosen={4}), a0).edges_covered == 4

    def test_empty_selection(self, a0_seeds):
        stats = corpus_stats(a0_seeds, Selection(chosen=set()))
        assert (stats.file_count, stats.total_size_bytes, stats.mean_size_bytes) == (0, 0, 0.0)

    def test_unknown_id(self, a0_seeds):
        with pytest.raises(IndexError):
            corpus_stats(a0_seeds, Selection(chosen={9}))


class TestVerifyCover:
    """Tests for verify_cover."""

    def test_optimal_cover(self, a0):
        assert verify_cover(a0, Selection(chosen={0, 4})).ok

    def test_missing_column(self, a0):
        verdict = verify_cover(a0, Selection(chosen={4}))
        assert not verdict.ok
        assert verdict.missing == frozenset({2})

    def test_vacuous(self):
        matrix = CoverageMatrix.from_dense([[0, 0]])
        assert verify_cover(matrix, Selection(chosen=set())).ok


class TestCompareReport:
    """Tests for compare_report."""

    def test_csv_rows(self, a0, a0_seeds):
        results = [('moonlight', moonlight_distill(a0)), ('minset', minset_unweighted(a0))]
        csv_text = compare_report(results, a0_seeds, a0, include_timing=False).to_csv()
        lines = csv_text.split('\n')
        assert lines[0] == ','.join(REPORT_COLUMNS)
        assert lines[0].startswith('algo,files,bytes,cost')
        assert lines[1] == 'moonlight,2,110,0,1,2,1,0,0,0,true'
        assert lines[2] == 'minset,2,110,0,0,0,0,0,0,0,true'
        assert lines[3] == ''

    def test_refuses_lossy_selection(self, a0, a0_seeds):
        with pytest.raises(VerificationError) as excinfo:
            compare_report([('broken', Selection(chosen={4}))], a0_seeds, a0)
        assert excinfo.value.missing == frozenset({2})

    def test_random_is_exempt(self, a0, a0_seeds):
        sample = random_sample(a0_seeds, 1, rng_seed=0)
        table = compare_report([('random', sample)], a0_seeds, a0)
        assert table.rows[0]['coverage_ok'] in (True, False)
        assert table.rows[0]['files'] == 1

    def test_json(self, a0, a0_seeds):
        table = compare_report([('moonlight', moonlight_distill(a0))], a0_seeds, a0,
                               include_timing=False)
        rows = orjson.loads(table.to_json())
        assert rows[0]['algo'] == 'moonlight'
        assert rows[0]['coverage_ok'] is True
        assert rows[0]['wall_ms'] == 0
