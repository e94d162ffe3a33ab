"""Shared fixtures: the five-seed example corpus, random instances and a
brute-force cover search used to cross-check the exact oracle."""

import itertools

import numpy as np
import pytest
from click.testing import CliRunner

from config import TestingConfig
from distill import create_cli
from distiller.models import CoverageMatrix, SeedRecord, WeightScheme

# Rows s1..s5, columns e1..e6
A0_DENSE = [
    [0, 0, 1, 0, 1, 0],
    [0, 1, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 1, 0],
    [1, 1, 0, 1, 1, 0],
]
A0_WEIGHTS = [10, 1, 2, 2, 100]


def make_seeds(sizes, exec_times=None):
    exec_times = exec_times or [None] * len(sizes)
    return [
        SeedRecord(id=i, path=f'corpus/s{i + 1}', size_bytes=size,
                   exec_time_us=exec_times[i], content_hash=bytes([i]) * 32)
        for i, size in enumerate(sizes)
    ]


def brute_force_optimum(dense, weights=None):
    """
    Minimum total weight over every subset of rows covering the
    non-singular columns. Returns (weight, smallest id tuple).
    """
    dense = np.asarray(dense, dtype=bool)
    n_rows = dense.shape[0]
    weights = weights or [1] * n_rows
    target = dense.any(axis=0)
    best = None
    for size in range(n_rows + 1):
        for ids in itertools.combinations(range(n_rows), size):
            covered = dense[list(ids)].any(axis=0) if ids else np.zeros_like(target)
            if np.array_equal(covered & target, target):
                key = (sum(weights[i] for i in ids), ids)
                if best is None or key < best:
                    best = key
    return best


@pytest.fixture
def a0():
    return CoverageMatrix.from_dense(A0_DENSE)


@pytest.fixture
def a0w():
    return CoverageMatrix.from_dense(A0_DENSE, A0_WEIGHTS, WeightScheme.SIZE)


@pytest.fixture
def a0_seeds():
    return make_seeds(A0_WEIGHTS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def cli():
    return create_cli(TestingConfig)


@pytest.fixture
def a0_corpus(tmp_path):
    """
    The example corpus on disk: seed files sized like A0_WEIGHTS and one
    showmap per seed, named in the order prep assigns ids.
    """
    corpus = tmp_path / 'corpus'
    showmaps = tmp_path / 'showmaps'
    corpus.mkdir()
    showmaps.mkdir()
    for i, (row, size) in enumerate(zip(A0_DENSE, A0_WEIGHTS)):
        (corpus / f's{i + 1}').write_bytes(bytes([65 + i]) * size)
        lines = ''.join(f'{edge:06d}:{edge + 1}\n' for edge, bit in enumerate(row) if bit)
        (showmaps / f'{i}.showmap').write_text(lines)
    return tmp_path


@pytest.fixture
def prepared_a0(a0_corpus, runner, cli):
    """A0 after prep and trace; returns the working directory"""
    manifest = str(a0_corpus / 'manifest.json')
    result = runner.invoke(cli, ['prep', '--in', str(a0_corpus / 'corpus'), '--out', manifest])
    assert result.exit_code == 0, result.stderr
    result = runner.invoke(cli, [
        'trace', '--manifest', manifest, '--showmap-dir', str(a0_corpus / 'showmaps'),
        '--out', str(a0_corpus / 'traces'), '--map-size', '8', '--keep-text',
    ])
    assert result.exit_code == 0, result.stderr
    return a0_corpus
