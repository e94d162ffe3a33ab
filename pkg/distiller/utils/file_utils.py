"""
Distillation toolkit - File Utilities

This module contains utility functions for file operations,
including corpus listing, content hashing, JSON persistence and
copying selected seeds out of a corpus.
"""

import hashlib
import logging
import os
import shutil
from collections import Counter
from typing import Dict, Iterable, List, Tuple

import orjson

logger = logging.getLogger(__name__)

HASH_CHUNK_SIZE = 1 << 20


def hash_file(file_path):
    """
    SHA-256 digest of a file's content.

    Args:
        file_path (str): Path to the file

    Returns:
        bytes: 32-byte digest
    """
    digest = hashlib.sha256()
    with open(file_path, 'rb') as f:
        for chunk in iter(lambda: f.read(HASH_CHUNK_SIZE), b''):
            digest.update(chunk)
    return digest.digest()


def list_corpus_files(directory: str) -> List[str]:
    """
    Every regular file under a directory, sorted by path.

    Raises:
        NotADirectoryError / FileNotFoundError / PermissionError when the
        directory itself cannot be read
    """
    if not os.path.isdir(directory):
        raise NotADirectoryError(f'{directory} is not a directory')
    os.listdir(directory)

    paths = []
    for root, dirs, files in os.walk(directory, onerror=_raise_walk_error(directory)):
        for name in files:
            path = os.path.join(root, name)
            if os.path.isfile(path):
                paths.append(path)
    return sorted(paths)


def _raise_walk_error(top):
    def onerror(error):
        if getattr(error, 'filename', None) == top:
            raise error
        logger.warning(f'Cannot list {error.filename}: {error}')
    return onerror


def read_json_file(file_path):
    """
    Read and parse a JSON file.

    Args:
        file_path (str): Path to the JSON file

    Returns:
        tuple: (success, data_or_error_message)
    """
    try:
        with open(file_path, 'rb') as f:
            data = orjson.loads(f.read())
        return True, data
    except orjson.JSONDecodeError as e:
        return False, f"Invalid JSON format: {str(e)}"
    except FileNotFoundError:
        return False, "File not found"
    except Exception as e:
        return False, f"Error reading file: {str(e)}"


def write_json_file(file_path, data):
    """
    Write data to a JSON file with stable key order and indentation.

    Args:
        file_path (str): Path to the JSON file
        data: Data to write (must be JSON serializable)
    """
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(file_path, 'wb') as f:
        f.write(orjson.dumps(data, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS))
        f.write(b'\n')


def copy_selected_files(entries: Iterable[Tuple[int, str]], destination: str) -> Dict[int, str]:
    """
    Copy selected seeds into a directory, keeping their file names.

    Names that collide among the selection get an ``<id>_`` prefix.

    Args:
        entries: (seed id, source path) pairs
        destination: Target directory (created if missing)

    Returns:
        dict: seed id -> copied path
    """
    entries = sorted(entries)
    os.makedirs(destination, exist_ok=True)
    name_counts = Counter(os.path.basename(path) for _, path in entries)

    copied = {}
    for seed_id, path in entries:
        name = os.path.basename(path)
        if name_counts[name] > 1:
            name = f'{seed_id}_{name}'
        target = os.path.join(destination, name)
        shutil.copyfile(path, target)
        copied[seed_id] = target

    logger.info(f'Copied {len(copied)} seeds to {destination}')
    return copied
