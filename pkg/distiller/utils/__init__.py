"""
Distillation toolkit
Utilities Package

This package contains file, formatting and task helpers shared by the
distillers and the command layer.
"""

from .file_utils import *
from .format_utils import *

__all__ = [
    'hash_file',
    'list_corpus_files',
    'read_json_file',
    'write_json_file',
    'copy_selected_files',
    'format_file_size',
    'format_duration',
    'format_number',
    'format_id_list',
]
