"""
Distillation toolkit - Format Utilities

This module contains utility functions for formatting sizes, counts
and id lists for terminal output.
"""

import logging
from typing import Iterable

logger = logging.getLogger(__name__)


def format_file_size(size_bytes):
    """
    Format file size in human-readable format.

    Args:
        size_bytes (int): Size in bytes

    Returns:
        str: Formatted size string (e.g., "1.5 KiB")
    """
    if size_bytes == 0:
        return "0 B"

    size_names = ["B", "KiB", "MiB", "GiB", "TiB"]
    i = 0
    size = float(size_bytes)

    while size >= 1024 and i < len(size_names) - 1:
        size /= 1024.0
        i += 1

    if i == 0:
        return f"{int(size)} B"
    return f"{size:.1f} {size_names[i]}"


def format_duration(milliseconds):
    """
    Format a duration for display.

    Args:
        milliseconds (float): Duration in milliseconds

    Returns:
        str: e.g. "850 ms", "12.4 s", "3m 05s"
    """
    if milliseconds < 1000:
        return f"{milliseconds:.0f} ms"
    seconds = milliseconds / 1000.0
    if seconds < 60:
        return f"{seconds:.1f} s"
    minutes, seconds = divmod(int(seconds), 60)
    return f"{minutes}m {seconds:02d}s"


def format_number(number):
    """Integers with thousands separators, other numbers to two places"""
    if number is None:
        return "N/A"
    if float(number) == int(number):
        return f"{int(number):,}"
    return f"{number:,.2f}"


def format_id_list(ids: Iterable[int], limit: int = 50) -> str:
    """
    Comma-separated ascending ids, truncated after ``limit`` entries.

    Args:
        ids: Column or seed ids
        limit: Maximum number of ids spelled out

    Returns:
        str: e.g. "2, 7, 9" or "2, 7, ... (+120 more)"
    """
    ordered = sorted(ids)
    shown = ', '.join(str(i) for i in ordered[:limit])
    if len(ordered) > limit:
        shown += f', ... (+{len(ordered) - limit} more)'
    return shown
