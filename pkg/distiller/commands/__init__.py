#!/usr/bin/env python3
"""
Commands package for the distillation toolkit

This package contains the click commands for each stage of the
pipeline: corpus preparation, distillation and analysis.
"""

from .corpus import prep, trace
from .distill import distill, compare
from .analysis import verify, stats

__all__ = ['prep', 'trace', 'distill', 'compare', 'verify', 'stats']
