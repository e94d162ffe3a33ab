#!/usr/bin/env python3
"""
Corpus Distillation Toolkit

This package contains the coverage model, trace ingestion, the
MoonLight solver, baseline distillers and the exact oracle.
"""

__version__ = '1.0.0'
__description__ = 'Weighted and unweighted fuzzing corpus distillation'
