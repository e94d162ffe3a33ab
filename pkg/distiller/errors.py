#!/usr/bin/env python3
"""
Error taxonomy for the distillation toolkit

Library code raises these; only the command layer turns them into exit
codes and user-facing messages.
"""


class DistillError(Exception):
    """Base class for every error the toolkit reports to the user"""
    exit_code = 1


class ConfigurationError(DistillError):
    """Bad flags or settings"""
    exit_code = 2


class FormatError(DistillError):
    """Malformed trace, manifest or selection data"""
    exit_code = 3


class ParseError(FormatError):
    """A showmap line that does not match ``<edge>:<count>``"""

    def __init__(self, message, line_number=None, source=None):
        self.line_number = line_number
        self.source = source
        location = ''
        if source is not None:
            location += f'{source}'
        if line_number is not None:
            location += f'{":" if location else "line "}{line_number}'
        super().__init__(f'{location}: {message}' if location else message)


class TraceRangeError(FormatError):
    """An edge id outside ``[0, map_size)``"""


class MissingTraceError(FormatError):
    """One or more manifest ids have no trace file"""

    def __init__(self, missing_ids):
        self.missing_ids = sorted(missing_ids)
        listed = ', '.join(str(i) for i in self.missing_ids)
        super().__init__(f'missing trace for seed id(s): {listed}')


class PreconditionError(DistillError):
    """A distiller was asked to run on input it cannot handle"""
    exit_code = 4


class WeightError(PreconditionError):
    """A resolved seed weight is not strictly positive"""


class MissingWeightError(WeightError):
    """TIME weighting requested but a seed has no execution time"""


class OracleLimitError(PreconditionError):
    """Exact search refused because the matrix has too many live rows"""


class TupleDataError(PreconditionError):
    """cmin needs bucketed hit-count tuples, which only text traces carry"""


class SampleSizeError(PreconditionError, ValueError):
    """Random sample size outside ``[1, N]``"""


class VerificationError(DistillError):
    """A selection does not preserve the corpus coverage"""
    exit_code = 5

    def __init__(self, message, missing=()):
        self.missing = frozenset(missing)
        super().__init__(message)
