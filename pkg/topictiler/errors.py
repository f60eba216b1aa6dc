"""Exception hierarchy for topictiler.

Data problems (bad input files, impossible requests against loaded
resources) derive from ``TopicTilerError``; usage and configuration
problems derive from ``ConfigError``. The command line maps the first
family to exit code 2 and the second to exit code 1.
"""

from typing import Optional


class TopicTilerError(ValueError):
    """Base class for all data errors raised by topictiler"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number  # 1-based line of the offending record, if any
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ConfigError(Exception):
    """Invalid command-line or config-file settings"""


class LexiconError(TopicTilerError):
    """Malformed lexicon record or inflection rule"""


class TaxonomyError(TopicTilerError):
    """Malformed or inconsistent concept hierarchy"""


class CycleError(TaxonomyError):
    def __init__(self, cycle):
        self.cycle = list(cycle)  # list of (super, sub) edges
        path = " -> ".join(sub for _, sub in self.cycle)
        super().__init__(f"cycle detected in taxonomy: {path}")


class DuplicateConceptError(TaxonomyError):
    pass


class UnknownConceptError(TaxonomyError):
    pass


class OrphanConceptError(TaxonomyError):
    """Concept has no path to any root"""


class NothingToExtract(TopicTilerError):
    """Bag of concepts is empty after filtering"""


class InvalidCutError(TopicTilerError):
    pass


class OracleRefusal(TopicTilerError):
    """Brute-force enumeration requested on a non-tree or oversized DAG"""


class EvaluationError(TopicTilerError):
    pass


class SegmentationMismatch(EvaluationError):
    """Two segmentations cover different word counts"""


class UndefinedScoreError(EvaluationError):
    """Precision or recall requested over an empty concept list"""
