"""Desk-scale statistics for bounded arithmetic functions: cancellation on
cylinders, short-interval variance, Wiener atoms, averaged Chowla
correlations, uniformity seminorms along subsequences, block-partition
exponential-sum statistics, a positive-correlation Markov coupling, and a
Cantor rigidity measure sampler."""

__version__ = "0.1.0"

from . import averaging, correlate, coupling, cylinders, momo, rigidity, seqgen, uniformity
from .averaging import AveragingScheme, ConvergenceReport, cesaro, logarithmic
from .errors import (
    BoundsError,
    OrtholabError,
    ParseError,
    ResourceLimitError,
    ValidationError,
)
from .seqgen import SequenceSample

__all__ = [
    "averaging", "correlate", "coupling", "cylinders", "momo", "rigidity",
    "seqgen", "uniformity",
    "AveragingScheme", "ConvergenceReport", "cesaro", "logarithmic",
    "SequenceSample",
    "OrtholabError", "ValidationError", "BoundsError", "ParseError",
    "ResourceLimitError",
    "__version__",
]
