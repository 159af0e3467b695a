"""fxrange: guaranteed range analysis and overflow/underflow-free
fixed-point bit-width allocation for online sequential ELM datapaths."""

from .affine import AffineForm, AnalysisContext, Interval
from .analysis import RangeReport, analyze
from .bitwidth import FixedPointFormat, allocate, integer_bits, mult_count, storage_cost

__all__ = [
    "AffineForm",
    "AnalysisContext",
    "Interval",
    "RangeReport",
    "analyze",
    "FixedPointFormat",
    "allocate",
    "integer_bits",
    "mult_count",
    "storage_cost",
]

__version__ = "0.1.0"
