"""Quadratic non-residues in short intervals, Beatty and Piatetski-Shapiro sequences.

Desk-scale computations around the Burgess exponent 1/(4 sqrt e): character
sums and non-residue densities, least non-residues along Beatty sequences
floor(alpha n + beta) and Piatetski-Shapiro sequences floor(n^c), and the
supporting machinery (continued fractions, exponential sums, discrepancy,
exponent pairs).
"""

__version__ = "0.1.0"

from .errors import DomainError, PrecisionError, QnrError, ResourceError  # noqa: E402

__all__ = ["DomainError", "PrecisionError", "QnrError", "ResourceError", "__version__"]
