"""lambdamu workbench.

Terms, reduction, typing, strong-normalization analysis and standardization for the
symmetric λμ-calculus.
"""

from lambdamu.workbench import Workbench

__version__ = "0.1.0"
__all__ = ["Workbench"]
