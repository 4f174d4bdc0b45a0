"""lambdamu workbench modules."""

from lambdamu.modules.analysis import AnalysisModule
from lambdamu.modules.catalog import CatalogModule
from lambdamu.modules.reduction import ReductionModule
from lambdamu.modules.standardization import StandardizationModule
from lambdamu.modules.substitution import SubstitutionModule
from lambdamu.modules.terms import TermsModule
from lambdamu.modules.typecheck import TypingModule

__all__ = [
    "TermsModule",
    "SubstitutionModule",
    "ReductionModule",
    "TypingModule",
    "AnalysisModule",
    "CatalogModule",
    "StandardizationModule",
]
