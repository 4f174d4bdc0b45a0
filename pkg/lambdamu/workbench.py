"""lambdamu workbench."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from lambdamu.modules.analysis import AnalysisModule
from lambdamu.modules.catalog import CatalogModule
from lambdamu.modules.reduction import ReductionModule
from lambdamu.modules.standardization import StandardizationModule
from lambdamu.modules.substitution import SubstitutionModule
from lambdamu.modules.terms import TermsModule
from lambdamu.modules.typecheck import TypingModule
from lambdamu.utils import ensure_recursion_limit

logger = logging.getLogger(__name__)


class Workbench(
    TermsModule,
    SubstitutionModule,
    ReductionModule,
    TypingModule,
    AnalysisModule,
    CatalogModule,
    StandardizationModule,
):
    """lambdamu workbench.

    Inherits from all module classes to provide a unified interface. The one shared
    resource is the executor the claim suite runs on.
    """

    def __init__(
        self,
        max_steps: int = 10_000,
        max_nodes: int = 1_000_000,
        max_term_size: int = 2000,
        seed: int = 0,
        scout_steps: int = 400,
        max_workers: Optional[int] = None,
        executor: Optional[ThreadPoolExecutor] = None,
    ):
        """Initialize the workbench.

        Args:
            max_steps: Step budget of normalization.
            max_nodes: Node budget of graph exploration.
            max_term_size: Terms with more symbols are not expanded.
            seed: Seed of every random choice.
            scout_steps: Length of the cycle scouts.
            max_workers: Worker count of the executor the workbench creates.
            executor: An existing executor to use instead.
        """
        ensure_recursion_limit()
        self.max_workers = max_workers
        self._owned_executor = executor is None
        if executor is None:
            executor = ThreadPoolExecutor(max_workers=max_workers)
        ReductionModule.__init__(self, max_steps, seed)
        AnalysisModule.__init__(self, max_nodes, max_term_size, scout_steps, seed)
        CatalogModule.__init__(self, max_nodes, max_term_size, scout_steps, seed, executor)
        self._closed = False

    async def __aenter__(self):
        """Enter the async context manager."""
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb):
        """Exit the async context manager."""
        await self.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.shutdown()

    def shutdown(self):
        """Release the executor if the workbench created it."""
        if self._owned_executor and not self._closed:
            logger.debug("Shutting down the workbench executor")
            self._executor.shutdown(wait=True)
        self._closed = True

    async def close(self):
        """Close the workbench."""
        self.shutdown()
