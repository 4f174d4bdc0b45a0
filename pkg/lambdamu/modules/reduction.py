"""Reduction module for the lambdamu workbench.

Redex enumeration, one-step β/μ/μ' contraction, traces and the deterministic
reduction strategies.
"""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from lambdamu.exceptions import BudgetExceededError, InvalidRedexError, InvalidTraceError
from lambdamu.models import RedexRefModel, RuleName, TraceModel
from lambdamu.modules.substitution import (
    rename_mu,
    subst_lambda,
    subst_mu_left,
    subst_mu_right,
)
from lambdamu.modules.terms import (
    App,
    Lam,
    Mu,
    Path,
    Selector,
    Term,
    all_names,
    canonical_key,
    free_vars,
    parse,
    print_term,
    replace_at,
    subterm_at,
    subterms,
)
from lambdamu.utils import fresh_name

logger = logging.getLogger(__name__)


class Rule(str, Enum):
    """The three contraction rules."""

    BETA = "beta"
    MU = "mu"
    MU_PRIME = "mu_prime"


class Strategy(str, Enum):
    """Redex selection strategies for :func:`normalize`."""

    LEFTMOST_OUTERMOST = "lo"
    RIGHTMOST_INNERMOST = "ri"
    RANDOM = "random"


@dataclass(frozen=True)
class RedexRef:
    """A redex occurrence: the path of the application and the rule to fire there."""

    path: Path
    rule: Rule

    def describe(self) -> str:
        """Short human-readable form, ``rule@Sel.Sel`` or ``rule@root``."""
        where = ".".join(s.value for s in self.path) or "root"
        return f"{self.rule.value}@{where}"


@dataclass(frozen=True)
class ReductionTrace:
    """A sequence of terms joined by one-step reductions."""

    terms: Tuple[Term, ...]
    steps: Tuple[RedexRef, ...] = field(default=())

    def __post_init__(self):
        if not self.terms:
            raise InvalidTraceError("A trace needs at least one term", 0)
        if len(self.steps) != len(self.terms) - 1:
            raise InvalidTraceError(
                f"{len(self.terms)} terms need {len(self.terms) - 1} steps, "
                f"got {len(self.steps)}"
            )

    @property
    def first(self) -> Term:
        """The source of the trace."""
        return self.terms[0]

    @property
    def last(self) -> Term:
        """The target of the trace."""
        return self.terms[-1]

    def __len__(self) -> int:
        return len(self.steps)

    def extend(self, redex: RedexRef, term: Term) -> "ReductionTrace":
        """Return a new trace with one more step."""
        return ReductionTrace(self.terms + (term,), self.steps + (redex,))


@dataclass(frozen=True)
class TraceCheck:
    """Result of :func:`validate_trace`; truthy when the trace replays."""

    ok: bool
    index: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _rules_at(node: Term) -> List[Rule]:
    if not isinstance(node, App):
        return []
    rules = []
    if isinstance(node.fun, Lam):
        rules.append(Rule.BETA)
    elif isinstance(node.fun, Mu):
        rules.append(Rule.MU)
    if isinstance(node.arg, Mu):
        rules.append(Rule.MU_PRIME)
    return rules


def redexes(t: Term) -> List[RedexRef]:
    """Enumerate all redex occurrences in preorder.

    At ``App(Mu, Mu)`` both the μ and the μ' redex are listed, μ first.

    Args:
        t: The term.

    Returns:
        The redex references.
    """
    return [
        RedexRef(path, rule) for path, node in subterms(t) for rule in _rules_at(node)
    ]


def is_normal(t: Term) -> bool:
    """Whether ``t`` has no redex."""
    return not redexes(t)


def contract(node: Term, rule: Rule) -> Term:
    """Contract a redex at the root of ``node``.

    Raises:
        InvalidRedexError: If ``node`` is not a redex for ``rule``.
    """
    if rule not in _rules_at(node):
        raise InvalidRedexError(
            f"{print_term(node)} is not a {rule.value} redex", {"rule": rule.value}
        )
    if rule == Rule.BETA:
        return subst_lambda(node.fun.body, node.fun.binder, node.arg)
    if rule == Rule.MU:
        binder, body, other = node.fun.binder, node.fun.body, node.arg
        if binder in free_vars(other)[1]:
            fresh = fresh_name(binder, all_names(body, other))
            binder, body = fresh, rename_mu(body, binder, fresh)
        return Mu(binder, subst_mu_right(body, binder, other))
    binder, body, other = node.arg.binder, node.arg.body, node.fun
    if binder in free_vars(other)[1]:
        fresh = fresh_name(binder, all_names(body, other))
        binder, body = fresh, rename_mu(body, binder, fresh)
    return Mu(binder, subst_mu_left(body, binder, other))


def step(t: Term, r: RedexRef) -> Term:
    """Fire the redex ``r`` in ``t``; the context is left unchanged.

    Args:
        t: The term.
        r: The redex to fire.

    Returns:
        The reduct.

    Raises:
        InvalidRedexError: If the path is invalid or the rule does not match.
    """
    try:
        node = subterm_at(t, r.path)
    except ValueError as e:
        raise InvalidRedexError(str(e), {"path": [s.value for s in r.path]})
    return replace_at(t, r.path, contract(node, r.rule))


def successors(t: Term) -> List[Tuple[RedexRef, Term]]:
    """Every one-step reduct of ``t`` with the redex that produced it."""
    return [(r, step(t, r)) for r in redexes(t)]


def select_redex(
    candidates: Sequence[RedexRef], strategy: Strategy, rng: random.Random
) -> RedexRef:
    """Pick the redex a strategy fires among the preorder-sorted candidates."""
    if strategy == Strategy.LEFTMOST_OUTERMOST:
        return candidates[0]
    if strategy == Strategy.RIGHTMOST_INNERMOST:
        return candidates[-1]
    return rng.choice(list(candidates))


def normalize(
    t: Term,
    strategy: Strategy = Strategy.LEFTMOST_OUTERMOST,
    max_steps: int = 10_000,
    seed: int = 0,
) -> Tuple[Term, ReductionTrace]:
    """Reduce with a strategy until the term is normal.

    Leftmost-outermost fires μ before μ' at ``App(Mu, Mu)``.

    Args:
        t: The term.
        strategy: Which redex to fire at each step.
        max_steps: The step budget.
        seed: Seed for the random strategy.

    Returns:
        The normal form and the trace leading to it.

    Raises:
        BudgetExceededError: If the term is not normal after ``max_steps`` steps;
            the partial trace is attached.
    """
    strategy = Strategy(strategy)
    rng = random.Random(seed)
    terms = [t]
    steps: List[RedexRef] = []
    current = t
    while True:
        candidates = redexes(current)
        if not candidates:
            logger.debug(f"Normal form reached after {len(steps)} steps")
            return current, ReductionTrace(tuple(terms), tuple(steps))
        if len(steps) >= max_steps:
            logger.info(f"Step budget of {max_steps} exhausted ({strategy.value})")
            raise BudgetExceededError(
                f"No normal form within {max_steps} steps",
                "steps",
                ReductionTrace(tuple(terms), tuple(steps)),
            )
        chosen = select_redex(candidates, strategy, rng)
        current = step(current, chosen)
        terms.append(current)
        steps.append(chosen)


def validate_trace(tr: ReductionTrace) -> TraceCheck:
    """Replay a trace step by step up to alpha.

    Returns:
        A truthy result when every step replays, otherwise the first failing index.
    """
    for index, redex in enumerate(tr.steps):
        try:
            reduct = step(tr.terms[index], redex)
        except InvalidRedexError as e:
            return TraceCheck(False, index, e.message)
        if canonical_key(reduct) != canonical_key(tr.terms[index + 1]):
            return TraceCheck(False, index, "reduct differs from the next term")
    return TraceCheck(True)


def trace_to_model(tr: ReductionTrace) -> TraceModel:
    """Convert a trace to its wire model."""
    return TraceModel(
        terms=[print_term(t) for t in tr.terms],
        steps=[
            RedexRefModel(path=[s.value for s in r.path], rule=RuleName(r.rule.value))
            for r in tr.steps
        ],
    )


def connect_terms(terms: Sequence[Term]) -> ReductionTrace:
    """Recover the redexes joining consecutive terms, the first match in preorder.

    Raises:
        InvalidTraceError: If two consecutive terms are not one step apart.
    """
    steps: List[RedexRef] = []
    for index, (current, following) in enumerate(zip(terms, terms[1:])):
        target = canonical_key(following)
        for redex in redexes(current):
            if canonical_key(step(current, redex)) == target:
                steps.append(redex)
                break
        else:
            raise InvalidTraceError(
                f"Terms {index} and {index + 1} are not one step apart", index
            )
    return ReductionTrace(tuple(terms), tuple(steps))


def trace_from_model(model: TraceModel) -> ReductionTrace:
    """Parse the terms of a wire trace.

    A trace file without steps gets them recovered with :func:`connect_terms`.

    Raises:
        TermSyntaxError: If a term does not parse.
        InvalidTraceError: If the step count does not match.
    """
    terms = tuple(parse(text) for text in model.terms)
    if not model.steps:
        return connect_terms(terms)
    return ReductionTrace(
        terms,
        tuple(
            RedexRef(tuple(Selector(s) for s in r.path), Rule(r.rule.value))
            for r in model.steps
        ),
    )


class ReductionModule:
    """Reduction module for the lambdamu workbench.

    This module provides redex enumeration, stepping and normalization.
    """

    def __init__(self, max_steps: int = 10_000, seed: int = 0):
        """Initialize the Reduction module.

        Args:
            max_steps: Default step budget of :meth:`normalize`.
            seed: Default seed of the random strategy.
        """
        self.max_steps = max_steps
        self.seed = seed

    def redexes(self, t: Term) -> List[RedexRef]:
        """Redex occurrences in preorder; see :func:`redexes`."""
        return redexes(t)

    def step(self, t: Term, r: RedexRef) -> Term:
        """Fire one redex; see :func:`step`."""
        return step(t, r)

    def successors(self, t: Term) -> List[Tuple[RedexRef, Term]]:
        """One-step neighborhood; see :func:`successors`."""
        return successors(t)

    def normalize(
        self,
        t: Term,
        strategy: Strategy = Strategy.LEFTMOST_OUTERMOST,
        max_steps: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> Tuple[Term, ReductionTrace]:
        """Normalize with the configured budget; see :func:`normalize`."""
        return normalize(
            t,
            strategy,
            self.max_steps if max_steps is None else max_steps,
            self.seed if seed is None else seed,
        )

    def validate_trace(self, tr: ReductionTrace) -> TraceCheck:
        """Replay a trace; see :func:`validate_trace`."""
        return validate_trace(tr)
