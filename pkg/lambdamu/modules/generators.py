"""Seeded random terms for the property suites.

Untyped terms draw λ-names from ``x y z w`` and μ-names from ``a b c`` so the two
namespaces never meet; typed terms are built goal-first against
``p : A, q : B, v : _|_`` with globally fresh binders.
"""

import random
from typing import List, Optional, Sequence, Tuple

from lambdamu.modules.terms import App, Lam, Mu, Named, Term, Var, cxty
from lambdamu.modules.typecheck import BOTTOM, Arrow, Atom, Context, SimpleType

LAMBDA_NAMES = ("x", "y", "z", "w")
MU_NAMES = ("a", "b", "c")

ATOM_A = Atom("A")
ATOM_B = Atom("B")
TYPED_CONTEXT = Context({"p": ATOM_A, "q": ATOM_B, "v": BOTTOM}, {})

_MAX_ATTEMPTS = 1000


class TermGenerator:
    """Random λμ-terms from one seeded ``random.Random``.

    Args:
        seed: The seed; equal seeds give equal sequences of terms.
        redex_bias: Probability of building an application as a redex.
    """

    def __init__(self, seed: int = 0, redex_bias: float = 0.4):
        self.rng = random.Random(seed)
        self.redex_bias = redex_bias
        self._counter = 0

    def term(self, max_cxty: int = 12, pure: bool = False, closed: bool = False) -> Term:
        """A random term with at most ``max_cxty`` nodes.

        Args:
            max_cxty: Size bound.
            pure: Only variables, abstractions and applications.
            closed: No free variables of either kind.
        """
        size = self.rng.randint(1, max_cxty)
        return self._untyped(size, (), (), pure, closed)

    def terms(self, count: int, max_cxty: int = 12, pure: bool = False) -> List[Term]:
        """``count`` random terms."""
        return [self.term(max_cxty, pure) for _ in range(count)]

    def _var(self, lams: Sequence[str], closed: bool) -> Optional[Term]:
        if lams and (closed or self.rng.random() < 0.7):
            return Var(self.rng.choice(lams))
        if closed:
            return None
        return Var(self.rng.choice(LAMBDA_NAMES))

    def _tag(self, mus: Sequence[str], closed: bool) -> Optional[str]:
        if mus and (closed or self.rng.random() < 0.8):
            return self.rng.choice(mus)
        if closed:
            return None
        return self.rng.choice(MU_NAMES)

    def _untyped(
        self,
        size: int,
        lams: Tuple[str, ...],
        mus: Tuple[str, ...],
        pure: bool,
        closed: bool,
    ) -> Term:
        if size <= 1:
            leaf = self._var(lams, closed)
            if leaf is not None:
                return leaf
            return Lam("x", Var("x"))
        kinds = ["lam", "app", "app"]
        if not pure:
            kinds += ["mu", "named"]
        kind = self.rng.choice(kinds)
        if kind == "lam":
            x = self.rng.choice(LAMBDA_NAMES)
            return Lam(x, self._untyped(size - 1, lams + (x,), mus, pure, closed))
        if kind == "mu":
            a = self.rng.choice(MU_NAMES)
            return Mu(a, self._untyped(size - 1, lams, mus + (a,), pure, closed))
        if kind == "named":
            tag = self._tag(mus, closed)
            if tag is not None:
                return Named(tag, self._untyped(size - 1, lams, mus, pure, closed))
        if size < 3:
            return self._untyped(1, lams, mus, pure, closed)
        left = self.rng.randint(1, size - 2)
        right = size - 1 - left
        fun = self._untyped(left, lams, mus, pure, closed)
        arg = self._untyped(right, lams, mus, pure, closed)
        if self.rng.random() < self.redex_bias:
            if left >= 2 and (pure or self.rng.random() < 0.5):
                x = self.rng.choice(LAMBDA_NAMES)
                fun = Lam(x, self._untyped(left - 1, lams + (x,), mus, pure, closed))
            elif not pure and left >= 2:
                a = self.rng.choice(MU_NAMES)
                fun = Mu(a, self._untyped(left - 1, lams, mus + (a,), pure, closed))
            elif not pure and right >= 2:
                b = self.rng.choice(MU_NAMES)
                arg = Mu(b, self._untyped(right - 1, lams, mus + (b,), pure, closed))
        return App(fun, arg)

    def spine(self, head: str, args: Sequence[Term]) -> Term:
        """``(head M1 ... Mn)``."""
        term: Term = Var(head)
        for arg in args:
            term = App(term, arg)
        return term

    def _fresh(self, prefix: str) -> str:
        self._counter += 1
        return f"{prefix}{self._counter}"

    def _type(self, depth: int = 2) -> SimpleType:
        if depth == 0 or self.rng.random() < 0.5:
            return self.rng.choice((ATOM_A, ATOM_B, BOTTOM))
        return Arrow(self._type(depth - 1), self._type(depth - 1))

    def typed(self, max_cxty: int = 25) -> Tuple[Context, Term, SimpleType]:
        """A random well-typed term in :data:`TYPED_CONTEXT`.

        Returns:
            The context, the term and the type it was generated at.
        """
        for _ in range(_MAX_ATTEMPTS):
            goal = self._type()
            term = self._typed(TYPED_CONTEXT, goal, self.rng.randint(2, max_cxty))
            if cxty(term) <= max_cxty:
                return TYPED_CONTEXT, term, goal
        return TYPED_CONTEXT, Var("p"), ATOM_A

    def _typed(self, ctx: Context, goal: SimpleType, size: int) -> Term:
        """Goal-directed construction; ``μa.v`` closes any goal when size runs out."""
        matching = [name for name, ty in ctx.lam.items() if ty == goal]
        if size <= 1:
            if matching:
                return Var(self.rng.choice(matching))
            if isinstance(goal, Arrow):
                x = self._fresh("x")
                return Lam(x, self._typed(ctx.with_lam(x, goal.domain), goal.codomain, 0))
            if goal == BOTTOM:
                return Var("v")
            return Mu(self._fresh("a"), Var("v"))
        choice = self.rng.random()
        if matching and choice < 0.15:
            return Var(self.rng.choice(matching))
        if isinstance(goal, Arrow) and choice < 0.45:
            x = self._fresh("x")
            return Lam(x, self._typed(ctx.with_lam(x, goal.domain), goal.codomain, size - 1))
        if goal == BOTTOM and ctx.mu and choice < 0.6:
            tag = self.rng.choice(sorted(ctx.mu))
            return Named(tag, self._typed(ctx, ctx.mu[tag], size - 1))
        if choice < 0.7 and size >= 3:
            return self._typed_redex(ctx, goal, size)
        if choice < 0.85:
            a = self._fresh("a")
            return Mu(a, self._typed(ctx.with_mu(a, goal), BOTTOM, size - 1))
        if size >= 3:
            domain = self._type(1)
            half = (size - 1) // 2
            return App(
                self._typed(ctx, Arrow(domain, goal), half),
                self._typed(ctx, domain, size - 1 - half),
            )
        return self._typed(ctx, goal, 1)

    def _typed_redex(self, ctx: Context, goal: SimpleType, size: int) -> Term:
        domain = self._type(1)
        half = (size - 1) // 2
        flavour = self.rng.choice(("beta", "mu", "mu_prime"))
        if flavour == "beta":
            x = self._fresh("x")
            body = self._typed(ctx.with_lam(x, domain), goal, half - 1)
            return App(Lam(x, body), self._typed(ctx, domain, size - 1 - half))
        if flavour == "mu":
            a = self._fresh("a")
            body = self._typed(ctx.with_mu(a, Arrow(domain, goal)), BOTTOM, half - 1)
            return App(Mu(a, body), self._typed(ctx, domain, size - 1 - half))
        b = self._fresh("a")
        fun = self._typed(ctx, Arrow(domain, goal), half)
        body = self._typed(ctx.with_mu(b, domain), BOTTOM, size - 2 - half)
        return App(fun, Mu(b, body))
