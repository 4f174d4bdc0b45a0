"""Substitution module for the lambdamu workbench.

Capture-avoiding λ-substitution and the structural μ-substitutions: right
``M[a=r N]``, left ``N[a=l M]`` and the head-spine family ``M[a=i (M1 ... Mn)]``.
"""

from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Sequence, Tuple

from lambdamu.exceptions import SubstitutionError
from lambdamu.modules.terms import (
    App,
    Lam,
    Mu,
    Named,
    Term,
    Var,
    all_names,
    free_vars,
)
from lambdamu.utils import fresh_name

Rewrite = Callable[[Term], Term]


@dataclass(frozen=True)
class HeadSubstitutionEntry:
    """One component ``a =i (M1 ... Mn)`` of a simultaneous head substitution.

    Every ``[a] U`` becomes ``[a] (x M1 ... M(i-1) U M(i+1) ... Mn)``.
    """

    mu_var: str
    index: int
    head_var: str
    args: Tuple[Term, ...]

    def __post_init__(self):
        if not 1 <= self.index <= len(self.args):
            raise SubstitutionError(
                f"Index {self.index} is outside 1..{len(self.args)}",
                {"mu_var": self.mu_var},
            )

    def spine(self, u: Term) -> Term:
        """Build ``(x M1 ... U ... Mn)`` with ``U`` at position ``index``."""
        term: Term = Var(self.head_var)
        for position, arg in enumerate(self.args, start=1):
            term = App(term, u if position == self.index else arg)
        return term

    def inserted(self) -> Tuple[Term, ...]:
        """The terms this entry inserts around the named sub-terms."""
        return (Var(self.head_var),) + tuple(
            arg for position, arg in enumerate(self.args, start=1)
            if position != self.index
        )


def rename_lambda(t: Term, old: str, new: str) -> Term:
    """Rename free occurrences of the λ-variable ``old``; ``new`` must not occur in ``t``."""
    if isinstance(t, Var):
        return Var(new) if t.name == old else t
    if isinstance(t, Lam):
        if t.binder == old:
            return t
        return Lam(t.binder, rename_lambda(t.body, old, new))
    if isinstance(t, Mu):
        return Mu(t.binder, rename_lambda(t.body, old, new))
    if isinstance(t, Named):
        return Named(t.name, rename_lambda(t.body, old, new))
    return App(rename_lambda(t.fun, old, new), rename_lambda(t.arg, old, new))


def rename_mu(t: Term, old: str, new: str) -> Term:
    """Rename free naming tags ``old``; ``new`` must not occur in ``t``."""
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        return Lam(t.binder, rename_mu(t.body, old, new))
    if isinstance(t, Mu):
        if t.binder == old:
            return t
        return Mu(t.binder, rename_mu(t.body, old, new))
    if isinstance(t, Named):
        return Named(new if t.name == old else t.name, rename_mu(t.body, old, new))
    return App(rename_mu(t.fun, old, new), rename_mu(t.arg, old, new))


def _names_of(terms: Iterable[Term]) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    lams: FrozenSet[str] = frozenset()
    mus: FrozenSet[str] = frozenset()
    for t in terms:
        term_lams, term_mus = free_vars(t)
        lams |= term_lams
        mus |= term_mus
    return lams, mus


def _subst_var(
    m: Term, x: str, n: Term, lams: FrozenSet[str], mus: FrozenSet[str]
) -> Term:
    if isinstance(m, Var):
        return n if m.name == x else m
    if isinstance(m, App):
        return App(_subst_var(m.fun, x, n, lams, mus), _subst_var(m.arg, x, n, lams, mus))
    if isinstance(m, Named):
        return Named(m.name, _subst_var(m.body, x, n, lams, mus))
    if isinstance(m, Lam):
        if m.binder == x:
            return m
        binder, body = m.binder, m.body
        if binder in lams and x in free_vars(body)[0]:
            binder = fresh_name(binder, all_names(body, n) | {x})
            body = rename_lambda(body, m.binder, binder)
        return Lam(binder, _subst_var(body, x, n, lams, mus))
    binder, body = m.binder, m.body
    if binder in mus and x in free_vars(body)[0]:
        binder = fresh_name(binder, all_names(body, n))
        body = rename_mu(body, m.binder, binder)
    return Mu(binder, _subst_var(body, x, n, lams, mus))


def subst_lambda(m: Term, x: str, n: Term) -> Term:
    """Capture-avoiding ``M[x:=N]``.

    Args:
        m: The term to substitute into.
        x: The λ-variable to replace.
        n: The replacement.

    Returns:
        ``m`` with every free ``x`` replaced by ``n``; binders of ``m`` that would
        capture a free variable of ``n`` are renamed first.
    """
    if x not in free_vars(m)[0]:
        return m
    lams, mus = free_vars(n)
    return _subst_var(m, x, n, lams, mus)


def _structural(
    m: Term,
    rewrites: Dict[str, Rewrite],
    lams: FrozenSet[str],
    mus: FrozenSet[str],
    inserted: Sequence[Term],
) -> Term:
    if isinstance(m, Var):
        return m
    if isinstance(m, App):
        return App(
            _structural(m.fun, rewrites, lams, mus, inserted),
            _structural(m.arg, rewrites, lams, mus, inserted),
        )
    if isinstance(m, Named):
        body = _structural(m.body, rewrites, lams, mus, inserted)
        rewrite = rewrites.get(m.name)
        return Named(m.name, rewrite(body) if rewrite else body)
    if isinstance(m, Lam):
        binder, body = m.binder, m.body
        if binder in lams and rewrites.keys() & free_vars(body)[1]:
            binder = fresh_name(binder, all_names(body, *inserted) | set(rewrites))
            body = rename_lambda(body, m.binder, binder)
        return Lam(binder, _structural(body, rewrites, lams, mus, inserted))
    active = {name: rw for name, rw in rewrites.items() if name != m.binder}
    if not active:
        return m
    binder, body = m.binder, m.body
    if binder in mus and active.keys() & free_vars(body)[1]:
        binder = fresh_name(binder, all_names(body, *inserted) | set(active))
        body = rename_mu(body, m.binder, binder)
    return Mu(binder, _structural(body, active, lams, mus, inserted))


def _apply_structural(
    m: Term, rewrites: Dict[str, Rewrite], inserted: Sequence[Term]
) -> Term:
    if not rewrites.keys() & free_vars(m)[1]:
        return m
    lams, mus = _names_of(inserted)
    return _structural(m, rewrites, lams, mus, inserted)


def subst_mu_right(m: Term, a: str, n: Term) -> Term:
    """``M[a=r N]``: every ``[a] U`` becomes ``[a] (U' N)``.

    ``U'`` is ``U`` with the substitution already applied; the inserted application
    is not revisited.
    """
    return _apply_structural(m, {a: lambda u: App(u, n)}, (n,))


def subst_mu_left(n: Term, a: str, m: Term) -> Term:
    """``N[a=l M]``: every ``[a] U`` becomes ``[a] (M U')``."""
    return _apply_structural(n, {a: lambda u: App(m, u)}, (m,))


def subst_head(m: Term, entry: HeadSubstitutionEntry) -> Term:
    """``M[a=i (M1 ... Mn)]`` for a single head substitution entry."""
    return _apply_structural(m, {entry.mu_var: entry.spine}, entry.inserted())


def subst_simultaneous(m: Term, sigma: Sequence[HeadSubstitutionEntry]) -> Term:
    """Apply a simultaneous family of head substitutions in one traversal.

    Raises:
        SubstitutionError: If two entries share a μ-variable.
    """
    rewrites: Dict[str, Rewrite] = {}
    inserted = []
    for entry in sigma:
        if entry.mu_var in rewrites:
            raise SubstitutionError(
                f"μ-variable '{entry.mu_var}' appears twice", {"mu_var": entry.mu_var}
            )
        rewrites[entry.mu_var] = entry.spine
        inserted.extend(entry.inserted())
    if not rewrites:
        return m
    return _apply_structural(m, rewrites, inserted)


class SubstitutionModule:
    """Substitution module for the lambdamu workbench.

    This module provides the λ-substitution and the structural μ-substitutions.
    """

    def subst_lambda(self, m: Term, x: str, n: Term) -> Term:
        """``M[x:=N]``; see :func:`subst_lambda`."""
        return subst_lambda(m, x, n)

    def subst_mu_right(self, m: Term, a: str, n: Term) -> Term:
        """``M[a=r N]``; see :func:`subst_mu_right`."""
        return subst_mu_right(m, a, n)

    def subst_mu_left(self, n: Term, a: str, m: Term) -> Term:
        """``N[a=l M]``; see :func:`subst_mu_left`."""
        return subst_mu_left(n, a, m)

    def subst_head(self, m: Term, entry: HeadSubstitutionEntry) -> Term:
        """``M[a=i (M1 ... Mn)]``; see :func:`subst_head`."""
        return subst_head(m, entry)

    def subst_simultaneous(
        self, m: Term, sigma: Sequence[HeadSubstitutionEntry]
    ) -> Term:
        """Simultaneous head substitution; see :func:`subst_simultaneous`."""
        return subst_simultaneous(m, sigma)
