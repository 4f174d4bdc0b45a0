"""Standardization module for the lambdamu workbench.

A reduction sequence is standard when it decomposes by one of these clauses:

* every term has the same outer λ, μ, naming or ``(x _)`` and the inner sequence is
  standard (``lambda``, ``mu``, ``named``, ``var-app``);
* the function part reduces first, then the argument part (``app-split``);
* the head reduces until it first becomes a λ (resp. μ), with the other side of the
  application fixed, and then the head redex fires (``beta-head``, ``mu-head``,
  ``mu-prime-head``), the remainder being standard.

``is_standard`` searches these decompositions. ``standardize`` rearranges any
reduction into a standard one through standard trees, whose flattening is standard
by construction, and then certifies the result with ``is_standard``.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Set, Tuple, Union

from lambdamu.exceptions import InvalidRedexError, InvalidTraceError, NotStandardError
from lambdamu.models import CertificateModel, ClauseModel
from lambdamu.modules.reduction import (
    RedexRef,
    ReductionTrace,
    Rule,
    contract,
    step,
    trace_to_model,
    validate_trace,
)
from lambdamu.modules.substitution import (
    rename_lambda,
    rename_mu,
    subst_lambda,
    subst_mu_left,
    subst_mu_right,
)
from lambdamu.modules.terms import (
    App,
    Lam,
    Mu,
    Named,
    Path,
    Selector,
    Term,
    Var,
    all_names,
    canonical_key,
    free_vars,
    print_term,
    subterm_at,
)
from lambdamu.utils import fresh_name

logger = logging.getLogger(__name__)


class Clause(str, Enum):
    """The decomposition clauses of a standard sequence."""

    LENGTH_ONE = "length-one"
    LAMBDA = "lambda"
    MU = "mu"
    NAMED = "named"
    VAR_APP = "var-app"
    APP_SPLIT = "app-split"
    BETA_HEAD = "beta-head"
    MU_HEAD = "mu-head"
    MU_PRIME_HEAD = "mu-prime-head"


_FIRING = {
    Clause.BETA_HEAD: (Rule.BETA, Selector.APP_FUN, Lam),
    Clause.MU_HEAD: (Rule.MU, Selector.APP_FUN, Mu),
    Clause.MU_PRIME_HEAD: (Rule.MU_PRIME, Selector.APP_ARG, Mu),
}


@dataclass(frozen=True)
class ClauseNode:
    """One node of a standardness certificate.

    The node certifies the terms ``start..end`` of the trace, looked at through
    ``focus``; ``split`` is the end of the head or function phase.
    """

    clause: Clause
    start: int
    end: int
    focus: Path
    split: Optional[int] = None
    children: Tuple["ClauseNode", ...] = ()

    def to_model(self) -> ClauseModel:
        """The nested JSON form."""
        return ClauseModel(
            clause=self.clause.value,
            start=self.start,
            end=self.end,
            focus=[s.value for s in self.focus],
            split=self.split,
            children=[child.to_model() for child in self.children],
        )

    @classmethod
    def from_model(cls, model: ClauseModel) -> "ClauseNode":
        """Rebuild a node from its JSON form."""
        return cls(
            Clause(model.clause),
            model.start,
            model.end,
            tuple(Selector(s) for s in model.focus),
            model.split,
            tuple(cls.from_model(child) for child in model.children),
        )


@dataclass(frozen=True)
class StandardCertificate:
    """A standard trace with the decomposition that proves it standard."""

    trace: ReductionTrace
    root: ClauseNode

    def to_model(self) -> CertificateModel:
        """The JSON form."""
        return CertificateModel(trace=trace_to_model(self.trace), root=self.root.to_model())


def lg(tr: ReductionTrace) -> int:
    """Number of steps of a trace."""
    return len(tr.terms) - 1


ChildSpec = Tuple[int, int, Path]


class _Checker:
    """Clause search over a replayed trace, memoized on (start, end, focus).

    Every clause checks the recorded redexes as well as the terms: a phase at a
    path owns exactly the steps fired under that path.
    """

    def __init__(self, terms: Tuple[Term, ...], steps: Tuple[RedexRef, ...]):
        self.terms = terms
        self.steps = steps
        self._subterms: Dict[Tuple[int, Path], Term] = {}
        self._keys: Dict[Tuple[int, Path], str] = {}
        self._memo: Dict[ChildSpec, Optional[ClauseNode]] = {}
        self.deepest: Optional[ChildSpec] = None

    def at(self, i: int, focus: Path) -> Term:
        cached = self._subterms.get((i, focus))
        if cached is None:
            cached = subterm_at(self.terms[i], focus)
            self._subterms[(i, focus)] = cached
        return cached

    def key(self, i: int, focus: Path) -> str:
        cached = self._keys.get((i, focus))
        if cached is None:
            cached = canonical_key(self.at(i, focus))
            self._keys[(i, focus)] = cached
        return cached

    def under(self, s: int, e: int, path: Path) -> bool:
        """Whether the steps ``s..e-1`` all fire inside ``path``."""
        return all(self.steps[i].path[: len(path)] == path for i in range(s, e))

    def candidates(
        self, s: int, e: int, focus: Path
    ) -> Iterator[Tuple[Clause, Optional[int], Tuple[ChildSpec, ...]]]:
        """Every clause whose local conditions hold, with the sub-problems it needs."""
        if s == e:
            yield Clause.LENGTH_ONE, None, ()
            return
        span = range(s, e + 1)
        first = self.at(s, focus)
        wrappers = (
            (Lam, Clause.LAMBDA, Selector.LAM_BODY, "binder"),
            (Mu, Clause.MU, Selector.MU_BODY, "binder"),
            (Named, Clause.NAMED, Selector.NAMED_BODY, "name"),
        )
        for kind, clause, selector, attr in wrappers:
            if (
                isinstance(first, kind)
                and self.under(s, e, focus + (selector,))
                and all(
                    isinstance(self.at(i, focus), kind)
                    and getattr(self.at(i, focus), attr) == getattr(first, attr)
                    for i in span
                )
            ):
                yield clause, None, ((s, e, focus + (selector,)),)
        if not isinstance(first, App):
            return
        fun_path = focus + (Selector.APP_FUN,)
        arg_path = focus + (Selector.APP_ARG,)
        for clause, (rule, selector, head_kind) in _FIRING.items():
            head_path, other_path = (
                (fun_path, arg_path) if selector == Selector.APP_FUN else (arg_path, fun_path)
            )
            yield from self._firing(s, e, focus, clause, rule, head_path, other_path, head_kind)
        # The remaining clauses keep the application at every term.
        if not all(isinstance(self.at(i, focus), App) for i in span):
            return
        if (
            isinstance(first.fun, Var)
            and self.under(s, e, arg_path)
            and all(self.at(i, focus).fun == first.fun for i in span)
        ):
            yield Clause.VAR_APP, None, ((s, e, arg_path),)
        for k in span:
            if not (self.under(s, k, fun_path) and self.under(k, e, arg_path)):
                continue
            if all(self.key(i, arg_path) == self.key(k, arg_path) for i in range(s, k + 1)) and all(
                self.key(i, fun_path) == self.key(k, fun_path) for i in range(k, e + 1)
            ):
                yield Clause.APP_SPLIT, k, ((s, k, fun_path), (k, e, arg_path))

    def _firing(self, s, e, focus, clause, rule, head_path, other_path, head_kind):
        # The head phase may stop at k only while the other side stays fixed.
        other = self.key(s, other_path)
        for k in range(s, e):
            if not isinstance(self.at(k, focus), App) or self.key(k, other_path) != other:
                return
            if self.steps[k] != RedexRef(focus, rule):
                if self.steps[k].path[: len(head_path)] != head_path:
                    return
                continue
            # The head redex fires once, as soon as the head has the right shape.
            if (
                isinstance(self.at(k, head_path), head_kind)
                and not (k > s and isinstance(self.at(k - 1, head_path), head_kind))
                and canonical_key(contract(self.at(k, focus), rule)) == self.key(k + 1, focus)
            ):
                yield clause, k, ((s, k, head_path), (k + 1, e, focus))
            return

    def std(self, s: int, e: int, focus: Path) -> Optional[ClauseNode]:
        spec = (s, e, focus)
        if spec in self._memo:
            return self._memo[spec]
        self._memo[spec] = None
        found = None
        for clause, split, children_specs in self.candidates(s, e, focus):
            children = []
            for child_spec in children_specs:
                child = self.std(*child_spec)
                if child is None:
                    break
                children.append(child)
            else:
                found = ClauseNode(clause, s, e, focus, split, tuple(children))
                break
        if found is None and (
            self.deepest is None
            or (len(focus), e - s) > (len(self.deepest[2]), self.deepest[1] - self.deepest[0])
        ):
            self.deepest = spec
        self._memo[spec] = found
        return found

    def verify(self, node: ClauseNode) -> bool:
        if not (0 <= node.start <= node.end < len(self.terms)):
            return False
        try:
            candidates = list(self.candidates(node.start, node.end, node.focus))
        except ValueError:
            return False
        specs = tuple((c.start, c.end, c.focus) for c in node.children)
        if (node.clause, node.split, specs) not in candidates:
            return False
        return all(self.verify(child) for child in node.children)


def _replay(tr: ReductionTrace) -> ReductionTrace:
    """Re-derive every term by stepping, so bound names stay put along the trace.

    Raises:
        InvalidTraceError: If a step does not lead to the next term up to alpha.
    """
    terms = [tr.terms[0]]
    for index, redex in enumerate(tr.steps):
        try:
            reduct = step(terms[-1], redex)
        except InvalidRedexError as exc:
            raise InvalidTraceError(f"Step {index} does not replay: {exc}", index) from exc
        if canonical_key(reduct) != canonical_key(tr.terms[index + 1]):
            raise InvalidTraceError(f"Step {index} does not replay", index)
        terms.append(reduct)
    return ReductionTrace(tuple(terms), tr.steps)


def is_standard(tr: ReductionTrace) -> StandardCertificate:
    """Find a decomposition of the trace into the standard clauses.

    Args:
        tr: A trace that replays.

    Returns:
        The certificate over the replayed trace.

    Raises:
        InvalidTraceError: If the trace does not replay.
        NotStandardError: If no decomposition exists; the deepest undecomposable
            slice is named in the message.
    """
    replayed = _replay(tr)
    checker = _Checker(replayed.terms, replayed.steps)
    root = checker.std(0, len(replayed.terms) - 1, ())
    if root is None:
        s, e, focus = checker.deepest
        where = ".".join(sel.value for sel in focus) or "root"
        raise NotStandardError(
            f"Not standard: no clause covers terms {s}..{e} at {where}",
            {"start": s, "end": e, "focus": [sel.value for sel in focus]},
        )
    return StandardCertificate(replayed, root)


def verify_certificate(cert: StandardCertificate) -> bool:
    """Check a certificate node by node against its trace."""
    if not validate_trace(cert.trace):
        return False
    root = cert.root
    if (root.start, root.end, root.focus) != (0, len(cert.trace.terms) - 1, ()):
        return False
    return _Checker(cert.trace.terms, cert.trace.steps).verify(root)


@dataclass(frozen=True)
class Leaf:
    """A one-term standard sequence."""

    term: Term


@dataclass(frozen=True)
class Wrap:
    """A standard sequence under a fixed λ, μ or naming."""

    kind: str
    name: str
    body: "Tree"


@dataclass(frozen=True)
class Split:
    """Function phase, then argument phase."""

    fun: "Tree"
    arg: "Tree"


@dataclass(frozen=True)
class Fire:
    """Head phase against a fixed ``other`` side, the head redex, then ``rest``.

    For μ' the head is the argument and ``other`` the function.
    """

    rule: Rule
    head: "Tree"
    other: Term
    rest: "Tree"


Tree = Union[Leaf, Wrap, Split, Fire]

_WRAP_SELECTOR = {
    "lam": Selector.LAM_BODY,
    "mu": Selector.MU_BODY,
    "named": Selector.NAMED_BODY,
}


def _wrap_term(kind: str, name: str, body: Term) -> Term:
    if kind == "lam":
        return Lam(name, body)
    if kind == "mu":
        return Mu(name, body)
    return Named(name, body)


def _head_app(rule: Rule, head: Term, other: Term) -> Term:
    return App(other, head) if rule == Rule.MU_PRIME else App(head, other)


def start(tree: Tree) -> Term:
    """First term of the sequence."""
    if isinstance(tree, Leaf):
        return tree.term
    if isinstance(tree, Wrap):
        return _wrap_term(tree.kind, tree.name, start(tree.body))
    if isinstance(tree, Split):
        return App(start(tree.fun), start(tree.arg))
    return _head_app(tree.rule, start(tree.head), tree.other)


def end(tree: Tree) -> Term:
    """Last term of the sequence."""
    if isinstance(tree, Leaf):
        return tree.term
    if isinstance(tree, Wrap):
        return _wrap_term(tree.kind, tree.name, end(tree.body))
    if isinstance(tree, Split):
        return App(end(tree.fun), end(tree.arg))
    return end(tree.rest)


def length(tree: Tree) -> int:
    """Number of steps of the sequence."""
    if isinstance(tree, Leaf):
        return 0
    if isinstance(tree, Wrap):
        return length(tree.body)
    if isinstance(tree, Split):
        return length(tree.fun) + length(tree.arg)
    return length(tree.head) + 1 + length(tree.rest)


def flatten(tree: Tree) -> List[Term]:
    """All terms of the sequence in order."""
    if isinstance(tree, Leaf):
        return [tree.term]
    if isinstance(tree, Wrap):
        return [_wrap_term(tree.kind, tree.name, t) for t in flatten(tree.body)]
    if isinstance(tree, Split):
        arg0 = start(tree.arg)
        fun_end = end(tree.fun)
        return [App(f, arg0) for f in flatten(tree.fun)] + [
            App(fun_end, a) for a in flatten(tree.arg)[1:]
        ]
    heads = [_head_app(tree.rule, h, tree.other) for h in flatten(tree.head)]
    return heads + flatten(tree.rest)


def take(tree: Tree, j: int) -> Tree:
    """The standard sequence of the first ``j`` steps."""
    if isinstance(tree, Leaf):
        return tree
    if isinstance(tree, Wrap):
        return Wrap(tree.kind, tree.name, take(tree.body, j))
    if isinstance(tree, Split):
        fun_steps = length(tree.fun)
        if j <= fun_steps:
            return Split(take(tree.fun, j), Leaf(start(tree.arg)))
        return Split(tree.fun, take(tree.arg, j - fun_steps))
    head_steps = length(tree.head)
    if j <= head_steps:
        head = take(tree.head, j)
        other = Leaf(tree.other)
        return Split(other, head) if tree.rule == Rule.MU_PRIME else Split(head, other)
    return Fire(tree.rule, tree.head, tree.other, take(tree.rest, j - head_steps - 1))


def drop(tree: Tree, j: int) -> Tree:
    """The standard sequence after the first ``j`` steps."""
    if isinstance(tree, Leaf):
        return tree
    if isinstance(tree, Wrap):
        return Wrap(tree.kind, tree.name, drop(tree.body, j))
    if isinstance(tree, Split):
        fun_steps = length(tree.fun)
        if j <= fun_steps:
            return Split(drop(tree.fun, j), tree.arg)
        return Split(Leaf(end(tree.fun)), drop(tree.arg, j - fun_steps))
    head_steps = length(tree.head)
    if j <= head_steps:
        return Fire(tree.rule, drop(tree.head, j), tree.other, tree.rest)
    return drop(tree.rest, j - head_steps - 1)


def _names_in(tree: Tree) -> Set[str]:
    if isinstance(tree, Leaf):
        return all_names(tree.term)
    if isinstance(tree, Wrap):
        return {tree.name} | _names_in(tree.body)
    if isinstance(tree, Split):
        return _names_in(tree.fun) | _names_in(tree.arg)
    return _names_in(tree.head) | all_names(tree.other) | _names_in(tree.rest)


def rename_tree(tree: Tree, namespace: str, old: str, new: str) -> Tree:
    """Rename free ``old`` to ``new`` in every term; ``new`` must be unused in the tree."""
    rename = rename_lambda if namespace == "lam" else rename_mu
    if isinstance(tree, Leaf):
        return Leaf(rename(tree.term, old, new))
    if isinstance(tree, Wrap):
        if tree.kind == namespace and tree.name == old:
            return tree
        name = new if namespace == "mu" and tree.kind == "named" and tree.name == old else tree.name
        return Wrap(tree.kind, name, rename_tree(tree.body, namespace, old, new))
    if isinstance(tree, Split):
        return Split(
            rename_tree(tree.fun, namespace, old, new),
            rename_tree(tree.arg, namespace, old, new),
        )
    return Fire(
        tree.rule,
        rename_tree(tree.head, namespace, old, new),
        rename(tree.other, old, new),
        rename_tree(tree.rest, namespace, old, new),
    )


@dataclass(frozen=True)
class TreeSubstitution:
    """A substitution whose inserted term reduces along a standard tree.

    ``kind`` is ``lambda`` for ``[x:=U]``, ``right`` for ``[a=r U]`` and ``left`` for
    ``[a=l U]``.
    """

    kind: str
    var: str
    tree: Tree

    def fixed(self) -> "TreeSubstitution":
        """The same substitution with the inserted term frozen at its start."""
        return TreeSubstitution(self.kind, self.var, Leaf(start(self.tree)))

    def apply(self, t: Term) -> Term:
        """Apply to a term, inserting the start of the tree."""
        inserted = start(self.tree)
        if self.kind == "lambda":
            return subst_lambda(t, self.var, inserted)
        if self.kind == "right":
            return subst_mu_right(t, self.var, inserted)
        return subst_mu_left(t, self.var, inserted)

    def touches(self, t: Term) -> bool:
        """Whether the substituted variable is free in ``t``."""
        lams, mus = free_vars(t)
        return self.var in (lams if self.kind == "lambda" else mus)


def _expand(t: Term) -> Tree:
    """One level of structure as a zero-step tree."""
    if isinstance(t, Lam):
        return Wrap("lam", t.binder, Leaf(t.body))
    if isinstance(t, Mu):
        return Wrap("mu", t.binder, Leaf(t.body))
    if isinstance(t, Named):
        return Wrap("named", t.name, Leaf(t.body))
    if isinstance(t, App):
        return Split(Leaf(t.fun), Leaf(t.arg))
    return Leaf(t)


def subst_tree(tree: Tree, sigma: TreeSubstitution) -> Tree:
    """Lift a substitution over two standard sequences.

    From ``M ▷st P`` (``tree``) and ``N ▷st Q`` (``sigma.tree``) build a standard
    sequence from ``M[σ N]`` to ``P[σ Q]``.
    """
    if not sigma.touches(start(tree)):
        return tree
    if isinstance(tree, Leaf):
        t = tree.term
        if sigma.kind == "lambda" and isinstance(t, Var):
            return sigma.tree
        if length(sigma.tree) == 0:
            return Leaf(sigma.apply(t))
        return subst_tree(_expand(t), sigma)
    if isinstance(tree, Wrap):
        if tree.kind == "named":
            inner = subst_tree(tree.body, sigma)
            if sigma.kind != "lambda" and tree.name == sigma.var:
                if sigma.kind == "right":
                    inner = Split(inner, sigma.tree)
                else:
                    inner = Split(sigma.tree, inner)
            return Wrap("named", tree.name, inner)
        lams, mus = free_vars(start(sigma.tree))
        captured = lams if tree.kind == "lam" else mus
        name, body = tree.name, tree.body
        if name in captured:
            name = fresh_name(name, _names_in(body) | _names_in(sigma.tree) | {sigma.var})
            body = rename_tree(body, tree.kind, tree.name, name)
        return Wrap(tree.kind, name, subst_tree(body, sigma))
    if isinstance(tree, Split):
        return Split(subst_tree(tree.fun, sigma), subst_tree(tree.arg, sigma))
    return Fire(
        tree.rule,
        subst_tree(tree.head, sigma.fixed()),
        sigma.apply(tree.other),
        subst_tree(tree.rest, sigma),
    )


def _unwrap(tree: Tree, kind: str) -> Tuple[str, Tree]:
    """Binder and body tree of a sequence whose terms all start with ``kind``."""
    if isinstance(tree, Wrap) and tree.kind == kind:
        return tree.name, tree.body
    if isinstance(tree, Leaf):
        wrapped = _expand(tree.term)
        if isinstance(wrapped, Wrap) and wrapped.kind == kind:
            return wrapped.name, wrapped.body
    raise NotStandardError(f"Sequence does not stay under a {kind} binder")


def _first_headed(tree: Tree, kind: type) -> int:
    for index, t in enumerate(flatten(tree)):
        if isinstance(t, kind):
            return index
    raise NotStandardError(f"Sequence never reaches a {kind.__name__}-headed term")


def _fire_at_root(tree: Split, rule: Rule) -> Tree:
    """Absorb a head redex at the root of ``(N1 N2)`` reached by ``tree``."""
    if rule == Rule.MU_PRIME:
        phase, fixed, kind, side = tree.arg, tree.fun, Mu, "left"
    else:
        phase, fixed = tree.fun, tree.arg
        kind = Lam if rule == Rule.BETA else Mu
        side = "lambda" if rule == Rule.BETA else "right"
    cut = _first_headed(phase, kind)
    head = take(phase, cut)
    binder, body = _unwrap(drop(phase, cut), "lam" if kind is Lam else "mu")
    if kind is Mu and binder in free_vars(start(fixed))[1]:
        fresh = fresh_name(binder, _names_in(body) | _names_in(fixed))
        body = rename_tree(body, "mu", binder, fresh)
        binder = fresh
    rest = subst_tree(body, TreeSubstitution(side, binder, fixed))
    if kind is Mu:
        rest = Wrap("mu", binder, rest)
    return Fire(rule, head, start(fixed), rest)


def absorb(tree: Tree, redex: RedexRef) -> Tree:
    """Extend a standard tree by one step from its last term.

    Args:
        tree: A standard tree ending in ``P``.
        redex: A redex of ``P``.

    Returns:
        A standard tree from the same first term to the reduct.

    Raises:
        InvalidRedexError: If the redex does not fit the last term.
    """
    if isinstance(tree, Leaf):
        if isinstance(tree.term, Var):
            raise InvalidRedexError(f"No redex in {print_term(tree.term)}")
        return absorb(_expand(tree.term), redex)
    if isinstance(tree, Fire):
        return Fire(tree.rule, tree.head, tree.other, absorb(tree.rest, redex))
    if isinstance(tree, Wrap):
        if not redex.path or redex.path[0] != _WRAP_SELECTOR[tree.kind]:
            raise InvalidRedexError(f"Redex {redex.describe()} is not under the {tree.kind}")
        inner = RedexRef(redex.path[1:], redex.rule)
        return Wrap(tree.kind, tree.name, absorb(tree.body, inner))
    if redex.path:
        inner = RedexRef(redex.path[1:], redex.rule)
        if redex.path[0] == Selector.APP_FUN:
            return Split(absorb(tree.fun, inner), tree.arg)
        if redex.path[0] == Selector.APP_ARG:
            return Split(tree.fun, absorb(tree.arg, inner))
        raise InvalidRedexError(f"Redex {redex.describe()} does not fit an application")
    contract(App(end(tree.fun), end(tree.arg)), redex.rule)
    return _fire_at_root(tree, redex.rule)


def _within(selector: Selector, steps: List[RedexRef]) -> List[RedexRef]:
    return [RedexRef((selector,) + r.path, r.rule) for r in steps]


def tree_steps(tree: Tree) -> List[RedexRef]:
    """The redexes fired along the flattening of a tree."""
    if isinstance(tree, Leaf):
        return []
    if isinstance(tree, Wrap):
        return _within(_WRAP_SELECTOR[tree.kind], tree_steps(tree.body))
    if isinstance(tree, Split):
        return _within(Selector.APP_FUN, tree_steps(tree.fun)) + _within(
            Selector.APP_ARG, tree_steps(tree.arg)
        )
    head = Selector.APP_ARG if tree.rule == Rule.MU_PRIME else Selector.APP_FUN
    return (
        _within(head, tree_steps(tree.head))
        + [RedexRef((), tree.rule)]
        + tree_steps(tree.rest)
    )


def certify_tree(tree: Tree) -> StandardCertificate:
    """Flatten a standard tree and certify the resulting trace."""
    return is_standard(ReductionTrace(tuple(flatten(tree)), tuple(tree_steps(tree))))


def _tree_of(terms: Tuple[Term, ...], node: ClauseNode) -> Tree:
    first = subterm_at(terms[node.start], node.focus)
    children = [_tree_of(terms, child) for child in node.children]
    if node.clause == Clause.LENGTH_ONE:
        return Leaf(first)
    if node.clause == Clause.LAMBDA:
        return Wrap("lam", first.binder, children[0])
    if node.clause == Clause.MU:
        return Wrap("mu", first.binder, children[0])
    if node.clause == Clause.NAMED:
        return Wrap("named", first.name, children[0])
    if node.clause == Clause.VAR_APP:
        return Split(Leaf(first.fun), children[0])
    if node.clause == Clause.APP_SPLIT:
        return Split(children[0], children[1])
    rule = _FIRING[node.clause][0]
    other = first.fun if rule == Rule.MU_PRIME else first.arg
    return Fire(rule, children[0], other, children[1])


def tree_of(cert: StandardCertificate) -> Tree:
    """The standard tree a certificate describes."""
    return _tree_of(cert.trace.terms, cert.root)


def leaf_certificate(t: Term) -> StandardCertificate:
    """The certificate of the one-term trace ``[t]``."""
    return StandardCertificate(ReductionTrace((t,)), ClauseNode(Clause.LENGTH_ONE, 0, 0, ()))


def absorb_step(cert: StandardCertificate, q: Tuple[RedexRef, Term]) -> StandardCertificate:
    """From ``M ▷st P`` and ``P ▷ Q`` build a certificate for ``M ▷st Q``.

    Raises:
        InvalidRedexError: If the redex does not take ``P`` to ``Q``.
    """
    redex, target = q
    last = cert.trace.last
    if canonical_key(step(last, redex)) != canonical_key(target):
        raise InvalidRedexError(
            f"{redex.describe()} does not take {print_term(last)} to {print_term(target)}"
        )
    return certify_tree(absorb(tree_of(cert), redex))


def standardize(tr: ReductionTrace) -> Tuple[ReductionTrace, StandardCertificate]:
    """Rearrange a reduction into a standard one with the same endpoints.

    Raises:
        InvalidTraceError: If the input does not replay.
    """
    check = validate_trace(tr)
    if not check:
        raise InvalidTraceError(f"Trace does not replay: {check.reason}", check.index)
    tree: Tree = Leaf(tr.first)
    for redex in tr.steps:
        tree = absorb(tree, redex)
    cert = certify_tree(tree)
    logger.debug(f"Standardized {lg(tr)} steps into {lg(cert.trace)}")
    return cert.trace, cert


class LiftKind(str, Enum):
    """The closure properties of standard reduction."""

    WRAP_LAMBDA = "wrap-lambda"
    WRAP_MU = "wrap-mu"
    WRAP_NAMED = "wrap-named"
    APP_PAIR = "app-pair"
    SUBST_LAMBDA = "subst-lambda"
    SUBST_MU_RIGHT = "subst-mu-right"
    SUBST_MU_LEFT = "subst-mu-left"


_LIFT_SUBST = {
    LiftKind.SUBST_LAMBDA: "lambda",
    LiftKind.SUBST_MU_RIGHT: "right",
    LiftKind.SUBST_MU_LEFT: "left",
}


def lift_standard(
    kind: LiftKind,
    first: StandardCertificate,
    second: Optional[StandardCertificate] = None,
    name: Optional[str] = None,
) -> StandardCertificate:
    """Compose certified standard traces.

    Args:
        kind: Which composition to build.
        first: ``M ▷st P``.
        second: ``N ▷st Q`` for the two-trace kinds.
        name: The binder, naming or substituted variable.

    Returns:
        The certificate of ``λx M ▷st λx P``, ``μa M ▷st μa P``, ``[a] M ▷st [a] P``,
        ``(M N) ▷st (P Q)`` or ``M[σ N] ▷st P[σ Q]``.

    Raises:
        NotStandardError: If a needed input is missing or the result does not
            certify.
    """
    kind = LiftKind(kind)
    tree = tree_of(first)
    if kind in (LiftKind.WRAP_LAMBDA, LiftKind.WRAP_MU, LiftKind.WRAP_NAMED):
        if name is None:
            raise NotStandardError(f"{kind.value} needs a name")
        wrapper = {"wrap-lambda": "lam", "wrap-mu": "mu", "wrap-named": "named"}[kind.value]
        return certify_tree(Wrap(wrapper, name, tree))
    if second is None:
        raise NotStandardError(f"{kind.value} needs two certified traces")
    other = tree_of(second)
    if kind == LiftKind.APP_PAIR:
        return certify_tree(Split(tree, other))
    if name is None:
        raise NotStandardError(f"{kind.value} needs a variable")
    return certify_tree(subst_tree(tree, TreeSubstitution(_LIFT_SUBST[kind], name, other)))


class StandardizationModule:
    """Standardization module for the lambdamu workbench.

    This module provides the standardness check and the standardizer.
    """

    def lg(self, tr: ReductionTrace) -> int:
        """Trace length; see :func:`lg`."""
        return lg(tr)

    def is_standard(self, tr: ReductionTrace) -> StandardCertificate:
        """Certify a trace; see :func:`is_standard`."""
        return is_standard(tr)

    def verify_certificate(self, cert: StandardCertificate) -> bool:
        """Check a certificate; see :func:`verify_certificate`."""
        return verify_certificate(cert)

    def absorb_step(
        self, cert: StandardCertificate, q: Tuple[RedexRef, Term]
    ) -> StandardCertificate:
        """Extend by one step; see :func:`absorb_step`."""
        return absorb_step(cert, q)

    def standardize(self, tr: ReductionTrace) -> Tuple[ReductionTrace, StandardCertificate]:
        """Standardize a trace; see :func:`standardize`."""
        return standardize(tr)

    def lift_standard(
        self,
        kind: LiftKind,
        first: StandardCertificate,
        second: Optional[StandardCertificate] = None,
        name: Optional[str] = None,
    ) -> StandardCertificate:
        """Compose certified traces; see :func:`lift_standard`."""
        return lift_standard(kind, first, second, name)
