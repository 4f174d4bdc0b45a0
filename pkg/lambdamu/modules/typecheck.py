"""Typing module for the lambdamu workbench.

Simple types, typing contexts and derivations for the five rules of classical natural
deduction, with unification-based inference for unannotated binders.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

import lark

from lambdamu.exceptions import (
    AmbiguousTypeError,
    BudgetExceededError,
    OccursCheckError,
    TypeCheckError,
    TypeMismatchError,
    TypeSyntaxError,
    UnboundVariableError,
)
from lambdamu.modules.reduction import successors
from lambdamu.modules.terms import (
    App,
    Lam,
    Mu,
    Named,
    Path,
    Selector,
    Term,
    Var,
    canonical_key,
    print_term,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Atom:
    """An atomic formula."""

    name: str


@dataclass(frozen=True)
class Bottom:
    """The constant ⊥."""


@dataclass(frozen=True)
class Arrow:
    """An implication ``domain -> codomain``."""

    domain: "SimpleType"
    codomain: "SimpleType"


@dataclass(frozen=True)
class Meta:
    """A unification metavariable, only present in inferred types."""

    ident: int


SimpleType = Union[Atom, Bottom, Arrow, Meta]

BOTTOM = Bottom()


def neg(a: SimpleType) -> SimpleType:
    """``¬A``, which is ``A -> ⊥``."""
    return Arrow(a, BOTTOM)


def _metas(ty: SimpleType) -> Iterator[Meta]:
    if isinstance(ty, Meta):
        yield ty
    elif isinstance(ty, Arrow):
        yield from _metas(ty.domain)
        yield from _metas(ty.codomain)


def print_type(ty: SimpleType, names: Optional[Dict[int, str]] = None) -> str:
    """Render a type; ``->`` associates to the right and metavariables print as ``?a``.

    Args:
        ty: The type.
        names: Names already given to metavariables; extended in place.

    Returns:
        The concrete syntax.
    """
    if names is None:
        names = {}
    if isinstance(ty, Atom):
        return ty.name
    if isinstance(ty, Bottom):
        return "_|_"
    if isinstance(ty, Meta):
        if ty.ident not in names:
            names[ty.ident] = _meta_name(len(names))
        return names[ty.ident]
    left = print_type(ty.domain, names)
    if isinstance(ty.domain, Arrow):
        left = f"({left})"
    return f"{left} -> {print_type(ty.codomain, names)}"


def _meta_name(index: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    suffix = "" if index < len(letters) else str(index // len(letters))
    return f"?{letters[index % len(letters)]}{suffix}"


@dataclass(frozen=True)
class Context:
    """A typing context.

    ``mu`` stores ``A`` for a declaration ``a : ¬A``.
    """

    lam: Mapping[str, SimpleType] = field(default_factory=dict)
    mu: Mapping[str, SimpleType] = field(default_factory=dict)

    def __post_init__(self):
        both = set(self.lam) & set(self.mu)
        if both:
            raise TypeSyntaxError(
                f"Names declared in both namespaces: {', '.join(sorted(both))}"
            )

    def with_lam(self, name: str, ty: SimpleType) -> "Context":
        """Extend with ``name : ty``."""
        lam = dict(self.lam)
        lam[name] = ty
        return Context(lam, {k: v for k, v in self.mu.items() if k != name})

    def with_mu(self, name: str, ty: SimpleType) -> "Context":
        """Extend with ``name : ¬ty``."""
        mu = dict(self.mu)
        mu[name] = ty
        return Context({k: v for k, v in self.lam.items() if k != name}, mu)

    def __str__(self) -> str:
        decls = [f"{name}:{print_type(ty)}" for name, ty in sorted(self.lam.items())]
        decls += [f"{name}:~{print_type(ty)}" for name, ty in sorted(self.mu.items())]
        return ", ".join(decls)


EMPTY_CONTEXT = Context()


class TypingRule(str, Enum):
    """The five rules of the type system."""

    AX = "ax"
    ARROW_I = "->i"
    ARROW_E = "->e"
    BOTTOM_E = "_|_e"
    BOTTOM_I = "_|_i"


@dataclass(frozen=True)
class Derivation:
    """A typing derivation concluding ``context |- term : type``."""

    rule: TypingRule
    context: Context
    term: Term
    type: SimpleType
    premises: Tuple["Derivation", ...] = ()

    def render(self, indent: int = 0) -> List[str]:
        """Render the derivation tree, conclusion first."""
        line = (
            f"{'  ' * indent}{self.context} |- {print_term(self.term)} : "
            f"{print_type(self.type)}  [{self.rule.value}]"
        )
        lines = [line]
        for premise in self.premises:
            lines.extend(premise.render(indent + 1))
        return lines


class _Unifier:
    """Eager first-order unification over metavariables."""

    def __init__(self):
        self.bindings: Dict[int, SimpleType] = {}
        self.counter = 0

    def fresh(self) -> Meta:
        self.counter += 1
        return Meta(self.counter)

    def walk(self, ty: SimpleType) -> SimpleType:
        while isinstance(ty, Meta) and ty.ident in self.bindings:
            ty = self.bindings[ty.ident]
        return ty

    def zonk(self, ty: SimpleType) -> SimpleType:
        ty = self.walk(ty)
        if isinstance(ty, Arrow):
            return Arrow(self.zonk(ty.domain), self.zonk(ty.codomain))
        return ty

    def occurs(self, meta: Meta, ty: SimpleType) -> bool:
        ty = self.walk(ty)
        if isinstance(ty, Meta):
            return ty.ident == meta.ident
        if isinstance(ty, Arrow):
            return self.occurs(meta, ty.domain) or self.occurs(meta, ty.codomain)
        return False

    def unify(self, a: SimpleType, b: SimpleType, path: Path) -> None:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if isinstance(a, Meta) or isinstance(b, Meta):
            meta, other = (a, b) if isinstance(a, Meta) else (b, a)
            if self.occurs(meta, other):
                raise OccursCheckError(
                    "Occurs check failed: infinite type "
                    f"{print_type(meta)} = {print_type(self.zonk(other))}",
                    path,
                )
            self.bindings[meta.ident] = other
            return
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.domain, b.domain, path)
            self.unify(a.codomain, b.codomain, path)
            return
        names: Dict[int, str] = {}
        raise TypeMismatchError(
            f"Cannot match {print_type(self.zonk(a), names)} "
            f"with {print_type(self.zonk(b), names)}",
            path,
        )

    def infer(self, ctx: Context, t: Term, path: Path) -> Derivation:
        if isinstance(t, Var):
            if t.name not in ctx.lam:
                raise UnboundVariableError(f"Unbound λ-variable '{t.name}'", path)
            return Derivation(TypingRule.AX, ctx, t, ctx.lam[t.name])
        if isinstance(t, Lam):
            domain = self.fresh()
            body = self.infer(
                ctx.with_lam(t.binder, domain), t.body, path + (Selector.LAM_BODY,)
            )
            return Derivation(
                TypingRule.ARROW_I, ctx, t, Arrow(domain, body.type), (body,)
            )
        if isinstance(t, App):
            fun = self.infer(ctx, t.fun, path + (Selector.APP_FUN,))
            arg = self.infer(ctx, t.arg, path + (Selector.APP_ARG,))
            result = self.fresh()
            self.unify(fun.type, Arrow(arg.type, result), path)
            return Derivation(TypingRule.ARROW_E, ctx, t, result, (fun, arg))
        if isinstance(t, Mu):
            declared = self.fresh()
            body = self.infer(
                ctx.with_mu(t.binder, declared), t.body, path + (Selector.MU_BODY,)
            )
            self.unify(body.type, BOTTOM, path + (Selector.MU_BODY,))
            return Derivation(TypingRule.BOTTOM_E, ctx, t, declared, (body,))
        if t.name not in ctx.mu:
            raise UnboundVariableError(f"Unbound μ-variable '{t.name}'", path)
        body = self.infer(ctx, t.body, path + (Selector.NAMED_BODY,))
        self.unify(body.type, ctx.mu[t.name], path + (Selector.NAMED_BODY,))
        return Derivation(TypingRule.BOTTOM_I, ctx, t, BOTTOM, (body,))

    def zonk_context(self, ctx: Context) -> Context:
        return Context(
            {k: self.zonk(v) for k, v in ctx.lam.items()},
            {k: self.zonk(v) for k, v in ctx.mu.items()},
        )

    def zonk_derivation(self, d: Derivation) -> Derivation:
        return Derivation(
            d.rule,
            self.zonk_context(d.context),
            d.term,
            self.zonk(d.type),
            tuple(self.zonk_derivation(p) for p in d.premises),
        )


def _derivation_metas(d: Derivation) -> Iterator[Meta]:
    yield from _metas(d.type)
    for ty in list(d.context.lam.values()) + list(d.context.mu.values()):
        yield from _metas(ty)
    for premise in d.premises:
        yield from _derivation_metas(premise)


def instantiate(ty: SimpleType, prefix: str = "T") -> SimpleType:
    """Replace every metavariable by a fresh atom ``T1, T2, ...``."""
    mapping: Dict[int, Atom] = {}
    return _instantiate(ty, mapping, prefix)


def _instantiate(ty: SimpleType, mapping: Dict[int, Atom], prefix: str) -> SimpleType:
    if isinstance(ty, Meta):
        if ty.ident not in mapping:
            mapping[ty.ident] = Atom(f"{prefix}{len(mapping) + 1}")
        return mapping[ty.ident]
    if isinstance(ty, Arrow):
        return Arrow(
            _instantiate(ty.domain, mapping, prefix),
            _instantiate(ty.codomain, mapping, prefix),
        )
    return ty


def _instantiate_derivation(
    d: Derivation, mapping: Dict[int, Atom], prefix: str
) -> Derivation:
    ctx = Context(
        {k: _instantiate(v, mapping, prefix) for k, v in d.context.lam.items()},
        {k: _instantiate(v, mapping, prefix) for k, v in d.context.mu.items()},
    )
    return Derivation(
        d.rule,
        ctx,
        d.term,
        _instantiate(d.type, mapping, prefix),
        tuple(_instantiate_derivation(p, mapping, prefix) for p in d.premises),
    )


def infer(ctx: Context, t: Term) -> SimpleType:
    """Principal type of ``t`` in ``ctx``, with metavariables for free choices.

    Raises:
        TypeCheckError: If no derivation exists.
    """
    unifier = _Unifier()
    d = unifier.infer(ctx, t, ())
    return unifier.zonk(d.type)


def check(
    ctx: Context, t: Term, ty: SimpleType, ground: bool = False
) -> Derivation:
    """Build a derivation of ``ctx |- t : ty``.

    Args:
        ctx: The context.
        t: The term.
        ty: The expected type.
        ground: Instantiate unconstrained binder types with fresh atoms instead of
            failing.

    Returns:
        A derivation without metavariables.

    Raises:
        TypeCheckError: On mismatch, unbound variables, occurs-check failure or, when
            ``ground`` is false, binder types the conclusion does not determine.
    """
    unifier = _Unifier()
    d = unifier.infer(ctx, t, ())
    unifier.unify(d.type, ty, ())
    d = unifier.zonk_derivation(d)
    if next(_derivation_metas(d), None) is not None:
        if not ground:
            raise AmbiguousTypeError(
                f"Binder types of {print_term(t)} are not determined by the conclusion"
            )
        taken = _atom_names(d)
        prefix = "T"
        while any(name.startswith(prefix) for name in taken):
            prefix += "T"
        d = _instantiate_derivation(d, {}, prefix)
    return d


def _atom_names(d: Derivation) -> set:
    names = set()

    def collect(ty: SimpleType) -> None:
        if isinstance(ty, Atom):
            names.add(ty.name)
        elif isinstance(ty, Arrow):
            collect(ty.domain)
            collect(ty.codomain)

    collect(d.type)
    for ty in list(d.context.lam.values()) + list(d.context.mu.values()):
        collect(ty)
    for premise in d.premises:
        names |= _atom_names(premise)
    return names


def verify_derivation(d: Derivation) -> bool:
    """Replay a derivation: every node must instantiate its rule exactly."""
    if next(_metas(d.type), None) is not None:
        return False
    ctx, t, ty, premises = d.context, d.term, d.type, d.premises
    if d.rule == TypingRule.AX:
        return isinstance(t, Var) and not premises and ctx.lam.get(t.name) == ty
    if d.rule == TypingRule.ARROW_I:
        if not (isinstance(t, Lam) and isinstance(ty, Arrow) and len(premises) == 1):
            return False
        p = premises[0]
        expected = (ctx.with_lam(t.binder, ty.domain), t.body, ty.codomain)
        return (p.context, p.term, p.type) == expected and verify_derivation(p)
    if d.rule == TypingRule.ARROW_E:
        if not (isinstance(t, App) and len(premises) == 2):
            return False
        fun, arg = premises
        return (
            fun.context == ctx
            and arg.context == ctx
            and fun.term == t.fun
            and arg.term == t.arg
            and fun.type == Arrow(arg.type, ty)
            and verify_derivation(fun)
            and verify_derivation(arg)
        )
    if d.rule == TypingRule.BOTTOM_E:
        if not (isinstance(t, Mu) and len(premises) == 1):
            return False
        p = premises[0]
        expected = (ctx.with_mu(t.binder, ty), t.body, BOTTOM)
        return (p.context, p.term, p.type) == expected and verify_derivation(p)
    if not (isinstance(t, Named) and ty == BOTTOM and len(premises) == 1):
        return False
    p = premises[0]
    return (
        t.name in ctx.mu
        and (p.context, p.term, p.type) == (ctx, t.body, ctx.mu[t.name])
        and verify_derivation(p)
    )


@dataclass(frozen=True)
class SubjectReductionReport:
    """Outcome of :func:`check_subject_reduction`; truthy when no violation was found.

    ``complete`` is false when the budget ran out before every reachable term was
    visited.
    """

    ok: bool
    checked: int
    complete: bool
    violation: Optional[Tuple[Term, Term]] = None

    def __bool__(self) -> bool:
        return self.ok


def check_subject_reduction(
    ctx: Context,
    t: Term,
    ty: SimpleType,
    budget: int = 1000,
    strict: bool = False,
) -> SubjectReductionReport:
    """Check every one-step reduct of every term reachable within ``budget`` at ``ty``.

    Args:
        ctx: The context.
        t: A term with ``ctx |- t : ty``.
        ty: The type.
        budget: How many distinct terms may be expanded.
        strict: Raise instead of reporting an incomplete search.

    Returns:
        The report; ``violation`` names a term and its reduct that fails to check.

    Raises:
        TypeCheckError: If ``t`` itself does not check.
        BudgetExceededError: If ``strict`` and the budget runs out.
    """
    check(ctx, t, ty, ground=True)
    seen = {canonical_key(t)}
    queue = deque([t])
    checked = 0
    while queue:
        if checked >= budget:
            logger.info(f"Subject reduction stopped after {checked} terms")
            if strict:
                raise BudgetExceededError(
                    f"Subject reduction budget of {budget} terms exhausted", "nodes"
                )
            return SubjectReductionReport(True, checked, False)
        current = queue.popleft()
        checked += 1
        for _, reduct in successors(current):
            try:
                check(ctx, reduct, ty, ground=True)
            except TypeCheckError as e:
                logger.info(f"Subject reduction violated: {e.message}")
                return SubjectReductionReport(False, checked, True, (current, reduct))
            key = canonical_key(reduct)
            if key not in seen:
                seen.add(key)
                queue.append(reduct)
    return SubjectReductionReport(True, checked, True)


_TYPE_GRAMMAR = r"""
    ?type_expr: arrow

    ?arrow: atomic
          | atomic "->" arrow          -> arrow

    ?atomic: NAME                      -> atom
           | "_|_"                     -> bottom
           | "(" arrow ")"

    context: [decl ("," decl)*]

    decl: NAME ":" arrow               -> lam_decl
        | NAME ":" "~" arrow           -> mu_decl

    NAME: /[A-Za-z][A-Za-z0-9_']*/

    %import common.WS
    %ignore WS
"""


class _TypeBuilder(lark.Transformer):
    def atom(self, items):
        return Atom(str(items[0]))

    def bottom(self, items):
        return BOTTOM

    def arrow(self, items):
        return Arrow(items[0], items[1])

    def lam_decl(self, items):
        return "lam", str(items[0]), items[1]

    def mu_decl(self, items):
        return "mu", str(items[0]), items[1]

    def context(self, items):
        lam: Dict[str, SimpleType] = {}
        mu: Dict[str, SimpleType] = {}
        for item in items:
            if item is None:
                continue
            kind, name, ty = item
            if name in lam or name in mu:
                raise TypeSyntaxError(f"'{name}' is declared twice")
            (lam if kind == "lam" else mu)[name] = ty
        return Context(lam, mu)


_TYPE_PARSER = lark.Lark(
    _TYPE_GRAMMAR,
    parser="lalr",
    start=["type_expr", "context"],
    transformer=_TypeBuilder(),
)


def _parse_with(text: str, start: str):
    try:
        return _TYPE_PARSER.parse(text, start=start)
    except lark.exceptions.VisitError as e:
        if isinstance(e.orig_exc, TypeSyntaxError):
            raise e.orig_exc
        raise
    except lark.UnexpectedInput as e:
        line = getattr(e, "line", None)
        column = getattr(e, "column", None)
        if line is not None and line < 0:
            line = column = None
        raise TypeSyntaxError(f"Syntax error in {text!r}", line, column)


def parse_type(text: str) -> SimpleType:
    """Parse a type: bare atoms, ``_|_`` and right-associative ``->``."""
    return _parse_with(text, "type_expr")


def parse_context(text: str) -> Context:
    """Parse ``x:A, a:~B``; ``~`` marks a μ-declaration ``a : ¬B``."""
    if not text.strip():
        return EMPTY_CONTEXT
    return _parse_with(text, "context")


class TypingModule:
    """Typing module for the lambdamu workbench.

    This module provides type checking, inference and the subject-reduction check.
    """

    def check(
        self, ctx: Context, t: Term, ty: SimpleType, ground: bool = False
    ) -> Derivation:
        """Build a derivation; see :func:`check`."""
        return check(ctx, t, ty, ground)

    def infer(self, ctx: Context, t: Term) -> SimpleType:
        """Principal type; see :func:`infer`."""
        return infer(ctx, t)

    def check_subject_reduction(
        self, ctx: Context, t: Term, ty: SimpleType, budget: int = 1000
    ) -> SubjectReductionReport:
        """Subject-reduction check; see :func:`check_subject_reduction`."""
        return check_subject_reduction(ctx, t, ty, budget)

    def verify_derivation(self, d: Derivation) -> bool:
        """Derivation replay; see :func:`verify_derivation`."""
        return verify_derivation(d)

    def parse_type(self, text: str) -> SimpleType:
        """Parse a type; see :func:`parse_type`."""
        return parse_type(text)

    def parse_context(self, text: str) -> Context:
        """Parse a context; see :func:`parse_context`."""
        return parse_context(text)
