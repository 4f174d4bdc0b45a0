"""Term-core module for the lambdamu workbench.

Terms of the symmetric λμ-calculus, their concrete syntax, alpha-equivalence and
structural measures.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Set, Tuple, Union

import lark

from lambdamu.exceptions import NamespaceError, TermSyntaxError


class Selector(str, Enum):
    """One step of a path into a term."""

    APP_FUN = "AppFun"
    APP_ARG = "AppArg"
    LAM_BODY = "LamBody"
    MU_BODY = "MuBody"
    NAMED_BODY = "NamedBody"


Path = Tuple[Selector, ...]


@dataclass(frozen=True)
class Var:
    """A λ-variable occurrence."""

    __slots__ = ("name",)
    name: str


@dataclass(frozen=True)
class Lam:
    """A λ-abstraction."""

    __slots__ = ("binder", "body")
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App:
    """An application."""

    __slots__ = ("fun", "arg")
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Mu:
    """A μ-abstraction; the body is an arbitrary term."""

    __slots__ = ("binder", "body")
    binder: str
    body: "Term"


@dataclass(frozen=True)
class Named:
    """A naming ``[a] M`` of a term by a μ-variable."""

    __slots__ = ("name", "body")
    name: str
    body: "Term"


Term = Union[Var, Lam, App, Mu, Named]

_GRAMMAR = r"""
    ?start: term

    ?term: binder
         | app
         | app binder               -> application

    ?binder: "\\" NAME "." term      -> lam
           | "mu" NAME "." term      -> mu
           | "[" NAME "]" binder     -> named

    ?app: atom
        | app atom                   -> application

    ?atom: NAME                      -> var
         | "[" NAME "]" atom         -> named
         | "(" term ")"

    NAME: /[A-Za-z][A-Za-z0-9_']*/

    %import common.WS
    %ignore WS
"""

RESERVED = frozenset({"mu"})


class _TermBuilder(lark.Transformer):
    """Build terms bottom-up while the LALR parser reduces."""

    def var(self, items):
        return Var(str(items[0]))

    def lam(self, items):
        return Lam(str(items[0]), items[1])

    def mu(self, items):
        return Mu(str(items[0]), items[1])

    def named(self, items):
        return Named(str(items[0]), items[1])

    def application(self, items):
        return App(items[0], items[1])


_PARSER = lark.Lark(_GRAMMAR, parser="lalr", transformer=_TermBuilder())


def _check_namespaces(t: Term) -> None:
    """Reject terms that mix the λ and μ namespaces of a bound name."""
    stack: List[Tuple[Term, Dict[str, str]]] = [(t, {})]
    while stack:
        node, scope = stack.pop()
        if isinstance(node, Var):
            if scope.get(node.name) == "mu":
                raise NamespaceError(f"μ-bound name '{node.name}' used as a λ-variable")
        elif isinstance(node, Named):
            if scope.get(node.name) == "lambda":
                raise NamespaceError(f"λ-bound name '{node.name}' used as a naming tag")
            stack.append((node.body, scope))
        elif isinstance(node, (Lam, Mu)):
            if node.binder in RESERVED:
                raise TermSyntaxError(f"'{node.binder}' is reserved")
            inner = dict(scope)
            inner[node.binder] = "lambda" if isinstance(node, Lam) else "mu"
            stack.append((node.body, inner))
        else:
            stack.append((node.arg, scope))
            stack.append((node.fun, scope))
    for name in _names(t):
        if name in RESERVED:
            raise TermSyntaxError(f"'{name}' is reserved")


def parse(text: str) -> Term:
    """Parse concrete syntax into a term.

    Application is left-associative and the bodies of ``\\`` and ``mu`` extend as far
    right as possible. ``[a] M`` is the naming of ``M`` by ``a``.

    Args:
        text: The concrete syntax.

    Returns:
        The denoted term.

    Raises:
        TermSyntaxError: If the text does not conform to the grammar.
        NamespaceError: If a bound name is used in the other namespace.
    """
    try:
        term = _PARSER.parse(text)
    except lark.UnexpectedInput as e:
        line = getattr(e, "line", None)
        column = getattr(e, "column", None)
        if line is not None and line < 0:
            line = column = None
        raise TermSyntaxError(f"Syntax error in {text!r}", line, column)
    _check_namespaces(term)
    return term


def _atom(t: Term) -> str:
    if isinstance(t, (Var, Named)):
        return print_term(t)
    return f"({print_term(t)})"


def print_term(t: Term) -> str:
    """Render a term in concrete syntax that parses back to an alpha-equal term.

    Args:
        t: The term.

    Returns:
        The concrete syntax.
    """
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.binder}. {print_term(t.body)}"
    if isinstance(t, Mu):
        return f"mu {t.binder}. {print_term(t.body)}"
    if isinstance(t, Named):
        return f"[{t.name}] {_atom(t.body)}"
    spine = []
    node: Term = t
    while isinstance(node, App):
        spine.append(_atom(node.arg))
        node = node.fun
    head = print_term(node) if isinstance(node, (Var, Named)) else f"({print_term(node)})"
    return " ".join([head] + spine[::-1])


def canonical_key(t: Term) -> str:
    """Nameless rendering of a term: equal keys iff alpha-equivalent terms.

    Bound λ- and μ-variables become de Bruijn indices counted separately in their own
    namespaces; free names are kept.

    Args:
        t: The term.

    Returns:
        The canonical key.
    """
    out: List[str] = []
    lams: List[str] = []
    mus: List[str] = []
    # Work items are terms or the markers used to leave a binder.
    stack: List[Union[Term, str]] = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            (lams if node == "<lam" else mus).pop()
            continue
        if isinstance(node, Var):
            out.append(_index(node.name, lams, "#", "$"))
        elif isinstance(node, Lam):
            out.append("L")
            lams.append(node.binder)
            stack.append("<lam")
            stack.append(node.body)
        elif isinstance(node, Mu):
            out.append("M")
            mus.append(node.binder)
            stack.append("<mu")
            stack.append(node.body)
        elif isinstance(node, Named):
            out.append("[" + _index(node.name, mus, "#", "$") + "]")
            stack.append(node.body)
        else:
            out.append("@")
            stack.append(node.arg)
            stack.append(node.fun)
    return " ".join(out)


def _index(name: str, scope: List[str], bound: str, free: str) -> str:
    for depth in range(len(scope) - 1, -1, -1):
        if scope[depth] == name:
            return f"{bound}{len(scope) - 1 - depth}"
    return free + name


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Decide whether two terms differ only in bound names.

    Args:
        t1: The first term.
        t2: The second term.

    Returns:
        True iff the terms are alpha-equivalent.
    """
    return t1 is t2 or canonical_key(t1) == canonical_key(t2)


def _children(t: Term) -> Iterator[Tuple[Selector, Term]]:
    if isinstance(t, App):
        yield Selector.APP_FUN, t.fun
        yield Selector.APP_ARG, t.arg
    elif isinstance(t, Lam):
        yield Selector.LAM_BODY, t.body
    elif isinstance(t, Mu):
        yield Selector.MU_BODY, t.body
    elif isinstance(t, Named):
        yield Selector.NAMED_BODY, t.body


def cxty(t: Term) -> int:
    """Count the symbols of a term; every node of the tree counts 1."""
    count = 0
    stack = [t]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(child for _, child in _children(node))
    return count


def subterms(t: Term) -> List[Tuple[Path, Term]]:
    """Enumerate ``(path, subterm)`` pairs in preorder, starting with ``((), t)``."""
    result: List[Tuple[Path, Term]] = []
    stack: List[Tuple[Path, Term]] = [((), t)]
    while stack:
        path, node = stack.pop()
        result.append((path, node))
        for selector, child in reversed(list(_children(node))):
            stack.append((path + (selector,), child))
    return result


def is_subterm(n: Term, m: Term, strict: bool = False) -> bool:
    """Decide ``n ≤ m`` (or ``n < m`` when strict) up to alpha."""
    key = canonical_key(n)
    return any(
        canonical_key(sub) == key for path, sub in subterms(m) if path or not strict
    )


def subterm_at(t: Term, path: Path) -> Term:
    """Follow a path from the root.

    Raises:
        ValueError: If the path leaves the tree.
    """
    node = t
    for selector in path:
        for child_selector, child in _children(node):
            if child_selector == selector:
                node = child
                break
        else:
            raise ValueError(f"Path selector {selector.value} is invalid here")
    return node


def replace_at(t: Term, path: Path, new: Term) -> Term:
    """Rebuild ``t`` with the sub-term at ``path`` replaced by ``new``.

    Raises:
        ValueError: If the path leaves the tree.
    """
    if not path:
        return new
    selector, rest = path[0], path[1:]
    if isinstance(t, App) and selector == Selector.APP_FUN:
        return App(replace_at(t.fun, rest, new), t.arg)
    if isinstance(t, App) and selector == Selector.APP_ARG:
        return App(t.fun, replace_at(t.arg, rest, new))
    if isinstance(t, Lam) and selector == Selector.LAM_BODY:
        return Lam(t.binder, replace_at(t.body, rest, new))
    if isinstance(t, Mu) and selector == Selector.MU_BODY:
        return Mu(t.binder, replace_at(t.body, rest, new))
    if isinstance(t, Named) and selector == Selector.NAMED_BODY:
        return Named(t.name, replace_at(t.body, rest, new))
    raise ValueError(f"Path selector {selector.value} is invalid here")


def free_vars(t: Term) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """Collect the free λ-variables and the free μ-variables of a term."""
    lams: Set[str] = set()
    mus: Set[str] = set()
    stack: List[Tuple[Term, FrozenSet[str], FrozenSet[str]]] = [
        (t, frozenset(), frozenset())
    ]
    while stack:
        node, bound_lam, bound_mu = stack.pop()
        if isinstance(node, Var):
            if node.name not in bound_lam:
                lams.add(node.name)
        elif isinstance(node, Lam):
            stack.append((node.body, bound_lam | {node.binder}, bound_mu))
        elif isinstance(node, Mu):
            stack.append((node.body, bound_lam, bound_mu | {node.binder}))
        elif isinstance(node, Named):
            if node.name not in bound_mu:
                mus.add(node.name)
            stack.append((node.body, bound_lam, bound_mu))
        else:
            stack.append((node.fun, bound_lam, bound_mu))
            stack.append((node.arg, bound_lam, bound_mu))
    return frozenset(lams), frozenset(mus)


def _names(t: Term) -> Set[str]:
    names: Set[str] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            names.add(node.name)
        elif isinstance(node, (Lam, Mu)):
            names.add(node.binder)
        elif isinstance(node, Named):
            names.add(node.name)
        stack.extend(child for _, child in _children(node))
    return names


def all_names(*terms: Term) -> Set[str]:
    """Every name occurring in the given terms, bound or free, in either namespace."""
    names: Set[str] = set()
    for t in terms:
        names |= _names(t)
    return names


class TermsModule:
    """Term-core module for the lambdamu workbench.

    This module provides parsing, printing and alpha-equivalence of terms.
    """

    def parse(self, text: str) -> Term:
        """Parse concrete syntax; see :func:`parse`."""
        return parse(text)

    def print(self, t: Term) -> str:
        """Print a term; see :func:`print_term`."""
        return print_term(t)

    def alpha_eq(self, t1: Term, t2: Term) -> bool:
        """Alpha-equivalence; see :func:`alpha_eq`."""
        return alpha_eq(t1, t2)

    def canonical_key(self, t: Term) -> str:
        """Nameless key; see :func:`canonical_key`."""
        return canonical_key(t)

    def cxty(self, t: Term) -> int:
        """Symbol count; see :func:`cxty`."""
        return cxty(t)

    def subterms(self, t: Term) -> List[Tuple[Path, Term]]:
        """Preorder sub-terms; see :func:`subterms`."""
        return subterms(t)

    def free_vars(self, t: Term) -> Tuple[FrozenSet[str], FrozenSet[str]]:
        """Free variables; see :func:`free_vars`."""
        return free_vars(t)
