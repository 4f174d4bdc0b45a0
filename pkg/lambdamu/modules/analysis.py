"""Strong-normalization analysis for the lambdamu workbench.

Reduction graphs over alpha-classes, SN verdicts with replayable witnesses, the
longest-reduction measure and the relations used by the catalog claims.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import graphviz
import networkx as nx

from lambdamu.exceptions import BudgetExceededError, UnknownVerdictError, VerdictError
from lambdamu.models import VerdictKind, VerdictSummary
from lambdamu.modules.reduction import (
    RedexRef,
    ReductionTrace,
    Strategy,
    redexes,
    select_redex,
    step,
    successors,
    trace_to_model,
    validate_trace,
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
    alpha_eq,
    canonical_key,
    cxty,
    print_term,
    replace_at,
    subterms,
)

logger = logging.getLogger(__name__)

DOT_LABEL_LIMIT = 80
RANDOM_SCOUTS = 4

_BODY_SELECTOR = {Lam: Selector.LAM_BODY, Mu: Selector.MU_BODY, Named: Selector.NAMED_BODY}


@dataclass
class ReductionGraph:
    """Explored part of the reduction graph of a term.

    Nodes are canonical keys carrying a representative ``term``; an edge ``u -> v``
    carries the list of ``redexes`` of ``u`` whose reduct is in the class ``v``.
    """

    graph: nx.DiGraph
    root: str
    frontier: Set[str] = field(default_factory=set)
    truncated: Optional[str] = None

    @property
    def complete(self) -> bool:
        """Whether every reachable class was expanded."""
        return not self.frontier

    def term(self, key: str) -> Term:
        """The representative of a class."""
        return self.graph.nodes[key]["term"]

    def edges_from(self, key: str) -> List[Tuple[RedexRef, str]]:
        """Outgoing ``(redex, target)`` pairs of a class."""
        return [
            (redex, target)
            for target, data in self.graph.adj[key].items()
            for redex in data["redexes"]
        ]

    def normal_forms(self) -> List[str]:
        """Expanded classes without successors."""
        return [
            key
            for key in self.graph.nodes
            if key not in self.frontier and self.graph.out_degree(key) == 0
        ]

    def __len__(self) -> int:
        return self.graph.number_of_nodes()


@dataclass
class SnVerdict:
    """Outcome of :func:`sn_verdict`.

    ``eta`` and ``graph`` are set for SN, ``witness`` for NonSN, ``reason`` for
    Unknown. An SN verdict for an application headed by a variable may instead carry
    ``components``, the SN verdicts of its arguments, with no graph and no eta.
    """

    kind: VerdictKind
    eta: Optional[int] = None
    graph: Optional[ReductionGraph] = None
    witness: Optional[ReductionTrace] = None
    reason: Optional[str] = None
    term: Optional[Term] = None
    components: Optional[Tuple["SnVerdict", ...]] = None

    def summary(self) -> VerdictSummary:
        """The wire form of the verdict."""
        return VerdictSummary(
            kind=self.kind,
            eta=self.eta,
            nodes=len(self.graph) if self.graph is not None else 0,
            edges=self.graph.graph.number_of_edges() if self.graph is not None else 0,
            witness=trace_to_model(self.witness) if self.witness is not None else None,
            reason=self.reason,
        )

    def describe(self) -> str:
        """One-line description."""
        if self.kind == VerdictKind.SN and self.components is not None:
            return f"SN, spine of {len(self.components)} SN arguments"
        if self.kind == VerdictKind.SN:
            return f"SN, eta = {self.eta}, {len(self.graph)} classes"
        if self.kind == VerdictKind.NON_SN:
            return f"NonSN, cycle witness of {len(self.witness)} steps"
        return f"Unknown ({self.reason} budget)"


def explore(
    t: Term,
    max_nodes: int = 1_000_000,
    max_term_size: int = 2000,
    stop_on_cycle: bool = False,
) -> ReductionGraph:
    """Breadth-first closure of the one-step reducts of ``t`` up to alpha.

    Args:
        t: The root term.
        max_nodes: Maximal number of classes.
        max_term_size: Terms with more symbols are not expanded.
        stop_on_cycle: Stop after the first BFS level that closes a cycle.

    Returns:
        The explored graph; its frontier lists the classes left unexpanded.
    """
    if max_nodes < 1:
        raise BudgetExceededError("max_nodes must be at least 1", "nodes")
    g = nx.DiGraph()
    root = canonical_key(t)
    g.add_node(root, term=t)
    level = [root]
    frontier: Set[str] = set()
    truncated: Optional[str] = None
    depth = 0
    while level:
        next_level: List[str] = []
        merged = False
        for position, key in enumerate(level):
            term = g.nodes[key]["term"]
            if cxty(term) > max_term_size:
                frontier.add(key)
                truncated = truncated or "term-size"
                continue
            reducts = [(r, reduct, canonical_key(reduct)) for r, reduct in successors(term)]
            new_keys = {k for _, _, k in reducts if k not in g}
            if g.number_of_nodes() + len(new_keys) > max_nodes:
                frontier.update(level[position:])
                frontier.update(next_level)
                truncated = "nodes"
                logger.info(f"Node budget of {max_nodes} reached at depth {depth}")
                return ReductionGraph(g, root, frontier, truncated)
            for redex, reduct, target in reducts:
                if target not in g:
                    g.add_node(target, term=reduct)
                    next_level.append(target)
                else:
                    merged = True
                if g.has_edge(key, target):
                    g.edges[key, target]["redexes"].append(redex)
                else:
                    g.add_edge(key, target, redexes=[redex])
        depth += 1
        logger.debug(f"Depth {depth}: {g.number_of_nodes()} classes")
        if stop_on_cycle and merged and not nx.is_directed_acyclic_graph(g):
            frontier.update(next_level)
            truncated = truncated or "cycle"
            return ReductionGraph(g, root, frontier, truncated)
        level = next_level
    return ReductionGraph(g, root, frontier, truncated)


def _scout(
    t: Term, strategy: Strategy, steps: int, seed: int, max_term_size: int
) -> Optional[ReductionTrace]:
    """Follow one strategy and return the prefix up to the first repeated class."""
    rng = random.Random(seed)
    terms = [t]
    fired: List[RedexRef] = []
    seen: Dict[str, int] = {canonical_key(t): 0}
    current = t
    for _ in range(steps):
        candidates = redexes(current)
        if not candidates or cxty(current) > max_term_size:
            return None
        chosen = select_redex(candidates, strategy, rng)
        current = step(current, chosen)
        terms.append(current)
        fired.append(chosen)
        key = canonical_key(current)
        if key in seen:
            return ReductionTrace(tuple(terms), tuple(fired))
        seen[key] = len(terms) - 1
    return None


def _cycle_witness(g: ReductionGraph) -> ReductionTrace:
    cycle = nx.find_cycle(g.graph, source=g.root)
    start = cycle[0][0]
    path = nx.shortest_path(g.graph, g.root, start)
    keys = path + [v for _, v in cycle]
    terms = [g.term(k) for k in keys]
    steps = [g.graph.edges[u, v]["redexes"][0] for u, v in zip(keys, keys[1:])]
    return ReductionTrace(tuple(terms), tuple(steps))


def spine_arguments(t: Term) -> Optional[List[Tuple[Path, Term]]]:
    """The arguments of ``x M1 ... Mn``, n >= 1, under any λ, μ and namings.

    Returns:
        The ``(path, argument)`` pairs left to right, or None for any other shape.
    """
    prefix: Path = ()
    while isinstance(t, (Lam, Mu, Named)):
        prefix += (_BODY_SELECTOR[type(t)],)
        t = t.body
    arguments: List[Tuple[Path, Term]] = []
    fun_path = prefix
    while isinstance(t, App):
        arguments.append((fun_path + (Selector.APP_ARG,), t.arg))
        fun_path += (Selector.APP_FUN,)
        t = t.fun
    if not arguments or not isinstance(t, Var):
        return None
    arguments.reverse()
    return arguments


def _lift_witness(t: Term, path: Path, witness: ReductionTrace) -> ReductionTrace:
    """Replay an argument's witness in place inside ``t``."""
    return ReductionTrace(
        tuple(replace_at(t, path, u) for u in witness.terms),
        tuple(RedexRef(path + r.path, r.rule) for r in witness.steps),
    )


def _spine_verdict(
    t: Term,
    arguments: List[Tuple[Path, Term]],
    max_nodes: int,
    max_term_size: int,
    scout_steps: int,
    seed: int,
) -> SnVerdict:
    components: List[SnVerdict] = []
    for path, argument in arguments:
        verdict = sn_verdict(argument, max_nodes, max_term_size, scout_steps, seed)
        if verdict.kind == VerdictKind.NON_SN:
            logger.info(f"NonSN: argument {len(components) + 1} of a spine diverges")
            return SnVerdict(
                VerdictKind.NON_SN, witness=_lift_witness(t, path, verdict.witness), term=t
            )
        if verdict.kind == VerdictKind.UNKNOWN:
            return SnVerdict(VerdictKind.UNKNOWN, reason=verdict.reason, term=t)
        components.append(verdict)
    logger.info(f"SN: spine of {len(components)} SN arguments")
    return SnVerdict(VerdictKind.SN, term=t, components=tuple(components))


def sn_verdict(
    t: Term,
    max_nodes: int = 1_000_000,
    max_term_size: int = 2000,
    scout_steps: int = 400,
    seed: int = 0,
    spines: bool = True,
) -> SnVerdict:
    """Decide strong normalization within a budget.

    An application ``x M1 ... Mn`` headed by a variable, possibly under λ, μ and
    namings, is SN exactly when every ``Mi`` is; with ``spines`` set the arguments are
    decided one by one instead of exploring the whole graph. Otherwise reduction
    scouts (leftmost-outermost, rightmost-innermost and a few seeded random runs)
    look for a repeated class first, and then the reduction graph is explored
    breadth-first and checked for cycles.

    Args:
        t: The term.
        max_nodes: Maximal number of classes to explore.
        max_term_size: Terms with more symbols are not expanded.
        scout_steps: Length of each scout.
        seed: Seed of the random scout.
        spines: Decide variable-headed applications through their arguments.

    Returns:
        SN with eta (or with the argument verdicts of a spine), NonSN with a cycle
        witness, or Unknown with the budget kind.
    """
    if spines:
        arguments = spine_arguments(t)
        if arguments is not None:
            return _spine_verdict(t, arguments, max_nodes, max_term_size, scout_steps, seed)
    scouts = [(Strategy.LEFTMOST_OUTERMOST, seed), (Strategy.RIGHTMOST_INNERMOST, seed)]
    scouts += [(Strategy.RANDOM, seed + offset) for offset in range(RANDOM_SCOUTS)]
    for strategy, scout_seed in scouts:
        witness = _scout(t, strategy, scout_steps, scout_seed, max_term_size)
        if witness is not None:
            logger.info(f"NonSN: {strategy.value} scout repeats after {len(witness)} steps")
            return SnVerdict(VerdictKind.NON_SN, witness=witness, term=t)
    g = explore(t, max_nodes, max_term_size, stop_on_cycle=True)
    if not nx.is_directed_acyclic_graph(g.graph):
        witness = _cycle_witness(g)
        logger.info(f"NonSN: cycle after {len(g)} classes")
        return SnVerdict(VerdictKind.NON_SN, graph=g, witness=witness, term=t)
    if not g.complete:
        logger.info(f"Unknown: {g.truncated} budget after {len(g)} classes")
        return SnVerdict(VerdictKind.UNKNOWN, graph=g, reason=g.truncated, term=t)
    eta_value = nx.dag_longest_path_length(g.graph)
    logger.info(f"SN: eta = {eta_value} over {len(g)} classes")
    return SnVerdict(VerdictKind.SN, eta=eta_value, graph=g, term=t)


def eta(t: Term, max_nodes: int = 1_000_000, max_term_size: int = 2000) -> int:
    """Length of the longest reduction of an SN term.

    Raises:
        VerdictError: If the term has an infinite reduction.
        UnknownVerdictError: If the budget ran out first.
    """
    verdict = sn_verdict(t, max_nodes, max_term_size, spines=False)
    if verdict.kind == VerdictKind.NON_SN:
        raise VerdictError(f"{print_term(t)} is not strongly normalizing")
    if verdict.kind == VerdictKind.UNKNOWN:
        raise UnknownVerdictError(
            f"No verdict for {print_term(t)} within the {verdict.reason} budget"
        )
    return verdict.eta


def must_pass_through(
    u: Term, v: Term, max_nodes: int = 1_000_000, max_term_size: int = 2000
) -> Optional[bool]:
    """Decide ``U ↪ V``: every long enough maximal reduction of ``U`` meets ``V``.

    A reduction avoiding ``V`` that ends in a normal form avoids it for good.

    Returns:
        True or False, or None when ``U`` could not be explored completely.
    """
    if alpha_eq(u, v):
        return True
    g = explore(u, max_nodes, max_term_size)
    if not g.complete:
        return None
    target = canonical_key(v)
    avoiding = g.graph.subgraph(n for n in g.graph.nodes if n != target)
    reach = nx.descendants(avoiding, g.root) | {g.root}
    part = avoiding.subgraph(reach)
    if not nx.is_directed_acyclic_graph(part):
        return False
    return all(g.graph.out_degree(n) > 0 for n in reach)


def single_redex_step(u: Term, v: Term) -> bool:
    """Decide ``U ↷ V``: ``U`` has exactly one redex and it reduces to ``V``."""
    candidates = redexes(u)
    return len(candidates) == 1 and alpha_eq(step(u, candidates[0]), v)


def _subterm_keys(t: Term) -> Tuple[str, Set[str]]:
    """The key of ``t`` and the keys of its strict sub-terms."""
    keys = [canonical_key(sub) for _, sub in subterms(t)]
    return keys[0], set(keys[1:])


def prec(
    n: Term, m: Term, max_nodes: int = 1_000_000, max_term_size: int = 2000
) -> Optional[bool]:
    """Decide ``N ≺ M``.

    Holds when ``N ≤ M'`` for some reduct ``M ▷* M'`` with ``M ▷⁺ M'`` or ``N < M'``.

    Returns:
        True or False, or None when the explored part of the graph of ``M`` shows
        no witness but is incomplete.
    """
    g = explore(m, max_nodes, max_term_size)
    target = canonical_key(n)
    proper: Set[str] = set()
    for successor in g.graph.successors(g.root):
        proper.add(successor)
        proper |= nx.descendants(g.graph, successor)
    for key in g.graph.nodes:
        own, strict = _subterm_keys(g.term(key))
        if target in strict or (key in proper and target == own):
            return True
    return False if g.complete else None


def prec_eq(
    n: Term, m: Term, max_nodes: int = 1_000_000, max_term_size: int = 2000
) -> Optional[bool]:
    """The reflexive closure ``N ⪯ M``."""
    if alpha_eq(n, m):
        return True
    return prec(n, m, max_nodes, max_term_size)


def _longest_from(graph: nx.DiGraph, root: str) -> int:
    longest: Dict[str, int] = {}
    for key in reversed(list(nx.topological_sort(graph))):
        longest[key] = max((longest[s] + 1 for s in graph.successors(key)), default=0)
    return longest[root]


def _audit_spine(verdict: SnVerdict) -> bool:
    if verdict.term is None or verdict.graph is not None or verdict.eta is not None:
        return False
    arguments = spine_arguments(verdict.term)
    if arguments is None or len(arguments) != len(verdict.components):
        return False
    return all(
        component.kind == VerdictKind.SN
        and component.term is not None
        and alpha_eq(component.term, argument)
        and audit_verdict(component)
        for (_, argument), component in zip(arguments, verdict.components)
    )


def audit_verdict(verdict: SnVerdict) -> bool:
    """Re-check a verdict independently of how it was produced.

    NonSN witnesses must replay and end in a class seen earlier in the witness. SN
    graphs must be complete and acyclic, every class must list exactly the reducts of
    its representative, and eta must equal a longest-path recount. A spine verdict
    must decompose its term again into the audited argument verdicts.
    """
    if verdict.kind == VerdictKind.NON_SN:
        witness = verdict.witness
        if witness is None or not validate_trace(witness):
            return False
        keys = [canonical_key(t) for t in witness.terms]
        return len(witness) > 0 and keys[-1] in keys[:-1]
    if verdict.kind == VerdictKind.SN and verdict.components is not None:
        return _audit_spine(verdict)
    if verdict.kind == VerdictKind.SN:
        g = verdict.graph
        if g is None or not g.complete or g.root not in g.graph:
            return False
        if verdict.term is not None and canonical_key(verdict.term) != g.root:
            return False
        if not nx.is_directed_acyclic_graph(g.graph):
            return False
        for key in g.graph.nodes:
            t = g.term(key)
            if canonical_key(t) != key:
                return False
            recorded = g.edges_from(key)
            expected = {(r, canonical_key(step(t, r))) for r in redexes(t)}
            if len(recorded) != len(expected) or set(recorded) != expected:
                return False
        return _longest_from(g.graph, g.root) == verdict.eta
    return True


def _cycle_nodes(graph: nx.DiGraph) -> Set[str]:
    marked: Set[str] = set()
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            marked |= component
    marked |= {u for u, v in nx.selfloop_edges(graph)}
    return marked


def to_dot(g: ReductionGraph) -> str:
    """Render a reduction graph as DOT source.

    Labels are printed terms cut at 80 characters with the full term as tooltip;
    classes on a cycle are filled red and unexpanded classes are dashed.
    """
    dot = graphviz.Digraph("reductions")
    ids = {key: f"n{index}" for index, key in enumerate(g.graph.nodes)}
    on_cycle = _cycle_nodes(g.graph)
    for key, node_id in ids.items():
        text = print_term(g.term(key))
        label = text if len(text) <= DOT_LABEL_LIMIT else text[: DOT_LABEL_LIMIT - 3] + "..."
        attrs = {"label": graphviz.escape(label), "tooltip": graphviz.escape(text)}
        if key == g.root:
            attrs["shape"] = "box"
        if key in on_cycle:
            attrs["style"] = "filled"
            attrs["fillcolor"] = "red"
        elif key in g.frontier:
            attrs["style"] = "dashed"
        dot.node(node_id, **attrs)
    for u, v, data in g.graph.edges(data=True):
        for redex in data["redexes"]:
            dot.edge(ids[u], ids[v], label=redex.rule.value)
    return dot.source


class AnalysisModule:
    """Strong-normalization analysis module for the lambdamu workbench.

    This module provides reduction graphs, SN verdicts and the catalog relations.
    """

    def __init__(
        self,
        max_nodes: int = 1_000_000,
        max_term_size: int = 2000,
        scout_steps: int = 400,
        seed: int = 0,
    ):
        """Initialize the Analysis module.

        Args:
            max_nodes: Default node budget of exploration.
            max_term_size: Terms with more symbols are not expanded.
            scout_steps: Length of the cycle scouts run before exploration.
            seed: Seed of the random scout.
        """
        self.max_nodes = max_nodes
        self.max_term_size = max_term_size
        self.scout_steps = scout_steps
        self.seed = seed

    def _nodes(self, max_nodes: Optional[int]) -> int:
        return self.max_nodes if max_nodes is None else max_nodes

    def explore(self, t: Term, max_nodes: Optional[int] = None) -> ReductionGraph:
        """Explore the reduction graph; see :func:`explore`."""
        return explore(t, self._nodes(max_nodes), self.max_term_size)

    def sn_verdict(
        self, t: Term, max_nodes: Optional[int] = None, spines: bool = True
    ) -> SnVerdict:
        """SN verdict; see :func:`sn_verdict`."""
        return sn_verdict(
            t,
            self._nodes(max_nodes),
            self.max_term_size,
            self.scout_steps,
            self.seed,
            spines,
        )

    def eta(self, t: Term, max_nodes: Optional[int] = None) -> int:
        """Longest reduction length; see :func:`eta`."""
        return eta(t, self._nodes(max_nodes), self.max_term_size)

    def must_pass_through(
        self, u: Term, v: Term, max_nodes: Optional[int] = None
    ) -> Optional[bool]:
        """``U ↪ V``; see :func:`must_pass_through`."""
        return must_pass_through(u, v, self._nodes(max_nodes), self.max_term_size)

    def single_redex_step(self, u: Term, v: Term) -> bool:
        """``U ↷ V``; see :func:`single_redex_step`."""
        return single_redex_step(u, v)

    def prec(self, n: Term, m: Term, max_nodes: Optional[int] = None) -> Optional[bool]:
        """``N ≺ M``; see :func:`prec`."""
        return prec(n, m, self._nodes(max_nodes), self.max_term_size)

    def audit_verdict(self, verdict: SnVerdict) -> bool:
        """Independent verdict check; see :func:`audit_verdict`."""
        return audit_verdict(verdict)

    def to_dot(self, g: ReductionGraph) -> str:
        """DOT export; see :func:`to_dot`."""
        return to_dot(g)
